#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lgt/tree_model.hpp"

namespace lgt {

// Line format:
//   node <id> observed|hidden
//   edge <u> <v> <rho>
// '#' starts a comment; blank lines are ignored.
TreeSpec parse_tree_spec(std::string_view text);
TreeSpec load_tree_spec(const std::filesystem::path& path);

// Shortest round-trip decimal for rho.
std::string format_tree_spec(const TreeSpec& spec);
std::string format_tree(const GaussianTree& tree);

}  // namespace lgt
