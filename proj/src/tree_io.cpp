#include "lgt/tree_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace lgt {

namespace {

constexpr const char* kModule = "tree_io";

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& msg) {
  throw Error(ErrorCode::ParseError, kModule, "line " + std::to_string(line_no) + ": " + msg);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

TreeSpec parse_tree_spec(std::string_view text) {
  TreeSpec spec;
  std::size_t line_no = 0, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;

    if (tok[0] == "node") {
      if (tok.size() != 3) parse_fail(line_no, "expected 'node <id> observed|hidden'");
      NodeKind kind;
      if (tok[2] == "observed") kind = NodeKind::Observed;
      else if (tok[2] == "hidden") kind = NodeKind::Hidden;
      else parse_fail(line_no, "node kind must be 'observed' or 'hidden', got '" + std::string(tok[2]) + "'");
      spec.nodes.push_back({std::string(tok[1]), kind});
    } else if (tok[0] == "edge") {
      if (tok.size() != 4) parse_fail(line_no, "expected 'edge <u> <v> <rho>'");
      double rho = 0.0;
      const char* first = tok[3].data();
      const char* last = first + tok[3].size();
      if (*first == '+') ++first;
      auto res = std::from_chars(first, last, rho);
      if (res.ec != std::errc() || res.ptr != last) parse_fail(line_no, "rho '" + std::string(tok[3]) + "' is not a decimal number");
      spec.edges.push_back({std::string(tok[1]), std::string(tok[2]), rho});
    } else {
      parse_fail(line_no, "unknown record '" + std::string(tok[0]) + "'");
    }
    if (end == text.size()) break;
  }
  return spec;
}

TreeSpec load_tree_spec(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw Error(ErrorCode::FileNotFound, kModule, "tree file '" + path.string() + "' does not exist");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, kModule, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tree_spec(buf.str());
}

std::string format_tree_spec(const TreeSpec& spec) {
  std::string out;
  for (const auto& n : spec.nodes)
    out += "node " + n.id + (n.kind == NodeKind::Observed ? " observed\n" : " hidden\n");
  for (const auto& e : spec.edges) out += "edge " + e.u + " " + e.v + " " + format_double(e.rho) + "\n";
  return out;
}

std::string format_tree(const GaussianTree& tree) { return format_tree_spec(tree.spec()); }

}  // namespace lgt
