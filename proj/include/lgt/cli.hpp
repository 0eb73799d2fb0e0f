#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lgt::cli {

enum class Units { Nats, Bits };

struct ExperimentConfig {
  std::string command;
  std::string tree_path;
  std::uint64_t seed = 1;
  std::size_t samples = 100000;
  double grid_step = 0.05;
  std::vector<double> ry;  // per layer, in `units`
  std::vector<double> rb;
  int block_length = 4;
  std::string pi = "0.5";  // "0.5" for every hidden node, or "y1=0.5,y2=0.9"
  std::string output_path; // empty: stdout
  Units units = Units::Nats;
  bool deterministic = false;

  // Command-specific knobs.
  std::string method = "both";     // mi: closed|direct|both
  std::string sweep = "auto";      // optimize-pi: auto|symmetric|per-node
  std::string csv_path;            // optimize-pi curve / synthesize samples
  std::string out_dir = "equivalent_trees";  // enumerate-signs
  std::size_t runs = 1000;         // synthesize
  std::size_t kl_samples = 2000;   // verify-constraints / report-all
  std::size_t cov_runs = 50000;
  double tv_threshold = 1.0;
};

extern const std::vector<std::string> kCommands;

// Parses argv (argv[0] is the program name) and runs the command. Returns the
// process exit code: 0 success, 1 validation error, 2 runtime error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Runs an already parsed configuration.
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

// Comma-separated non-negative reals.
std::vector<double> parse_real_list(const std::string& text, const std::string& field);

}  // namespace lgt::cli
