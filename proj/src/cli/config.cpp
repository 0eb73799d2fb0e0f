#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "lgt/cli.hpp"
#include "lgt/error.hpp"

namespace lgt::cli {

const std::vector<std::string> kCommands = {
    "validate",    "covariance", "enumerate-signs", "sign-report",        "mi",        "mi-conditional",
    "optimize-pi", "rate-check", "synthesize",      "verify-constraints", "report-all"};

std::vector<double> parse_real_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size() || !std::isfinite(v) || v < 0.0)
      throw Error(ErrorCode::InvalidArgument, "cli_report", field + " must be a comma list of finite reals >= 0, got '" + text + "'");
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  // The first bare word must name a command.
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.empty() || a[0] == '-') {
      if (a == "--config" || a == "--out") ++i;
      continue;
    }
    if (std::find(kCommands.begin(), kCommands.end(), a) == kCommands.end()) {
      err << "error: cli_report: UnknownCommand: '" << a << "' is not a command (expected one of:";
      for (const auto& c : kCommands) err << ' ' << c;
      err << ")\n";
      return 1;
    }
    break;
  }

  ExperimentConfig cfg;
  std::string units = "nats", ry, rb;

  CLI::App app{"Latent Gaussian tree sign ambiguity, information measures and channel synthesis", "lgt"};
  app.set_config("--config", "", "Read flags from a TOML/INI file; command-line flags override it");
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--seed", cfg.seed, "Master random seed (positive)");
  app.add_option("--samples", cfg.samples, "Monte Carlo samples for MI estimates");
  app.add_option("--grid", cfg.grid_step, "Grid step for optimize-pi, in (0, 0.25]");
  app.add_option("--ry", ry, "Per-layer Y rates, comma separated");
  app.add_option("--rb", rb, "Per-layer sign rates, comma separated");
  app.add_option("--pi", cfg.pi, "p(B=+1): one value for every hidden node or id=value,...");
  app.add_option("--blocklen", cfg.block_length, "Block length N");
  app.add_option("--units", units, "nats or bits")->check(CLI::IsMember({"nats", "bits"}));
  app.add_option("--out", cfg.output_path, "Write the JSON report here instead of stdout");
  app.add_flag("--deterministic", cfg.deterministic, "Omit the timestamp so reports are byte-identical");
  app.add_option("--method", cfg.method, "mi: closed, direct or both")->check(CLI::IsMember({"closed", "direct", "both"}));
  app.add_option("--sweep", cfg.sweep, "optimize-pi: auto, symmetric or per-node")
      ->check(CLI::IsMember({"auto", "symmetric", "per-node"}));
  app.add_option("--csv", cfg.csv_path, "optimize-pi curve or synthesize samples as CSV");
  app.add_option("--out-dir", cfg.out_dir, "enumerate-signs: directory for the tree files");
  app.add_option("--runs", cfg.runs, "synthesize: number of blocks to emit");
  app.add_option("--kl-samples", cfg.kl_samples, "Samples for the divergence estimate");
  app.add_option("--cov-runs", cfg.cov_runs, "Blocks pooled for the empirical covariance");
  app.add_option("--tv-threshold", cfg.tv_threshold, "Threshold for the total variation bound check");

  const std::vector<std::pair<std::string, std::string>> descriptions = {
      {"validate", "Validate a tree file"},
      {"covariance", "Joint and observed covariance"},
      {"enumerate-signs", "Write all sign-equivalent trees"},
      {"sign-report", "Per-edge sign variables and constraints"},
      {"mi", "I(X;Y~) by closed form and/or determinants"},
      {"mi-conditional", "Monte Carlo I(X;Y), I(X;B|Y), I(X;B)"},
      {"optimize-pi", "Grid search for the pi maximizing I(X;B|Y)"},
      {"rate-check", "Margins of the achievable-rate inequalities"},
      {"synthesize", "Emit synthesized output blocks"},
      {"verify-constraints", "Divergence estimate and codebook constraint checklist"},
      {"report-all", "Run every analysis on one tree"}};
  for (const auto& [name, desc] : descriptions) {
    auto* sub = app.add_subcommand(name, desc);
    sub->fallthrough();
    sub->add_option("tree", cfg.tree_path, "Tree file")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  cfg.units = units == "bits" ? Units::Bits : Units::Nats;
  try {
    if (!ry.empty()) cfg.ry = parse_real_list(ry, "--ry");
    if (!rb.empty()) cfg.rb = parse_real_list(rb, "--rb");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return run(cfg, out, err);
}

}  // namespace lgt::cli
