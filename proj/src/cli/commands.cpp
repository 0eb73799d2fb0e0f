#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "lgt/cli.hpp"
#include "lgt/error.hpp"
#include "lgt/info_measures.hpp"
#include "lgt/sign_ambiguity.hpp"
#include "lgt/synthesis.hpp"
#include "lgt/tree_io.hpp"
#include "lgt/tree_model.hpp"
#include "report_json.hpp"

#ifndef LGT_VERSION
#define LGT_VERSION "0.0.0"
#endif

namespace lgt::cli {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, "cli_report", msg); }

template <class T>
std::string str(T v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Shortest round-trip decimal.
std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path() && !fs::exists(path.parent_path())) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cli_report", "cannot open " + tmp.string() + " for writing");
    f << text;
    if (!f.flush()) throw Error(ErrorCode::IoError, "cli_report", "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cli_report", "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool needs_mc(const std::string& cmd) {
  return cmd == "mi-conditional" || cmd == "optimize-pi" || cmd == "rate-check" || cmd == "synthesize" ||
         cmd == "verify-constraints" || cmd == "report-all";
}

void validate_config(const ExperimentConfig& c) {
  if (c.tree_path.empty()) bad("tree path is required");
  if (c.seed == 0) bad("--seed must be positive (got 0)");
  if (needs_mc(c.command) && c.samples < kMinSamples)
    bad("--samples must be >= " + std::to_string(kMinSamples) + " (got " + std::to_string(c.samples) + ")");
  if (!(c.grid_step > 0.0 && c.grid_step <= 0.25)) bad("--grid must lie in (0, 0.25] (got " + str(c.grid_step) + ")");
  if (c.block_length < 1) bad("--blocklen must be >= 1 (got " + std::to_string(c.block_length) + ")");
  if (c.ry.empty() != c.rb.empty()) bad("--ry and --rb must be given together");
  if (c.ry.size() != c.rb.size())
    bad("--ry lists " + std::to_string(c.ry.size()) + " layer(s) but --rb lists " + std::to_string(c.rb.size()));
  if (c.runs < 1) bad("--runs must be >= 1 (got 0)");
  if (c.kl_samples < 100) bad("--kl-samples must be >= 100 (got " + std::to_string(c.kl_samples) + ")");
  if (c.cov_runs < 1) bad("--cov-runs must be >= 1 (got 0)");
  if (!(c.tv_threshold > 0.0)) bad("--tv-threshold must be > 0 (got " + str(c.tv_threshold) + ")");
}

double parse_unit_interval(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size() || !(v >= 0.0 && v <= 1.0))
    bad("--pi " + what + " must be a probability in [0, 1] (got '" + text + "')");
  return v;
}

BernoulliParams parse_pi(const GaussianTree& tree, const std::string& text) {
  if (text.find('=') == std::string::npos) return BernoulliParams::uniform(tree, parse_unit_interval(text, "value"));
  BernoulliParams p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) bad("--pi entry '" + item + "' is not of the form id=value");
    const std::string id = item.substr(0, eq);
    p.pi[id] = parse_unit_interval(item.substr(eq + 1), "entry for " + id);
  }
  resolve_pi(tree, p);  // unknown, observed or missing nodes
  return p;
}

Json config_echo(const ExperimentConfig& c) {
  Json j;
  j["command"] = c.command;
  j["tree"] = c.tree_path;
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["grid_step"] = c.grid_step;
  j["ry"] = c.ry;
  j["rb"] = c.rb;
  j["block_length"] = c.block_length;
  j["pi"] = c.pi;
  j["units"] = unit_name(c.units);
  j["method"] = c.method;
  j["sweep"] = c.sweep;
  j["runs"] = c.runs;
  j["kl_samples"] = c.kl_samples;
  j["cov_runs"] = c.cov_runs;
  j["tv_threshold"] = c.tv_threshold;
  return j;
}

struct Context {
  const ExperimentConfig& cfg;
  const GaussianTree& tree;
  BernoulliParams pi;
  std::string summary;

  McConfig mc() const { return McConfig{cfg.samples, cfg.seed}; }
  double u(double nats) const { return in_units(nats, cfg.units); }
};

// Rates from the flags, or the frontier plus 0.2 nats on each rate.
Json resolve_rates(Context& ctx, RateTuple& rates) {
  const int L = ctx.tree.max_layer();
  rates.block_length = ctx.cfg.block_length;
  rates.layers.clear();
  if (!ctx.cfg.ry.empty()) {
    if (static_cast<int>(ctx.cfg.ry.size()) != L)
      bad("--ry/--rb list " + std::to_string(ctx.cfg.ry.size()) + " layer(s) but the tree has " + std::to_string(L));
    for (int l = 0; l < L; ++l) rates.layers.push_back({to_nats(ctx.cfg.ry[l], ctx.cfg.units), to_nats(ctx.cfg.rb[l], ctx.cfg.units)});
    return "flags";
  }
  RateTuple zero;
  zero.block_length = ctx.cfg.block_length;
  zero.layers.assign(L, LayerRate{});
  const auto frontier = rate_region_check(ctx.tree, zero, ctx.pi, ctx.mc());
  for (int l = 0; l < L; ++l) {
    const double ry = frontier[2 * l].required;
    const double rb = std::max(0.0, frontier[2 * l + 1].required - ry);
    rates.layers.push_back({ry + 0.2, rb + 0.2});
  }
  return "frontier + 0.2 nats";
}

Json rates_json(const Context& ctx, const RateTuple& r) {
  Json a = Json::array();
  for (const auto& l : r.layers) a.push_back(Json{{"ry", ctx.u(l.ry)}, {"rb", ctx.u(l.rb)}});
  return a;
}

Json cmd_validate(Context& ctx) {
  const auto& t = ctx.tree;
  Json j;
  j["valid"] = true;
  j["hidden"] = t.hidden_count();
  j["observed"] = t.observed_count();
  j["edges"] = t.edges().size();
  j["layers"] = t.max_layer();
  j["leaf_only"] = t.leaf_only();
  ctx.summary = "valid tree: k=" + std::to_string(t.hidden_count()) + ", n=" + std::to_string(t.observed_count());
  return j;
}

Json cmd_covariance(Context& ctx) {
  const auto cov = joint_covariance(ctx.tree);
  Json ids = Json::array();
  for (int v : cov.node_order) ids.push_back(ctx.tree.id(v));
  Json j;
  j["node_order"] = ids;
  j["joint"] = matrix_json(cov.joint);
  j["observed"] = matrix_json(cov.observed_block);
  j["min_eigenvalue"] = cov.min_eigenvalue;
  j["tree_determinant"] = tree_determinant<double>(ctx.tree);
  j["direct_determinant"] = cov.joint.determinant();
  ctx.summary = "covariance: " + std::to_string(cov.joint.rows()) + " nodes, min eigenvalue " + str(cov.min_eigenvalue);
  return j;
}

Json cmd_enumerate(Context& ctx, bool write_files) {
  const auto trees = enumerate_equivalent_trees(ctx.tree);
  const bool equivalent = verify_equivalence(trees);
  Json members = Json::array();
  for (std::size_t m = 0; m < trees.size(); ++m) {
    Json e;
    e["mask"] = m;
    e["signs"] = assignment_from_mask(ctx.tree, m);
    if (write_files) {
      const fs::path file = fs::path(ctx.cfg.out_dir) / ("tree_" + std::to_string(m) + ".tree");
      write_atomic(file, format_tree(trees[m]));
      e["file"] = file.generic_string();
    }
    members.push_back(std::move(e));
  }
  Json j;
  j["count"] = trees.size();
  j["equivalent"] = equivalent;
  j["tolerance"] = 1e-12;
  j["members"] = members;
  j["sign_classes"] = sign_report_json(sign_class_report(ctx.tree));
  ctx.summary = "enumerated " + std::to_string(trees.size()) + " equivalent trees" + (equivalent ? "" : " (NOT equivalent)");
  return j;
}

Json cmd_sign_report(Context& ctx) {
  const auto r = sign_class_report(ctx.tree);
  ctx.summary = "sign report: (" + std::to_string(r.edge_sign_variables) + ", " + std::to_string(r.constraints.size()) +
                ", " + std::to_string(r.free_variables) + ")";
  return sign_report_json(r);
}

Json cmd_mi(Context& ctx) {
  Json j;
  j["units"] = unit_name(ctx.cfg.units);
  const std::string& m = ctx.cfg.method;
  std::optional<MIResult> closed, direct;
  if (m == "closed" || m == "both") closed = mi_closed_form(observed_covariance(ctx.tree), ctx.tree);
  if (m == "direct" || m == "both") direct = mi_direct(ctx.tree);
  if (closed) j["closed_form"] = mi_json(*closed, ctx.cfg.units);
  if (direct) j["direct"] = mi_json(*direct, ctx.cfg.units);
  if (closed && direct) j["abs_difference"] = ctx.u(std::abs(closed->value - direct->value));
  ctx.summary = "I(X;Y~) = " + str(ctx.u(closed ? closed->value : direct->value)) + " " + unit_name(ctx.cfg.units);
  return j;
}

Json cmd_mi_conditional(Context& ctx) {
  const auto mc = ctx.mc();
  const MIResult xy = mi_X_Y(ctx.tree, ctx.pi, mc);
  const MIResult xbgy = mi_X_B_given_Y(ctx.tree, ctx.pi, mc);
  const MIResult xb = mi_X_B(ctx.tree, ctx.pi, mc);
  const MIResult total = mi_direct(ctx.tree);
  Json j;
  j["units"] = unit_name(ctx.cfg.units);
  j["pi"] = pi_json(ctx.tree, resolve_pi(ctx.tree, ctx.pi));
  j["I_X_Y"] = mi_json(xy, ctx.cfg.units);
  j["I_X_B_given_Y"] = mi_json(xbgy, ctx.cfg.units);
  j["I_X_B"] = mi_json(xb, ctx.cfg.units);

  const double sum = xy.value + xbgy.value;
  const double se = std::hypot(xy.std_error, xbgy.std_error);
  j["chain"] = Json{{"sum", ctx.u(sum)},
                    {"I_X_Ytilde", ctx.u(total.value)},
                    {"difference", ctx.u(sum - total.value)},
                    {"combined_std_error", ctx.u(se)},
                    {"within_3_sigma", std::abs(sum - total.value) <= 3.0 * se}};
  j["I_X_B_within_3_sigma_of_zero"] = std::abs(xb.value) <= 3.0 * xb.std_error;

  try {
    const Decomposition d = decomposition_check(ctx.tree, ctx.pi, mc);
    Json terms = Json::array();
    for (const auto& t : d.terms) terms.push_back(mi_json(t, ctx.cfg.units));
    const double dse = std::hypot(d.lhs.std_error, d.rhs.std_error);
    j["decomposition"] = Json{{"lhs", mi_json(d.lhs, ctx.cfg.units)},
                              {"rhs", mi_json(d.rhs, ctx.cfg.units)},
                              {"terms", terms},
                              {"difference", ctx.u(d.lhs.value - d.rhs.value)},
                              {"within_3_sigma", std::abs(d.lhs.value - d.rhs.value) <= 3.0 * dse}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::WrongShape) throw;
    j["decomposition"] = Json{{"skipped", e.what()}};
  }
  ctx.summary = "I(X;Y) + I(X;B|Y) = " + str(ctx.u(sum)) + " vs I(X;Y~) = " + str(ctx.u(total.value)) + " " +
                unit_name(ctx.cfg.units);
  return j;
}

Json cmd_optimize_pi(Context& ctx) {
  const SweepMode mode = ctx.cfg.sweep == "symmetric" ? SweepMode::Symmetric
                         : ctx.cfg.sweep == "per-node" ? SweepMode::PerNode
                                                       : SweepMode::Auto;
  const PiOptimum opt = optimize_pi(ctx.tree, ctx.cfg.grid_step, ctx.mc(), mode);
  const auto star = resolve_pi(ctx.tree, opt.pi_star);
  Json j;
  j["units"] = unit_name(ctx.cfg.units);
  j["sweep"] = opt.per_node ? "per-node" : "symmetric";
  j["pi_star"] = pi_json(ctx.tree, star);
  Json curve = Json::array();
  double best = -1.0;
  for (const auto& p : opt.curve) {
    curve.push_back(Json{{"pi", p.pi}, {"value", ctx.u(p.value.value)}, {"std_error", ctx.u(p.value.std_error)}});
    best = std::max(best, p.value.value);
  }
  j["max_value"] = ctx.u(best);
  j["curve"] = curve;

  if (!ctx.cfg.csv_path.empty()) {
    std::ostringstream csv;
    if (opt.per_node) {
      for (int h : ctx.tree.hidden()) csv << "pi_" << ctx.tree.id(h) << ',';
    } else {
      csv << "pi,";
    }
    csv << "value,std_error\n";
    for (const auto& p : opt.curve) {
      for (double v : p.pi) csv << num(v) << ',';
      csv << num(ctx.u(p.value.value)) << ',' << num(ctx.u(p.value.std_error)) << '\n';
    }
    write_atomic(ctx.cfg.csv_path, csv.str());
    j["csv"] = ctx.cfg.csv_path;
  }
  std::string s = "pi_star =";
  for (double v : star) s += " " + str(v);
  ctx.summary = s;
  return j;
}

Json cmd_rate_check(Context& ctx) {
  RateTuple rates;
  const Json source = resolve_rates(ctx, rates);
  const auto checks = rate_region_check(ctx.tree, rates, ctx.pi, ctx.mc());
  Json j;
  j["units"] = unit_name(ctx.cfg.units);
  j["rates_source"] = source;
  j["rates"] = rates_json(ctx, rates);
  Json a = Json::array();
  bool all = true;
  for (const auto& b : checks) {
    a.push_back(bound_json(b, ctx.cfg.units));
    all = all && b.margin >= 0.0;
  }
  j["inequalities"] = a;
  j["all_satisfied"] = all;
  ctx.summary = std::string("rate check: ") + (all ? "all inequalities satisfied" : "some inequality violated");
  return j;
}

Json cmd_synthesize(Context& ctx) {
  RateTuple rates;
  const Json source = resolve_rates(ctx, rates);
  const Codebook cb = build_codebooks(ctx.tree, rates, ctx.pi, ctx.cfg.seed);
  const SynthesisSamples s = synthesize(ctx.tree, cb, ctx.cfg.runs, ctx.cfg.seed);

  const Index n = s.observed;
  const Index N = s.block_length;
  Matrix pooled(s.values.rows() * N, n);
  for (Index r = 0; r < s.values.rows(); ++r)
    for (Index t = 0; t < N; ++t) pooled.row(r * N + t) = s.values.block(r, t * n, 1, n);
  const Matrix emp = pooled.transpose() * pooled / static_cast<double>(pooled.rows());
  const double err = (emp - cb.target_cov).cwiseAbs().maxCoeff();

  Json j;
  j["rates_source"] = source;
  j["rates"] = rates_json(ctx, rates);
  j["codebook"] = codebook_json(ctx.tree, cb);
  j["runs"] = ctx.cfg.runs;
  j["empirical_cov_error"] = err;
  if (!ctx.cfg.csv_path.empty()) {
    std::ostringstream csv;
    csv << "run,t,node,value\n";
    const auto& obs = ctx.tree.observed();
    for (Index r = 0; r < s.values.rows(); ++r)
      for (Index t = 0; t < N; ++t)
        for (Index i = 0; i < n; ++i) csv << r << ',' << t << ',' << ctx.tree.id(obs[i]) << ',' << num(s.values(r, t * n + i)) << '\n';
    write_atomic(ctx.cfg.csv_path, csv.str());
    j["csv"] = ctx.cfg.csv_path;
  }
  ctx.summary = "synthesized " + std::to_string(ctx.cfg.runs) + " blocks of length " + std::to_string(N) +
                ", max covariance error " + str(err);
  return j;
}

Json cmd_verify(Context& ctx) {
  RateTuple rates;
  const Json source = resolve_rates(ctx, rates);
  const Codebook cb = build_codebooks(ctx.tree, rates, ctx.pi, ctx.cfg.seed);
  DivergenceOptions opt;
  opt.cov_runs = ctx.cfg.cov_runs;
  opt.mi_samples = ctx.cfg.samples;
  const SynthesisReport rep = estimate_divergence(ctx.tree, cb, ctx.cfg.kl_samples, ctx.cfg.seed, opt);
  const auto checks = verify_codebook_constraints(ctx.tree, cb, rep, ctx.cfg.tv_threshold);
  Json j;
  j["units"] = unit_name(ctx.cfg.units);
  j["rates_source"] = source;
  j["codebook"] = codebook_json(ctx.tree, cb);
  j["synthesis"] = synthesis_report_json(ctx.tree, rep, ctx.cfg.units);
  Json a = Json::array();
  int passed = 0;
  for (const auto& c : checks) {
    a.push_back(constraint_json(c));
    passed += c.passed ? 1 : 0;
  }
  j["constraints"] = a;
  j["all_passed"] = passed == static_cast<int>(checks.size());
  ctx.summary = "constraints passed: " + std::to_string(passed) + "/" + std::to_string(checks.size()) + ", KL = " +
                str(ctx.u(rep.kl_estimate));
  return j;
}

Json cmd_report_all(Context& ctx) {
  const std::vector<std::pair<std::string, std::function<Json(Context&)>>> sections = {
      {"validate", cmd_validate},
      {"covariance", cmd_covariance},
      {"enumerate_signs", [](Context& c) { return cmd_enumerate(c, false); }},
      {"sign_report", cmd_sign_report},
      {"mi", cmd_mi},
      {"mi_conditional", cmd_mi_conditional},
      {"optimize_pi", cmd_optimize_pi},
      {"rate_check", cmd_rate_check},
      {"verify_constraints", cmd_verify}};
  Json j;
  int ok = 0;
  for (const auto& [name, fn] : sections) {
    try {
      j[name] = fn(ctx);
      ++ok;
    } catch (const Error& e) {
      j[name] = Json{{"error", e.what()}, {"code", std::string(to_string(e.code()))}};
    }
  }
  ctx.summary = "report-all: " + std::to_string(ok) + "/" + std::to_string(sections.size()) + " sections completed";
  return j;
}

}  // namespace

int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate_config(config);
    const GaussianTree tree = validate_tree(load_tree_spec(config.tree_path));
    Context ctx{config, tree, parse_pi(tree, config.pi), ""};

    Json result;
    const std::string& c = config.command;
    if (c == "validate") result = cmd_validate(ctx);
    else if (c == "covariance") result = cmd_covariance(ctx);
    else if (c == "enumerate-signs") result = cmd_enumerate(ctx, true);
    else if (c == "sign-report") result = cmd_sign_report(ctx);
    else if (c == "mi") result = cmd_mi(ctx);
    else if (c == "mi-conditional") result = cmd_mi_conditional(ctx);
    else if (c == "optimize-pi") result = cmd_optimize_pi(ctx);
    else if (c == "rate-check") result = cmd_rate_check(ctx);
    else if (c == "synthesize") result = cmd_synthesize(ctx);
    else if (c == "verify-constraints") result = cmd_verify(ctx);
    else if (c == "report-all") result = cmd_report_all(ctx);
    else throw Error(ErrorCode::UnknownCommand, "cli_report", "'" + c + "' is not a command");

    Json report;
    report["command"] = c;
    report["version"] = LGT_VERSION;
    report["config"] = config_echo(config);
    if (!config.deterministic) report["timestamp"] = utc_timestamp();
    report["result"] = std::move(result);
    const std::string text = report.dump(2) + "\n";

    if (config.output_path.empty()) {
      out << text;
      err << ctx.summary << "\n";
    } else {
      write_atomic(config.output_path, text);
      out << ctx.summary << "\n";
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_validation() ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: cli_report: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace lgt::cli
