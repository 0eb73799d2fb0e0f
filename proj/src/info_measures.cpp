#include "lgt/info_measures.hpp"

#include <algorithm>
#include <cmath>

#include "sign_channel.hpp"

namespace lgt {

namespace {

constexpr const char* kModule = "info_measures";

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, kModule, msg); }

// Observed block -> all hidden nodes, over the joint in node_order().
detail::SignChannel observed_channel(const GaussianTree& tree, const BernoulliParams& pi) {
  if (tree.hidden_count() == 0) fail(ErrorCode::InvalidArgument, "tree has no hidden nodes");
  const CovarianceModel cov = joint_covariance(tree);
  const Index n = tree.observed_count(), k = tree.hidden_count();
  std::vector<Index> out(n), in(k);
  for (Index i = 0; i < n; ++i) out[i] = i;
  for (Index i = 0; i < k; ++i) in[i] = n + i;
  return detail::make_sign_channel(cov.joint, out, in, resolve_pi(tree, pi));
}

MIResult exact(double value, MIMethod method) {
  MIResult r;
  r.value = value;
  r.method = method;
  return r;
}

}  // namespace

std::string_view to_string(MIMethod m) {
  switch (m) {
    case MIMethod::ClosedForm: return "ClosedForm";
    case MIMethod::DirectGaussian: return "DirectGaussian";
    case MIMethod::MonteCarlo: return "MonteCarlo";
  }
  return "Unknown";
}

BernoulliParams BernoulliParams::uniform(const GaussianTree& tree, double p) {
  BernoulliParams b;
  for (int h : tree.hidden()) b.pi[tree.id(h)] = p;
  return b;
}

std::vector<double> resolve_pi(const GaussianTree& tree, const BernoulliParams& pi) {
  for (const auto& [id, v] : pi.pi) {
    auto node = tree.find(id);
    if (!node) fail(ErrorCode::UnknownNode, "pi given for unknown node '" + id + "'");
    if (tree.is_observed(*node)) fail(ErrorCode::InvalidArgument, "pi given for observed node '" + id + "'");
  }
  std::vector<double> out;
  for (int h : tree.hidden()) {
    auto it = pi.pi.find(tree.id(h));
    if (it == pi.pi.end()) fail(ErrorCode::MissingAssignment, "no pi for hidden node '" + tree.id(h) + "'");
    if (!std::isfinite(it->second)) fail(ErrorCode::InvalidArgument, "pi for '" + tree.id(h) + "' is not finite");
    out.push_back(std::clamp(it->second, 0.0, 1.0));
  }
  return out;
}

MIResult mi_direct(const GaussianTree& tree) {
  const CovarianceModel cov = joint_covariance(tree);
  const Index n = tree.observed_count(), k = tree.hidden_count();
  const double ld_x = detail::log_det_spd(cov.observed_block, kModule, "observed covariance");
  const double ld_y = detail::log_det_spd(cov.joint.bottomRightCorner(k, k), kModule, "hidden covariance");
  const double ld_xy = detail::log_det_spd(cov.joint, kModule, "joint covariance");
  (void)n;
  return exact(0.5 * (ld_x + ld_y - ld_xy), MIMethod::DirectGaussian);
}

MIResult mi_closed_form(const Matrix& sigma_x, const GaussianTree& structure) {
  if (!structure.leaf_only()) fail(ErrorCode::NotLeafOnly, "closed form needs every observed node to be a leaf of a hidden node");
  const Index n = structure.observed_count();
  if (sigma_x.rows() != n || sigma_x.cols() != n)
    fail(ErrorCode::InvalidArgument, "sigma_x is " + std::to_string(sigma_x.rows()) + "x" + std::to_string(sigma_x.cols()) +
                                         ", structure has " + std::to_string(n) + " observed nodes");
  double log_prod = 0.0;
  for (int x : structure.observed()) {
    const int h = structure.neighbors(x).front().node;
    log_prod += std::log1p(-squared_path_correlation(sigma_x, structure, x, h));
  }
  const double ld_x = detail::log_det_spd(sigma_x, kModule, "sigma_x");
  return exact(0.5 * (ld_x - log_prod), MIMethod::ClosedForm);
}

MIResult mi_X_B(const GaussianTree& tree, const BernoulliParams& pi, const McConfig& mc) {
  return detail::sign_marginal_mc(observed_channel(tree, pi), mc);
}

MIResult mi_X_Y(const GaussianTree& tree, const BernoulliParams& pi, const McConfig& mc) {
  return detail::sign_term_mc(observed_channel(tree, pi), detail::SignTerm::Y, mc, detail::kStreamY);
}

MIResult mi_X_B_given_Y(const GaussianTree& tree, const BernoulliParams& pi, const McConfig& mc) {
  return detail::sign_term_mc(observed_channel(tree, pi), detail::SignTerm::BGivenY, mc, detail::kStreamBGivenY);
}

Decomposition decomposition_check(const GaussianTree& tree, const BernoulliParams& pi, const McConfig& mc) {
  const auto& hid = tree.hidden();
  if (hid.size() != 2) fail(ErrorCode::WrongShape, "decomposition needs exactly two hidden nodes, tree has " + std::to_string(hid.size()));
  if (!tree.leaf_only()) fail(ErrorCode::WrongShape, "decomposition needs every observed node to be a leaf");
  std::vector<std::vector<Index>> groups(2);
  bool adjacent = false;
  for (int g = 0; g < 2; ++g) {
    for (const Neighbor& nb : tree.neighbors(hid[g])) {
      if (tree.is_observed(nb.node)) groups[g].push_back(tree.observed_position(nb.node));
      else adjacent = adjacent || nb.node == hid[1 - g];
    }
    if (groups[g].size() < 2)
      fail(ErrorCode::WrongShape, "hidden node '" + tree.id(hid[g]) + "' needs at least two observed leaves");
  }
  if (!adjacent) fail(ErrorCode::WrongShape, "the two hidden nodes must share an edge");

  const auto ch = observed_channel(tree, pi);
  Decomposition d;
  d.lhs = detail::sign_term_mc(ch, detail::SignTerm::BGivenY, mc, detail::kStreamBGivenY);
  auto split = detail::sign_split_mc(ch, groups, mc, detail::kStreamSplit);
  d.rhs = split.back();
  split.pop_back();
  d.terms = std::move(split);
  return d;
}

std::vector<double> pi_grid(double step) {
  if (!(step > 0.0 && step <= 0.25)) fail(ErrorCode::InvalidArgument, "grid step must be in (0, 0.25], got " + std::to_string(step));
  std::vector<double> g;
  for (int i = 0;; ++i) {
    double v = std::round(i * step * 1e12) / 1e12;
    if (v > 1.0 + 1e-9) break;
    g.push_back(std::min(v, 1.0));
  }
  return g;
}

PiOptimum optimize_pi(const GaussianTree& tree, double grid_step, const McConfig& mc, SweepMode mode) {
  const auto grid = pi_grid(grid_step);
  detail::check_samples(mc, kModule);
  const int k = tree.hidden_count();
  if (k == 0) fail(ErrorCode::InvalidArgument, "tree has no hidden nodes");
  if (mode == SweepMode::Auto) mode = k == 2 ? SweepMode::PerNode : SweepMode::Symmetric;
  if (mode == SweepMode::PerNode && k != 2) fail(ErrorCode::InvalidArgument, "per-node sweep needs exactly two hidden nodes");

  auto base = observed_channel(tree, BernoulliParams::uniform(tree, 0.5));
  PiOptimum opt;
  opt.per_node = mode == SweepMode::PerNode;
  auto evaluate = [&](std::vector<double> pis) {
    base.pi = pis;
    opt.curve.push_back({pis, detail::sign_term_mc(base, detail::SignTerm::BGivenY, mc, detail::kStreamBGivenY)});
  };
  if (opt.per_node) {
    for (double a : grid)
      for (double b : grid) evaluate({a, b});
  } else {
    for (double a : grid) evaluate(std::vector<double>(k, a));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < opt.curve.size(); ++i)
    if (opt.curve[i].value.value > opt.curve[best].value.value) best = i;
  for (int i = 0; i < k; ++i) opt.pi_star.pi[tree.id(tree.hidden()[i])] = opt.curve[best].pi[i];
  return opt;
}

}  // namespace lgt
