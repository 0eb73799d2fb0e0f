#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lgt/tree_model.hpp"

namespace lgt {

enum class MIMethod { ClosedForm, DirectGaussian, MonteCarlo };
std::string_view to_string(MIMethod m);

// All values in nats.
struct MIResult {
  double value = 0.0;
  double std_error = 0.0;
  MIMethod method = MIMethod::ClosedForm;
  std::size_t samples_used = 0;
  std::uint64_t seed = 0;
  std::size_t batch_size = 0;  // Monte Carlo batch plan; 0 for exact values
};

// p(B_h = +1) per hidden node id.
struct BernoulliParams {
  std::map<std::string, double> pi;

  static BernoulliParams uniform(const GaussianTree& tree, double p);
};

// Values in tree.hidden() order, clamped to [0,1]. Throws MissingAssignment
// for an absent hidden node and InvalidArgument for a non-finite value.
std::vector<double> resolve_pi(const GaussianTree& tree, const BernoulliParams& pi);

struct McConfig {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
};

inline constexpr std::size_t kMinSamples = 1000;

// I(X; Y~) from the three determinants of the jointly Gaussian model.
MIResult mi_direct(const GaussianTree& tree);

// I(X; Y~) from sigma_x alone, for trees whose observed nodes are leaves.
MIResult mi_closed_form(const Matrix& sigma_x, const GaussianTree& structure);

// Monte Carlo estimators over the random sign model: Y = B o W with
// W ~ N(0, Sigma_hidden), B_i = +1 w.p. pi_i, X = A W + Z.
MIResult mi_X_B(const GaussianTree& tree, const BernoulliParams& pi, const McConfig& mc);
MIResult mi_X_Y(const GaussianTree& tree, const BernoulliParams& pi, const McConfig& mc);
MIResult mi_X_B_given_Y(const GaussianTree& tree, const BernoulliParams& pi, const McConfig& mc);

struct Decomposition {
  MIResult lhs;                // I(X; B | Y)
  MIResult rhs;                // sum of the per-node terms
  std::vector<MIResult> terms; // I(X_children(h); B_h | Y) per hidden node
};

// Two adjacent hidden nodes, every observed node a leaf of one of them.
Decomposition decomposition_check(const GaussianTree& tree, const BernoulliParams& pi, const McConfig& mc);

enum class SweepMode { Auto, Symmetric, PerNode };

struct CurvePoint {
  std::vector<double> pi;  // shared value (symmetric) or one per hidden node
  MIResult value;
};

struct PiOptimum {
  BernoulliParams pi_star;
  std::vector<CurvePoint> curve;
  bool per_node = false;
};

// Grid values i * step in [0, 1].
std::vector<double> pi_grid(double step);

// Grid search for the pi maximizing I(X; B | Y). Every grid point reuses the
// same random stream, so the curve is smooth in pi. Auto sweeps per node
// when there are exactly two hidden nodes, otherwise on a shared value.
PiOptimum optimize_pi(const GaussianTree& tree, double grid_step, const McConfig& mc, SweepMode mode = SweepMode::Auto);

}  // namespace lgt
