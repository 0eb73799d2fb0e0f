#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lgt/info_measures.hpp"
#include "lgt/tree_model.hpp"

namespace lgt {

// Rates in nats per channel use.
struct LayerRate {
  double ry = 0.0;
  double rb = 0.0;
};

struct RateTuple {
  std::vector<LayerRate> layers;  // layers[0] is layer 1
  int block_length = 1;
};

inline constexpr std::size_t kCodebookCap = std::size_t{1} << 16;
inline constexpr std::size_t kMixtureCap = std::size_t{1} << 14;

// ceil(exp(N R)), tolerant to rounding just above an integer. Throws
// CapExceeded above kCodebookCap.
std::size_t codebook_size(int block_length, double rate);

struct BoundCheck {
  int layer = 1;
  std::string quantity;  // e.g. "I(X;Y1)" or "I(Y1;Y2,B2|B1)"
  std::string rate;      // "R_Y" or "R_Y+R_B"
  double provided = 0.0;
  double required = 0.0;
  double margin = 0.0;  // provided - required
  double std_error = 0.0;
  MIMethod method = MIMethod::DirectGaussian;
};

// Layer 1: R_Y >= I(X;Y1) and R_Y + R_B >= I(X;Y1,B1). Layer l >= 2 replaces X
// by the unsigned layer l-1 variables, which is the same as conditioning the
// signed ones on B(l-1).
std::vector<BoundCheck> rate_region_check(const GaussianTree& tree, const RateTuple& rates, const BernoulliParams& pi,
                                          const McConfig& mc);

struct LayerCodebook {
  int layer = 1;
  std::vector<int> nodes;  // tree node indices, hidden() order
  std::size_t declared_my = 0;
  std::size_t declared_mb = 0;

  // M_B x (N k_l) of +/-1; column t * k_l + j is node j at time t.
  Eigen::MatrixXi signs;
  // One table per sub-block, M_Y x (N k_l). At the top layer a row is a
  // draw of the layer itself; below it is the innovation around the
  // regression on the layer above.
  std::vector<Matrix> y_tables;

  std::vector<int> block_of_pattern;           // sign mask (bit j: node j is -1) -> sub-block
  std::vector<std::uint32_t> representative;   // first mask of each sub-block
  std::vector<std::size_t> usage;              // sign symbols landing in each sub-block

  Matrix regression;  // k_l x k_{l+1}, empty at the top layer
  Matrix base_cov;    // unsigned law of the table rows (per symbol)
};

struct Codebook {
  RateTuple rates;
  BernoulliParams pi;
  std::uint64_t seed = 0;
  std::vector<LayerCodebook> layers;
  Matrix gain;       // X given unsigned layer-1 variables
  Matrix noise_cov;  // conditional covariance of X given layer 1
  Matrix target_cov; // Sigma_x

  // Y codeword indices address the same row in every sub-block table.
  std::size_t y_rows(std::size_t layer_index) const;
  std::size_t b_rows(std::size_t layer_index) const;
  std::size_t mixture_size() const;
};

// Rates must list one entry per layer (tree.max_layer()).
Codebook build_codebooks(const GaussianTree& tree, const RateTuple& rates, const BernoulliParams& pi, std::uint64_t seed);

struct SynthesisOptions {
  bool zero_noise = false;
  // Shares a common Gaussian factor across output coordinates of the noise:
  // z = sqrt(1-c) L e + sqrt(c) s e0, s the noise standard deviations.
  double noise_coupling = 0.0;
};

struct LayerIndex {
  std::size_t y = 0;
  std::size_t b = 0;
};

struct SynthesisSamples {
  int block_length = 1;
  int observed = 0;
  Matrix values;  // runs x (N n), column t * n + i
  Matrix means;   // noiseless part A w_t
  std::vector<std::vector<LayerIndex>> indices;  // per run, per layer
};

SynthesisSamples synthesize(const GaussianTree& tree, const Codebook& codebook, std::size_t runs, std::uint64_t seed,
                            const SynthesisOptions& options = {});

// x = A (b o y) + noise for a single symbol.
Vector emit_symbol(const LinearChannel& channel, const Vector& y, const Vector& b, const Vector& noise);

// Unsigned layer-1 sequence (k_1 x N) for one choice of indices per layer.
Matrix layer_one_sequence(const Codebook& codebook, const std::vector<LayerIndex>& idx);

struct DivergenceOptions {
  std::size_t cov_runs = 50000;
  std::size_t mi_samples = 100000;
  SynthesisOptions synth;
};

struct SynthesisReport {
  RateTuple rates;
  std::vector<double> pi;
  std::vector<BoundCheck> bound_check;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t mixture_components = 0;

  double kl_estimate = 0.0;
  double kl_std_error = 0.0;
  double tv_upper_bound = 0.0;

  double independence_stat = 0.0;
  double independence_std_error = 0.0;

  double empirical_cov_error = 0.0;
  std::size_t cov_runs = 0;

  Matrix residual_partial_corr;  // between output coordinates, given (y, b)
  Matrix residual_z;
  double max_residual_z = 0.0;

  Matrix lag1_z;  // E[x_t x_{t+1}^T] / standard error
  double max_lag1_z = 0.0;
  std::size_t lag1_pairs = 0;

  std::vector<std::vector<std::size_t>> subblock_usage;
  std::vector<std::vector<std::size_t>> subblock_rows;
  std::vector<std::size_t> sign_rows;
  std::string subblock_sizing;
};

// KL(q || prod p) with q the exact finite mixture over every codeword
// combination, evaluated on samples drawn from q.
SynthesisReport estimate_divergence(const GaussianTree& tree, const Codebook& codebook, std::size_t samples,
                                    std::uint64_t seed, const DivergenceOptions& options = {});

struct ConstraintCheck {
  int id = 0;
  std::string name;
  bool passed = false;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string detail;
};

std::vector<ConstraintCheck> verify_codebook_constraints(const GaussianTree& tree, const Codebook& codebook,
                                                         const SynthesisReport& report, double tv_threshold = 1.0);

}  // namespace lgt
