#pragma once

// Monte Carlo core shared by info_measures and the rate checks: a Gaussian
// channel out = A w + z driven by a signed input y = b o w.

#include <cstdint>
#include <vector>

#include "lgt/info_measures.hpp"

namespace lgt::detail {

struct SignChannel {
  Matrix gain;       // n_out x k
  Matrix in_cov;     // k x k, law of w
  Matrix noise_cov;  // n_out x n_out
  std::vector<double> pi;
};

// Channel from the nodes `in` (signed) to the nodes `out` of a joint
// covariance, using the conditional law of out given in.
SignChannel make_sign_channel(const Matrix& joint, const std::vector<Index>& out, const std::vector<Index>& in,
                              std::vector<double> pi);

// 1/2 log(|S_oo| |S_ii| / |S_{o,i}|).
double gaussian_block_mi(const Matrix& joint, const std::vector<Index>& out, const std::vector<Index>& in);

// log-determinant through Cholesky; throws IllConditioned if not PD.
double log_det_spd(const Matrix& m, const char* module, const std::string& what);

enum class SignTerm { BGivenY, Y };

// Random stream identifiers, mixed into derived seeds.
inline constexpr std::uint64_t kStreamBGivenY = 11;
inline constexpr std::uint64_t kStreamY = 12;
inline constexpr std::uint64_t kStreamSplit = 13;
inline constexpr std::uint64_t kStreamMarginal = 21;
inline constexpr std::uint64_t kStreamConditional = 22;

MIResult sign_term_mc(const SignChannel& ch, SignTerm term, const McConfig& mc, std::uint64_t stream);

// Per-group I(out_g; B | Y) terms evaluated on one stream; the last entry is
// their per-sample sum.
std::vector<MIResult> sign_split_mc(const SignChannel& ch, const std::vector<std::vector<Index>>& groups,
                                    const McConfig& mc, std::uint64_t stream);

// I(out; B) as h(out) - h(out | B) on two independent streams.
MIResult sign_marginal_mc(const SignChannel& ch, const McConfig& mc);

void check_samples(const McConfig& mc, const char* module);

}  // namespace lgt::detail
