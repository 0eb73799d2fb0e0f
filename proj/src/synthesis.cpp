#include "lgt/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "lgt/parallel.hpp"
#include "sign_channel.hpp"

namespace lgt {

namespace {

constexpr const char* kModule = "synthesis_engine";
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kStructuralZero = 1e-12;
constexpr int kMaxLayerWidth = 16;

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, kModule, msg); }

Matrix select(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

Matrix cholesky_l(const Matrix& m, const std::string& what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) fail(ErrorCode::IllConditioned, what + " is not positive definite");
  return llt.matrixL();
}

double log_sum_exp(const double* v, std::size_t n) {
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) hi = std::max(hi, v[i]);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - hi);
  return hi + std::log(s);
}

std::vector<Index> joint_rows(const GaussianTree& tree, const std::vector<int>& hidden_nodes) {
  std::vector<Index> out;
  for (int h : hidden_nodes) out.push_back(tree.observed_count() + tree.hidden_position(h));
  return out;
}

std::vector<Index> observed_rows(const GaussianTree& tree) {
  std::vector<Index> out(tree.observed_count());
  for (Index i = 0; i < tree.observed_count(); ++i) out[i] = i;
  return out;
}

std::vector<double> layer_pi(const GaussianTree& tree, const std::vector<double>& all, const std::vector<int>& nodes) {
  std::vector<double> out;
  for (int h : nodes) out.push_back(all[tree.hidden_position(h)]);
  return out;
}

void check_coupling(double c) {
  if (!(c >= 0.0 && c < 1.0)) fail(ErrorCode::InvalidArgument, "noise_coupling must be in [0, 1), got " + std::to_string(c));
}

void check_codebook(const GaussianTree& tree, const Codebook& cb) {
  if (static_cast<int>(cb.layers.size()) != tree.max_layer() || cb.gain.rows() != tree.observed_count())
    fail(ErrorCode::InvalidArgument, "codebook was not built for this tree");
  for (std::size_t l = 0; l < cb.layers.size(); ++l)
    if (cb.y_rows(l) == 0 || cb.b_rows(l) == 0)
      fail(ErrorCode::InvalidArgument, "layer " + std::to_string(l + 1) + " codebook is empty");
}

}  // namespace

std::size_t codebook_size(int block_length, double rate) {
  if (block_length < 1) fail(ErrorCode::InvalidArgument, "block length must be at least 1, got " + std::to_string(block_length));
  if (!std::isfinite(rate) || rate < 0.0) fail(ErrorCode::InvalidArgument, "rate must be finite and >= 0, got " + std::to_string(rate));
  const double exponent = block_length * rate;
  if (exponent > std::log(static_cast<double>(kCodebookCap)) + 1e-9)
    fail(ErrorCode::CapExceeded, "codebook size exp(" + std::to_string(exponent) + ") exceeds the cap of " + std::to_string(kCodebookCap));
  const double x = std::exp(exponent);
  const double m = std::ceil(x - 1e-9 * x);
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

std::vector<BoundCheck> rate_region_check(const GaussianTree& tree, const RateTuple& rates, const BernoulliParams& pi,
                                          const McConfig& mc) {
  const int L = tree.max_layer();
  if (L < 1) fail(ErrorCode::InvalidArgument, "tree has no hidden nodes");
  if (static_cast<int>(rates.layers.size()) != L)
    fail(ErrorCode::InvalidArgument, "rates list " + std::to_string(rates.layers.size()) + " layer(s), tree has " + std::to_string(L));
  const auto pis = resolve_pi(tree, pi);
  const CovarianceModel cov = joint_covariance(tree);

  std::vector<BoundCheck> out;
  for (int l = 1; l <= L; ++l) {
    const auto in_nodes = tree.layer_nodes(l);
    const auto in = joint_rows(tree, in_nodes);
    const auto src = l == 1 ? observed_rows(tree) : joint_rows(tree, tree.layer_nodes(l - 1));
    const std::string below = l == 1 ? "X" : "Y" + std::to_string(l - 1);
    const std::string cond = l == 1 ? "" : "|B" + std::to_string(l - 1);
    const std::string lay = std::to_string(l);
    const LayerRate& r = rates.layers[l - 1];

    const auto ch = detail::make_sign_channel(cov.joint, src, in, layer_pi(tree, pis, in_nodes));
    const MIResult y_only = detail::sign_term_mc(ch, detail::SignTerm::Y, mc, detail::kStreamY);
    BoundCheck a;
    a.layer = l;
    a.quantity = "I(" + below + ";Y" + lay + cond + ")";
    a.rate = "R_Y";
    a.provided = r.ry;
    a.required = y_only.value;
    a.margin = a.provided - a.required;
    a.std_error = y_only.std_error;
    a.method = MIMethod::MonteCarlo;
    out.push_back(a);

    BoundCheck b;
    b.layer = l;
    b.quantity = "I(" + below + ";Y" + lay + ",B" + lay + cond + ")";
    b.rate = "R_Y+R_B";
    b.provided = r.ry + r.rb;
    b.required = detail::gaussian_block_mi(cov.joint, src, in);
    b.margin = b.provided - b.required;
    b.method = MIMethod::DirectGaussian;
    out.push_back(b);
  }
  return out;
}

std::size_t Codebook::y_rows(std::size_t li) const {
  std::size_t rows = std::numeric_limits<std::size_t>::max();
  for (const auto& t : layers[li].y_tables) rows = std::min<std::size_t>(rows, t.rows());
  return layers[li].y_tables.empty() ? 0 : rows;
}

std::size_t Codebook::b_rows(std::size_t li) const { return layers[li].signs.rows(); }

std::size_t Codebook::mixture_size() const {
  std::size_t total = 1;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::size_t f = y_rows(l) * b_rows(l);
    if (f != 0 && total > std::numeric_limits<std::size_t>::max() / f) return std::numeric_limits<std::size_t>::max();
    total *= f;
  }
  return total;
}

Codebook build_codebooks(const GaussianTree& tree, const RateTuple& rates, const BernoulliParams& pi, std::uint64_t seed) {
  const int L = tree.max_layer();
  if (L < 1) fail(ErrorCode::InvalidArgument, "tree has no hidden nodes");
  if (static_cast<int>(rates.layers.size()) != L)
    fail(ErrorCode::InvalidArgument, "rates list " + std::to_string(rates.layers.size()) + " layer(s), tree has " + std::to_string(L));
  const int N = rates.block_length;
  const auto pis = resolve_pi(tree, pi);
  const CovarianceModel cov = joint_covariance(tree);

  Codebook cb;
  cb.rates = rates;
  cb.pi = pi;
  cb.seed = seed;
  cb.target_cov = cov.observed_block;
  cb.layers.resize(L);
  for (int l = 1; l <= L; ++l) {
    cb.layers[l - 1].declared_my = codebook_size(N, rates.layers[l - 1].ry);
    cb.layers[l - 1].declared_mb = codebook_size(N, rates.layers[l - 1].rb);
  }

  for (int l = L; l >= 1; --l) {
    LayerCodebook& lc = cb.layers[l - 1];
    lc.layer = l;
    lc.nodes = tree.layer_nodes(l);
    const int k = static_cast<int>(lc.nodes.size());
    if (k > kMaxLayerWidth)
      fail(ErrorCode::TooManyHidden, "layer " + std::to_string(l) + " has " + std::to_string(k) + " nodes, limit " + std::to_string(kMaxLayerWidth));
    const auto in = joint_rows(tree, lc.nodes);
    const Matrix s_ll = select(cov.joint, in, in);
    if (l < L) {
      const auto up = joint_rows(tree, tree.layer_nodes(l + 1));
      const Matrix s_lu = select(cov.joint, in, up), s_uu = select(cov.joint, up, up);
      lc.regression = s_uu.llt().solve(s_lu.transpose()).transpose();
      lc.base_cov = s_ll - lc.regression * s_lu.transpose();
      lc.base_cov = (0.5 * (lc.base_cov + lc.base_cov.transpose())).eval();
    } else {
      lc.regression = Matrix(k, 0);
      lc.base_cov = s_ll;
    }

    // Sign patterns inducing the same law of the layer share a sub-block:
    // the covariance sees b_i b_j where it couples i and j, the regression
    // mean sees b_i where row i is non-zero.
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> singles;
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j)
        if (std::abs(lc.base_cov(i, j)) > kStructuralZero) pairs.emplace_back(i, j);
      if (lc.regression.cols() > 0 && lc.regression.row(i).cwiseAbs().maxCoeff() > kStructuralZero) singles.push_back(i);
    }
    std::map<std::vector<char>, int> key_to_block;
    const std::uint32_t patterns = 1u << k;
    lc.block_of_pattern.assign(patterns, -1);
    for (std::uint32_t mask = 0; mask < patterns; ++mask) {
      auto neg = [&](int i) { return static_cast<char>((mask >> i) & 1u); };
      std::vector<char> key;
      for (auto [i, j] : pairs) key.push_back(neg(i) ^ neg(j));
      for (int i : singles) key.push_back(neg(i));
      auto [it, inserted] = key_to_block.emplace(key, static_cast<int>(lc.representative.size()));
      if (inserted) lc.representative.push_back(mask);
      lc.block_of_pattern[mask] = it->second;
    }

    const auto node_pi = layer_pi(tree, pis, lc.nodes);
    {
      std::mt19937_64 rng(derive_seed(seed, 100 + l, 0));
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      lc.signs.resize(static_cast<Index>(lc.declared_mb), N * k);
      for (Index r = 0; r < lc.signs.rows(); ++r)
        for (int t = 0; t < N; ++t)
          for (int j = 0; j < k; ++j) lc.signs(r, t * k + j) = unif(rng) < node_pi[j] ? 1 : -1;
    }
    lc.usage.assign(lc.representative.size(), 0);
    for (Index r = 0; r < lc.signs.rows(); ++r)
      for (int t = 0; t < N; ++t) {
        std::uint32_t mask = 0;
        for (int j = 0; j < k; ++j)
          if (lc.signs(r, t * k + j) < 0) mask |= 1u << j;
        ++lc.usage[lc.block_of_pattern[mask]];
      }

    for (std::size_t s = 0; s < lc.representative.size(); ++s) {
      Vector d(k);
      for (int j = 0; j < k; ++j) d(j) = (lc.representative[s] >> j) & 1u ? -1.0 : 1.0;
      const Matrix chol = cholesky_l(d.asDiagonal() * lc.base_cov * d.asDiagonal(), "layer " + std::to_string(l) + " codeword covariance");
      std::mt19937_64 rng(derive_seed(seed, 200 + l, s));
      std::normal_distribution<double> normal;
      Matrix table(static_cast<Index>(lc.declared_my), N * k);
      Vector e(k);
      for (Index r = 0; r < table.rows(); ++r)
        for (int t = 0; t < N; ++t) {
          for (int j = 0; j < k; ++j) e(j) = normal(rng);
          table.row(r).segment(t * k, k) = (chol * e).transpose();
        }
      lc.y_tables.push_back(std::move(table));
    }
  }

  const auto ch = detail::make_sign_channel(cov.joint, observed_rows(tree), joint_rows(tree, cb.layers[0].nodes), {});
  cb.gain = ch.gain;
  cb.noise_cov = ch.noise_cov;
  return cb;
}

Matrix layer_one_sequence(const Codebook& cb, const std::vector<LayerIndex>& idx) {
  const int N = cb.rates.block_length;
  const int L = static_cast<int>(cb.layers.size());
  Matrix upper;
  for (int li = L - 1; li >= 0; --li) {
    const LayerCodebook& lc = cb.layers[li];
    const int k = static_cast<int>(lc.nodes.size());
    Matrix w(k, N);
    Vector b(k), y(k);
    for (int t = 0; t < N; ++t) {
      std::uint32_t mask = 0;
      for (int j = 0; j < k; ++j) {
        b(j) = lc.signs(static_cast<Index>(idx[li].b), t * k + j);
        if (b(j) < 0) mask |= 1u << j;
      }
      const Matrix& table = lc.y_tables[lc.block_of_pattern[mask]];
      y = table.row(static_cast<Index>(idx[li].y)).segment(t * k, k).transpose();
      if (li < L - 1) y += b.cwiseProduct(lc.regression * upper.col(t));
      w.col(t) = b.cwiseProduct(y);
    }
    upper = std::move(w);
  }
  return upper;
}

Vector emit_symbol(const LinearChannel& channel, const Vector& y, const Vector& b, const Vector& noise) {
  if (y.size() != channel.gain.cols() || b.size() != y.size() || noise.size() != channel.gain.rows())
    fail(ErrorCode::InvalidArgument, "emit_symbol dimension mismatch");
  return channel.gain * b.cwiseProduct(y) + noise;
}

SynthesisSamples synthesize(const GaussianTree& tree, const Codebook& cb, std::size_t runs, std::uint64_t seed,
                            const SynthesisOptions& opt) {
  check_codebook(tree, cb);
  check_coupling(opt.noise_coupling);
  const int N = cb.rates.block_length;
  const Index n = cb.gain.rows();
  const int L = static_cast<int>(cb.layers.size());

  SynthesisSamples out;
  out.block_length = N;
  out.observed = static_cast<int>(n);
  out.values.resize(static_cast<Index>(runs), N * n);
  out.means.resize(static_cast<Index>(runs), N * n);
  out.indices.assign(runs, std::vector<LayerIndex>(L));

  const Matrix chol = opt.zero_noise ? Matrix::Zero(n, n) : cholesky_l(cb.noise_cov, "channel noise covariance");
  const Vector sd = cb.noise_cov.diagonal().cwiseSqrt();
  const double keep = std::sqrt(1.0 - opt.noise_coupling), share = std::sqrt(opt.noise_coupling);

  const std::size_t batches = (runs + kBatchSize - 1) / kBatchSize;
  parallel_for(batches, [&](std::size_t bi) {
    std::mt19937_64 rng(derive_seed(seed, 300, bi));
    std::normal_distribution<double> normal;
    Vector e(n), mu(n);
    const std::size_t end = std::min(runs, (bi + 1) * kBatchSize);
    for (std::size_t r = bi * kBatchSize; r < end; ++r) {
      auto& idx = out.indices[r];
      for (int li = L - 1; li >= 0; --li) {
        idx[li].y = std::uniform_int_distribution<std::size_t>(0, cb.y_rows(li) - 1)(rng);
        idx[li].b = std::uniform_int_distribution<std::size_t>(0, cb.b_rows(li) - 1)(rng);
      }
      const Matrix w1 = layer_one_sequence(cb, idx);
      for (int t = 0; t < N; ++t) {
        mu.noalias() = cb.gain * w1.col(t);
        out.means.row(r).segment(t * n, n) = mu.transpose();
        if (!opt.zero_noise) {
          for (Index i = 0; i < n; ++i) e(i) = normal(rng);
          mu.noalias() += keep * (chol * e);
          if (share > 0.0) mu += share * normal(rng) * sd;
        }
        out.values.row(r).segment(t * n, n) = mu.transpose();
      }
    }
  });
  return out;
}

SynthesisReport estimate_divergence(const GaussianTree& tree, const Codebook& cb, std::size_t samples, std::uint64_t seed,
                                    const DivergenceOptions& opt) {
  check_codebook(tree, cb);
  check_coupling(opt.synth.noise_coupling);
  if (opt.synth.zero_noise) fail(ErrorCode::InvalidArgument, "divergence needs channel noise; zero_noise is a debug mode");
  if (samples < 100) fail(ErrorCode::InvalidArgument, "samples must be at least 100, got " + std::to_string(samples));
  if (opt.cov_runs < 2) fail(ErrorCode::InvalidArgument, "cov_runs must be at least 2, got " + std::to_string(opt.cov_runs));
  const std::size_t total = cb.mixture_size();
  if (total > kMixtureCap)
    fail(ErrorCode::MixtureTooLarge, "mixture has " + std::to_string(total) + " components, cap is " + std::to_string(kMixtureCap));

  const int N = cb.rates.block_length;
  const Index n = cb.gain.rows();
  const int L = static_cast<int>(cb.layers.size());
  const double c = opt.synth.noise_coupling;

  SynthesisReport rep;
  rep.rates = cb.rates;
  rep.pi = resolve_pi(tree, cb.pi);
  rep.samples = samples;
  rep.seed = seed;
  rep.mixture_components = total;
  rep.bound_check = rate_region_check(tree, cb.rates, cb.pi, McConfig{opt.mi_samples, seed});

  // Symbol noise as actually emitted (coupling included).
  const Vector sd = cb.noise_cov.diagonal().cwiseSqrt();
  const Matrix noise = (1.0 - c) * cb.noise_cov + c * sd * sd.transpose();
  const Matrix l_noise = cholesky_l(noise, "emitted noise covariance");
  const double noise_norm = -l_noise.diagonal().array().log().sum() - 0.5 * n * kLog2Pi;
  const Matrix l_x = cholesky_l(cb.target_cov, "target covariance");
  const double target_norm = -l_x.diagonal().array().log().sum() - 0.5 * n * kLog2Pi;

  // Whitened noiseless means of every codeword combination. Layer 1's sign
  // index is the most significant digit, so each of its values owns a
  // contiguous range.
  Matrix mu(static_cast<Index>(total), N * n);
  {
    std::vector<LayerIndex> idx(L);
    Vector m(n);
    for (std::size_t comp = 0; comp < total; ++comp) {
      std::size_t rest = comp;
      for (int li = L - 1; li >= 0; --li) {
        idx[li].y = rest % cb.y_rows(li);
        rest /= cb.y_rows(li);
        idx[li].b = rest % cb.b_rows(li);
        rest /= cb.b_rows(li);
      }
      const Matrix w1 = layer_one_sequence(cb, idx);
      for (int t = 0; t < N; ++t) {
        m.noalias() = cb.gain * w1.col(t);
        l_noise.triangularView<Eigen::Lower>().solveInPlace(m);
        mu.row(static_cast<Index>(comp)).segment(t * n, n) = m.transpose();
      }
    }
  }
  const Vector mu_sq = mu.rowwise().squaredNorm();
  const std::size_t mb1 = cb.b_rows(0);
  const std::size_t block = total / mb1;

  const SynthesisSamples draw = synthesize(tree, cb, samples, derive_seed(seed, 1, 0), opt.synth);

  const std::size_t batches = (samples + kBatchSize - 1) / kBatchSize;
  std::vector<RunningStats> kl_parts(batches), ind_parts(batches);
  parallel_for(batches, [&](std::size_t bi) {
    Vector xw(N * n), xt(n), lik(static_cast<Index>(total));
    const std::size_t end = std::min(samples, (bi + 1) * kBatchSize);
    for (std::size_t s = bi * kBatchSize; s < end; ++s) {
      double log_p = 0.0;
      for (int t = 0; t < N; ++t) {
        xt = draw.values.row(s).segment(t * n, n).transpose();
        Vector xx = xt;
        l_x.triangularView<Eigen::Lower>().solveInPlace(xx);
        log_p += target_norm - 0.5 * xx.squaredNorm();
        l_noise.triangularView<Eigen::Lower>().solveInPlace(xt);
        xw.segment(t * n, n) = xt;
      }
      lik.noalias() = mu * xw;
      lik = (lik.array() - 0.5 * mu_sq.array() - 0.5 * xw.squaredNorm() + N * noise_norm).matrix();
      const double lse_all = log_sum_exp(lik.data(), total);
      kl_parts[bi].add(lse_all - std::log(static_cast<double>(total)) - log_p);
      const std::size_t k1 = draw.indices[s][0].b;
      ind_parts[bi].add(log_sum_exp(lik.data() + k1 * block, block) - lse_all + std::log(static_cast<double>(mb1)));
    }
  });
  RunningStats kl, ind;
  for (std::size_t b = 0; b < batches; ++b) {
    kl.merge(kl_parts[b]);
    ind.merge(ind_parts[b]);
  }
  rep.kl_estimate = kl.mean;
  rep.kl_std_error = kl.std_error();
  rep.tv_upper_bound = std::sqrt(std::max(rep.kl_estimate, 0.0) / 2.0);
  rep.independence_stat = ind.mean;
  rep.independence_std_error = ind.std_error();

  // Pooled second moments over a separate set of runs.
  {
    const SynthesisSamples pool = synthesize(tree, cb, opt.cov_runs, derive_seed(seed, 2, 0), opt.synth);
    const Index m = static_cast<Index>(opt.cov_runs) * N;
    Matrix sym(m, n);
    for (Index r = 0; r < pool.values.rows(); ++r)
      for (int t = 0; t < N; ++t) sym.row(r * N + t) = pool.values.row(r).segment(t * n, n);
    const Matrix centered = sym.rowwise() - sym.colwise().mean();
    const Matrix emp = centered.transpose() * centered / static_cast<double>(m - 1);
    rep.empirical_cov_error = (emp - cb.target_cov).norm();
    rep.cov_runs = opt.cov_runs;
  }

  // Residual partial correlations given the noiseless means (Fisher z).
  {
    const Index m = static_cast<Index>(samples) * N;
    rep.residual_partial_corr = Matrix::Zero(n, n);
    rep.residual_z = Matrix::Zero(n, n);
    if (n >= 2) {
      Matrix res(m, n);
      for (Index r = 0; r < draw.values.rows(); ++r)
        for (int t = 0; t < N; ++t)
          res.row(r * N + t) = draw.values.row(r).segment(t * n, n) - draw.means.row(r).segment(t * n, n);
      const Matrix centered = res.rowwise() - res.colwise().mean();
      const Matrix cov = centered.transpose() * centered / static_cast<double>(m - 1);
      const Matrix prec = cov.llt().solve(Matrix::Identity(n, n));
      const double dof = std::sqrt(std::max(1.0, static_cast<double>(m) - static_cast<double>(n - 2) - 3.0));
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
          if (i == j) continue;
          const double pc = -prec(i, j) / std::sqrt(prec(i, i) * prec(j, j));
          rep.residual_partial_corr(i, j) = pc;
          rep.residual_z(i, j) = std::atanh(std::clamp(pc, -1.0 + 1e-15, 1.0 - 1e-15)) * dof;
          rep.max_residual_z = std::max(rep.max_residual_z, std::abs(rep.residual_z(i, j)));
        }
    }
  }

  // Lag-1 cross moments of emitted symbols.
  {
    rep.lag1_z = Matrix::Zero(n, n);
    if (N >= 2) {
      std::vector<RunningStats> st(n * n);
      for (Index r = 0; r < draw.values.rows(); ++r)
        for (int t = 0; t + 1 < N; ++t)
          for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) st[i * n + j].add(draw.values(r, t * n + i) * draw.values(r, (t + 1) * n + j));
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
          const auto& s = st[i * n + j];
          const double se = s.std_error();
          rep.lag1_z(i, j) = se > 0.0 ? s.mean / se : (s.mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
          rep.max_lag1_z = std::max(rep.max_lag1_z, std::abs(rep.lag1_z(i, j)));
        }
      rep.lag1_pairs = samples * static_cast<std::size_t>(N - 1);
    }
  }

  for (std::size_t l = 0; l < cb.layers.size(); ++l) {
    rep.subblock_usage.push_back(cb.layers[l].usage);
    std::vector<std::size_t> rows;
    for (const auto& t : cb.layers[l].y_tables) rows.push_back(t.rows());
    rep.subblock_rows.push_back(rows);
    rep.sign_rows.push_back(cb.b_rows(l));
  }
  rep.subblock_sizing =
      "every sub-block table holds M_Y rows addressed by the shared Y index; usage counts the realized sign symbols per "
      "sub-block, which for pi != 1/2 are unbalanced";
  return rep;
}

}  // namespace lgt
