#include "sign_channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lgt/parallel.hpp"

namespace lgt::detail {

namespace {

constexpr const char* kModule = "info_measures";
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr int kMaxSignedInputs = 16;

Matrix select(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

double log_sum_exp(const std::vector<double>& v) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : v) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

Matrix cholesky_l(const Matrix& m, const std::string& what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::IllConditioned, kModule, what + " is not positive definite");
  return llt.matrixL();
}

double log_det_from_l(const Matrix& l) { return 2.0 * l.diagonal().array().log().sum(); }

struct Component {
  double log_prior;
  Vector signs;
};

// Sign patterns with positive prior mass. Bit i of the mask set means b_i = -1.
struct Patterns {
  std::vector<Component> comps;
  std::vector<int> of_mask;  // mask -> component, -1 if pruned
};

Patterns enumerate_patterns(const std::vector<double>& pi) {
  const int k = static_cast<int>(pi.size());
  if (k > kMaxSignedInputs)
    throw Error(ErrorCode::TooManyHidden, kModule, std::to_string(k) + " signed inputs exceeds the mixture limit of " +
                                                       std::to_string(kMaxSignedInputs));
  Patterns p;
  p.of_mask.assign(std::size_t{1} << k, -1);
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    double lp = 0.0;
    Vector s(k);
    for (int i = 0; i < k; ++i) {
      const bool neg = (mask >> i) & 1u;
      s(i) = neg ? -1.0 : 1.0;
      lp += std::log(neg ? 1.0 - pi[i] : pi[i]);
    }
    if (!std::isfinite(lp)) continue;
    p.of_mask[mask] = static_cast<int>(p.comps.size());
    p.comps.push_back({lp, s});
  }
  return p;
}

// Whitened observation model for a subset of output rows.
struct RowModel {
  std::vector<Index> rows;
  Matrix l_noise;
  double log_norm = 0.0;   // -1/2 logdet - n/2 log 2pi
  std::vector<Matrix> w;   // per component: L^-1 (A D_c)[rows]
};

RowModel make_row_model(const SignChannel& ch, const Patterns& pat, std::vector<Index> rows) {
  RowModel m;
  m.rows = std::move(rows);
  const std::vector<Index> all_k = [&] {
    std::vector<Index> v(ch.gain.cols());
    for (Index i = 0; i < ch.gain.cols(); ++i) v[i] = i;
    return v;
  }();
  m.l_noise = cholesky_l(select(ch.noise_cov, m.rows, m.rows), "channel noise covariance");
  m.log_norm = -0.5 * log_det_from_l(m.l_noise) - 0.5 * static_cast<double>(m.rows.size()) * kLog2Pi;
  const Matrix a = select(ch.gain, m.rows, all_k);
  for (const auto& c : pat.comps) {
    Matrix g = a * c.signs.asDiagonal();
    m.l_noise.triangularView<Eigen::Lower>().solveInPlace(g);
    m.w.push_back(std::move(g));
  }
  return m;
}

struct Prepared {
  Index n = 0, k = 0;
  Matrix l_in;
  Matrix l_noise;
  Patterns pat;
  std::vector<Matrix> prior_prec;  // D_c P D_c
  Matrix l_out;
  double out_log_norm = 0.0;
};

Prepared prepare(const SignChannel& ch) {
  Prepared p;
  p.n = ch.gain.rows();
  p.k = ch.gain.cols();
  p.l_in = cholesky_l(ch.in_cov, "input covariance");
  p.l_noise = cholesky_l(ch.noise_cov, "channel noise covariance");
  p.pat = enumerate_patterns(ch.pi);
  const Matrix prec = ch.in_cov.llt().solve(Matrix::Identity(p.k, p.k));
  for (const auto& c : p.pat.comps) p.prior_prec.push_back(c.signs.asDiagonal() * prec * c.signs.asDiagonal());
  const Matrix out_cov = ch.gain * ch.in_cov * ch.gain.transpose() + ch.noise_cov;
  p.l_out = cholesky_l(out_cov, "output covariance");
  p.out_log_norm = -0.5 * log_det_from_l(p.l_out) - 0.5 * static_cast<double>(p.n) * kLog2Pi;
  return p;
}

// One draw of (w, b, z) in a fixed order: k normals, k uniforms, n normals.
struct Draw {
  Vector w, y, x, z;
  std::uint32_t mask = 0;
};

template <typename Rng>
void draw_sample(Rng& rng, const SignChannel& ch, const Prepared& p, Draw& d) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Index i = 0; i < p.k; ++i) d.w(i) = normal(rng);
  d.w = p.l_in.triangularView<Eigen::Lower>() * d.w;
  d.mask = 0;
  for (Index i = 0; i < p.k; ++i) {
    const bool pos = unif(rng) < ch.pi[i];
    d.y(i) = pos ? d.w(i) : -d.w(i);
    if (!pos) d.mask |= 1u << i;
  }
  for (Index i = 0; i < p.n; ++i) d.z(i) = normal(rng);
  d.x.noalias() = ch.gain * d.w;
  d.x.noalias() += p.l_noise.triangularView<Eigen::Lower>() * d.z;
}

// Normalized log posterior over sign patterns given y.
void log_posterior(const Prepared& p, const Vector& y, std::vector<double>& lp) {
  for (std::size_t c = 0; c < p.pat.comps.size(); ++c)
    lp[c] = p.pat.comps[c].log_prior - 0.5 * y.dot(p.prior_prec[c] * y);
  const double z = log_sum_exp(lp);
  for (double& v : lp) v -= z;
}

// log N(x_rows; A_rows (c o y), noise_rows) for every component.
void log_likelihoods(const RowModel& m, const Vector& x, const Vector& y, Vector& xw, Vector& r,
                     std::vector<double>& ll) {
  for (std::size_t i = 0; i < m.rows.size(); ++i) xw(i) = x(m.rows[i]);
  m.l_noise.triangularView<Eigen::Lower>().solveInPlace(xw);
  for (std::size_t c = 0; c < m.w.size(); ++c) {
    r = xw;
    r.noalias() -= m.w[c] * y;
    ll[c] = m.log_norm - 0.5 * r.squaredNorm();
  }
}

std::vector<Index> iota_rows(Index n) {
  std::vector<Index> v(n);
  for (Index i = 0; i < n; ++i) v[i] = i;
  return v;
}

// Runs `per_sample` over the fixed batch plan and merges `outputs` streams of
// statistics in batch order.
template <typename Fn>
std::vector<RunningStats> run_batches(const McConfig& mc, std::uint64_t stream, std::size_t outputs, Fn per_batch) {
  const std::size_t batches = (mc.samples + kBatchSize - 1) / kBatchSize;
  std::vector<std::vector<RunningStats>> partial(batches, std::vector<RunningStats>(outputs));
  parallel_for(batches, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(mc.seed, stream, b));
    const std::size_t count = std::min(kBatchSize, mc.samples - b * kBatchSize);
    per_batch(rng, count, partial[b]);
  });
  std::vector<RunningStats> total(outputs);
  for (const auto& part : partial)
    for (std::size_t o = 0; o < outputs; ++o) total[o].merge(part[o]);
  return total;
}

MIResult to_result(const RunningStats& s, const McConfig& mc) {
  MIResult r;
  r.value = s.mean;
  r.std_error = s.std_error();
  r.method = MIMethod::MonteCarlo;
  r.samples_used = s.count;
  r.seed = mc.seed;
  r.batch_size = kBatchSize;
  return r;
}

}  // namespace

void check_samples(const McConfig& mc, const char* module) {
  if (mc.samples < kMinSamples)
    throw Error(ErrorCode::InvalidArgument, module, "samples must be at least " + std::to_string(kMinSamples) + " (got " +
                                                        std::to_string(mc.samples) + ")");
}

double log_det_spd(const Matrix& m, const char* module, const std::string& what) {
  if (m.rows() == 0) return 0.0;
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::IllConditioned, module, what + " is not positive definite");
  return 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
}

SignChannel make_sign_channel(const Matrix& joint, const std::vector<Index>& out, const std::vector<Index>& in,
                              std::vector<double> pi) {
  SignChannel ch;
  const Matrix s_oo = select(joint, out, out), s_oi = select(joint, out, in), s_ii = select(joint, in, in);
  Eigen::LLT<Matrix> llt(s_ii);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::IllConditioned, kModule, "input covariance is not positive definite");
  ch.gain = llt.solve(s_oi.transpose()).transpose();
  ch.in_cov = s_ii;
  ch.noise_cov = s_oo - ch.gain * s_oi.transpose();
  ch.noise_cov = (0.5 * (ch.noise_cov + ch.noise_cov.transpose())).eval();
  ch.pi = std::move(pi);
  return ch;
}

double gaussian_block_mi(const Matrix& joint, const std::vector<Index>& out, const std::vector<Index>& in) {
  std::vector<Index> both = out;
  both.insert(both.end(), in.begin(), in.end());
  return 0.5 * (log_det_spd(select(joint, out, out), kModule, "output block") +
                log_det_spd(select(joint, in, in), kModule, "input block") -
                log_det_spd(select(joint, both, both), kModule, "joint block"));
}

MIResult sign_term_mc(const SignChannel& ch, SignTerm term, const McConfig& mc, std::uint64_t stream) {
  check_samples(mc, kModule);
  const Prepared p = prepare(ch);
  const RowModel rows = make_row_model(ch, p.pat, iota_rows(p.n));
  auto stats = run_batches(mc, stream, 1, [&](std::mt19937_64& rng, std::size_t count, std::vector<RunningStats>& out) {
    Draw d{Vector(p.k), Vector(p.k), Vector(p.n), Vector(p.n)};
    Vector xw(p.n), r(p.n), xo(p.n);
    const std::size_t m = p.pat.comps.size();
    std::vector<double> lp(m), ll(m), mix(m);
    for (std::size_t s = 0; s < count; ++s) {
      draw_sample(rng, ch, p, d);
      log_posterior(p, d.y, lp);
      log_likelihoods(rows, d.x, d.y, xw, r, ll);
      for (std::size_t c = 0; c < m; ++c) mix[c] = lp[c] + ll[c];
      const double log_px_y = log_sum_exp(mix);
      if (term == SignTerm::BGivenY) {
        out[0].add(ll[p.pat.of_mask[d.mask]] - log_px_y);
      } else {
        xo = d.x;
        p.l_out.triangularView<Eigen::Lower>().solveInPlace(xo);
        out[0].add(log_px_y - (p.out_log_norm - 0.5 * xo.squaredNorm()));
      }
    }
  });
  return to_result(stats[0], mc);
}

std::vector<MIResult> sign_split_mc(const SignChannel& ch, const std::vector<std::vector<Index>>& groups,
                                    const McConfig& mc, std::uint64_t stream) {
  check_samples(mc, kModule);
  const Prepared p = prepare(ch);
  std::vector<RowModel> models;
  for (const auto& g : groups) models.push_back(make_row_model(ch, p.pat, g));
  const std::size_t ng = groups.size();
  auto stats = run_batches(mc, stream, ng + 1, [&](std::mt19937_64& rng, std::size_t count, std::vector<RunningStats>& out) {
    Draw d{Vector(p.k), Vector(p.k), Vector(p.n), Vector(p.n)};
    const std::size_t m = p.pat.comps.size();
    std::vector<double> lp(m), ll(m), mix(m);
    std::vector<Vector> xw, r;
    for (const auto& g : models) {
      xw.emplace_back(g.rows.size());
      r.emplace_back(g.rows.size());
    }
    for (std::size_t s = 0; s < count; ++s) {
      draw_sample(rng, ch, p, d);
      log_posterior(p, d.y, lp);
      double sum = 0.0;
      for (std::size_t g = 0; g < ng; ++g) {
        log_likelihoods(models[g], d.x, d.y, xw[g], r[g], ll);
        for (std::size_t c = 0; c < m; ++c) mix[c] = lp[c] + ll[c];
        const double t = ll[p.pat.of_mask[d.mask]] - log_sum_exp(mix);
        out[g].add(t);
        sum += t;
      }
      out[ng].add(sum);
    }
  });
  std::vector<MIResult> res;
  for (const auto& s : stats) res.push_back(to_result(s, mc));
  return res;
}

MIResult sign_marginal_mc(const SignChannel& ch, const McConfig& mc) {
  check_samples(mc, kModule);
  const Prepared p = prepare(ch);
  if (p.pat.comps.size() == 1) {
    // B is deterministic: the mixture has a single component.
    MIResult r;
    r.method = MIMethod::MonteCarlo;
    r.samples_used = mc.samples;
    r.seed = mc.seed;
    r.batch_size = kBatchSize;
    return r;
  }

  // Law of the output given each sign pattern: y | b ~ N(0, D_b S D_b) and the
  // channel sees b o y.
  std::vector<Matrix> l_cond;
  std::vector<double> norm_cond;
  for (const auto& c : p.pat.comps) {
    const Matrix d = c.signs.asDiagonal();
    const Matrix y_cov = d * ch.in_cov * d;
    const Matrix cov = ch.gain * d * y_cov * d * ch.gain.transpose() + ch.noise_cov;
    l_cond.push_back(cholesky_l(cov, "conditional output covariance"));
    norm_cond.push_back(-0.5 * log_det_from_l(l_cond.back()) - 0.5 * static_cast<double>(p.n) * kLog2Pi);
  }

  auto run_stream = [&](std::uint64_t stream, bool conditional) {
    return run_batches(mc, stream, 1, [&](std::mt19937_64& rng, std::size_t count, std::vector<RunningStats>& out) {
      std::normal_distribution<double> normal;
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      Vector e(p.k), y(p.k), x(p.n), z(p.n), xw(p.n);
      const std::size_t m = p.pat.comps.size();
      std::vector<double> lc(m);
      for (std::size_t s = 0; s < count; ++s) {
        for (Index i = 0; i < p.k; ++i) e(i) = normal(rng);
        std::uint32_t mask = 0;
        for (Index i = 0; i < p.k; ++i)
          if (!(unif(rng) < ch.pi[i])) mask |= 1u << i;
        for (Index i = 0; i < p.n; ++i) z(i) = normal(rng);
        const int comp = p.pat.of_mask[mask];
        const Vector& sgn = p.pat.comps[comp].signs;
        y = sgn.cwiseProduct(p.l_in.triangularView<Eigen::Lower>() * e);
        x.noalias() = ch.gain * sgn.cwiseProduct(y);
        x.noalias() += p.l_noise.triangularView<Eigen::Lower>() * z;
        auto log_density = [&](std::size_t c) {
          xw = x;
          l_cond[c].triangularView<Eigen::Lower>().solveInPlace(xw);
          return norm_cond[c] - 0.5 * xw.squaredNorm();
        };
        if (conditional) {
          out[0].add(log_density(comp));
        } else {
          for (std::size_t c = 0; c < m; ++c) lc[c] = p.pat.comps[c].log_prior + log_density(c);
          out[0].add(log_sum_exp(lc));
        }
      }
    })[0];
  };
  const RunningStats marginal = run_stream(kStreamMarginal, false);
  const RunningStats conditional = run_stream(kStreamConditional, true);

  MIResult r = to_result(conditional, mc);
  r.value = conditional.mean - marginal.mean;
  r.std_error = std::hypot(conditional.std_error(), marginal.std_error());
  return r;
}

}  // namespace lgt::detail
