#include <cmath>
#include <sstream>

#include "lgt/synthesis.hpp"

namespace lgt {

namespace {

constexpr double kSigma = 3.0;
// Absolute slack for statistics that vanish exactly in exact arithmetic.
constexpr double kRoundingSlack = 1e-9;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::vector<ConstraintCheck> verify_codebook_constraints(const GaussianTree& tree, const Codebook& codebook,
                                                         const SynthesisReport& report, double tv_threshold) {
  (void)tree;
  std::vector<ConstraintCheck> out;

  {
    ConstraintCheck c{1, "output coordinates independent given (y,b)", false, report.max_residual_z, kSigma, ""};
    c.passed = report.max_residual_z <= kSigma;
    c.detail = "max |Fisher z| of residual partial correlations = " + fmt(report.max_residual_z);
    out.push_back(c);
  }
  {
    const double bound = kSigma * report.independence_std_error + kRoundingSlack;
    ConstraintCheck c{2, "emitted block independent of the sign index", false, report.independence_stat, bound, ""};
    c.passed = std::abs(report.independence_stat) <= bound;
    c.detail = "I(X^N; K_B) = " + fmt(report.independence_stat) + " +- " + fmt(report.independence_std_error) + " nats";
    out.push_back(c);
  }
  {
    ConstraintCheck c{3, "symbols i.i.d. across time", false, report.max_lag1_z, kSigma, ""};
    c.passed = report.max_lag1_z <= kSigma;
    c.detail = report.lag1_pairs == 0 ? "block length 1: no lag-1 pairs"
                                      : "max |z| of lag-1 cross moments = " + fmt(report.max_lag1_z) + " over " +
                                            std::to_string(report.lag1_pairs) + " pairs";
    out.push_back(c);
  }
  {
    ConstraintCheck c{4, "Gaussian codebook cardinality matches ceil(exp(N R_Y))", true, 0.0, 0.0, ""};
    std::string detail;
    for (const auto& lc : codebook.layers) {
      for (std::size_t s = 0; s < lc.y_tables.size(); ++s) {
        const auto rows = static_cast<std::size_t>(lc.y_tables[s].rows());
        if (rows != lc.declared_my) {
          c.passed = false;
          detail += "layer " + std::to_string(lc.layer) + " sub-block " + std::to_string(s) + ": " + std::to_string(rows) +
                    " rows, declared " + std::to_string(lc.declared_my) + "; ";
        }
      }
    }
    c.detail = c.passed ? "all sub-block tables match" : detail;
    out.push_back(c);
  }
  {
    ConstraintCheck c{5, "sign codebook cardinality matches ceil(exp(N R_B))", true, 0.0, 0.0, ""};
    std::string detail;
    for (const auto& lc : codebook.layers) {
      const auto rows = static_cast<std::size_t>(lc.signs.rows());
      bool pm_one = (lc.signs.array() == 1 || lc.signs.array() == -1).all();
      if (rows != lc.declared_mb || !pm_one) {
        c.passed = false;
        detail += "layer " + std::to_string(lc.layer) + ": " + std::to_string(rows) + " rows, declared " +
                  std::to_string(lc.declared_mb) + (pm_one ? "" : ", entries not +-1") + "; ";
      }
    }
    c.detail = c.passed ? "all sign codebooks match" : detail;
    out.push_back(c);
  }
  {
    ConstraintCheck c{6, "total variation bound within threshold", false, report.tv_upper_bound, tv_threshold, ""};
    c.passed = report.tv_upper_bound <= tv_threshold;
    c.detail = "Pinsker bound sqrt(KL/2) = " + fmt(report.tv_upper_bound) + " from KL = " + fmt(report.kl_estimate) +
               " +- " + fmt(report.kl_std_error);
    out.push_back(c);
  }
  return out;
}

}  // namespace lgt
