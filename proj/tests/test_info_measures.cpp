#include <doctest.h>

#include <cstdlib>
#include <random>

#include "lgt/info_measures.hpp"
#include "lgt/parallel.hpp"
#include "lgt/tree_io.hpp"
#include "oracles.hpp"

using namespace lgt;

namespace {

GaussianTree load(const std::string& name) { return validate_tree(load_tree_spec(oracle::fixture(name))); }

double oracle_mi(const GaussianTree& t) { return oracle::gaussian_mi(oracle::structural_covariance_ordered(t), t.observed_count()); }

// Frozen after the structural-equation oracle confirmed it (see below).
constexpr double kStarMi = 0.7294309951122715;

bool within(const MIResult& r, double target, double sigmas = 3.0) { return std::abs(r.value - target) <= sigmas * r.std_error; }

}  // namespace

TEST_CASE("star golden value agrees with the oracle") {
  const GaussianTree s = load("star.tree");
  CHECK(oracle_mi(s) == doctest::Approx(kStarMi).epsilon(1e-12));
  CHECK(mi_direct(s).value == doctest::Approx(kStarMi).epsilon(1e-12));
  CHECK(mi_closed_form(observed_covariance(s), s).value == doctest::Approx(kStarMi).epsilon(1e-12));
}

TEST_CASE("determinant MI matches the Schur-complement oracle") {
  std::mt19937_64 rng(51);
  RandomTreeOptions opt;
  opt.leaf_only = false;
  for (int it = 0; it < 100; ++it) {
    const GaussianTree t = random_tree(rng, opt);
    const MIResult r = mi_direct(t);
    CHECK(r.method == MIMethod::DirectGaussian);
    CHECK(std::abs(r.value - oracle_mi(t)) <= 1e-10);
  }
}

TEST_CASE("closed form equals determinants on leaf-only trees") {
  std::mt19937_64 rng(53);
  for (int it = 0; it < 100; ++it) {
    const GaussianTree t = random_tree(rng);
    const double c = mi_closed_form(observed_covariance(t), t).value;
    CHECK(std::abs(c - mi_direct(t).value) <= 1e-9);
  }
}

TEST_CASE("closed form needs leaf-only trees") {
  std::mt19937_64 rng(55);
  RandomTreeOptions opt;
  opt.leaf_only = false;
  opt.internal_observed_prob = 1.0;
  const GaussianTree t = random_tree(rng, opt);
  REQUIRE_FALSE(t.leaf_only());
  CHECK_THROWS_WITH_AS(mi_closed_form(observed_covariance(t), t), doctest::Contains("NotLeafOnly"), Error);
}

TEST_CASE("closed form is invariant under hidden sign flips") {
  // It only sees sigma_x, which every sign-equivalent tree shares.
  const GaussianTree d = load("dumbbell.tree");
  std::vector<double> rhos;
  for (const auto& e : d.edges()) rhos.push_back(-e.rho);
  const GaussianTree neg = d.with_edge_rhos(rhos);
  CHECK(mi_direct(neg).value == doctest::Approx(mi_direct(d).value).epsilon(1e-12));
}

TEST_CASE("resolve_pi validation") {
  const GaussianTree d = load("dumbbell.tree");
  CHECK(resolve_pi(d, BernoulliParams::uniform(d, 0.3)) == std::vector<double>{0.3, 0.3});
  CHECK_THROWS_WITH_AS(resolve_pi(d, BernoulliParams{{{"y1", 0.5}}}), doctest::Contains("MissingAssignment"), Error);
  CHECK_THROWS_WITH_AS(resolve_pi(d, BernoulliParams{{{"y1", 0.5}, {"y2", 0.5}, {"zz", 0.5}}}), doctest::Contains("UnknownNode"), Error);
  CHECK_THROWS_WITH_AS(resolve_pi(d, BernoulliParams{{{"y1", 0.5}, {"y2", 0.5}, {"x1", 0.5}}}), doctest::Contains("InvalidArgument"), Error);
  CHECK_THROWS_AS(resolve_pi(d, BernoulliParams{{{"y1", 0.5}, {"y2", std::nan("")}}}), Error);
  CHECK(resolve_pi(d, BernoulliParams{{{"y1", -0.5}, {"y2", 1.5}}}) == std::vector<double>{0.0, 1.0});
}

TEST_CASE("Monte Carlo needs enough samples") {
  const GaussianTree s = load("star.tree");
  CHECK_THROWS_AS(mi_X_Y(s, BernoulliParams::uniform(s, 0.5), McConfig{999, 1}), Error);
}

TEST_CASE("deterministic signs carry no information") {
  for (const char* f : {"star.tree", "dumbbell.tree"}) {
    const GaussianTree t = load(f);
    for (double p : {0.0, 1.0}) {
      const auto pi = BernoulliParams::uniform(t, p);
      const McConfig mc{20000, 3};
      CHECK(mi_X_B_given_Y(t, pi, mc).value == 0.0);
      CHECK(mi_X_B(t, pi, mc).value == 0.0);
      // Y = +-W exactly, so I(X;Y) is the Gaussian value.
      CHECK(within(mi_X_Y(t, pi, mc), mi_direct(t).value));
    }
  }
}

TEST_CASE("chain identity and independence of X and B") {
  for (const char* f : {"star.tree", "dumbbell.tree"}) {
    const GaussianTree t = load(f);
    for (double p : {0.3, 0.5}) {
      const auto pi = BernoulliParams::uniform(t, p);
      const McConfig mc{40000, 9};
      const MIResult a = mi_X_Y(t, pi, mc), b = mi_X_B_given_Y(t, pi, mc);
      CHECK(a.value > 0.0);
      CHECK(b.value > 0.0);
      CHECK(std::abs(a.value + b.value - mi_direct(t).value) <= 3.0 * std::hypot(a.std_error, b.std_error));
      const MIResult xb = mi_X_B(t, pi, mc);
      CHECK(std::abs(xb.value) <= 3.0 * xb.std_error);
    }
  }
}

TEST_CASE("estimates are reproducible and independent of the worker count") {
  const GaussianTree t = load("dumbbell.tree");
  const auto pi = BernoulliParams::uniform(t, 0.4);
  const McConfig mc{3 * kBatchSize + 17, 5};
  const MIResult a = mi_X_B_given_Y(t, pi, mc);
  setenv("LTS_THREADS", "1", 1);
  const MIResult b = mi_X_B_given_Y(t, pi, mc);
  unsetenv("LTS_THREADS");
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  CHECK(a.samples_used == mc.samples);
  CHECK(a.batch_size == kBatchSize);
  CHECK(mi_X_B_given_Y(t, pi, McConfig{mc.samples, 6}).value != a.value);
}

TEST_CASE("decomposition shape rules") {
  const McConfig mc{2000, 1};
  CHECK_THROWS_WITH_AS(decomposition_check(load("star.tree"), BernoulliParams::uniform(load("star.tree"), 0.5), mc),
                       doctest::Contains("WrongShape"), Error);
  const GaussianTree two = load("two_layer.tree");
  CHECK_THROWS_WITH_AS(decomposition_check(two, BernoulliParams::uniform(two, 0.5), mc), doctest::Contains("WrongShape"), Error);
  const GaussianTree d = load("dumbbell.tree");
  const Decomposition r = decomposition_check(d, BernoulliParams::uniform(d, 0.5), mc);
  REQUIRE(r.terms.size() == 2);
  CHECK(r.rhs.value == doctest::Approx(r.terms[0].value + r.terms[1].value).epsilon(1e-12));
}

TEST_CASE("pi grid") {
  const auto g = pi_grid(0.05);
  REQUIRE(g.size() == 21);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == doctest::Approx(1.0));
  CHECK(g[10] == doctest::Approx(0.5));
  CHECK(pi_grid(0.25).size() == 5);
  CHECK_THROWS_AS(pi_grid(0.3), Error);
  CHECK_THROWS_AS(pi_grid(0.0), Error);
}

TEST_CASE("optimal pi on the star is one half") {
  const GaussianTree s = load("star.tree");
  const PiOptimum o = optimize_pi(s, 0.1, McConfig{20000, 7});
  CHECK_FALSE(o.per_node);
  REQUIRE(o.curve.size() == 11);
  CHECK(std::abs(o.pi_star.pi.at("y") - 0.5) <= 0.1 + 1e-12);
  CHECK(o.curve.front().value.value == 0.0);
  CHECK(o.curve.back().value.value == 0.0);
  for (std::size_t i = 0; i < o.curve.size(); ++i) {
    const auto& a = o.curve[i].value;
    const auto& b = o.curve[o.curve.size() - 1 - i].value;
    CHECK(std::abs(a.value - b.value) <= 3.0 * std::hypot(a.std_error, b.std_error) + 1e-12);
  }
}

TEST_CASE("two hidden nodes sweep per node") {
  const GaussianTree d = load("dumbbell.tree");
  const PiOptimum o = optimize_pi(d, 0.25, McConfig{4000, 7});
  CHECK(o.per_node);
  CHECK(o.curve.size() == 25);
  const PiOptimum s = optimize_pi(d, 0.25, McConfig{4000, 7}, SweepMode::Symmetric);
  CHECK_FALSE(s.per_node);
  CHECK(s.curve.size() == 5);
}
