#include <doctest.h>

#include <random>

#include "lgt/tree_io.hpp"
#include "lgt/tree_model.hpp"
#include "oracles.hpp"

using namespace lgt;

namespace {

GaussianTree load(const std::string& name) { return validate_tree(load_tree_spec(oracle::fixture(name))); }

ErrorCode code_of(const std::string& text) {
  try {
    validate_tree(parse_tree_spec(text));
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error for:\n" << text);
  return ErrorCode::InvalidArgument;
}

const char* kStar = "node y hidden\nnode x1 observed\nnode x2 observed\nnode x3 observed\n"
                    "edge y x1 0.6\nedge y x2 0.7\nedge y x3 0.8\n";

}  // namespace

TEST_CASE("parser reads nodes, edges and comments") {
  const TreeSpec s = parse_tree_spec("# comment\n\nnode a observed  # trailing\nnode h hidden\nedge a h +0.25\n");
  REQUIRE(s.nodes.size() == 2);
  CHECK(s.nodes[1].kind == NodeKind::Hidden);
  REQUIRE(s.edges.size() == 1);
  CHECK(s.edges[0].rho == 0.25);
}

TEST_CASE("parser errors carry the line number") {
  for (const char* bad : {"node a\n", "node a visible\n", "edge a b\n", "edge a b 0.5x\n", "vertex a\n", "node a observed extra\n"}) {
    try {
      parse_tree_spec(std::string("# header\n") + bad);
      FAIL("accepted: " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
}

TEST_CASE("missing tree file") {
  CHECK_THROWS_WITH_AS(load_tree_spec("/nonexistent/none.tree"), doctest::Contains("FileNotFound"), Error);
}

TEST_CASE("format and parse round trip") {
  const GaussianTree t = load("two_layer.tree");
  const GaussianTree u = validate_tree(parse_tree_spec(format_tree(t)));
  REQUIRE(u.edges().size() == t.edges().size());
  for (std::size_t e = 0; e < t.edges().size(); ++e) CHECK(u.edges()[e].rho == t.edges()[e].rho);
}

TEST_CASE("structural validation errors") {
  const std::string x3 = "node x1 observed\nnode x2 observed\nnode x3 observed\n";
  CHECK(code_of("") == ErrorCode::NotATree);
  CHECK(code_of("node a observed\nnode a hidden\n") == ErrorCode::DuplicateNode);
  CHECK(code_of("node a observed\nedge a b 0.5\n") == ErrorCode::DanglingEdge);
  CHECK(code_of("node a observed\nedge a a 0.5\n") == ErrorCode::NotATree);
  CHECK(code_of("node a observed\nnode b observed\nedge a b 0.5\nedge b a 0.5\n") == ErrorCode::NotATree);
  CHECK(code_of("node a observed\nnode b observed\nedge a b 1.0\n") == ErrorCode::BadCorrelation);
  CHECK(code_of("node a observed\nnode b observed\nedge a b 0\n") == ErrorCode::BadCorrelation);
  CHECK(code_of(x3 + "edge x1 x2 0.5\nedge x2 x3 0.5\nedge x3 x1 0.5\n") == ErrorCode::NotATree);
  CHECK(code_of(x3 + "node y hidden\nedge y x1 0.5\nedge y x2 0.5\nedge x2 x3 0.5\n") == ErrorCode::NonMinimal);
  CHECK(code_of(x3 + "edge x1 x2 0.5\n") == ErrorCode::NotATree);
  CHECK(code_of("node y hidden\n") == ErrorCode::NonMinimal);
  CHECK(code_of("node a observed\nnode b observed\n") == ErrorCode::NotATree);
}

TEST_CASE("cycle fixture is rejected") {
  CHECK_THROWS_WITH_AS(load("invalid_cycle.tree"), doctest::Contains("NotATree"), Error);
}

TEST_CASE("layers count distance to the nearest observed node") {
  const GaussianTree t = load("two_layer.tree");
  CHECK(t.max_layer() == 2);
  CHECK(t.layer(t.index_of("h1")) == 1);
  CHECK(t.layer(t.index_of("g2")) == 2);
  CHECK(t.layer_nodes(2).size() == 2);
  CHECK(t.leaf_only());
  CHECK_THROWS_AS(t.index_of("nope"), Error);
}

TEST_CASE("pairwise correlation is the path product") {
  const GaussianTree t = load("dumbbell.tree");
  CHECK(pairwise_correlation(t, "x1", "x4") == doctest::Approx(0.6 * 0.5 * 0.7).epsilon(1e-15));
  CHECK(pairwise_correlation(t, "x1", "y1") == doctest::Approx(0.6));
  CHECK_THROWS_AS(pairwise_correlation(t, "x1", "x1"), Error);
}

TEST_CASE("joint covariance matches the structural-equation oracle on random trees") {
  std::mt19937_64 rng(11);
  RandomTreeOptions opt;
  opt.leaf_only = false;
  for (int it = 0; it < 100; ++it) {
    const GaussianTree t = random_tree(rng, opt);
    const CovarianceModel m = joint_covariance(t);
    const Eigen::MatrixXd ref = oracle::structural_covariance_ordered(t);
    CHECK((m.joint - ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.observed_block.rows() == t.observed_count());
    CHECK((observed_covariance(t) - ref.topLeftCorner(t.observed_count(), t.observed_count())).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("path products agree with a depth-first oracle") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 30; ++it) {
    const GaussianTree t = random_tree(rng);
    const auto order = t.node_order();
    const Matrix p = path_product_matrix(t, order);
    for (std::size_t a = 0; a < order.size(); ++a)
      for (std::size_t b = 0; b < order.size(); ++b) {
        const double want = a == b ? 1.0 : oracle::path_product(t, order[a], order[b]);
        CHECK(p(a, b) == doctest::Approx(want).epsilon(1e-14));
      }
  }
}

TEST_CASE("tree determinant equals the LU determinant") {
  std::mt19937_64 rng(21);
  RandomTreeOptions opt;
  opt.leaf_only = false;
  for (int it = 0; it < 100; ++it) {
    const GaussianTree t = random_tree(rng, opt);
    const double lu = oracle::lu_determinant(oracle::structural_covariance(t));
    CHECK(std::abs(tree_determinant<double>(t) - lu) <= 1e-12 * std::abs(lu));
  }
  CHECK(tree_determinant<double>(validate_tree(parse_tree_spec(kStar))) ==
        doctest::Approx((1 - 0.36) * (1 - 0.49) * (1 - 0.64)).epsilon(1e-15));
}

TEST_CASE("nearly degenerate correlations are ill-conditioned") {
  const GaussianTree t = validate_tree(
      parse_tree_spec("node y hidden\nnode x1 observed\nnode x2 observed\nnode x3 observed\n"
                      "edge y x1 0.999999999999\nedge y x2 0.7\nedge y x3 0.8\n"));
  try {
    joint_covariance(t);
    FAIL("expected IllConditioned");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IllConditioned);
    CHECK_FALSE(e.is_validation());
  }
}

TEST_CASE("every valid triple reproduces the squared path correlation") {
  std::mt19937_64 rng(17);
  RandomTreeOptions opt;
  opt.leaf_only = false;
  int checked = 0;
  for (int it = 0; it < 60; ++it) {
    const GaussianTree t = random_tree(rng, opt);
    const Matrix sx = observed_covariance(t);
    for (int x : t.observed())
      for (int h : t.hidden()) {
        const double want = std::pow(oracle::path_product(t, x, h), 2);
        for (auto [j, k] : valid_triples(t, x, h)) {
          const double r = triple_ratio(sx, t.observed_position(x), t.observed_position(j), t.observed_position(k));
          CHECK(std::abs(r - want) <= 1e-12);
          ++checked;
        }
        if (!valid_triples(t, x, h).empty())
          CHECK(squared_path_correlation(sx, t, x, h) == doctest::Approx(want).epsilon(1e-12));
      }
  }
  CHECK(checked > 1000);
}

TEST_CASE("triple ratios flag an inconsistent covariance") {
  const GaussianTree t = validate_tree(parse_tree_spec(kStar));
  Matrix sx = observed_covariance(t);
  sx(1, 2) = sx(2, 1) = 0.1;  // ratio 0.42*0.48/0.1 > 1
  CHECK_THROWS_WITH_AS(squared_path_correlation(sx, t, t.index_of("x1"), t.index_of("y")), doctest::Contains("InconsistentCovariance"), Error);
  sx(1, 2) = sx(2, 1) = -0.56;
  CHECK_THROWS_WITH_AS(squared_path_correlation(sx, t, t.index_of("x1"), t.index_of("y")), doctest::Contains("RatioOutOfRange"), Error);
}

TEST_CASE("edge magnitudes are recovered from the observed block") {
  std::mt19937_64 rng(23);
  RandomTreeOptions opt;
  opt.leaf_only = false;
  for (int it = 0; it < 100; ++it) {
    const GaussianTree t = random_tree(rng, opt);
    const auto mags = recover_edge_magnitudes(observed_covariance(t), t);
    for (std::size_t e = 0; e < mags.size(); ++e) CHECK(mags[e] == doctest::Approx(std::abs(t.edges()[e].rho)).epsilon(1e-9));
  }
  const GaussianTree s = validate_tree(parse_tree_spec(kStar));
  CHECK_THROWS_AS(recover_edge_magnitudes(Matrix::Identity(2, 2), s), Error);
}

TEST_CASE("linear channel reproduces the observed covariance") {
  std::mt19937_64 rng(29);
  for (int it = 0; it < 40; ++it) {
    const GaussianTree t = random_tree(rng);
    const LinearChannel ch = linear_channel(t);
    const Eigen::MatrixXd full = oracle::structural_covariance_ordered(t);
    const int n = t.observed_count(), k = t.hidden_count();
    const Eigen::MatrixXd shh = full.bottomRightCorner(k, k);
    const Eigen::MatrixXd rebuilt = ch.gain * shh * ch.gain.transpose() + ch.noise_cov;
    CHECK((rebuilt - full.topLeftCorner(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ch.noise_variances - ch.noise_cov.diagonal()).norm() < 1e-15);
  }
}

TEST_CASE("random trees are valid and minimal") {
  std::mt19937_64 rng(31);
  for (bool leaf_only : {true, false}) {
    RandomTreeOptions opt;
    opt.leaf_only = leaf_only;
    for (int it = 0; it < 100; ++it) {
      const GaussianTree t = random_tree(rng, opt);
      CHECK(t.hidden_count() >= 1);
      CHECK(t.hidden_count() <= 4);
      CHECK(t.observed_count() <= 8);
      for (int h : t.hidden()) CHECK(t.degree(h) >= 3);
      if (leaf_only) CHECK(t.leaf_only());
      for (const auto& e : t.edges()) {
        CHECK(std::abs(e.rho) >= 0.2);
        CHECK(std::abs(e.rho) <= 0.9);
      }
    }
  }
}
