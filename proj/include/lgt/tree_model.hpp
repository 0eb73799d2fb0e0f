#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lgt/error.hpp"
#include "lgt/types.hpp"

namespace lgt {

enum class NodeKind { Observed, Hidden };

struct NodeSpec {
  std::string id;
  NodeKind kind = NodeKind::Observed;
};

struct EdgeSpec {
  std::string u;
  std::string v;
  double rho = 0.0;
};

struct TreeSpec {
  std::vector<NodeSpec> nodes;
  std::vector<EdgeSpec> edges;
};

struct Edge {
  int u = 0;
  int v = 0;
  double rho = 0.0;
};

struct Neighbor {
  int node = 0;
  int edge = 0;
};

// Validated latent Gaussian tree. Node indices follow TreeSpec order;
// all variables are zero mean with unit variance.
class GaussianTree {
 public:
  const TreeSpec& spec() const { return spec_; }

  int node_count() const { return static_cast<int>(spec_.nodes.size()); }
  int observed_count() const { return static_cast<int>(observed_.size()); }
  int hidden_count() const { return static_cast<int>(hidden_.size()); }

  const std::string& id(int node) const { return spec_.nodes[node].id; }
  bool is_observed(int node) const { return spec_.nodes[node].kind == NodeKind::Observed; }
  std::optional<int> find(std::string_view id) const;
  int index_of(std::string_view id) const;  // throws UnknownNode

  const std::vector<Neighbor>& neighbors(int node) const { return adjacency_[node]; }
  int degree(int node) const { return static_cast<int>(adjacency_[node].size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  // 0 for observed nodes, graph distance to the nearest observed node otherwise.
  int layer(int node) const { return layer_[node]; }
  int max_layer() const { return max_layer_; }
  std::vector<int> layer_nodes(int l) const;

  const std::vector<int>& observed() const { return observed_; }
  const std::vector<int>& hidden() const { return hidden_; }
  // Row of the node in observed()/hidden() order, -1 for the other kind.
  int observed_position(int node) const { return position_[node] >= 0 && is_observed(node) ? position_[node] : -1; }
  int hidden_position(int node) const { return position_[node] >= 0 && !is_observed(node) ? position_[node] : -1; }

  // Every observed node is a leaf hanging off a hidden node.
  bool leaf_only() const;

  // Observed nodes first, then hidden nodes, each in TreeSpec order.
  std::vector<int> node_order() const;

  // Edge indices along the unique path a -> b.
  std::vector<int> path(int a, int b) const;

  // Same structure with new edge correlations (aligned with edges()).
  GaussianTree with_edge_rhos(std::span<const double> rhos) const;

 private:
  friend GaussianTree validate_tree(TreeSpec spec);

  TreeSpec spec_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<Edge> edges_;
  std::vector<int> layer_;
  std::vector<int> observed_;
  std::vector<int> hidden_;
  std::vector<int> position_;
  int max_layer_ = 0;
};

GaussianTree validate_tree(TreeSpec spec);

double pairwise_correlation(const GaussianTree& tree, std::string_view i, std::string_view j);

// Path-product correlations between the listed nodes.
template <typename Scalar = double>
MatrixX<Scalar> path_product_matrix(const GaussianTree& tree, std::span<const int> order) {
  const int total = tree.node_count();
  std::vector<int> position(total, -1);
  for (std::size_t p = 0; p < order.size(); ++p) position[order[p]] = static_cast<int>(p);

  const Index m = static_cast<Index>(order.size());
  MatrixX<Scalar> out = MatrixX<Scalar>::Identity(m, m);
  std::vector<Scalar> prod(total);
  std::vector<int> parent(total), stack;
  for (Index p = 0; p < m; ++p) {
    const int root = order[p];
    std::fill(parent.begin(), parent.end(), -2);
    parent[root] = -1;
    prod[root] = Scalar(1);
    stack.assign(1, root);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      if (position[u] >= 0) out(p, position[u]) = prod[u];
      for (const Neighbor& nb : tree.neighbors(u)) {
        if (parent[nb.node] != -2) continue;
        parent[nb.node] = u;
        prod[nb.node] = prod[u] * Scalar(tree.edges()[nb.edge].rho);
        stack.push_back(nb.node);
      }
    }
  }
  return out;
}

// prod over edges of (1 - rho^2); the determinant of the joint covariance.
template <typename Scalar = double>
Scalar tree_determinant(const GaussianTree& tree) {
  Scalar det(1);
  for (const Edge& e : tree.edges()) det *= Scalar(1) - Scalar(e.rho) * Scalar(e.rho);
  return det;
}

struct CovarianceModel {
  Matrix joint;                 // ordered by node_order
  Matrix observed_block;        // leading n x n block of joint
  std::vector<int> node_order;  // row -> tree node index
  double min_eigenvalue = 0.0;
};

inline constexpr double kPdTolerance = 1e-10;

// Throws IllConditioned if the smallest eigenvalue is not above kPdTolerance.
CovarianceModel joint_covariance(const GaussianTree& tree);

// Observed-block correlations in tree.observed() order.
Matrix observed_covariance(const GaussianTree& tree);

// Pairs (j, k) of observed nodes lying in two distinct branches at hidden node
// h, neither in the branch containing observed node x. Lexicographic order
// over observed positions.
std::vector<std::pair<int, int>> valid_triples(const GaussianTree& structure, int x, int h);

// rho_xj * rho_xk / rho_jk read from sigma_x (observed positions).
double triple_ratio(const Matrix& sigma_x, int x, int j, int k);

// |rho| per edge of structure (aligned with edges()), from the observed
// covariance alone. Edge values stored in structure are ignored.
std::vector<double> recover_edge_magnitudes(const Matrix& sigma_x, const GaussianTree& structure);

// Squared path correlation between observed node x and hidden node h, from
// the lowest valid triple; every other valid triple must agree.
double squared_path_correlation(const Matrix& sigma_x, const GaussianTree& structure, int x, int h);

// X = A * Y + Z with Y the hidden vector (tree.hidden() order) and Z ~ N(0, noise).
struct LinearChannel {
  Matrix gain;
  Matrix noise_cov;
  Vector noise_variances;
};

LinearChannel linear_channel(const GaussianTree& tree);

struct RandomTreeOptions {
  int min_hidden = 1;
  int max_hidden = 4;
  int max_observed = 8;
  double min_abs_rho = 0.2;
  double max_abs_rho = 0.9;
  bool random_signs = true;
  bool leaf_only = true;
  // Chance of splicing an extra observed node into an edge when leaf_only is false.
  double internal_observed_prob = 0.5;
};

GaussianTree random_tree(std::mt19937_64& rng, const RandomTreeOptions& options = {});

}  // namespace lgt
