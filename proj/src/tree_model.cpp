#include "lgt/tree_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>

#include <Eigen/Eigenvalues>

namespace lgt {

namespace {

constexpr const char* kModule = "tree_model";

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, kModule, msg); }

// Disjoint-set forest for cycle detection.
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int root(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  bool join(int a, int b) {
    a = root(a);
    b = root(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

bool valid_rho(double rho) { return std::isfinite(rho) && std::abs(rho) > 0.0 && std::abs(rho) < 1.0; }

// Branch label of every node as seen from hub: the index of the hub neighbor
// whose subtree contains it (-1 for the hub itself).
std::vector<int> branch_labels(const GaussianTree& tree, int hub) {
  std::vector<int> label(tree.node_count(), -2);
  label[hub] = -1;
  const auto& hub_nb = tree.neighbors(hub);
  for (std::size_t b = 0; b < hub_nb.size(); ++b) {
    std::vector<int> stack{hub_nb[b].node};
    label[hub_nb[b].node] = static_cast<int>(b);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const Neighbor& nb : tree.neighbors(u)) {
        if (label[nb.node] != -2) continue;
        label[nb.node] = static_cast<int>(b);
        stack.push_back(nb.node);
      }
    }
  }
  return label;
}

// Observed nodes on start's side of the tree once edge `cut` is removed.
std::vector<int> observed_side(const GaussianTree& tree, int start, int cut) {
  std::vector<char> seen(tree.node_count(), 0);
  std::vector<int> stack{start}, out;
  seen[start] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    if (tree.is_observed(u)) out.push_back(u);
    for (const Neighbor& nb : tree.neighbors(u)) {
      if (nb.edge == cut || seen[nb.node]) continue;
      seen[nb.node] = 1;
      stack.push_back(nb.node);
    }
  }
  std::sort(out.begin(), out.end(), [&](int a, int b) {
    return tree.observed_position(a) < tree.observed_position(b);
  });
  return out;
}

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)) + 1e-15; }

}  // namespace

std::optional<int> GaussianTree::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int GaussianTree::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  fail(ErrorCode::UnknownNode, "no node with id '" + std::string(id) + "'");
}

std::vector<int> GaussianTree::layer_nodes(int l) const {
  std::vector<int> out;
  for (int h : hidden_)
    if (layer_[h] == l) out.push_back(h);
  return out;
}

bool GaussianTree::leaf_only() const {
  if (observed_.empty() || hidden_.empty()) return false;
  for (int x : observed_) {
    if (degree(x) != 1) return false;
    if (is_observed(adjacency_[x][0].node)) return false;
  }
  return true;
}

std::vector<int> GaussianTree::node_order() const {
  std::vector<int> order = observed_;
  order.insert(order.end(), hidden_.begin(), hidden_.end());
  return order;
}

std::vector<int> GaussianTree::path(int a, int b) const {
  std::vector<int> via(node_count(), -1);
  std::vector<char> seen(node_count(), 0);
  std::deque<int> queue{a};
  seen[a] = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (u == b) break;
    for (const Neighbor& nb : adjacency_[u]) {
      if (seen[nb.node]) continue;
      seen[nb.node] = 1;
      via[nb.node] = nb.edge;
      queue.push_back(nb.node);
    }
  }
  std::vector<int> out;
  for (int u = b; u != a;) {
    const Edge& e = edges_[via[u]];
    out.push_back(via[u]);
    u = e.u == u ? e.v : e.u;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

GaussianTree GaussianTree::with_edge_rhos(std::span<const double> rhos) const {
  if (rhos.size() != edges_.size())
    fail(ErrorCode::InvalidArgument, "expected " + std::to_string(edges_.size()) + " edge correlations, got " +
                                         std::to_string(rhos.size()));
  GaussianTree out = *this;
  for (std::size_t e = 0; e < rhos.size(); ++e) {
    if (!valid_rho(rhos[e]))
      fail(ErrorCode::BadCorrelation, "edge " + spec_.edges[e].u + "-" + spec_.edges[e].v + " rho must satisfy 0 < |rho| < 1");
    out.edges_[e].rho = rhos[e];
    out.spec_.edges[e].rho = rhos[e];
  }
  return out;
}

GaussianTree validate_tree(TreeSpec spec) {
  GaussianTree t;
  const int n = static_cast<int>(spec.nodes.size());
  if (n == 0) fail(ErrorCode::NotATree, "tree has no nodes");

  for (int i = 0; i < n; ++i) {
    const auto& node = spec.nodes[i];
    if (node.id.empty()) fail(ErrorCode::InvalidArgument, "node " + std::to_string(i) + " has an empty id");
    if (!t.index_.emplace(node.id, i).second) fail(ErrorCode::DuplicateNode, "node id '" + node.id + "' declared twice");
  }

  t.adjacency_.assign(n, {});
  std::set<std::pair<int, int>> seen_edges;
  for (std::size_t e = 0; e < spec.edges.size(); ++e) {
    const auto& es = spec.edges[e];
    auto iu = t.find(es.u), iv = t.find(es.v);
    if (!iu) fail(ErrorCode::DanglingEdge, "edge " + es.u + "-" + es.v + " references unknown node '" + es.u + "'");
    if (!iv) fail(ErrorCode::DanglingEdge, "edge " + es.u + "-" + es.v + " references unknown node '" + es.v + "'");
    if (*iu == *iv) fail(ErrorCode::NotATree, "self-loop on node '" + es.u + "'");
    if (!seen_edges.emplace(std::min(*iu, *iv), std::max(*iu, *iv)).second)
      fail(ErrorCode::NotATree, "duplicate edge " + es.u + "-" + es.v);
    if (!valid_rho(es.rho))
      fail(ErrorCode::BadCorrelation, "edge " + es.u + "-" + es.v + " rho must satisfy 0 < |rho| < 1");
    t.edges_.push_back({*iu, *iv, es.rho});
    t.adjacency_[*iu].push_back({*iv, static_cast<int>(e)});
    t.adjacency_[*iv].push_back({*iu, static_cast<int>(e)});
  }

  // Cycles first, then minimality, then connectivity: an isolated node left by
  // a missing edge is reported through the degree of its former neighbor.
  UnionFind uf(n);
  for (const auto& e : t.edges_)
    if (!uf.join(e.u, e.v)) fail(ErrorCode::NotATree, "edge " + spec.nodes[e.u].id + "-" + spec.nodes[e.v].id + " closes a cycle");

  for (int i = 0; i < n; ++i)
    if (spec.nodes[i].kind == NodeKind::Hidden && t.adjacency_[i].size() < 3)
      fail(ErrorCode::NonMinimal, "hidden node '" + spec.nodes[i].id + "' has degree " +
                                      std::to_string(t.adjacency_[i].size()) + " (needs at least 3)");

  if (static_cast<int>(t.edges_.size()) != n - 1) fail(ErrorCode::NotATree, "graph is disconnected");

  t.position_.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    auto& list = spec.nodes[i].kind == NodeKind::Observed ? t.observed_ : t.hidden_;
    t.position_[i] = static_cast<int>(list.size());
    list.push_back(i);
  }
  if (t.observed_.empty()) fail(ErrorCode::InvalidArgument, "tree has no observed nodes");

  t.layer_.assign(n, -1);
  std::deque<int> queue;
  for (int x : t.observed_) {
    t.layer_[x] = 0;
    queue.push_back(x);
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const Neighbor& nb : t.adjacency_[u]) {
      if (t.layer_[nb.node] >= 0) continue;
      t.layer_[nb.node] = t.layer_[u] + 1;
      queue.push_back(nb.node);
    }
  }
  for (int h : t.hidden_) t.max_layer_ = std::max(t.max_layer_, t.layer_[h]);

  t.spec_ = std::move(spec);
  return t;
}

double pairwise_correlation(const GaussianTree& tree, std::string_view i, std::string_view j) {
  const int a = tree.index_of(i), b = tree.index_of(j);
  if (a == b) fail(ErrorCode::InvalidArgument, "pairwise_correlation needs two distinct nodes, got '" + std::string(i) + "' twice");
  double prod = 1.0;
  for (int e : tree.path(a, b)) prod *= tree.edges()[e].rho;
  return prod;
}

CovarianceModel joint_covariance(const GaussianTree& tree) {
  CovarianceModel model;
  model.node_order = tree.node_order();
  model.joint = path_product_matrix<double>(tree, model.node_order);
  const Index n = tree.observed_count();
  model.observed_block = model.joint.topLeftCorner(n, n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(model.joint, Eigen::EigenvaluesOnly);
  model.min_eigenvalue = eig.eigenvalues().minCoeff();
  if (!(model.min_eigenvalue > kPdTolerance))
    fail(ErrorCode::IllConditioned, "joint covariance smallest eigenvalue " + std::to_string(model.min_eigenvalue) +
                                        " is not above " + std::to_string(kPdTolerance));
  return model;
}

Matrix observed_covariance(const GaussianTree& tree) {
  return path_product_matrix<double>(tree, tree.observed());
}

std::vector<std::pair<int, int>> valid_triples(const GaussianTree& structure, int x, int h) {
  if (!structure.is_observed(x)) fail(ErrorCode::InvalidArgument, "'" + structure.id(x) + "' is not observed");
  if (structure.is_observed(h)) fail(ErrorCode::InvalidArgument, "'" + structure.id(h) + "' is not hidden");
  const auto label = branch_labels(structure, h);
  const auto& obs = structure.observed();
  std::vector<std::pair<int, int>> out;
  for (std::size_t a = 0; a < obs.size(); ++a) {
    const int j = obs[a];
    if (label[j] == label[x]) continue;
    for (std::size_t b = a + 1; b < obs.size(); ++b) {
      const int k = obs[b];
      if (label[k] == label[x] || label[k] == label[j]) continue;
      out.emplace_back(j, k);
    }
  }
  return out;
}

double triple_ratio(const Matrix& sigma_x, int x, int j, int k) {
  return sigma_x(x, j) * sigma_x(x, k) / sigma_x(j, k);
}

double squared_path_correlation(const Matrix& sigma_x, const GaussianTree& structure, int x, int h) {
  const auto triples = valid_triples(structure, x, h);
  if (triples.empty())
    fail(ErrorCode::InvalidArgument, "no valid triple for '" + structure.id(x) + "' at '" + structure.id(h) + "'");
  const int px = structure.observed_position(x);
  auto ratio_of = [&](const std::pair<int, int>& t) {
    return triple_ratio(sigma_x, px, structure.observed_position(t.first), structure.observed_position(t.second));
  };
  const double value = ratio_of(triples.front());
  const std::string where = "'" + structure.id(x) + "' via '" + structure.id(h) + "'";
  if (!std::isfinite(value) || value <= 0.0)
    fail(ErrorCode::RatioOutOfRange, "squared correlation " + std::to_string(value) + " for " + where + " is not in (0,1)");
  if (value >= 1.0)
    fail(ErrorCode::InconsistentCovariance, "squared correlation " + std::to_string(value) + " for " + where +
                                                " is not below 1; sigma_x is not representable by this tree");
  for (std::size_t t = 1; t < triples.size(); ++t) {
    const double other = ratio_of(triples[t]);
    if (!close_rel(other, value, 1e-9))
      fail(ErrorCode::InconsistentCovariance, "triples disagree for " + where + ": " + std::to_string(value) + " vs " +
                                                  std::to_string(other) + " (" + structure.id(triples[t].first) + "," +
                                                  structure.id(triples[t].second) + ")");
  }
  return value;
}

std::vector<double> recover_edge_magnitudes(const Matrix& sigma_x, const GaussianTree& structure) {
  const Index n = structure.observed_count();
  if (sigma_x.rows() != n || sigma_x.cols() != n)
    fail(ErrorCode::InvalidArgument, "sigma_x is " + std::to_string(sigma_x.rows()) + "x" + std::to_string(sigma_x.cols()) +
                                         ", structure has " + std::to_string(n) + " observed nodes");
  for (Index i = 0; i < n; ++i)
    if (std::abs(sigma_x(i, i) - 1.0) > 1e-9) fail(ErrorCode::InvalidArgument, "sigma_x must have a unit diagonal");

  auto pos = [&](int node) { return structure.observed_position(node); };
  std::vector<double> out(structure.edges().size());
  for (std::size_t e = 0; e < structure.edges().size(); ++e) {
    const Edge& edge = structure.edges()[e];
    const bool ou = structure.is_observed(edge.u), ov = structure.is_observed(edge.v);
    double mag = 0.0;
    if (ou && ov) {
      mag = std::abs(sigma_x(pos(edge.u), pos(edge.v)));
    } else if (ou || ov) {
      const int x = ou ? edge.u : edge.v, h = ou ? edge.v : edge.u;
      mag = std::sqrt(squared_path_correlation(sigma_x, structure, x, h));
    } else {
      const int a = edge.u, b = edge.v;
      const int xa = observed_side(structure, a, static_cast<int>(e)).front();
      const int xb = observed_side(structure, b, static_cast<int>(e)).front();
      const double ra = std::sqrt(squared_path_correlation(sigma_x, structure, xa, a));
      const double rb = std::sqrt(squared_path_correlation(sigma_x, structure, xb, b));
      mag = std::abs(sigma_x(pos(xa), pos(xb))) / (ra * rb);
      const std::string where = "hidden edge " + structure.id(a) + "-" + structure.id(b);
      if (!std::isfinite(mag) || mag <= 0.0) fail(ErrorCode::RatioOutOfRange, where + " magnitude " + std::to_string(mag) + " is not in (0,1)");
      if (mag >= 1.0) fail(ErrorCode::InconsistentCovariance, where + " magnitude " + std::to_string(mag) + " is not below 1");
    }
    if (!std::isfinite(mag) || mag <= 0.0 || mag >= 1.0)
      fail(ErrorCode::RatioOutOfRange, "edge " + structure.id(edge.u) + "-" + structure.id(edge.v) + " magnitude " +
                                           std::to_string(mag) + " is not in (0,1)");
    out[e] = mag;
  }

  // The magnitudes must reproduce every observed correlation.
  const Matrix rebuilt = path_product_matrix<double>(structure.with_edge_rhos(out), structure.observed());
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (!close_rel(rebuilt(i, j), std::abs(sigma_x(i, j)), 1e-9))
        fail(ErrorCode::InconsistentCovariance, "recovered magnitudes do not reproduce |sigma_x(" +
                                                    structure.id(structure.observed()[i]) + "," +
                                                    structure.id(structure.observed()[j]) + ")|");
  return out;
}

LinearChannel linear_channel(const GaussianTree& tree) {
  const CovarianceModel cov = joint_covariance(tree);
  const Index n = tree.observed_count(), k = tree.hidden_count();
  LinearChannel ch;
  if (k == 0) {
    ch.gain = Matrix::Zero(n, 0);
    ch.noise_cov = cov.observed_block;
  } else {
    const Matrix s_xh = cov.joint.topRightCorner(n, k);
    const Matrix s_hh = cov.joint.bottomRightCorner(k, k);
    ch.gain = s_hh.llt().solve(s_xh.transpose()).transpose();
    ch.noise_cov = cov.observed_block - ch.gain * s_xh.transpose();
    ch.noise_cov = 0.5 * (ch.noise_cov + ch.noise_cov.transpose()).eval();
  }
  ch.noise_variances = ch.noise_cov.diagonal();
  return ch;
}

GaussianTree random_tree(std::mt19937_64& rng, const RandomTreeOptions& opt) {
  if (opt.min_hidden < 1 || opt.max_hidden < opt.min_hidden)
    fail(ErrorCode::InvalidArgument, "random_tree needs 1 <= min_hidden <= max_hidden");
  if (!(opt.min_abs_rho > 0.0 && opt.max_abs_rho < 1.0 && opt.min_abs_rho <= opt.max_abs_rho))
    fail(ErrorCode::InvalidArgument, "random_tree needs 0 < min_abs_rho <= max_abs_rho < 1");

  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::uniform_real_distribution<double> mag(opt.min_abs_rho, opt.max_abs_rho);
  std::bernoulli_distribution coin(0.5), splice(opt.internal_observed_prob);

  for (int attempt = 0; attempt < 1000; ++attempt) {
    const int k = uniform_int(opt.min_hidden, opt.max_hidden);
    std::vector<std::pair<int, int>> hh;  // hidden indices 0..k-1
    std::vector<int> deg(k, 0);
    for (int i = 1; i < k; ++i) {
      const int j = uniform_int(0, i - 1);
      hh.emplace_back(j, i);
      ++deg[i];
      ++deg[j];
    }
    int required = 0;
    for (int d : deg) required += std::max(0, 3 - d);
    if (required > opt.max_observed) continue;

    // Leaves per hidden node, then optional extras.
    std::vector<int> leaf_owner;
    for (int h = 0; h < k; ++h)
      for (int c = deg[h]; c < 3; ++c) leaf_owner.push_back(h);
    const int extra = uniform_int(0, opt.max_observed - required);
    for (int e = 0; e < extra; ++e) leaf_owner.push_back(uniform_int(0, k - 1));

    // Node ids: hidden "h<i>", observed "x<i>"; edges as (a, b) over a unified
    // index where hidden come first.
    int observed = static_cast<int>(leaf_owner.size());
    std::vector<std::pair<int, int>> edges;
    auto obs_index = [&](int i) { return k + i; };
    for (auto [a, b] : hh) edges.emplace_back(a, b);
    for (int i = 0; i < static_cast<int>(leaf_owner.size()); ++i) edges.emplace_back(leaf_owner[i], obs_index(i));

    if (!opt.leaf_only) {
      const std::size_t base = edges.size();
      for (std::size_t e = 0; e < base && observed < opt.max_observed; ++e) {
        if (!splice(rng)) continue;
        const int mid = obs_index(observed++);
        const auto [a, b] = edges[e];
        edges[e] = {a, mid};
        edges.emplace_back(mid, b);
      }
    }

    TreeSpec spec;
    std::vector<int> perm(k + observed);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto name = [&](int u) { return u < k ? "h" + std::to_string(u + 1) : "x" + std::to_string(u - k + 1); };
    for (int u : perm) spec.nodes.push_back({name(u), u < k ? NodeKind::Hidden : NodeKind::Observed});
    for (auto [a, b] : edges) {
      double rho = mag(rng);
      if (opt.random_signs && coin(rng)) rho = -rho;
      if (coin(rng)) std::swap(a, b);
      spec.edges.push_back({name(a), name(b), rho});
    }
    std::shuffle(spec.edges.begin(), spec.edges.end(), rng);
    return validate_tree(std::move(spec));
  }
  fail(ErrorCode::InvalidArgument, "random_tree could not satisfy max_observed=" + std::to_string(opt.max_observed));
}

}  // namespace lgt
