#include "lgt/sign_ambiguity.hpp"

#include <cmath>
#include <deque>
#include <set>

namespace lgt {

namespace {

constexpr const char* kModule = "sign_ambiguity";

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, kModule, msg); }

std::string var_name(const GaussianTree& t, int h) { return "B(" + t.id(h) + ")"; }
std::string var_name(const GaussianTree& t, const Edge& e) { return "B(" + t.id(e.u) + "," + t.id(e.v) + ")"; }

}  // namespace

GaussianTree apply_sign_assignment(const GaussianTree& tree, const SignAssignment& b) {
  for (const auto& [id, sign] : b) {
    const int node = tree.index_of(id);
    if (tree.is_observed(node)) fail(ErrorCode::InvalidArgument, "sign assigned to observed node '" + id + "'");
    if (sign != 1 && sign != -1) fail(ErrorCode::InvalidArgument, "sign for '" + id + "' must be +1 or -1, got " + std::to_string(sign));
  }
  std::vector<int> s(tree.node_count(), 1);
  for (int h : tree.hidden()) {
    auto it = b.find(tree.id(h));
    if (it == b.end()) fail(ErrorCode::MissingAssignment, "no sign for hidden node '" + tree.id(h) + "'");
    s[h] = it->second;
  }
  std::vector<double> rhos;
  rhos.reserve(tree.edges().size());
  for (const Edge& e : tree.edges()) rhos.push_back(e.rho * s[e.u] * s[e.v]);
  return tree.with_edge_rhos(rhos);
}

SignAssignment assignment_from_mask(const GaussianTree& tree, std::uint64_t mask) {
  const int k = tree.hidden_count();
  SignAssignment b;
  for (int i = 0; i < k; ++i) b[tree.id(tree.hidden()[i])] = (mask >> (k - 1 - i)) & 1u ? -1 : 1;
  return b;
}

SignAssignment compose(const SignAssignment& a, const SignAssignment& b) {
  if (a.size() != b.size()) fail(ErrorCode::MismatchedNodeSets, "assignments cover different node sets");
  SignAssignment out;
  for (const auto& [id, s] : a) {
    auto it = b.find(id);
    if (it == b.end()) fail(ErrorCode::MismatchedNodeSets, "node '" + id + "' missing from second assignment");
    out[id] = s * it->second;
  }
  return out;
}

std::vector<GaussianTree> enumerate_equivalent_trees(const GaussianTree& tree, int cap) {
  const int k = tree.hidden_count();
  if (k > cap) fail(ErrorCode::TooManyHidden, std::to_string(k) + " hidden nodes exceeds the enumeration cap of " + std::to_string(cap));
  const std::uint64_t total = std::uint64_t{1} << k;
  std::vector<GaussianTree> out;
  out.reserve(total);
  for (std::uint64_t mask = 0; mask < total; ++mask) out.push_back(apply_sign_assignment(tree, assignment_from_mask(tree, mask)));
  return out;
}

bool verify_equivalence(std::span<const GaussianTree> trees, double tol) {
  if (trees.empty()) fail(ErrorCode::InvalidArgument, "verify_equivalence needs at least one tree");
  const GaussianTree& ref = trees.front();
  const Matrix sigma = observed_covariance(ref);
  for (std::size_t t = 1; t < trees.size(); ++t) {
    const GaussianTree& other = trees[t];
    if (other.node_count() != ref.node_count()) fail(ErrorCode::MismatchedNodeSets, "tree " + std::to_string(t) + " has a different node count");
    std::vector<int> order;
    for (int x : ref.observed()) {
      auto node = other.find(ref.id(x));
      if (!node || !other.is_observed(*node))
        fail(ErrorCode::MismatchedNodeSets, "tree " + std::to_string(t) + " lacks observed node '" + ref.id(x) + "'");
      order.push_back(*node);
    }
    for (int h : ref.hidden()) {
      auto node = other.find(ref.id(h));
      if (!node || other.is_observed(*node))
        fail(ErrorCode::MismatchedNodeSets, "tree " + std::to_string(t) + " lacks hidden node '" + ref.id(h) + "'");
    }
    const Matrix s = path_product_matrix<double>(other, order);
    if (!((s - sigma).cwiseAbs().maxCoeff() <= tol)) return false;
  }
  return true;
}

SignClassReport sign_class_report(const GaussianTree& tree) {
  SignClassReport r;
  const int k = tree.hidden_count();

  std::vector<int> owners;
  for (int h : tree.hidden())
    if (tree.layer(h) == 1) owners.push_back(h);
  std::vector<int> hh_edges;
  for (std::size_t e = 0; e < tree.edges().size(); ++e) {
    const Edge& edge = tree.edges()[e];
    if (!tree.is_observed(edge.u) && !tree.is_observed(edge.v)) hh_edges.push_back(static_cast<int>(e));
  }
  for (int h : owners) r.variables.push_back(var_name(tree, h));
  for (int e : hh_edges) r.variables.push_back(var_name(tree, tree.edges()[e]));
  r.edge_sign_variables = static_cast<int>(r.variables.size());
  r.free_variables = k;

  // Hidden components joined by hidden-hidden edges. Within a component the
  // path between two class owners must carry the product of their signs.
  std::vector<int> component(tree.node_count(), -1);
  int n_comp = 0;
  for (int h : tree.hidden()) {
    if (component[h] >= 0) continue;
    std::vector<int> stack{h};
    component[h] = n_comp;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const Neighbor& nb : tree.neighbors(u)) {
        if (tree.is_observed(nb.node) || component[nb.node] >= 0) continue;
        component[nb.node] = n_comp;
        stack.push_back(nb.node);
      }
    }
    ++n_comp;
  }
  std::vector<int> root(n_comp, -1);
  for (int w : owners) {
    int& c_root = root[component[w]];
    if (c_root < 0) {
      c_root = w;
      continue;
    }
    SignConstraint c;
    for (int e : tree.path(c_root, w)) c.lhs.push_back(var_name(tree, tree.edges()[e]));
    c.rhs = {var_name(tree, c_root), var_name(tree, w)};
    r.constraints.push_back(std::move(c));
  }

  // Class membership: each observed node joins its nearest hidden node
  // (ties go to the earlier hidden node), which always sits at layer 1.
  std::vector<int> nearest(tree.node_count(), -1);
  std::deque<int> queue;
  for (int h : tree.hidden()) {
    nearest[h] = h;
    queue.push_back(h);
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const Neighbor& nb : tree.neighbors(u)) {
      if (nearest[nb.node] >= 0) continue;
      nearest[nb.node] = nearest[u];
      queue.push_back(nb.node);
    }
  }
  for (int h : owners) {
    SignClass cls{tree.id(h), {}};
    for (int x : tree.observed())
      if (nearest[x] == h) cls.members.push_back(tree.id(x));
    r.classes.push_back(std::move(cls));
  }
  return r;
}

std::string to_string(const SignConstraint& c) {
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " * " : "") + v[i];
    return s;
  };
  return join(c.lhs) + " = " + join(c.rhs);
}

}  // namespace lgt
