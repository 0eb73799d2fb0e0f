#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lgt/tree_model.hpp"

namespace lgt {

// Hidden node id -> +1 / -1.
using SignAssignment = std::map<std::string, int>;

inline constexpr int kEnumerationCap = 20;

// Multiplies each edge rho by b(u) * b(v), observed nodes counting as +1.
GaussianTree apply_sign_assignment(const GaussianTree& tree, const SignAssignment& b);

// Bit i of mask (most significant = first hidden node) set means -1, so mask 0
// is the all-(+1) assignment and masks enumerate assignments lexicographically
// with +1 before -1.
SignAssignment assignment_from_mask(const GaussianTree& tree, std::uint64_t mask);

// Pointwise product of two assignments over the same hidden nodes.
SignAssignment compose(const SignAssignment& a, const SignAssignment& b);

// All 2^k sign-flipped versions, ordered by mask.
std::vector<GaussianTree> enumerate_equivalent_trees(const GaussianTree& tree, int cap = kEnumerationCap);

// True iff every tree induces the first tree's observed covariance within tol.
bool verify_equivalence(std::span<const GaussianTree> trees, double tol = 1e-12);

struct SignConstraint {
  std::vector<std::string> lhs;  // product of these variables ...
  std::vector<std::string> rhs;  // ... equals the product of these
};

struct SignClass {
  std::string owner;                 // hidden node owning the class
  std::vector<std::string> members;  // observed nodes whose edges flip with it
};

struct SignClassReport {
  int edge_sign_variables = 0;
  std::vector<std::string> variables;
  std::vector<SignConstraint> constraints;
  int free_variables = 0;
  std::vector<SignClass> classes;
};

SignClassReport sign_class_report(const GaussianTree& tree);

std::string to_string(const SignConstraint& c);

}  // namespace lgt
