#include "report_json.hpp"

#include <cmath>

namespace lgt::cli {

namespace {
constexpr double kLn2 = 0.69314718055994530942;
}

double in_units(double nats, Units u) { return u == Units::Bits ? nats / kLn2 : nats; }
double to_nats(double value, Units u) { return u == Units::Bits ? value * kLn2 : value; }
const char* unit_name(Units u) { return u == Units::Bits ? "bits" : "nats"; }

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json mi_json(const MIResult& r, Units u) {
  Json j;
  j["method"] = std::string(to_string(r.method));
  j["value"] = in_units(r.value, u);
  j["std_error"] = in_units(r.std_error, u);
  j["samples"] = r.samples_used;
  j["seed"] = r.seed;
  if (r.batch_size) j["batch_size"] = r.batch_size;
  return j;
}

Json pi_json(const GaussianTree& tree, const std::vector<double>& pi) {
  Json j = Json::object();
  for (std::size_t i = 0; i < pi.size(); ++i) j[tree.id(tree.hidden()[i])] = pi[i];
  return j;
}

Json bound_json(const BoundCheck& b, Units u) {
  Json j;
  j["layer"] = b.layer;
  j["quantity"] = b.quantity;
  j["rate"] = b.rate;
  j["provided"] = in_units(b.provided, u);
  j["required"] = in_units(b.required, u);
  j["margin"] = in_units(b.margin, u);
  j["std_error"] = in_units(b.std_error, u);
  j["method"] = std::string(to_string(b.method));
  j["satisfied"] = b.margin >= 0.0;
  return j;
}

Json sign_report_json(const SignClassReport& r) {
  Json j;
  j["edge_sign_variables"] = r.edge_sign_variables;
  j["variables"] = r.variables;
  Json cons = Json::array();
  for (const auto& c : r.constraints) cons.push_back(Json{{"lhs", c.lhs}, {"rhs", c.rhs}, {"text", to_string(c)}});
  j["constraints"] = cons;
  j["constraint_count"] = r.constraints.size();
  j["free_variables"] = r.free_variables;
  Json classes = Json::array();
  for (const auto& c : r.classes) classes.push_back(Json{{"owner", c.owner}, {"members", c.members}});
  j["classes"] = classes;
  return j;
}

Json codebook_json(const GaussianTree& tree, const Codebook& cb) {
  Json layers = Json::array();
  for (std::size_t l = 0; l < cb.layers.size(); ++l) {
    const auto& lc = cb.layers[l];
    Json nodes = Json::array();
    for (int h : lc.nodes) nodes.push_back(tree.id(h));
    Json rows = Json::array();
    for (const auto& t : lc.y_tables) rows.push_back(t.rows());
    layers.push_back(Json{{"layer", lc.layer},
                          {"nodes", nodes},
                          {"declared_M_Y", lc.declared_my},
                          {"declared_M_B", lc.declared_mb},
                          {"sign_rows", lc.signs.rows()},
                          {"subblocks", lc.y_tables.size()},
                          {"subblock_rows", rows},
                          {"subblock_usage", lc.usage}});
  }
  return Json{{"block_length", cb.rates.block_length}, {"seed", cb.seed}, {"layers", layers}};
}

Json synthesis_report_json(const GaussianTree& tree, const SynthesisReport& r, Units u) {
  Json j;
  Json rates = Json::array();
  for (const auto& l : r.rates.layers) rates.push_back(Json{{"ry", in_units(l.ry, u)}, {"rb", in_units(l.rb, u)}});
  j["rates"] = rates;
  j["block_length"] = r.rates.block_length;
  j["pi"] = pi_json(tree, r.pi);
  Json bounds = Json::array();
  for (const auto& b : r.bound_check) bounds.push_back(bound_json(b, u));
  j["bound_check"] = bounds;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["mixture_components"] = r.mixture_components;
  j["kl_estimate"] = in_units(r.kl_estimate, u);
  j["kl_std_error"] = in_units(r.kl_std_error, u);
  j["tv_upper_bound"] = r.tv_upper_bound;
  j["independence_stat"] = in_units(r.independence_stat, u);
  j["independence_std_error"] = in_units(r.independence_std_error, u);
  j["empirical_cov_error"] = r.empirical_cov_error;
  j["cov_runs"] = r.cov_runs;
  j["residual_partial_corr"] = matrix_json(r.residual_partial_corr);
  j["max_residual_z"] = r.max_residual_z;
  j["lag1_z"] = matrix_json(r.lag1_z);
  j["max_lag1_z"] = r.max_lag1_z;
  j["lag1_pairs"] = r.lag1_pairs;
  j["subblock_usage"] = r.subblock_usage;
  j["subblock_rows"] = r.subblock_rows;
  j["sign_rows"] = r.sign_rows;
  j["subblock_sizing"] = r.subblock_sizing;
  return j;
}

Json constraint_json(const ConstraintCheck& c) {
  return Json{{"id", c.id},
              {"name", c.name},
              {"passed", c.passed},
              {"statistic", std::isfinite(c.statistic) ? Json(c.statistic) : Json("inf")},
              {"threshold", c.threshold},
              {"detail", c.detail}};
}

}  // namespace lgt::cli
