#pragma once

#include <json.hpp>

#include "lgt/cli.hpp"
#include "lgt/info_measures.hpp"
#include "lgt/sign_ambiguity.hpp"
#include "lgt/synthesis.hpp"

namespace lgt::cli {

using Json = nlohmann::ordered_json;

// Information quantities in the requested unit (input is always nats).
double in_units(double nats, Units u);
double to_nats(double value, Units u);
const char* unit_name(Units u);

Json matrix_json(const Matrix& m);
Json mi_json(const MIResult& r, Units u);
Json pi_json(const GaussianTree& tree, const std::vector<double>& pi);
Json bound_json(const BoundCheck& b, Units u);
Json sign_report_json(const SignClassReport& r);
Json synthesis_report_json(const GaussianTree& tree, const SynthesisReport& r, Units u);
Json constraint_json(const ConstraintCheck& c);
Json codebook_json(const GaussianTree& tree, const Codebook& cb);

}  // namespace lgt::cli
