#pragma once

#include "capbound/bounds.hpp"
#include "capbound/sdp.hpp"

#include <json.hpp>

#include <string>

namespace capbound {

using json = nlohmann::json;

// Matrices serialize as row-major arrays of [re, im] pairs.
json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j);

json state_to_json(const DensityMatrix& rho);
DensityMatrix state_from_json(const json& j);

json channel_to_json(const CPMap& n);
CPMap channel_from_json(const json& j);

json decomposition_to_json(const CPDecomposition& dec);
CPDecomposition decomposition_from_json(const json& j);

json report_to_json(const BoundReport& r);

json problem_to_json(const ConicProblem& p);
json solution_to_json(const ConicSolution& s);

// Fixed-width scientific form with 9 significant digits.
std::string format_sig9(double v);

}  // namespace capbound
