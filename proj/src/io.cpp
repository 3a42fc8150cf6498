#include "capbound/io.hpp"

#include "capbound/zoo.hpp"

#include <cmath>
#include <cstdio>

namespace capbound {

json matrix_to_json(const Mat& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      data.push_back({m(r, c).real(), m(r, c).imag()});
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Mat matrix_from_json(const json& j) {
  try {
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const json& data = j.at("data");
    if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols)
      throw ParseError("matrix: data length does not match rows*cols");
    Mat m(rows, cols);
    Eigen::Index i = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c, ++i)
        m(r, c) = cplx(data[i].at(0).get<double>(), data[i].at(1).get<double>());
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("matrix: malformed JSON (") + e.what() + ")");
  }
}

json state_to_json(const DensityMatrix& rho) {
  json j = matrix_to_json(rho.matrix());
  j["dims"] = rho.dims();
  if (rho.is_substate()) j["substate"] = true;
  return j;
}

DensityMatrix state_from_json(const json& j) {
  try {
    Mat m = matrix_from_json(j);
    std::vector<int> dims = j.at("dims").get<std::vector<int>>();
    bool sub = j.value("substate", false);
    return sub ? DensityMatrix::substate(std::move(m), std::move(dims))
               : DensityMatrix(std::move(m), std::move(dims));
  } catch (const json::exception& e) {
    throw ParseError(std::string("state: malformed JSON (") + e.what() + ")");
  }
}

json channel_to_json(const CPMap& n) {
  json kraus = json::array();
  for (const Mat& k : n.kraus()) kraus.push_back(matrix_to_json(k));
  return json{{"dim_in", n.dim_in()}, {"dim_out", n.dim_out()}, {"kraus", std::move(kraus)}};
}

CPMap channel_from_json(const json& j) {
  try {
    const int din = j.at("dim_in").get<int>();
    const int dout = j.at("dim_out").get<int>();
    std::vector<Mat> kraus;
    for (const json& k : j.at("kraus")) kraus.push_back(matrix_from_json(k));
    for (const Mat& k : kraus)
      if (k.rows() != dout || k.cols() != din)
        throw ParseError("channel: Kraus shape does not match dims");
    return CPMap::from_kraus(std::move(kraus));
  } catch (const json::exception& e) {
    throw ParseError(std::string("channel: malformed JSON (") + e.what() + ")");
  }
}

json decomposition_to_json(const CPDecomposition& dec) {
  json parts = json::array();
  for (const CPMap& p : dec.parts) parts.push_back(channel_to_json(p));
  json j{{"parts", std::move(parts)}};
  if (dec.has_flags()) {
    json flags = json::array();
    for (const DensityMatrix& f : dec.flags) flags.push_back(state_to_json(f));
    j["flags"] = std::move(flags);
  }
  return j;
}

CPDecomposition decomposition_from_json(const json& j) {
  try {
    CPDecomposition dec;
    for (const json& p : j.at("parts")) dec.parts.push_back(channel_from_json(p));
    if (j.contains("flags"))
      for (const json& f : j.at("flags")) dec.flags.push_back(state_from_json(f));
    if (!dec.flags.empty() && dec.flags.size() != dec.parts.size())
      throw ParseError("decomposition: flag count does not match part count");
    return dec;
  } catch (const json::exception& e) {
    throw ParseError(std::string("decomposition: malformed JSON (") + e.what() + ")");
  }
}

json report_to_json(const BoundReport& r) {
  json terms = json::array();
  for (const TermItem& t : r.terms) terms.push_back({{"name", t.name}, {"bits", t.bits}});
  json j{
      {"kind", to_string(r.kind)},
      {"finite", r.finite()},
      {"value_bits", r.finite() ? json(r.value) : json()},
      {"value_upper_bits", std::isfinite(r.value_upper) ? json(r.value_upper) : json()},
      {"eta", r.eta},
      {"eta_uncertainty", r.eta_uncertainty},
      {"env_dim", r.env_dim},
      {"info_term_bits", r.info_term},
      {"info_certified", r.info_certified},
      {"terms", std::move(terms)},
      {"rank_tol", r.rank_tol},
      {"solver",
       {{"solves", r.solver.solves},
        {"max_iterations", r.solver.max_iterations},
        {"max_gap", r.solver.max_gap},
        {"max_primal_residual", r.solver.max_primal_residual},
        {"max_dual_residual", r.solver.max_dual_residual},
        {"all_optimal", r.solver.all_optimal},
        {"recheck_delta", r.solver.recheck_delta}}},
      {"notes", r.notes},
  };
  if (r.alpha) j["alpha"] = *r.alpha;
  return j;
}

namespace {

json block_term_to_json(const BlockTerm& t) {
  json entries = json::array();
  for (const SparseEntry& e : t.entries)
    entries.push_back({e.row, e.col, e.value.real(), e.value.imag()});
  return json{{"block", t.block}, {"entries", std::move(entries)}};
}

}  // namespace

json problem_to_json(const ConicProblem& p) {
  json cons = json::array();
  for (const Constraint& c : p.constraints) {
    json terms = json::array();
    for (const BlockTerm& t : c.terms) terms.push_back(block_term_to_json(t));
    cons.push_back(std::move(terms));
  }
  json obj = json::array();
  for (const BlockTerm& t : p.objective) obj.push_back(block_term_to_json(t));
  return json{{"name", p.name},
              {"blocks", p.blocks},
              {"constraints", std::move(cons)},
              {"rhs", p.rhs},
              {"objective", std::move(obj)}};
}

json solution_to_json(const ConicSolution& s) {
  json xs = json::array(), ss = json::array();
  for (const Mat& x : s.X) xs.push_back(matrix_to_json(x));
  for (const Mat& x : s.S) ss.push_back(matrix_to_json(x));
  return json{{"status", to_string(s.info.status)},
              {"iterations", s.info.iterations},
              {"primal_value", s.info.primal_value},
              {"dual_value", s.info.dual_value},
              {"gap", s.info.gap},
              {"primal_residual", s.info.primal_residual},
              {"dual_residual", s.info.dual_residual},
              {"X", std::move(xs)},
              {"y", s.y},
              {"S", std::move(ss)}};
}

std::string format_sig9(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.8e", v);
  return buf;
}

}  // namespace capbound
