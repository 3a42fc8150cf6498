#pragma once

#include "capbound/coherent.hpp"
#include "capbound/sdp.hpp"

#include <optional>

namespace capbound {

enum class BoundKind {
  state_pure_flag,      // s(tau, omega, alpha) on a flagged bipartite state
  channel_general_flag, // general flags, quantum continuity terms
  channel_pure_flag,    // two pure flags, quantum continuity terms
  channel_degradable_flag,
  private_pure_flag,
  private_degradable_flag,
  approx_degradable,
  dp_gad,
};
const char* to_string(BoundKind k);

enum class Flavor { quantum, priv };

struct TermItem {
  std::string name;
  double bits = 0.0;
};

struct SolverStats {
  int solves = 0;
  int max_iterations = 0;
  double max_gap = 0.0;
  double max_primal_residual = 0.0;
  double max_dual_residual = 0.0;
  bool all_optimal = true;
  double recheck_delta = 0.0;  // |eta re-evaluated at the returned map - SDP value|

  void absorb(const SolveInfo& info);
  void absorb(const SolverStats& other);
};

struct BoundReport {
  BoundKind kind = BoundKind::approx_degradable;
  double value = 0.0;        // sum of terms; +infinity when no flagged channel qualifies
  double value_upper = 0.0;  // continuity terms re-evaluated at eta + eta_uncertainty
  std::optional<double> alpha;
  double eta = 0.0;
  double eta_uncertainty = 1e-6;
  int env_dim = 1;           // d_E (channels) or purifying dimension (states)
  double info_term = 0.0;    // Q^(1) or I(A>BF)
  bool info_certified = true;  // false when Q^(1) is a heuristic multi-start value
  std::vector<TermItem> terms;
  double rank_tol = kRankTol;
  SolverStats solver;
  std::vector<std::string> notes;

  bool finite() const { return std::isfinite(value); }
};

struct BoundOptions {
  double sdp_tol = 1e-8;
  double rank_tol = kRankTol;
  double eta_threshold = 1e-6;  // eta below this certifies degradability
  int alpha_grid = 101;
  int alpha_refine = 30;
  Q1Options q1;
  bool certify = false;  // re-evaluate the eta objective at the returned map
  int jobs = 1;          // parallelism across alpha-grid points
};

// Q^(1)(N) + eta log(dE-1) + h(eta) + 2 eta log dE + g(eta).
BoundReport approx_degradable_bound(const CPMap& n, const BoundOptions& opts = {});

// I(A>BF) + 4 eta log|E| + 2 g(eta) for rho = tau ⊗ |psi_a><psi_a| + omega ⊗ |0><0|.
BoundReport state_pure_flag_bound(const DensityMatrix& tau, const DensityMatrix& omega,
                                  double alpha, const BoundOptions& opts = {});

// Two-pure-flag channel bound at fixed alpha, quantum or private terms.
BoundReport channel_flag_bound(const CPDecomposition& dec, double alpha, Flavor flavor,
                               const BoundOptions& opts = {});

// inf over alpha of Q^(1) of the flagged channel restricted to eta below
// threshold; +infinity marker when nothing qualifies (with the best
// pure-flag bound attached as a note).
BoundReport degradable_flag_bound(const CPDecomposition& dec, Flavor flavor,
                                  const BoundOptions& opts = {});

// Flagged bound evaluated at the decomposition's own flag states.
BoundReport general_flag_bound(const CPDecomposition& dec, const BoundOptions& opts = {});

struct AlphaScanResult {
  double alpha_star = 0.0;
  BoundReport best;
  int evaluations = 0;
};
// Coarse grid plus golden-section refinement; deterministic, ties keep the
// first grid point. Returns the best evaluation seen.
AlphaScanResult alpha_scan(const std::function<BoundReport(double)>& eval, int grid = 101,
                           int refine = 30, int jobs = 1);

// inf_alpha s(tau, omega, alpha): upper bound on the quantum capacity of a
// teleportation-simulable channel with Choi state tau + omega (the simulability
// assertion is the caller's and is recorded in the report).
BoundReport choi_channel_bound(const DensityMatrix& tau, const DensityMatrix& omega,
                               const BoundOptions& opts = {});

// Data-processing comparison bound for the generalized amplitude damping
// channel: the capacity of the amplitude damping channel at y(1-N)/(1-yN),
// zero once that parameter reaches 1/2.
double dp_gad_bound(double y, double n);

}  // namespace capbound
