#pragma once

#include "capbound/channel.hpp"

#include <functional>
#include <string>

namespace capbound {

// Standard-form conic program over complex Hermitian PSD blocks:
//   minimize  <C, X>  subject to  <A_i, X> = b_i,  X >= 0 blockwise,
// with <A, X> = Re tr(A X). Constraint and objective matrices are stored
// sparsely as upper-triangle entries (diagonal entries real).
struct SparseEntry {
  int row = 0, col = 0;
  cplx value;
};

struct BlockTerm {
  int block = 0;
  std::vector<SparseEntry> entries;
};

struct Constraint {
  std::vector<BlockTerm> terms;
};

struct ConicProblem {
  std::string name;
  std::vector<int> blocks;
  std::vector<Constraint> constraints;
  std::vector<double> rhs;
  std::vector<BlockTerm> objective;

  int add_block(int dim);
  int num_vars() const;  // sum of block dims (trace dimension)
};

// Linear term of a Hermitian-matrix-valued equality constraint: the map takes
// the variable block to the constraint's target space.
struct MapTerm {
  int block = 0;
  std::function<Mat(const Mat&)> apply;
};

// Appends the scalar rows of "sum_j map_j(X_{block_j}) = rhs" to the problem.
void add_matrix_equality(ConicProblem& p, const std::vector<MapTerm>& terms, const Mat& rhs);

enum class SolveStatus { optimal, infeasible, max_iterations };
const char* to_string(SolveStatus s);

struct SolveInfo {
  SolveStatus status = SolveStatus::max_iterations;
  int iterations = 0;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;  // relative duality gap
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

struct ConicSolution {
  SolveInfo info;
  std::vector<Mat> X;
  std::vector<double> y;
  std::vector<Mat> S;
};

struct SolverOptions {
  double tol = 1e-8;         // target the iteration drives toward
  double accept_tol = 1e-7;  // certificate level for the optimal status
  int max_iterations = 120;
  double init_scale = 1.0;   // multiplier on the default starting point
  bool verbose = false;
};

// solve() with a deterministic ladder of starting points; returns the first
// certified solution (or the last attempt if none certifies).
ConicSolution solve_robust(const ConicProblem& p, SolverOptions opts = {});

// Primal-dual interior point method (Nesterov-Todd scaling, Mehrotra
// predictor-corrector) with dense block factorizations. Deterministic.
ConicSolution solve(const ConicProblem& p, const SolverOptions& opts = {});

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Throws SolverError unless the solution is certified optimal.
void require_optimal(const ConicSolution& sol, const std::string& what);

// --- Programs used by the bound evaluators ---------------------------------

ConicProblem diamond_distance_problem(const Mat& choi_delta, int dim_in, int dim_out);

struct DiamondResult {
  double value = 0.0;
  SolveInfo info;
};
// Half diamond-norm distance between two maps of equal dimensions.
DiamondResult diamond_distance(const CPMap& a, const CPMap& b, double tol = 1e-8);

struct EtaChannelResult {
  double eta = 0.0;
  CPMap degrading;   // B -> E
  int env_dim = 1;   // minimal environment dimension d_E
  SolveInfo info;
};
// Degradability parameter of a channel: min_D (1/2)||N^c - D∘N||_diamond,
// with the complement built from the minimal Kraus set.
EtaChannelResult eta_channel(const CPMap& n, double tol = 1e-8, double rank_tol = kRankTol);
ConicProblem eta_channel_problem(const CPMap& n, const CPMap& nc);

struct EtaStateResult {
  double eta = 0.0;
  CPMap degrading;   // B -> E, E the purifying system
  int env_dim = 1;
  SolveInfo info;
};
// Degradability parameter of a bipartite state (first subsystem | rest):
// min over CPTP M of (1/2)||rho_AE - M(rho_AB)||_1 with rho_AE the A-E
// marginal of the purification. env_dim must equal the numerical rank of rho.
EtaStateResult eta_state(const DensityMatrix& rho, int env_dim, double tol = 1e-8,
                         double rank_tol = kRankTol);
ConicProblem eta_state_problem(const DensityMatrix& rho, int env_dim,
                               double rank_tol = kRankTol);

}  // namespace capbound
