#pragma once

#include "capbound/channel.hpp"

#include <cstdint>

namespace capbound {

// I(A>B) = H(rho_B) - H(rho_AB), with A the first subsystem and B the rest.
double state_coherent_info(const DensityMatrix& rho);

// H(N(rho)) - H(N^c(rho)) with the minimal-dilation complement.
double channel_coherent_info_at(const CPMap& n, const DensityMatrix& rho);
double channel_coherent_info_at(const CPMap& n, const CPMap& nc, const Mat& rho);

enum class InputFamily { automatic, bloch, diagonal, full };
const char* to_string(InputFamily f);

struct Q1Options {
  InputFamily family = InputFamily::automatic;
  int restarts = 20;
  std::uint64_t seed = 1;
  double grad_tol = 1e-6;
  int max_iterations = 400;
  double fd_step = 1e-5;  // central-difference step on parameters
};

struct Q1Result {
  double value = 0.0;
  Mat argmax;             // input density matrix achieving the reported value
  double grad_norm = 0.0; // projected gradient norm at the argmax
  bool stationary = false;  // grad_norm <= grad_tol
  InputFamily family_used = InputFamily::bloch;
  int restarts_used = 0;
};

// Multi-start projected-gradient ascent of the coherent information over the
// chosen input family. For degradable channels the objective is concave, so a
// stationary result certifies the global maximum; otherwise the value is a
// lower estimate of Q^(1).
Q1Result q1_maximize(const CPMap& n, const Q1Options& opts = {});

struct DiagScanResult {
  double value = 0.0;
  double p_star = 0.0;
};

// Max of I_c(p|0><0| + (1-p)|1><1|, N) over p, by coarse grid plus
// golden-section refinement (1e-8 resolution in p). Sound as a Q^(1)
// evaluation only under the caller's covariance assertion.
DiagScanResult q1_diagonal_scan(const CPMap& n, int grid = 101);

}  // namespace capbound
