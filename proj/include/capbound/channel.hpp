#pragma once

#include "capbound/qmat.hpp"

namespace capbound {

// Completely positive map held as a Kraus list with cached (unnormalized)
// Choi matrix J = sum_ij |i><j| ⊗ N(|i><j|). Trace preservation is a
// computed flag, never an assumption.
class CPMap {
 public:
  static CPMap from_kraus(std::vector<Mat> kraus);
  // Minimal Kraus extraction from a PSD Choi matrix. Eigenvalues in
  // [-psd_tol, 0) are clamped; anything lower is an error.
  static CPMap from_choi(const Mat& choi, int dim_in, int dim_out,
                         double psd_tol = 1e-7, double rank_tol = kRankTol);

  int dim_in() const { return din_; }
  int dim_out() const { return dout_; }
  const std::vector<Mat>& kraus() const { return kraus_; }
  const Mat& choi() const { return choi_; }
  bool is_cptp() const { return cptp_; }
  double tp_defect() const { return tp_defect_; }  // max |sum K'K - I|

  Mat apply(const Mat& rho) const;
  DensityMatrix apply(const DensityMatrix& rho) const;

 private:
  CPMap() = default;
  int din_ = 0, dout_ = 0;
  std::vector<Mat> kraus_;
  Mat choi_;
  bool cptp_ = false;
  double tp_defect_ = 0.0;
};

CPMap identity_channel(int d);

// second ∘ first
CPMap compose(const CPMap& second, const CPMap& first);

// Complementary channel from the minimal Kraus set (Choi rank), so the
// environment dimension entering continuity terms is minimal.
CPMap complementary(const CPMap& n, double rank_tol = kRankTol);

DensityMatrix choi_state(const CPMap& n);

// Ordered CP maps summing to a CPTP map, with optional flag states.
struct CPDecomposition {
  std::vector<CPMap> parts;
  std::vector<DensityMatrix> flags;

  CPMap total() const;
  bool has_flags() const { return !flags.empty(); }
};

// N(rho) = sum_j N_j(rho) ⊗ sigma_j on output ⊗ flag.
CPMap flag_extend(const CPDecomposition& dec);

// Two-part flagged family N0 ⊗ |psi_a><psi_a| + N1 ⊗ |0><0| with
// |psi_a> = sqrt(a)|0> + sqrt(1-a)|1>. a = 1 makes the flags identical,
// a = 0 orthogonal.
CPMap pure_flag_family(const CPMap& n0, const CPMap& n1, double alpha);

}  // namespace capbound
