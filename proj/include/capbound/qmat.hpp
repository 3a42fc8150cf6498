#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace capbound {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Shared tolerances. Entropy clamping: eigenvalues in [-kEntropyClamp, 0)
// are treated as 0, anything below is a hard error.
inline constexpr double kHermTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kRankTol = 1e-9;
inline constexpr double kEntropyClamp = 1e-8;

double max_abs(const Mat& m);
bool is_hermitian(const Mat& m, double rel_tol = kHermTol);
void require_hermitian(const Mat& m, const char* what, double rel_tol = kHermTol);

// Kronecker product; dims multiply.
Mat tensor(const Mat& a, const Mat& b);

// dims lists subsystem dimensions, subsystem 0 being the slowest index.
// keep selects the subsystems that survive, in their original order.
Mat partial_trace(const Mat& m, const std::vector<int>& dims, const std::vector<int>& keep);
Mat partial_transpose(const Mat& m, const std::vector<int>& dims, int sys);

// Deterministic Hermitian eigendecomposition: eigenvalues ascending, each
// eigenvector's largest-magnitude component made real positive so repeated
// runs (and downstream Kraus extractions) are reproducible.
struct EigH {
  Eigen::VectorXd values;
  Mat vectors;
};
EigH hermitian_eig(const Mat& m);

// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const Mat& m);

// Count of eigenvalues above rel_tol * lambda_max.
int numerical_rank(const Mat& m, double rel_tol = kRankTol);

double binary_entropy(double p);
double bosonic_entropy(double p);

// Von Neumann entropy in bits of a Hermitian PSD matrix (no trace requirement).
double entropy_of(const Mat& m);

class DensityMatrix {
 public:
  DensityMatrix(Mat m, std::vector<int> dims);
  static DensityMatrix substate(Mat m, std::vector<int> dims);
  static DensityMatrix pure(const Vec& psi, std::vector<int> dims);

  const Mat& matrix() const { return m_; }
  const std::vector<int>& dims() const { return dims_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double trace() const { return m_.trace().real(); }
  bool is_substate() const { return substate_; }

  DensityMatrix traced(const std::vector<int>& keep) const;

 private:
  DensityMatrix() = default;
  Mat m_;
  std::vector<int> dims_;
  bool substate_ = false;
};

double von_neumann_entropy(const DensityMatrix& rho);

// Pure state on original ⊗ env recovering rho when env is traced out.
// env_dim equals the numerical rank of rho at rel_tol.
struct Purification {
  Vec state;
  int env_dim = 0;
};
Purification purify(const DensityMatrix& rho, double rel_tol = kRankTol);

}  // namespace capbound
