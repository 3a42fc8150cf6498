#include "capbound/qmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace capbound {

namespace {

long long total_dim(const std::vector<int>& dims) {
  long long d = 1;
  for (int x : dims) {
    if (x <= 0) throw std::invalid_argument("subsystem dimension must be positive");
    d *= x;
  }
  return d;
}

void check_dims(const Mat& m, const std::vector<int>& dims) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  if (total_dim(dims) != m.rows())
    throw std::invalid_argument("subsystem dimensions do not match matrix size");
}

}  // namespace

double max_abs(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Mat& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  double scale = std::max(1.0, max_abs(m));
  return max_abs(Mat(m - m.adjoint())) <= rel_tol * scale;
}

void require_hermitian(const Mat& m, const char* what, double rel_tol) {
  if (!is_hermitian(m, rel_tol))
    throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
}

Mat tensor(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat partial_trace(const Mat& m, const std::vector<int>& dims, const std::vector<int>& keep) {
  check_dims(m, dims);
  const int k = static_cast<int>(dims.size());
  std::vector<bool> kept(k, false);
  for (int s : keep) {
    if (s < 0 || s >= k) throw std::out_of_range("partial_trace: subsystem index out of range");
    if (kept[s]) throw std::invalid_argument("partial_trace: repeated subsystem index");
    kept[s] = true;
  }

  std::vector<long long> stride(k, 1);
  for (int s = k - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

  std::vector<int> keep_sorted, traced;
  for (int s = 0; s < k; ++s) (kept[s] ? keep_sorted : traced).push_back(s);

  long long dkeep = 1, dtr = 1;
  for (int s : keep_sorted) dkeep *= dims[s];
  for (int s : traced) dtr *= dims[s];

  // base index of a flat multi-index over the given subsystem list
  auto expand = [&](long long flat, const std::vector<int>& sys) {
    long long idx = 0;
    for (int pos = static_cast<int>(sys.size()) - 1; pos >= 0; --pos) {
      int s = sys[pos];
      idx += (flat % dims[s]) * stride[s];
      flat /= dims[s];
    }
    return idx;
  };

  Mat out = Mat::Zero(dkeep, dkeep);
  for (long long r = 0; r < dkeep; ++r) {
    long long rbase = expand(r, keep_sorted);
    for (long long c = 0; c < dkeep; ++c) {
      long long cbase = expand(c, keep_sorted);
      cplx acc = 0.0;
      for (long long t = 0; t < dtr; ++t) {
        long long tbase = expand(t, traced);
        acc += m(rbase + tbase, cbase + tbase);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

Mat partial_transpose(const Mat& m, const std::vector<int>& dims, int sys) {
  check_dims(m, dims);
  const int k = static_cast<int>(dims.size());
  if (sys < 0 || sys >= k) throw std::out_of_range("partial_transpose: subsystem index out of range");

  std::vector<long long> stride(k, 1);
  for (int s = k - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

  const long long d = m.rows();
  Mat out(d, d);
  for (long long r = 0; r < d; ++r) {
    long long ri = (r / stride[sys]) % dims[sys];
    for (long long c = 0; c < d; ++c) {
      long long ci = (c / stride[sys]) % dims[sys];
      long long r2 = r + (ci - ri) * stride[sys];
      long long c2 = c + (ri - ci) * stride[sys];
      out(r2, c2) = m(r, c);
    }
  }
  return out;
}

EigH hermitian_eig(const Mat& m) {
  require_hermitian(m, "hermitian_eig", 1e-9);
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("hermitian_eig: eigensolver failed");
  EigH out{es.eigenvalues(), es.eigenvectors()};
  for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < out.vectors.rows(); ++i) {
      double a = std::abs(out.vectors(i, j));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    cplx v = out.vectors(imax, j);
    if (std::abs(v) > 0) out.vectors.col(j) *= std::conj(v) / std::abs(v);
  }
  return out;
}

double trace_norm(const Mat& m) {
  require_hermitian(m, "trace_norm", 1e-9);
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

int numerical_rank(const Mat& m, double rel_tol) {
  require_hermitian(m, "numerical_rank", 1e-9);
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  double lmax = es.eigenvalues().maxCoeff();
  if (lmax <= 0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > rel_tol * lmax) ++r;
  return r;
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::domain_error("binary_entropy: p outside [0,1]");
  double out = 0.0;
  if (p > 0.0) out -= p * std::log2(p);
  if (p < 1.0) out -= (1.0 - p) * std::log2(1.0 - p);
  return out;
}

double bosonic_entropy(double p) {
  if (p < 0.0) throw std::domain_error("bosonic_entropy: p must be nonnegative");
  if (p == 0.0) return 0.0;
  return (1.0 + p) * binary_entropy(p / (1.0 + p));
}

double entropy_of(const Mat& m) {
  require_hermitian(m, "entropy_of", 1e-9);
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  double h = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double lam = es.eigenvalues()[i];
    if (lam < -kEntropyClamp)
      throw std::invalid_argument("entropy_of: input is not PSD (eigenvalue < -1e-8)");
    if (lam > 0.0) h -= lam * std::log2(lam);
  }
  return h;
}

DensityMatrix::DensityMatrix(Mat m, std::vector<int> dims) {
  check_dims(m, dims);
  require_hermitian(m, "DensityMatrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol)
    throw std::invalid_argument("DensityMatrix: matrix is not PSD");
  if (std::abs(m.trace().real() - 1.0) > kTraceTol)
    throw std::invalid_argument("DensityMatrix: trace is not 1");
  m_ = std::move(m);
  dims_ = std::move(dims);
}

DensityMatrix DensityMatrix::substate(Mat m, std::vector<int> dims) {
  check_dims(m, dims);
  require_hermitian(m, "DensityMatrix::substate");
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol)
    throw std::invalid_argument("DensityMatrix::substate: matrix is not PSD");
  double tr = m.trace().real();
  if (tr < -kTraceTol || tr > 1.0 + kTraceTol)
    throw std::invalid_argument("DensityMatrix::substate: trace outside [0,1]");
  DensityMatrix out;
  out.m_ = std::move(m);
  out.dims_ = std::move(dims);
  out.substate_ = true;
  return out;
}

DensityMatrix DensityMatrix::pure(const Vec& psi, std::vector<int> dims) {
  return DensityMatrix(psi * psi.adjoint() / psi.squaredNorm(), std::move(dims));
}

DensityMatrix DensityMatrix::traced(const std::vector<int>& keep) const {
  std::vector<int> kept_dims;
  for (int s : keep) {
    if (s < 0 || s >= static_cast<int>(dims_.size()))
      throw std::out_of_range("DensityMatrix::traced: subsystem index out of range");
    kept_dims.push_back(dims_[s]);
  }
  Mat reduced = partial_trace(m_, dims_, keep);
  return substate_ ? DensityMatrix::substate(std::move(reduced), std::move(kept_dims))
                   : DensityMatrix(std::move(reduced), std::move(kept_dims));
}

double von_neumann_entropy(const DensityMatrix& rho) { return entropy_of(rho.matrix()); }

Purification purify(const DensityMatrix& rho, double rel_tol) {
  EigH eig = hermitian_eig(rho.matrix());
  double lmax = eig.values.maxCoeff();
  std::vector<int> kept;
  for (Eigen::Index i = eig.values.size() - 1; i >= 0; --i)
    if (lmax > 0 && eig.values[i] > rel_tol * lmax) kept.push_back(static_cast<int>(i));

  const int d = rho.dim();
  const int r = std::max<int>(1, static_cast<int>(kept.size()));
  Vec psi = Vec::Zero(static_cast<Eigen::Index>(d) * r);
  for (int k = 0; k < static_cast<int>(kept.size()); ++k) {
    double s = std::sqrt(eig.values[kept[k]]);
    for (int i = 0; i < d; ++i) psi[static_cast<Eigen::Index>(i) * r + k] = s * eig.vectors(i, kept[k]);
  }
  return Purification{std::move(psi), r};
}

}  // namespace capbound
