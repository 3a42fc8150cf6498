#include "capbound/channel.hpp"

#include <cmath>

namespace capbound {

namespace {

// Column-stacking over (in, out): component (i*dout + a) holds K(a, i).
Vec vec_of(const Mat& k) {
  Vec v(k.rows() * k.cols());
  for (Eigen::Index i = 0; i < k.cols(); ++i)
    for (Eigen::Index a = 0; a < k.rows(); ++a) v[i * k.rows() + a] = k(a, i);
  return v;
}

Mat unvec(const Vec& v, int din, int dout) {
  Mat k(dout, din);
  for (int i = 0; i < din; ++i)
    for (int a = 0; a < dout; ++a) k(a, i) = v[static_cast<Eigen::Index>(i) * dout + a];
  return k;
}

}  // namespace

CPMap CPMap::from_kraus(std::vector<Mat> kraus) {
  if (kraus.empty()) throw std::invalid_argument("CPMap: empty Kraus list");
  const int dout = static_cast<int>(kraus[0].rows());
  const int din = static_cast<int>(kraus[0].cols());
  if (din <= 0 || dout <= 0) throw std::invalid_argument("CPMap: empty Kraus operator");
  for (const Mat& k : kraus)
    if (k.rows() != dout || k.cols() != din)
      throw std::invalid_argument("CPMap: Kraus operators have mismatched shapes");

  CPMap out;
  out.din_ = din;
  out.dout_ = dout;
  out.choi_ = Mat::Zero(static_cast<Eigen::Index>(din) * dout, static_cast<Eigen::Index>(din) * dout);
  Mat acc = Mat::Zero(din, din);
  for (const Mat& k : kraus) {
    Vec v = vec_of(k);
    out.choi_.noalias() += v * v.adjoint();
    acc.noalias() += k.adjoint() * k;
  }
  out.tp_defect_ = max_abs(Mat(acc - Mat::Identity(din, din)));
  out.cptp_ = out.tp_defect_ <= kTraceTol;
  out.kraus_ = std::move(kraus);
  return out;
}

CPMap CPMap::from_choi(const Mat& choi, int dim_in, int dim_out, double psd_tol, double rank_tol) {
  if (dim_in <= 0 || dim_out <= 0) throw std::invalid_argument("CPMap::from_choi: bad dims");
  if (choi.rows() != static_cast<Eigen::Index>(dim_in) * dim_out)
    throw std::invalid_argument("CPMap::from_choi: Choi size does not match dims");
  require_hermitian(choi, "CPMap::from_choi", 1e-9);

  EigH eig = hermitian_eig(choi);
  double lmax = std::max(0.0, eig.values.maxCoeff());
  double floor = -psd_tol * std::max(1.0, lmax);
  std::vector<Mat> kraus;
  for (Eigen::Index i = eig.values.size() - 1; i >= 0; --i) {
    double lam = eig.values[i];
    if (lam < floor) throw std::invalid_argument("CPMap::from_choi: Choi matrix is not PSD");
    if (lam > rank_tol * lmax && lam > 0)
      kraus.push_back(std::sqrt(lam) * unvec(eig.vectors.col(i), dim_in, dim_out));
  }
  if (kraus.empty()) kraus.push_back(Mat::Zero(dim_out, dim_in));
  return from_kraus(std::move(kraus));
}

Mat CPMap::apply(const Mat& rho) const {
  if (rho.rows() != din_ || rho.cols() != din_)
    throw std::invalid_argument("CPMap::apply: input dimension mismatch");
  Mat out = Mat::Zero(dout_, dout_);
  for (const Mat& k : kraus_) out.noalias() += k * rho * k.adjoint();
  return out;
}

DensityMatrix CPMap::apply(const DensityMatrix& rho) const {
  Mat out = apply(rho.matrix());
  return rho.is_substate() || !cptp_ ? DensityMatrix::substate(std::move(out), {dout_})
                                     : DensityMatrix(std::move(out), {dout_});
}

CPMap identity_channel(int d) { return CPMap::from_kraus({Mat::Identity(d, d)}); }

CPMap compose(const CPMap& second, const CPMap& first) {
  if (second.dim_in() != first.dim_out())
    throw std::invalid_argument("compose: dimension mismatch");
  std::vector<Mat> kraus;
  kraus.reserve(second.kraus().size() * first.kraus().size());
  for (const Mat& d : second.kraus())
    for (const Mat& k : first.kraus()) kraus.push_back(d * k);
  return CPMap::from_kraus(std::move(kraus));
}

CPMap complementary(const CPMap& n, double rank_tol) {
  CPMap minimal = CPMap::from_choi(n.choi(), n.dim_in(), n.dim_out(), 1e-7, rank_tol);
  const auto& ks = minimal.kraus();
  const int r = static_cast<int>(ks.size());
  // Environment Kraus: C_b(k, i) = K_k(b, i), one operator per output index.
  std::vector<Mat> ckraus;
  ckraus.reserve(n.dim_out());
  for (int b = 0; b < n.dim_out(); ++b) {
    Mat c(r, n.dim_in());
    for (int k = 0; k < r; ++k) c.row(k) = ks[k].row(b);
    ckraus.push_back(std::move(c));
  }
  return CPMap::from_kraus(std::move(ckraus));
}

DensityMatrix choi_state(const CPMap& n) {
  if (!n.is_cptp()) throw std::invalid_argument("choi_state: map is not trace preserving");
  return DensityMatrix(n.choi() / static_cast<double>(n.dim_in()), {n.dim_in(), n.dim_out()});
}

CPMap CPDecomposition::total() const {
  if (parts.empty()) throw std::invalid_argument("CPDecomposition: no parts");
  std::vector<Mat> kraus;
  for (const CPMap& p : parts)
    for (const Mat& k : p.kraus()) kraus.push_back(k);
  return CPMap::from_kraus(std::move(kraus));
}

CPMap flag_extend(const CPDecomposition& dec) {
  if (dec.parts.empty()) throw std::invalid_argument("flag_extend: no parts");
  if (dec.flags.size() != dec.parts.size())
    throw std::invalid_argument("flag_extend: missing flags");
  const int df = dec.flags[0].dim();
  for (const DensityMatrix& f : dec.flags)
    if (f.dim() != df) throw std::invalid_argument("flag_extend: flag dimensions differ");
  CPMap sum = dec.total();
  if (!sum.is_cptp()) throw std::invalid_argument("flag_extend: parts do not sum to a CPTP map");

  std::vector<Mat> kraus;
  for (size_t j = 0; j < dec.parts.size(); ++j) {
    EigH eig = hermitian_eig(dec.flags[j].matrix());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
      double s = eig.values[i];
      if (s <= 1e-14) continue;
      Mat w = std::sqrt(s) * eig.vectors.col(i);
      for (const Mat& k : dec.parts[j].kraus()) kraus.push_back(tensor(k, w));
    }
  }
  return CPMap::from_kraus(std::move(kraus));
}

CPMap pure_flag_family(const CPMap& n0, const CPMap& n1, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) throw std::domain_error("pure_flag_family: alpha outside [0,1]");
  Mat psi(2, 1), zero(2, 1);
  psi << std::sqrt(alpha), std::sqrt(1.0 - alpha);
  zero << 1.0, 0.0;
  std::vector<Mat> kraus;
  for (const Mat& k : n0.kraus()) kraus.push_back(tensor(k, psi));
  for (const Mat& k : n1.kraus()) kraus.push_back(tensor(k, zero));
  CPMap out = CPMap::from_kraus(std::move(kraus));
  if (!out.is_cptp())
    throw std::invalid_argument("pure_flag_family: parts do not sum to a CPTP map");
  return out;
}

}  // namespace capbound
