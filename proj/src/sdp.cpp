#include "capbound/sdp.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>

namespace capbound {

int ConicProblem::add_block(int dim) {
  if (dim <= 0) throw std::invalid_argument("ConicProblem: block dimension must be positive");
  blocks.push_back(dim);
  return static_cast<int>(blocks.size()) - 1;
}

int ConicProblem::num_vars() const {
  int n = 0;
  for (int b : blocks) n += b;
  return n;
}

namespace {

template <typename Real>
using CMat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RVec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <typename Real>
using RMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
Real sparse_dot(const std::vector<SparseEntry>& entries, const CMat<Real>& x) {
  Real acc = 0;
  for (const SparseEntry& e : entries) {
    std::complex<Real> v(e.value.real(), e.value.imag());
    if (e.row == e.col)
      acc += v.real() * x(e.row, e.row).real();
    else
      acc += Real(2) * (v * x(e.col, e.row)).real();
  }
  return acc;
}

template <typename Real>
void sparse_add(const std::vector<SparseEntry>& entries, Real coef, CMat<Real>& x) {
  for (const SparseEntry& e : entries) {
    std::complex<Real> v(e.value.real(), e.value.imag());
    x(e.row, e.col) += coef * v;
    if (e.row != e.col) x(e.col, e.row) += coef * std::conj(v);
  }
}

template <typename Real>
CMat<Real> sparse_dense(const std::vector<SparseEntry>& entries, int n) {
  CMat<Real> x = CMat<Real>::Zero(n, n);
  sparse_add<Real>(entries, Real(1), x);
  return x;
}

double sparse_fro2(const std::vector<SparseEntry>& entries) {
  double acc = 0.0;
  for (const SparseEntry& e : entries) {
    double a = std::norm(e.value);
    acc += e.row == e.col ? a : 2.0 * a;
  }
  return acc;
}

template <typename Real>
void hermitize(CMat<Real>& x) {
  x = Real(0.5) * (x + x.adjoint()).eval();
}

// Largest step t with b + t*d staying PSD, given b strictly positive definite.
template <typename Real>
Real max_step(const CMat<Real>& b, const CMat<Real>& d) {
  Eigen::LLT<CMat<Real>> llt(b);
  if (llt.info() != Eigen::Success) return Real(0);
  CMat<Real> l = llt.matrixL();
  CMat<Real> tmp = l.template triangularView<Eigen::Lower>().solve(d);
  CMat<Real> g = l.template triangularView<Eigen::Lower>().solve(tmp.adjoint()).adjoint();
  hermitize(g);
  Eigen::SelfAdjointEigenSolver<CMat<Real>> es(g, Eigen::EigenvaluesOnly);
  Real lmin = es.eigenvalues().minCoeff();
  if (lmin >= Real(-1e-13)) return Real(1e16);
  return Real(-1) / lmin;
}

template <typename Real>
struct Scaling {
  CMat<Real> w;     // NT scaling point, W S W = X
  CMat<Real> sinv;  // S^{-1}
};

template <typename Real>
Scaling<Real> nt_scaling(const CMat<Real>& x, const CMat<Real>& s) {
  const Eigen::Index n = x.rows();
  Eigen::LLT<CMat<Real>> llt(s);
  CMat<Real> l;
  if (llt.info() == Eigen::Success) {
    l = llt.matrixL();
  } else {
    // fall back to an eigenvalue-clamped square root
    Eigen::SelfAdjointEigenSolver<CMat<Real>> es(s);
    RVec<Real> lam = es.eigenvalues().cwiseMax(Real(1e-300));
    l = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
  }
  CMat<Real> t = l.adjoint() * x * l;
  hermitize(t);
  Eigen::SelfAdjointEigenSolver<CMat<Real>> es(t);
  RVec<Real> lam = es.eigenvalues().cwiseMax(Real(1e-300));
  CMat<Real> q = l.adjoint().template triangularView<Eigen::Upper>().solve(es.eigenvectors());
  Scaling<Real> out;
  out.w = q * lam.cwiseSqrt().asDiagonal() * q.adjoint();
  hermitize(out.w);
  CMat<Real> linvi = l.template triangularView<Eigen::Lower>().solve(CMat<Real>::Identity(n, n));
  out.sinv = linvi.adjoint() * linvi;
  hermitize(out.sinv);
  return out;
}

template <typename Real>
Mat to_double(const CMat<Real>& x) {
  Mat out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out(i, j) = cplx(static_cast<double>(x(i, j).real()), static_cast<double>(x(i, j).imag()));
  return out;
}

template <typename Real>
ConicSolution solve_impl(const ConicProblem& p, const SolverOptions& opts) {
  using M = CMat<Real>;
  const int nb = static_cast<int>(p.blocks.size());
  const int m = static_cast<int>(p.constraints.size());
  if (static_cast<int>(p.rhs.size()) != m)
    throw std::invalid_argument("solve: rhs size does not match constraint count");
  for (const Constraint& c : p.constraints)
    for (const BlockTerm& t : c.terms)
      if (t.block < 0 || t.block >= nb) throw std::invalid_argument("solve: bad block index");
  const Real ntot = Real(p.num_vars());

  // dense copies of the constraint matrices, per (constraint, block)
  std::vector<std::vector<M>> adense(m);
  std::vector<Real> anorm(m, Real(0));
  for (int i = 0; i < m; ++i) {
    adense[i].resize(nb);
    double fro2 = 0.0;
    for (const BlockTerm& t : p.constraints[i].terms) {
      adense[i][t.block] = sparse_dense<Real>(t.entries, p.blocks[t.block]);
      fro2 += sparse_fro2(t.entries);
    }
    anorm[i] = Real(std::sqrt(fro2));
  }
  std::vector<M> cdense(nb);
  for (int b = 0; b < nb; ++b) cdense[b] = M::Zero(p.blocks[b], p.blocks[b]);
  double cnorm2 = 0.0;
  for (const BlockTerm& t : p.objective) {
    sparse_add<Real>(t.entries, Real(1), cdense[t.block]);
    cnorm2 += sparse_fro2(t.entries);
  }
  const Real cnorm = Real(std::sqrt(cnorm2));

  Real bnorm = 0, bmaxratio = 0;
  std::vector<Real> rhs_real(m);
  for (int i = 0; i < m; ++i) {
    rhs_real[i] = Real(p.rhs[i]);
    bnorm += rhs_real[i] * rhs_real[i];
    bmaxratio = std::max(bmaxratio, (Real(1) + std::abs(rhs_real[i])) / (Real(1) + anorm[i]));
  }
  bnorm = std::sqrt(bnorm);

  const Real xi_p = Real(opts.init_scale) *
                    std::max({Real(10), std::sqrt(ntot), std::sqrt(ntot) * bmaxratio});
  Real amax = 1;
  for (int i = 0; i < m; ++i) amax = std::max(amax, anorm[i]);
  const Real xi_d = Real(opts.init_scale) * std::max({Real(10), std::sqrt(ntot), amax, cnorm});

  std::vector<M> X(nb), S(nb);
  for (int b = 0; b < nb; ++b) {
    X[b] = xi_p * M::Identity(p.blocks[b], p.blocks[b]);
    S[b] = xi_d * M::Identity(p.blocks[b], p.blocks[b]);
  }
  std::vector<Real> y(m, Real(0));

  // best iterate seen, scored by the worst of gap and residuals
  ConicSolution best;
  Real best_score = std::numeric_limits<Real>::infinity();
  auto record = [&](int it, Real pobj, Real dobj, Real gap, Real pinf, Real dinf) {
    Real score = std::max({gap, pinf, dinf});
    if (std::isfinite(static_cast<double>(score)) && score < best_score) {
      best_score = score;
      best.info.iterations = it;
      best.info.primal_value = static_cast<double>(pobj);
      best.info.dual_value = static_cast<double>(dobj);
      best.info.gap = static_cast<double>(gap);
      best.info.primal_residual = static_cast<double>(pinf);
      best.info.dual_residual = static_cast<double>(dinf);
      best.X.clear();
      best.S.clear();
      best.y.assign(m, 0.0);
      for (int b = 0; b < nb; ++b) best.X.push_back(to_double(X[b]));
      for (int b = 0; b < nb; ++b) best.S.push_back(to_double(S[b]));
      for (int i = 0; i < m; ++i) best.y[i] = static_cast<double>(y[i]);
    }
  };

  std::vector<M> Rd(nb), WRW(nb), Rc(nb), dXa(nb), dSa(nb), dX(nb), dS(nb);
  std::vector<Scaling<Real>> sc(nb);
  std::vector<std::vector<M>> pj(m);
  RMat<Real> schur(m, m);
  RVec<Real> rp(m), rhs(m);
  int tiny_steps = 0;
  int stalled = 0;
  Real mu_prev = std::numeric_limits<Real>::infinity();

  int iter = 0;
  for (; iter <= opts.max_iterations; ++iter) {
    Real pobj = 0;
    for (int b = 0; b < nb; ++b) pobj += (cdense[b] * X[b]).trace().real();
    Real dobj = 0;
    for (int i = 0; i < m; ++i) dobj += rhs_real[i] * y[i];

    for (int i = 0; i < m; ++i) {
      Real ax = 0;
      for (const BlockTerm& t : p.constraints[i].terms)
        ax += sparse_dot<Real>(t.entries, X[t.block]);
      rp[i] = rhs_real[i] - ax;
    }
    Real pinf = rp.norm() / (Real(1) + bnorm);

    Real dinf = 0;
    for (int b = 0; b < nb; ++b) {
      Rd[b] = cdense[b] - S[b];
      for (int i = 0; i < m; ++i)
        if (adense[i][b].size() > 0) Rd[b].noalias() -= y[i] * adense[i][b];
      dinf = std::max(dinf, Real(Rd[b].norm()) / (Real(1) + cnorm));
    }

    Real mu = 0;
    for (int b = 0; b < nb; ++b) mu += (X[b] * S[b]).trace().real();
    mu /= ntot;

    Real gap = std::abs(pobj - dobj) / (Real(1) + std::max(std::abs(pobj), std::abs(dobj)));
    if (opts.verbose)
      std::fprintf(stderr, "it %3d  p % .9e  d % .9e  gap %.2e  pinf %.2e  dinf %.2e  mu %.2e\n",
                   iter, static_cast<double>(pobj), static_cast<double>(dobj),
                   static_cast<double>(gap), static_cast<double>(pinf),
                   static_cast<double>(dinf), static_cast<double>(mu));
    if (!std::isfinite(static_cast<double>(mu)) || !std::isfinite(static_cast<double>(pobj)) ||
        !std::isfinite(static_cast<double>(dobj)) || mu <= Real(0))
      break;
    record(iter, pobj, dobj, gap, pinf, dinf);
    if (static_cast<double>(best_score) <= opts.tol) break;
    if (iter == opts.max_iterations || tiny_steps >= 4) break;
    stalled = mu > Real(0.9) * mu_prev ? stalled + 1 : 0;
    if (stalled >= 5) break;
    mu_prev = mu;

    for (int b = 0; b < nb; ++b) {
      sc[b] = nt_scaling<Real>(X[b], S[b]);
      WRW[b] = sc[b].w * Rd[b] * sc[b].w;
      hermitize(WRW[b]);
    }

    // Schur complement M(i,j) = sum_b <A_i, W A_j W>
    for (int j = 0; j < m; ++j) {
      pj[j].assign(nb, M());
      for (const BlockTerm& t : p.constraints[j].terms)
        pj[j][t.block] = sc[t.block].w * adense[j][t.block] * sc[t.block].w;
    }
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        Real acc = 0;
        for (const BlockTerm& t : p.constraints[i].terms)
          if (pj[j][t.block].size() > 0) acc += sparse_dot<Real>(t.entries, pj[j][t.block]);
        schur(i, j) = acc;
        schur(j, i) = acc;
      }

    // Jacobi-scaled factorization for conditioning
    RVec<Real> dscale(m);
    for (int i = 0; i < m; ++i)
      dscale[i] = Real(1) / std::sqrt(std::max(schur(i, i), Real(1e-300)));
    RMat<Real> ms = dscale.asDiagonal() * schur * dscale.asDiagonal();
    ms.diagonal().array() += Real(1e-14);
    Eigen::LDLT<RMat<Real>> ldlt(ms);

    auto schur_solve = [&](const RVec<Real>& r) {
      RVec<Real> rs = dscale.asDiagonal() * r;
      RVec<Real> z = ldlt.solve(rs);
      // extended-precision residual refinement
      for (int round = 0; round < 3; ++round) {
        RVec<Real> res(m);
        for (int i = 0; i < m; ++i) {
          long double acc = static_cast<long double>(rs[i]);
          for (int j = 0; j < m; ++j)
            acc -= static_cast<long double>(ms(i, j)) * static_cast<long double>(z[j]);
          res[i] = static_cast<Real>(acc);
        }
        z += ldlt.solve(res);
      }
      return RVec<Real>(dscale.asDiagonal() * z);
    };

    std::vector<M> dmat(nb);
    auto direction = [&](const std::vector<M>& rc, std::vector<Real>& dy, std::vector<M>& ds,
                         std::vector<M>& dx) {
      for (int b = 0; b < nb; ++b) dmat[b] = WRW[b] - rc[b];
      for (int i = 0; i < m; ++i) {
        Real acc = rp[i];
        for (const BlockTerm& t : p.constraints[i].terms)
          acc += sparse_dot<Real>(t.entries, dmat[t.block]);
        rhs[i] = acc;
      }
      RVec<Real> dyv = schur_solve(rhs);
      dy.assign(dyv.data(), dyv.data() + m);
      for (int b = 0; b < nb; ++b) {
        ds[b] = Rd[b];
        for (int i = 0; i < m; ++i)
          if (adense[i][b].size() > 0) ds[b].noalias() -= dy[i] * adense[i][b];
        dx[b] = rc[b] - sc[b].w * ds[b] * sc[b].w;
        hermitize(dx[b]);
      }
    };

    // predictor (affine direction, Rc = -X)
    for (int b = 0; b < nb; ++b) Rc[b] = -X[b];
    std::vector<Real> dya(m), dy(m);
    direction(Rc, dya, dSa, dXa);

    Real apa = 1, ada = 1;
    for (int b = 0; b < nb; ++b) {
      apa = std::min(apa, max_step<Real>(X[b], dXa[b]));
      ada = std::min(ada, max_step<Real>(S[b], dSa[b]));
    }
    Real mu_aff = 0;
    for (int b = 0; b < nb; ++b)
      mu_aff += ((X[b] + apa * dXa[b]) * (S[b] + ada * dSa[b])).trace().real();
    mu_aff = std::max(mu_aff / ntot, Real(0));
    Real sigma = std::clamp(Real(std::pow(static_cast<double>(mu_aff / mu), 3.0)), Real(1e-10),
                            Real(1));

    // corrector with the second-order term
    for (int b = 0; b < nb; ++b) {
      M second = dXa[b] * dSa[b] * sc[b].sinv;
      Rc[b] = sigma * mu * sc[b].sinv - X[b] - Real(0.5) * (second + second.adjoint());
      hermitize(Rc[b]);
    }
    direction(Rc, dy, dS, dX);

    auto boundary = [&](const std::vector<M>& dx, const std::vector<M>& ds) {
      Real bp = Real(1e16), bd = Real(1e16);
      for (int b = 0; b < nb; ++b) {
        bp = std::min(bp, max_step<Real>(X[b], dx[b]));
        bd = std::min(bd, max_step<Real>(S[b], ds[b]));
      }
      return std::pair<Real, Real>{bp, bd};
    };
    auto [ap, ad] = boundary(dX, dS);

    // the second-order term can wreck the direction at degenerate optima;
    // fall back to a plain centering direction when the step collapses
    if (std::min(ap, ad) < Real(0.2) * std::min({apa, ada, Real(1)})) {
      Real sig2 = std::max(sigma, Real(0.5));
      std::vector<Real> dy2(m);
      std::vector<M> dS2(nb), dX2(nb);
      for (int b = 0; b < nb; ++b) Rc[b] = sig2 * mu * sc[b].sinv - X[b];
      direction(Rc, dy2, dS2, dX2);
      auto [ap2, ad2] = boundary(dX2, dS2);
      if (std::min(ap2, ad2) > std::min(ap, ad)) {
        dy = dy2;
        dS = dS2;
        dX = dX2;
        ap = ap2;
        ad = ad2;
      }
    }

    Real gamma = Real(0.9) + Real(0.09) * std::min({apa, ada, Real(1)});
    ap = std::min(Real(1), gamma * ap);
    ad = std::min(Real(1), gamma * ad);
    // symmetric steps once centered enough; asymmetric steps skew the
    // X-S eigenvalue pairing and wreck the NT scaling at the endgame
    if (mu < Real(1e-3)) ap = ad = std::min(ap, ad);
    if (opts.verbose)
      std::fprintf(stderr, "      affine(%.2e,%.2e) sigma %.2e step(%.2e,%.2e)\n",
                   static_cast<double>(apa), static_cast<double>(ada),
                   static_cast<double>(sigma), static_cast<double>(ap),
                   static_cast<double>(ad));

    if (std::min(ap, ad) < Real(1e-3))
      ++tiny_steps;
    else
      tiny_steps = 0;

    for (int b = 0; b < nb; ++b) {
      X[b] += ap * dX[b];
      hermitize(X[b]);
      S[b] += ad * dS[b];
      hermitize(S[b]);
    }
    for (int i = 0; i < m; ++i) y[i] += ad * dy[i];
  }

  if (best.X.empty()) {
    for (int b = 0; b < nb; ++b) best.X.push_back(to_double(X[b]));
    for (int b = 0; b < nb; ++b) best.S.push_back(to_double(S[b]));
    best.y.assign(m, 0.0);
    for (int i = 0; i < m; ++i) best.y[i] = static_cast<double>(y[i]);
    best.info.iterations = iter;
    best.info.gap = std::numeric_limits<double>::quiet_NaN();
  }
  best.info.status = static_cast<double>(best_score) <= std::max(opts.tol, opts.accept_tol)
                         ? SolveStatus::optimal
                         : SolveStatus::max_iterations;
  if (best.info.status != SolveStatus::optimal) {
    double ynorm = 0.0;
    for (double v : best.y) ynorm = std::max(ynorm, std::abs(v));
    if (best.info.dual_residual <= opts.tol && ynorm > 1e12)
      best.info.status = SolveStatus::infeasible;
  }
  return best;
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::max_iterations: return "max-iterations";
  }
  return "unknown";
}

ConicSolution solve(const ConicProblem& p, const SolverOptions& opts) {
  return solve_impl<double>(p, opts);
}

ConicSolution solve_robust(const ConicProblem& p, SolverOptions opts) {
  ConicSolution best;
  double best_score = std::numeric_limits<double>::infinity();
  auto attempt = [&](const ConicSolution& sol) {
    double score = std::max({sol.info.gap, sol.info.primal_residual, sol.info.dual_residual});
    if (!(score >= best_score)) {
      best_score = score;
      best = sol;
    }
    return sol.info.status == SolveStatus::optimal;
  };
  for (double scale : {1.0, 0.1, 10.0, 0.01}) {
    opts.init_scale = scale;
    ConicSolution sol = solve_impl<double>(p, opts);
    if (attempt(sol)) return sol;
  }
  // extended-precision rescue for instances double precision cannot certify
  // (degenerate optima at the boundary of degradability)
  for (double scale : {1.0, 0.1}) {
    opts.init_scale = scale;
    ConicSolution sol = solve_impl<long double>(p, opts);
    if (attempt(sol)) return sol;
  }
  return best;
}

void require_optimal(const ConicSolution& sol, const std::string& what) {
  if (sol.info.status != SolveStatus::optimal) {
    char detail[128];
    std::snprintf(detail, sizeof(detail), " (status %s, gap %.2e, pinf %.2e, dinf %.2e)",
                  to_string(sol.info.status), sol.info.gap, sol.info.primal_residual,
                  sol.info.dual_residual);
    throw SolverError(what + ": solver did not reach optimality" + detail);
  }
}

// --- constraint builder -----------------------------------------------------

void add_matrix_equality(ConicProblem& p, const std::vector<MapTerm>& terms, const Mat& rhs) {
  const int nt = static_cast<int>(rhs.rows());
  if (rhs.cols() != nt) throw std::invalid_argument("add_matrix_equality: rhs is not square");
  require_hermitian(rhs, "add_matrix_equality", 1e-9);

  struct Probe {
    int block;
    int nv;
    std::vector<Mat> images;  // indexed by Hermitian basis element
  };
  std::vector<Probe> probes;
  for (const MapTerm& t : terms) {
    if (t.block < 0 || t.block >= static_cast<int>(p.blocks.size()))
      throw std::invalid_argument("add_matrix_equality: bad block index");
    Probe pr{t.block, p.blocks[t.block], {}};
    pr.images.reserve(static_cast<size_t>(pr.nv) * pr.nv);
    Mat h = Mat::Zero(pr.nv, pr.nv);
    auto push_image = [&](const Mat& basis) {
      Mat img = t.apply(basis);
      if (img.rows() != nt || img.cols() != nt)
        throw std::invalid_argument("add_matrix_equality: map target size mismatch");
      hermitize(img);
      pr.images.push_back(std::move(img));
    };
    for (int r = 0; r < pr.nv; ++r) {
      h(r, r) = 1.0;
      push_image(h);
      h(r, r) = 0.0;
    }
    for (int r = 0; r < pr.nv; ++r)
      for (int c = r + 1; c < pr.nv; ++c) {
        h(r, c) = 1.0;
        h(c, r) = 1.0;
        push_image(h);
        h(r, c) = cplx(0.0, 1.0);
        h(c, r) = cplx(0.0, -1.0);
        push_image(h);
        h(r, c) = 0.0;
        h(c, r) = 0.0;
      }
    probes.push_back(std::move(pr));
  }

  // target-space pairing of row g with a Hermitian matrix
  auto make_row = [&](auto&& pairing, double bval) {
    Constraint con;
    for (const Probe& pr : probes) {
      BlockTerm bt{pr.block, {}};
      std::vector<cplx> upper(static_cast<size_t>(pr.nv) * pr.nv, cplx(0.0));
      size_t h = 0;
      for (int r = 0; r < pr.nv; ++r, ++h) {
        double k = pairing(pr.images[h]);
        upper[static_cast<size_t>(r) * pr.nv + r] += k;
      }
      for (int r = 0; r < pr.nv; ++r)
        for (int c = r + 1; c < pr.nv; ++c) {
          double kre = pairing(pr.images[h++]);
          double kim = pairing(pr.images[h++]);
          upper[static_cast<size_t>(r) * pr.nv + c] += cplx(kre * 0.5, kim * 0.5);
        }
      for (int r = 0; r < pr.nv; ++r)
        for (int c = r; c < pr.nv; ++c) {
          cplx v = upper[static_cast<size_t>(r) * pr.nv + c];
          if (std::abs(v) > 0.0) bt.entries.push_back({r, c, v});
        }
      if (!bt.entries.empty()) con.terms.push_back(std::move(bt));
    }
    p.constraints.push_back(std::move(con));
    p.rhs.push_back(bval);
  };

  for (int k = 0; k < nt; ++k)
    make_row([&](const Mat& img) { return img(k, k).real(); }, rhs(k, k).real());
  for (int k = 0; k < nt; ++k)
    for (int l = k + 1; l < nt; ++l) {
      make_row([&](const Mat& img) { return 2.0 * img(k, l).real(); }, 2.0 * rhs(k, l).real());
      make_row([&](const Mat& img) { return 2.0 * img(k, l).imag(); }, 2.0 * rhs(k, l).imag());
    }
}

// --- programs ---------------------------------------------------------------

namespace {

// out_{(a e),(a' e')} = sum_{b b'} K_{(a b),(a' b')} J_{(b e),(b' e')}.
// With K the Choi matrix of N this is the Choi of D∘N as a linear function of
// J = J_D; with K a bipartite state it is (id ⊗ M)(K) as a function of J_M.
Mat link_product(const Mat& k, int da, int db, const Mat& j, int de) {
  Mat out = Mat::Zero(static_cast<Eigen::Index>(da) * de, static_cast<Eigen::Index>(da) * de);
  for (int a = 0; a < da; ++a)
    for (int a2 = 0; a2 < da; ++a2)
      for (int b = 0; b < db; ++b)
        for (int b2 = 0; b2 < db; ++b2) {
          cplx kv = k(a * db + b, a2 * db + b2);
          if (kv == cplx(0.0)) continue;
          for (int e = 0; e < de; ++e)
            for (int e2 = 0; e2 < de; ++e2)
              out(a * de + e, a2 * de + e2) += kv * j(b * de + e, b2 * de + e2);
        }
  return out;
}

void set_objective_entry(ConicProblem& p, int block, int row, int col, cplx v) {
  for (BlockTerm& t : p.objective)
    if (t.block == block) {
      t.entries.push_back({row, col, v});
      return;
    }
  p.objective.push_back({block, {{row, col, v}}});
}

CPMap trace_map(int dim_in) {
  std::vector<Mat> kraus;
  for (int b = 0; b < dim_in; ++b) {
    Mat k = Mat::Zero(1, dim_in);
    k(0, b) = 1.0;
    kraus.push_back(std::move(k));
  }
  return CPMap::from_kraus(std::move(kraus));
}

}  // namespace

ConicProblem diamond_distance_problem(const Mat& choi_delta, int dim_in, int dim_out) {
  const int dab = dim_in * dim_out;
  if (choi_delta.rows() != dab || choi_delta.cols() != dab)
    throw std::invalid_argument("diamond_distance_problem: Choi size mismatch");
  ConicProblem p;
  p.name = "diamond-distance";
  const int z = p.add_block(dab);
  const int w = p.add_block(dab);
  const int v = p.add_block(dim_in);
  const int mu = p.add_block(1);

  add_matrix_equality(
      p,
      {{z, [](const Mat& x) { return x; }}, {w, [](const Mat& x) { return Mat(-x); }}},
      choi_delta);
  add_matrix_equality(
      p,
      {{z, [=](const Mat& x) { return partial_trace(x, {dim_in, dim_out}, {0}); }},
       {v, [](const Mat& x) { return x; }},
       {mu, [=](const Mat& x) { return Mat(-x(0, 0) * Mat::Identity(dim_in, dim_in)); }}},
      Mat::Zero(dim_in, dim_in));
  set_objective_entry(p, mu, 0, 0, 1.0);
  return p;
}

DiamondResult diamond_distance(const CPMap& a, const CPMap& b, double tol) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out())
    throw std::invalid_argument("diamond_distance: dimension mismatch");
  ConicProblem p = diamond_distance_problem(Mat(a.choi() - b.choi()), a.dim_in(), a.dim_out());
  SolverOptions sopts;
  sopts.tol = tol;
  ConicSolution sol = solve_robust(p, sopts);
  require_optimal(sol, "diamond_distance");
  return DiamondResult{sol.info.primal_value, sol.info};
}

ConicProblem eta_channel_problem(const CPMap& n, const CPMap& nc) {
  const int da = n.dim_in();
  const int db = n.dim_out();
  const int de = nc.dim_out();
  ConicProblem p;
  p.name = "eta-channel";
  const int z = p.add_block(da * de);
  const int w = p.add_block(da * de);
  const int v = p.add_block(da);
  const int jd = p.add_block(db * de);
  const int mu = p.add_block(1);

  add_matrix_equality(p, {{jd, [=](const Mat& x) { return partial_trace(x, {db, de}, {0}); }}},
                      Mat::Identity(db, db));
  Mat jn = n.choi();
  add_matrix_equality(
      p,
      {{z, [](const Mat& x) { return x; }},
       {w, [](const Mat& x) { return Mat(-x); }},
       {jd, [=](const Mat& x) { return link_product(jn, da, db, x, de); }}},
      nc.choi());
  add_matrix_equality(
      p,
      {{z, [=](const Mat& x) { return partial_trace(x, {da, de}, {0}); }},
       {v, [](const Mat& x) { return x; }},
       {mu, [=](const Mat& x) { return Mat(-x(0, 0) * Mat::Identity(da, da)); }}},
      Mat::Zero(da, da));
  set_objective_entry(p, mu, 0, 0, 1.0);
  return p;
}

EtaChannelResult eta_channel(const CPMap& n, double tol, double rank_tol) {
  CPMap nc = complementary(n, rank_tol);
  const int de = nc.dim_out();
  if (de == 1) {
    // isometry channel: the complement is the trace map and degrading by
    // tracing the output reproduces it exactly
    EtaChannelResult out{0.0, trace_map(n.dim_out()), 1, {}};
    out.info.status = SolveStatus::optimal;
    return out;
  }
  ConicProblem p = eta_channel_problem(n, nc);
  SolverOptions sopts;
  sopts.tol = tol;
  ConicSolution sol = solve_robust(p, sopts);
  require_optimal(sol, "eta_channel");
  const int jd_block = 3;
  CPMap degrading = CPMap::from_choi(sol.X[jd_block], n.dim_out(), de, 1e-5, rank_tol);
  return EtaChannelResult{sol.info.primal_value, std::move(degrading), de, sol.info};
}

ConicProblem eta_state_problem(const DensityMatrix& rho, int env_dim, double rank_tol) {
  const auto& dims = rho.dims();
  if (dims.size() < 2) throw std::invalid_argument("eta_state: state must be bipartite");
  const int da = dims[0];
  const int db = rho.dim() / da;
  const int de = env_dim;

  Purification pur = purify(rho, rank_tol);
  if (pur.env_dim > de)
    throw std::invalid_argument("eta_state: env_dim below the numerical rank of the state");
  Vec phi = Vec::Zero(static_cast<Eigen::Index>(rho.dim()) * de);
  for (Eigen::Index i = 0; i < rho.dim(); ++i)
    for (int k = 0; k < pur.env_dim; ++k) phi[i * de + k] = pur.state[i * pur.env_dim + k];
  Mat full = phi * phi.adjoint();
  Mat rho_ae = partial_trace(full, {da, db, de}, {0, 2});

  ConicProblem p;
  p.name = "eta-state";
  const int bp = p.add_block(da * de);
  const int bq = p.add_block(da * de);
  const int jm = p.add_block(db * de);

  add_matrix_equality(p, {{jm, [=](const Mat& x) { return partial_trace(x, {db, de}, {0}); }}},
                      Mat::Identity(db, db));
  Mat rho_ab = rho.matrix();
  add_matrix_equality(
      p,
      {{bp, [](const Mat& x) { return x; }},
       {bq, [](const Mat& x) { return Mat(-x); }},
       {jm, [=](const Mat& x) { return link_product(rho_ab, da, db, x, de); }}},
      rho_ae);
  for (int k = 0; k < da * de; ++k) {
    set_objective_entry(p, bp, k, k, 0.5);
    set_objective_entry(p, bq, k, k, 0.5);
  }
  return p;
}

EtaStateResult eta_state(const DensityMatrix& rho, int env_dim, double tol, double rank_tol) {
  const auto& dims = rho.dims();
  if (dims.size() < 2) throw std::invalid_argument("eta_state: state must be bipartite");
  const int db = rho.dim() / dims[0];
  if (env_dim == 1) {
    // pure state: the trace map reproduces the trivial A-E marginal exactly
    EtaStateResult out{0.0, trace_map(db), 1, {}};
    out.info.status = SolveStatus::optimal;
    return out;
  }
  ConicProblem p = eta_state_problem(rho, env_dim, rank_tol);
  SolverOptions sopts;
  sopts.tol = tol;
  ConicSolution sol = solve_robust(p, sopts);
  require_optimal(sol, "eta_state");
  CPMap degrading = CPMap::from_choi(sol.X[2], db, env_dim, 1e-5);
  return EtaStateResult{sol.info.primal_value, std::move(degrading), env_dim, sol.info};
}

}  // namespace capbound
