#include "capbound/coherent.hpp"

#include <cmath>
#include <random>

namespace capbound {

double state_coherent_info(const DensityMatrix& rho) {
  if (rho.dims().size() < 2)
    throw std::invalid_argument("state_coherent_info: state must be bipartite");
  std::vector<int> rest(rho.dims().size() - 1);
  for (size_t i = 1; i < rho.dims().size(); ++i) rest[i - 1] = static_cast<int>(i);
  Mat rho_b = partial_trace(rho.matrix(), rho.dims(), rest);
  return entropy_of(rho_b) - entropy_of(rho.matrix());
}

double channel_coherent_info_at(const CPMap& n, const CPMap& nc, const Mat& rho) {
  return entropy_of(n.apply(rho)) - entropy_of(nc.apply(rho));
}

double channel_coherent_info_at(const CPMap& n, const DensityMatrix& rho) {
  CPMap nc = complementary(n);
  return channel_coherent_info_at(n, nc, rho.matrix());
}

namespace {

const char* family_names[] = {"automatic", "bloch", "diagonal", "full"};

using Params = Eigen::VectorXd;

// Parametrizations map a real vector to a density matrix; project pulls a
// vector back into the feasible region.
struct Ansatz {
  int nparams;
  std::function<Mat(const Params&)> state;
  std::function<Params(const Params&)> project;
};

void project_simplex(Eigen::Ref<Eigen::VectorXd> v) {
  // Euclidean projection onto the probability simplex
  const int n = static_cast<int>(v.size());
  Eigen::VectorXd u = v;
  std::sort(u.data(), u.data() + n, std::greater<double>());
  double css = 0.0, theta = 0.0;
  for (int i = 0; i < n; ++i) {
    css += u[i];
    double t = (css - 1.0) / (i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  for (int i = 0; i < n; ++i) v[i] = std::max(v[i] - theta, 0.0);
}

Ansatz make_bloch() {
  Ansatz a;
  a.nparams = 3;
  a.state = [](const Params& r) {
    Mat rho(2, 2);
    rho(0, 0) = 0.5 * (1.0 + r[2]);
    rho(1, 1) = 0.5 * (1.0 - r[2]);
    rho(0, 1) = 0.5 * cplx(r[0], -r[1]);
    rho(1, 0) = 0.5 * cplx(r[0], r[1]);
    return rho;
  };
  a.project = [](const Params& r) {
    double n = r.norm();
    return n <= 1.0 ? r : Params(r / n);
  };
  return a;
}

Ansatz make_diagonal(int d) {
  Ansatz a;
  a.nparams = d;
  a.state = [d](const Params& p) {
    Mat rho = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) rho(i, i) = p[i];
    return rho;
  };
  a.project = [](const Params& p) {
    Params q = p;
    project_simplex(q);
    return q;
  };
  return a;
}

// Eigenvalue simplex times a unitary generated as exp(iH).
Ansatz make_full(int d) {
  Ansatz a;
  a.nparams = d + d * d;
  a.state = [d](const Params& p) {
    Mat h = Mat::Zero(d, d);
    int idx = d;
    for (int i = 0; i < d; ++i) h(i, i) = p[idx++];
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        h(i, j) = cplx(p[idx], -p[idx + 1]);
        h(j, i) = cplx(p[idx], p[idx + 1]);
        idx += 2;
      }
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Vec phases(d);
    for (int i = 0; i < d; ++i) phases[i] = std::exp(cplx(0.0, es.eigenvalues()[i]));
    Mat u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    Mat rho = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) rho(i, i) = p[i];
    return Mat(u * rho * u.adjoint());
  };
  a.project = [d](const Params& p) {
    Params q = p;
    project_simplex(q.head(d));
    return q;
  };
  return a;
}

struct AscentResult {
  double value;
  Params point;
  double grad_norm;
};

AscentResult ascend(const std::function<double(const Params&)>& f, const Ansatz& a, Params x,
                    const Q1Options& opts) {
  x = a.project(x);
  double fx = f(x);
  const double h = opts.fd_step;
  Params g(a.nparams);
  double step = 0.25;
  double pg_norm = 0.0;

  for (int it = 0; it < opts.max_iterations; ++it) {
    for (int i = 0; i < a.nparams; ++i) {
      Params xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      g[i] = (f(a.project(xp)) - f(a.project(xm))) / (2.0 * h);
    }
    pg_norm = (a.project(x + g) - x).norm();
    if (pg_norm <= opts.grad_tol) break;

    double t = step;
    bool improved = false;
    for (int bt = 0; bt < 40; ++bt) {
      Params xn = a.project(x + t * g);
      double fn = f(xn);
      if (fn > fx + 1e-4 * t * g.squaredNorm() || (fn > fx && t < 1e-10)) {
        x = xn;
        fx = fn;
        step = std::min(t * 1.6, 4.0);
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;
  }
  return {fx, x, pg_norm};
}

}  // namespace

const char* to_string(InputFamily f) { return family_names[static_cast<int>(f)]; }

Q1Result q1_maximize(const CPMap& n, const Q1Options& opts) {
  const int d = n.dim_in();
  InputFamily family = opts.family;
  if (family == InputFamily::automatic) family = d == 2 ? InputFamily::bloch : InputFamily::full;

  Ansatz ansatz = family == InputFamily::bloch      ? make_bloch()
                  : family == InputFamily::diagonal ? make_diagonal(d)
                                                    : make_full(d);
  if (family == InputFamily::bloch && d != 2)
    throw std::invalid_argument("q1_maximize: bloch family needs a qubit input");

  CPMap nc = complementary(n);
  auto objective = [&](const Params& p) {
    return channel_coherent_info_at(n, nc, ansatz.state(p));
  };

  // maximally mixed start first, random restarts after
  std::vector<Params> starts;
  {
    Params x0 = Params::Zero(ansatz.nparams);
    if (family != InputFamily::bloch) x0.head(d).setConstant(1.0 / d);
    starts.push_back(x0);
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int r = 1; r < std::max(1, opts.restarts); ++r) {
    Params x(ansatz.nparams);
    for (int i = 0; i < ansatz.nparams; ++i) x[i] = unif(rng);
    if (family != InputFamily::bloch) x.head(d) = x.head(d).cwiseAbs();
    starts.push_back(ansatz.project(x));
  }

  Q1Result best;
  best.value = -std::numeric_limits<double>::infinity();
  for (const Params& s : starts) {
    AscentResult r = ascend(objective, ansatz, s, opts);
    if (r.value > best.value) {
      best.value = r.value;
      best.argmax = ansatz.state(r.point);
      best.grad_norm = r.grad_norm;
    }
  }
  best.stationary = best.grad_norm <= opts.grad_tol;
  best.family_used = family;
  best.restarts_used = static_cast<int>(starts.size());
  return best;
}

DiagScanResult q1_diagonal_scan(const CPMap& n, int grid) {
  if (n.dim_in() != 2) throw std::invalid_argument("q1_diagonal_scan: qubit input expected");
  CPMap nc = complementary(n);
  auto f = [&](double p) {
    Mat rho = Mat::Zero(2, 2);
    rho(0, 0) = p;
    rho(1, 1) = 1.0 - p;
    return channel_coherent_info_at(n, nc, rho);
  };

  std::vector<double> ps;
  if (grid <= 1) {
    ps = {0.0, 0.5, 1.0};
  } else {
    for (int i = 0; i < grid; ++i) ps.push_back(static_cast<double>(i) / (grid - 1));
  }
  double best = -std::numeric_limits<double>::infinity();
  size_t ibest = 0;
  for (size_t i = 0; i < ps.size(); ++i) {
    double v = f(ps[i]);
    if (v > best) {
      best = v;
      ibest = i;
    }
  }

  double lo = ps[ibest == 0 ? 0 : ibest - 1];
  double hi = ps[ibest + 1 < ps.size() ? ibest + 1 : ibest];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-8) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = f(x1);
    }
  }
  double pm = 0.5 * (lo + hi);
  double fm = f(pm);
  if (fm < best) {
    pm = ps[ibest];
    fm = best;
  }
  return {fm, pm};
}

}  // namespace capbound
