#include "capbound/bounds.hpp"

#include "capbound/zoo.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace capbound {

namespace {

double log2_or_zero(int d) { return d > 1 ? std::log2(static_cast<double>(d)) : 0.0; }

// The channel continuity terms take eps = eta/2: eta is the optimal value of
// the degradability SDP (half the diamond distance between the complement and
// the degraded channel), and the approximate-degradability capacity curves
// are reproduced with the terms evaluated at half that value.
double continuity_eps(double eta) { return 0.5 * eta; }

std::vector<TermItem> quantum_terms(double eta, int de) {
  double eps = continuity_eps(eta);
  return {{"eps_log_dE_minus_1", eps * log2_or_zero(de - 1)},
          {"h_eps", binary_entropy(eps)},
          {"two_eps_log_dE", 2.0 * eps * log2_or_zero(de)},
          {"g_eps", bosonic_entropy(eps)}};
}

std::vector<TermItem> private_terms(double eta, int de) {
  double eps = continuity_eps(eta);
  return {{"two_eps_log_dE_minus_1", 2.0 * eps * log2_or_zero(de - 1)},
          {"eight_eps_log_dE", 8.0 * eps * log2_or_zero(de)},
          {"two_h_eps", 2.0 * binary_entropy(eps)},
          {"four_g_eps", 4.0 * bosonic_entropy(eps)}};
}

std::vector<TermItem> state_terms(double eta, int env) {
  return {{"four_eta_log_env", 4.0 * eta * log2_or_zero(env)},
          {"two_g_eta", 2.0 * bosonic_entropy(eta)}};
}

double term_sum(const std::vector<TermItem>& terms) {
  double s = 0.0;
  for (const TermItem& t : terms) s += t.bits;
  return s;
}

void finalize_report(BoundReport& r, double info_term, const std::vector<TermItem>& cont,
                     const std::vector<TermItem>& cont_upper, const char* info_name) {
  r.info_term = info_term;
  r.terms.clear();
  r.terms.push_back({info_name, info_term});
  for (const TermItem& t : cont) r.terms.push_back(t);
  r.value = term_sum(r.terms);
  r.value_upper = info_term + term_sum(cont_upper);
}

std::string q1_note(const Q1Result& q, const Q1Options& opts) {
  std::ostringstream os;
  os << "q1: family=" << to_string(q.family_used) << " restarts=" << q.restarts_used
     << " seed=" << opts.seed << " grad_norm=" << q.grad_norm;
  return os.str();
}

// (id ⊗ M) acting on the non-A side of a bipartite matrix
Mat apply_right(const CPMap& m, const Mat& rho, int da) {
  Mat eye = Mat::Identity(da, da);
  Mat out = Mat::Zero(static_cast<Eigen::Index>(da) * m.dim_out(),
                      static_cast<Eigen::Index>(da) * m.dim_out());
  for (const Mat& k : m.kraus()) {
    Mat kk = tensor(eye, k);
    out.noalias() += kk * rho * kk.adjoint();
  }
  return out;
}

EtaChannelResult run_eta_channel(const CPMap& nhat, const BoundOptions& opts, SolverStats& stats) {
  EtaChannelResult ec = eta_channel(nhat, opts.sdp_tol, opts.rank_tol);
  stats.absorb(ec.info);
  if (opts.certify && ec.env_dim > 1) {
    DiamondResult dd = diamond_distance(complementary(nhat, opts.rank_tol),
                                        compose(ec.degrading, nhat), opts.sdp_tol);
    stats.absorb(dd.info);
    stats.recheck_delta = std::max(stats.recheck_delta, std::abs(dd.value - ec.eta));
  }
  return ec;
}

EtaStateResult run_eta_state(const DensityMatrix& rho, int env, const BoundOptions& opts,
                             SolverStats& stats) {
  EtaStateResult es = eta_state(rho, env, opts.sdp_tol, opts.rank_tol);
  stats.absorb(es.info);
  if (opts.certify && env > 1) {
    const int da = rho.dims()[0];
    Purification pur = purify(rho, opts.rank_tol);
    Mat full = pur.state * pur.state.adjoint();
    Mat rho_ae = partial_trace(full, {da, rho.dim() / da, pur.env_dim}, {0, 2});
    double direct = 0.5 * trace_norm(Mat(rho_ae - apply_right(es.degrading, rho.matrix(), da)));
    stats.recheck_delta = std::max(stats.recheck_delta, std::abs(direct - es.eta));
  }
  return es;
}

Q1Result run_q1(const CPMap& nhat, bool degradable, const BoundOptions& opts) {
  Q1Options q1 = opts.q1;
  if (degradable) q1.restarts = std::min(q1.restarts, 2);  // concave objective
  return q1_maximize(nhat, q1);
}

}  // namespace

const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::state_pure_flag: return "state-pure-flag";
    case BoundKind::channel_general_flag: return "general-flag";
    case BoundKind::channel_pure_flag: return "pure-flag";
    case BoundKind::channel_degradable_flag: return "degradable-flag";
    case BoundKind::private_pure_flag: return "private-pf";
    case BoundKind::private_degradable_flag: return "private-degradable";
    case BoundKind::approx_degradable: return "approx-degradable";
    case BoundKind::dp_gad: return "dp-gad";
  }
  return "unknown";
}

void SolverStats::absorb(const SolveInfo& info) {
  ++solves;
  max_iterations = std::max(max_iterations, info.iterations);
  max_gap = std::max(max_gap, info.gap);
  max_primal_residual = std::max(max_primal_residual, info.primal_residual);
  max_dual_residual = std::max(max_dual_residual, info.dual_residual);
  if (info.status != SolveStatus::optimal) all_optimal = false;
}

void SolverStats::absorb(const SolverStats& o) {
  solves += o.solves;
  max_iterations = std::max(max_iterations, o.max_iterations);
  max_gap = std::max(max_gap, o.max_gap);
  max_primal_residual = std::max(max_primal_residual, o.max_primal_residual);
  max_dual_residual = std::max(max_dual_residual, o.max_dual_residual);
  all_optimal = all_optimal && o.all_optimal;
  recheck_delta = std::max(recheck_delta, o.recheck_delta);
}

BoundReport approx_degradable_bound(const CPMap& n, const BoundOptions& opts) {
  if (!n.is_cptp()) throw std::invalid_argument("approx_degradable_bound: channel must be CPTP");
  BoundReport r;
  r.kind = BoundKind::approx_degradable;
  r.rank_tol = opts.rank_tol;

  EtaChannelResult ec = run_eta_channel(n, opts, r.solver);
  double eta = std::max(0.0, ec.eta);
  r.eta = eta;
  r.env_dim = ec.env_dim;

  bool degradable = eta <= opts.eta_threshold;
  Q1Result q1 = run_q1(n, degradable, opts);
  r.info_certified = degradable && q1.stationary;
  if (!r.info_certified)
    r.notes.push_back("coherent information term is a heuristic multi-start value");
  r.notes.push_back(q1_note(q1, opts.q1));

  finalize_report(r, q1.value, quantum_terms(eta, ec.env_dim),
                  quantum_terms(eta + r.eta_uncertainty, ec.env_dim), "coherent_info");
  return r;
}

BoundReport state_pure_flag_bound(const DensityMatrix& tau, const DensityMatrix& omega,
                                  double alpha, const BoundOptions& opts) {
  if (alpha < 0.0 || alpha > 1.0)
    throw std::domain_error("state_pure_flag_bound: alpha outside [0,1]");
  if (tau.dims() != omega.dims())
    throw std::invalid_argument("state_pure_flag_bound: substate dimensions differ");
  if (tau.dims().size() < 2)
    throw std::invalid_argument("state_pure_flag_bound: substates must be bipartite");

  Mat psi(2, 1), zero(2, 1);
  psi << std::sqrt(alpha), std::sqrt(1.0 - alpha);
  zero << 1.0, 0.0;
  Mat rho_abf = tensor(tau.matrix(), psi * psi.adjoint()) +
                tensor(omega.matrix(), zero * zero.adjoint());
  std::vector<int> dims = tau.dims();
  dims.push_back(2);
  DensityMatrix rho(std::move(rho_abf), std::move(dims));  // throws unless tau+omega is a state

  BoundReport r;
  r.kind = BoundKind::state_pure_flag;
  r.alpha = alpha;
  r.rank_tol = opts.rank_tol;

  int env = numerical_rank(rho.matrix(), opts.rank_tol);
  r.env_dim = std::max(env, 1);
  EtaStateResult es = run_eta_state(rho, r.env_dim, opts, r.solver);
  double eta = std::max(0.0, es.eta);
  r.eta = eta;

  double info = state_coherent_info(rho);
  finalize_report(r, info, state_terms(eta, r.env_dim),
                  state_terms(eta + r.eta_uncertainty, r.env_dim), "state_coherent_info");
  return r;
}

BoundReport channel_flag_bound(const CPDecomposition& dec, double alpha, Flavor flavor,
                               const BoundOptions& opts) {
  if (dec.parts.empty() || dec.parts.size() > 2)
    throw std::invalid_argument("channel_flag_bound: two-part decomposition expected");
  CPMap nhat = dec.parts.size() == 2 ? pure_flag_family(dec.parts[0], dec.parts[1], alpha)
                                     : dec.total();
  if (!nhat.is_cptp())
    throw std::invalid_argument("channel_flag_bound: parts do not sum to a CPTP map");

  BoundReport r;
  r.kind = flavor == Flavor::quantum ? BoundKind::channel_pure_flag : BoundKind::private_pure_flag;
  r.alpha = alpha;
  r.rank_tol = opts.rank_tol;

  EtaChannelResult ec = run_eta_channel(nhat, opts, r.solver);
  double eta = std::max(0.0, ec.eta);
  r.eta = eta;
  r.env_dim = ec.env_dim;

  bool degradable = eta <= opts.eta_threshold;
  Q1Result q1 = run_q1(nhat, degradable, opts);
  r.info_certified = degradable && q1.stationary;
  if (!r.info_certified)
    r.notes.push_back("coherent information term is a heuristic multi-start value");
  r.notes.push_back(q1_note(q1, opts.q1));

  auto terms = flavor == Flavor::quantum ? quantum_terms(eta, ec.env_dim)
                                         : private_terms(eta, ec.env_dim);
  auto upper = flavor == Flavor::quantum
                   ? quantum_terms(eta + r.eta_uncertainty, ec.env_dim)
                   : private_terms(eta + r.eta_uncertainty, ec.env_dim);
  finalize_report(r, q1.value, terms, upper, "coherent_info");
  return r;
}

AlphaScanResult alpha_scan(const std::function<BoundReport(double)>& eval, int grid, int refine,
                           int jobs) {
  if (grid < 2) grid = 2;
  std::vector<double> alphas(grid);
  for (int i = 0; i < grid; ++i) alphas[i] = static_cast<double>(i) / (grid - 1);

  std::vector<BoundReport> results(grid);
  if (jobs > 1) {
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex errmtx;
    auto worker = [&] {
      for (int i = next++; i < grid; i = next++) {
        try {
          results[i] = eval(alphas[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(errmtx);
          if (!err) err = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(jobs, grid) - 1; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    if (err) std::rethrow_exception(err);
  } else {
    for (int i = 0; i < grid; ++i) results[i] = eval(alphas[i]);
  }

  int ibest = 0;
  SolverStats agg;
  for (int i = 0; i < grid; ++i) agg.absorb(results[i].solver);
  for (int i = 1; i < grid; ++i)
    if (results[i].value < results[ibest].value) ibest = i;

  AlphaScanResult out;
  out.best = results[ibest];
  out.alpha_star = alphas[ibest];
  out.evaluations = grid;

  auto consider = [&](double a, const BoundReport& rep) {
    agg.absorb(rep.solver);
    if (rep.value < out.best.value) {
      out.best = rep;
      out.alpha_star = a;
    }
  };

  double spacing = 1.0 / (grid - 1);
  double lo = std::max(0.0, alphas[ibest] - spacing);
  double hi = std::min(1.0, alphas[ibest] + spacing);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  BoundReport r1 = eval(x1), r2 = eval(x2);
  out.evaluations += 2;
  consider(x1, r1);
  consider(x2, r2);
  for (int it = 2; it < refine; ++it) {
    if (r1.value >= r2.value) {
      lo = x1;
      x1 = x2;
      r1 = r2;
      x2 = lo + gr * (hi - lo);
      r2 = eval(x2);
      consider(x2, r2);
    } else {
      hi = x2;
      x2 = x1;
      r2 = r1;
      x1 = hi - gr * (hi - lo);
      r1 = eval(x1);
      consider(x1, r1);
    }
    ++out.evaluations;
  }
  out.best.solver = agg;
  return out;
}

BoundReport degradable_flag_bound(const CPDecomposition& dec, Flavor flavor,
                                  const BoundOptions& opts) {
  if (dec.parts.empty() || dec.parts.size() > 2)
    throw std::invalid_argument("degradable_flag_bound: two-part decomposition expected");
  BoundKind kind = flavor == Flavor::quantum ? BoundKind::channel_degradable_flag
                                             : BoundKind::private_degradable_flag;

  auto eval = [&](double alpha) {
    CPMap nhat = dec.parts.size() == 2 ? pure_flag_family(dec.parts[0], dec.parts[1], alpha)
                                       : dec.total();
    BoundReport r;
    r.kind = kind;
    r.alpha = alpha;
    r.rank_tol = opts.rank_tol;
    EtaChannelResult ec = run_eta_channel(nhat, opts, r.solver);
    double eta = std::max(0.0, ec.eta);
    r.eta = eta;
    r.env_dim = ec.env_dim;
    if (eta > opts.eta_threshold) {
      r.value = std::numeric_limits<double>::infinity();
      r.value_upper = r.value;
      r.info_certified = false;
      return r;
    }
    Q1Result q1 = run_q1(nhat, true, opts);
    r.info_certified = q1.stationary;
    r.notes.push_back(q1_note(q1, opts.q1));
    auto upper = flavor == Flavor::quantum
                     ? quantum_terms(eta + r.eta_uncertainty, ec.env_dim)
                     : private_terms(eta + r.eta_uncertainty, ec.env_dim);
    finalize_report(r, q1.value, {}, upper, "coherent_info");
    return r;
  };

  AlphaScanResult scan;
  if (dec.parts.size() == 1) {
    scan.best = eval(1.0);
    scan.alpha_star = 1.0;
    scan.evaluations = 1;
  } else {
    scan = alpha_scan(eval, opts.alpha_grid, opts.alpha_refine, opts.jobs);
  }

  BoundReport r = scan.best;
  r.alpha = scan.alpha_star;
  if (!r.finite()) {
    // no flagged channel qualified; attach the best pure-flag bound as context
    AlphaScanResult fallback = alpha_scan(
        [&](double a) { return channel_flag_bound(dec, a, flavor, opts); },
        opts.alpha_grid, opts.alpha_refine, opts.jobs);
    std::ostringstream os;
    os << "no alpha reached eta <= " << opts.eta_threshold
       << "; best pure-flag bound " << fallback.best.value << " at alpha = "
       << fallback.alpha_star;
    r.notes.push_back(os.str());
    r.solver.absorb(fallback.best.solver);
  }
  return r;
}

BoundReport general_flag_bound(const CPDecomposition& dec, const BoundOptions& opts) {
  if (!dec.has_flags()) throw std::invalid_argument("general_flag_bound: flags required");
  CPMap nhat = flag_extend(dec);

  BoundReport r;
  r.kind = BoundKind::channel_general_flag;
  r.rank_tol = opts.rank_tol;

  EtaChannelResult ec = run_eta_channel(nhat, opts, r.solver);
  double eta = std::max(0.0, ec.eta);
  r.eta = eta;
  r.env_dim = ec.env_dim;

  bool degradable = eta <= opts.eta_threshold;
  Q1Result q1 = run_q1(nhat, degradable, opts);
  r.info_certified = degradable && q1.stationary;
  if (!r.info_certified)
    r.notes.push_back("coherent information term is a heuristic multi-start value");
  r.notes.push_back(q1_note(q1, opts.q1));

  finalize_report(r, q1.value, quantum_terms(eta, ec.env_dim),
                  quantum_terms(eta + r.eta_uncertainty, ec.env_dim), "coherent_info");
  return r;
}

BoundReport choi_channel_bound(const DensityMatrix& tau, const DensityMatrix& omega,
                               const BoundOptions& opts) {
  AlphaScanResult scan = alpha_scan(
      [&](double a) { return state_pure_flag_bound(tau, omega, a, opts); },
      opts.alpha_grid, opts.alpha_refine, opts.jobs);
  BoundReport r = scan.best;
  r.alpha = scan.alpha_star;
  r.notes.push_back("teleportation simulability of the channel asserted by the caller");
  return r;
}

double dp_gad_bound(double y, double n) {
  if (y < 0.0 || y > 1.0 || n < 0.0 || n > 1.0)
    throw std::domain_error("dp_gad_bound: parameters outside [0,1]");
  double mapped = y * (1.0 - n) / (1.0 - y * n);
  if (mapped >= 0.5) return 0.0;
  DiagScanResult scan = q1_diagonal_scan(amplitude_damping(mapped), 101);
  return std::max(0.0, scan.value);
}

}  // namespace capbound
