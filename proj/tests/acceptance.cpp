// Acceptance suite: reproduces the published reference curves and runs the
// always-on property checks. Prints one pass/fail line per criterion and
// exits nonzero if any of them fails.
#include "capbound/bounds.hpp"
#include "capbound/io.hpp"
#include "capbound/zoo.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

using namespace capbound;

namespace {

// Reference data: depolarizing channel, Pauli-error weight w = 3p/4 in
// [0, 0.02]. Columns: flagged Choi-state bound, approximate-degradability
// bound, coherent information.
constexpr int kLowN = 21;
constexpr double kLowW[kLowN] = {0,     0.001, 0.002, 0.003, 0.004, 0.005, 0.006,
                                 0.007, 0.008, 0.009, 0.01,  0.011, 0.012, 0.013,
                                 0.014, 0.015, 0.016, 0.017, 0.018, 0.019, 0.02};
constexpr double kLowFlag[kLowN] = {
    1,           0.987045866, 0.976123635, 0.965981791, 0.956412704, 0.947254792, 0.938274697,
    0.929714078, 0.921399867, 0.913156357, 0.905173372, 0.897435373, 0.889750834, 0.882164705,
    0.874872259, 0.867691901, 0.860358221, 0.853431295, 0.846617271, 0.83954677,  0.83293071};
constexpr double kLowApprox[kLowN] = {
    1,           0.987027121, 0.976248321, 0.966275914, 0.956911126, 0.947941759, 0.939371622,
    0.931122385, 0.92315712,  0.91544798,  0.907973172, 0.900715137, 0.893659418, 0.886793875,
    0.880108158, 0.873593331, 0.867241589, 0.861046224, 0.855000743, 0.849100015, 0.843338955};
constexpr double kLowQ1[kLowN] = {
    1,           0.98700728,  0.976016004, 0.965781061, 0.95603779,  0.946660495, 0.937575145,
    0.92873282,  0.920098755, 0.911646954, 0.903357239, 0.895213493, 0.88720254,  0.879313412,
    0.871536832, 0.863864852, 0.856290589, 0.848808018, 0.841411829, 0.8340973,   0.826860207};

// w in [0, 0.15]
constexpr int kMidN = 31;
constexpr double kMidFlag[kMidN] = {
    1,           0.947254792, 0.905173372, 0.867691901, 0.83293071,  0.800808926, 0.770116996,
    0.741494282, 0.714285493, 0.687701625, 0.662820022, 0.638948594, 0.615997072, 0.593885673,
    0.572548872, 0.551928563, 0.531973692, 0.512636524, 0.494740668, 0.47654237,  0.458849542,
    0.442541949, 0.425788193, 0.410389579, 0.395408966, 0.379874674, 0.365654592, 0.351787403,
    0.33825308,  0.325033465, 0.312110204};
constexpr double kMidQ1[kMidN] = {
    1,           0.946660495, 0.903357239, 0.863864852, 0.826860207, 0.791715006, 0.758059267,
    0.725648586, 0.694309311, 0.663911654, 0.634354918, 0.605558703, 0.577457331, 0.549996149,
    0.523128974, 0.496816268, 0.47102381,  0.445721691, 0.420883558, 0.396486014, 0.372508156,
    0.348931198, 0.325738167, 0.302913659, 0.280443635, 0.258315244, 0.23651669,  0.215037102,
    0.193866438, 0.172995392, 0.15241532};

// BB84 channel, p in [0, 0.04]: private flagged bound and coherent information
constexpr int kBbN = 21;
constexpr double kBbFlag[kBbN] = {
    1,           0.95865033,  0.925730793, 0.896211439, 0.869140656, 0.843813132, 0.819793611,
    0.796955738, 0.775166242, 0.754307326, 0.734284861, 0.715025582, 0.696464166, 0.678909421,
    0.662110075, 0.645394424, 0.629203882, 0.613505867, 0.598683319, 0.584527498, 0.5701877};
constexpr double kBbQ1[kBbN] = {
    1,           0.958371857, 0.924755279, 0.894169839, 0.86555691,  0.838413728, 0.81244418,
    0.787452614, 0.763299977, 0.739882308, 0.717118915, 0.694945343, 0.673308914, 0.652165766,
    0.631478813, 0.611216284, 0.591350658, 0.571857864, 0.552716671, 0.533908215, 0.515415622};

struct CertRegistry {
  std::mutex mtx;
  SolverStats stats;
  void add(const SolverStats& s) {
    std::lock_guard<std::mutex> lock(mtx);
    stats.absorb(s);
  }
  void add(const SolveInfo& info) {
    std::lock_guard<std::mutex> lock(mtx);
    stats.absorb(info);
  }
};
CertRegistry registry;

int worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 2 : static_cast<int>(std::min(hw, 8u));
}

void parallel_points(int n, const std::function<void(int)>& fn) {
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex errmtx;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(errmtx);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < worker_count() - 1; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

struct Outcome {
  bool pass = true;
  double worst = 0.0;
  std::string note;
};

void report(int idx, const char* name, const Outcome& o, double seconds) {
  std::printf("[%s] criterion %d: %s (worst deviation %.3e%s%s, %.1fs)\n",
              o.pass ? "PASS" : "FAIL", idx, name, o.worst, o.note.empty() ? "" : ", ",
              o.note.c_str(), seconds);
  std::fflush(stdout);
}

BoundOptions acceptance_options(std::uint64_t seed) {
  BoundOptions opts;
  opts.certify = true;
  opts.q1.seed = seed;
  return opts;
}

Outcome depolarizing_flag_sweep(const double* ws, const double* flag_ref, const double* q1_ref,
                                int n) {
  Outcome o;
  std::mutex mtx;
  parallel_points(n, [&](int i) {
    DepolarizingModel dep = depolarizing(ws[i] * 4.0 / 3.0);
    BoundReport r = choi_channel_bound(dep.tau, dep.omega, acceptance_options(11 + i));
    double q1 = state_coherent_info(choi_state(dep.channel));
    double dev_flag = std::abs(r.value - flag_ref[i]);
    double dev_q1 = std::abs(q1 - q1_ref[i]);
    std::lock_guard<std::mutex> lock(mtx);
    registry.add(r.solver);
    o.worst = std::max(o.worst, dev_flag);
    if (dev_flag > 2e-3 || dev_q1 > 1e-6) {
      o.pass = false;
      char buf[96];
      std::snprintf(buf, sizeof(buf), "w=%.3f off by %.2e/%.2e", ws[i], dev_flag, dev_q1);
      o.note = buf;
    }
  });
  return o;
}

Outcome criterion1() { return depolarizing_flag_sweep(kLowW, kLowFlag, kLowQ1, kLowN); }

Outcome criterion2() {
  double ws[kMidN];
  for (int i = 0; i < kMidN; ++i) ws[i] = 0.005 * i;
  return depolarizing_flag_sweep(ws, kMidFlag, kMidQ1, kMidN);
}

Outcome criterion3() {
  Outcome o;
  std::mutex mtx;
  parallel_points(kBbN, [&](int i) {
    double p = 0.002 * i;
    Bb84Model bb = bb84(p, p);
    BoundReport r = degradable_flag_bound(bb.split, Flavor::priv, acceptance_options(37 + i));
    Q1Options q1opts;
    q1opts.seed = 91 + i;
    double q1 = q1_maximize(bb.channel, q1opts).value;
    double dev_flag = std::abs(r.value - kBbFlag[i]);
    double dev_q1 = std::abs(q1 - kBbQ1[i]);
    std::lock_guard<std::mutex> lock(mtx);
    registry.add(r.solver);
    o.worst = std::max(o.worst, dev_flag);
    if (dev_flag > 2e-3 || dev_q1 > 1e-6) {
      o.pass = false;
      char buf[96];
      std::snprintf(buf, sizeof(buf), "p=%.3f off by %.2e/%.2e", p, dev_flag, dev_q1);
      o.note = buf;
    }
  });
  return o;
}

Outcome criterion4() {
  Outcome o;
  std::mutex mtx;
  parallel_points(kLowN, [&](int i) {
    DepolarizingModel dep = depolarizing(kLowW[i] * 4.0 / 3.0);
    BoundReport r = approx_degradable_bound(dep.channel, acceptance_options(53 + i));
    double dev = std::abs(r.value - kLowApprox[i]);
    std::lock_guard<std::mutex> lock(mtx);
    registry.add(r.solver);
    o.worst = std::max(o.worst, dev);
    if (dev > 2e-3) {
      o.pass = false;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "w=%.3f off by %.2e", kLowW[i], dev);
      o.note = buf;
    }
  });
  return o;
}

Outcome criterion5() {
  Outcome o;
  std::mutex mtx;

  // flagged channel with orthogonal flags is degradable across the grid
  struct Point {
    double y, n;
  };
  std::vector<Point> grid;
  for (int i = 1; i <= 5; ++i)
    for (int j = 1; j <= 5; ++j) grid.push_back({0.5 * i / 6.0, j / 6.0});
  parallel_points(static_cast<int>(grid.size()), [&](int k) {
    GadModel g = gad(grid[k].y, grid[k].n);
    CPMap nhat = pure_flag_family(g.split.parts[0], g.split.parts[1], 0.0);
    EtaChannelResult r = eta_channel(nhat);
    std::lock_guard<std::mutex> lock(mtx);
    registry.add(r.info);
    o.worst = std::max(o.worst, r.eta);
    if (r.eta > 1e-6) {
      o.pass = false;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "eta=%.2e at y=%.3f N=%.3f", r.eta, grid[k].y, grid[k].n);
      o.note = buf;
    }
  });

  // vanishing bound at y = 1/2
  for (double n : {0.1, 0.3, 0.5}) {
    GadModel g = gad(0.5, n);
    CPMap nhat = pure_flag_family(g.split.parts[0], g.split.parts[1], 0.0);
    double value = q1_diagonal_scan(nhat).value;
    if (value > 1e-3) {
      o.pass = false;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "value %.2e at y=0.5 N=%.1f", value, n);
      o.note = buf;
    }
  }

  // the flagged bound never exceeds the data-processing comparison bound
  std::mt19937_64 rng(2029);
  std::uniform_real_distribution<double> uy(0.02, 0.48), un(0.05, 0.95);
  for (int t = 0; t < 10; ++t) {
    double y = uy(rng), n = un(rng);
    GadModel g = gad(y, n);
    CPMap nhat = pure_flag_family(g.split.parts[0], g.split.parts[1], 0.0);
    EtaChannelResult ec = eta_channel(nhat);
    registry.add(ec.info);
    double ours = q1_diagonal_scan(nhat).value;
    double dp = dp_gad_bound(y, n);
    if (ec.eta > 1e-6 || ours > dp + 1e-7) {
      o.pass = false;
      char buf[96];
      std::snprintf(buf, sizeof(buf), "y=%.3f N=%.3f ours=%.6f dp=%.6f eta=%.2e", y, n, ours, dp,
                    ec.eta);
      o.note = buf;
    }
  }
  return o;
}

CPMap random_channel(int din, int dout, int kc, std::mt19937_64& rng) {
  kc = std::max(kc, (din + dout - 1) / dout);  // an isometry needs dout*kc >= din
  std::normal_distribution<double> g;
  Mat a(dout * kc, din);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = Mat(qr.householderQ()).leftCols(din);
  std::vector<Mat> kraus;
  for (int k = 0; k < kc; ++k) kraus.push_back(q.middleRows(k * dout, dout));
  return CPMap::from_kraus(std::move(kraus));
}

Mat random_density(int d, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat a(d, rank);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < rank; ++j) a(i, j) = cplx(g(rng), g(rng));
  Mat rho = a * a.adjoint();
  return rho / rho.trace().real();
}

double action_distance(const CPMap& a, const CPMap& b) {
  double worst = 0.0;
  for (int i = 0; i < a.dim_in(); ++i)
    for (int j = 0; j < a.dim_in(); ++j) {
      Mat e = Mat::Zero(a.dim_in(), a.dim_in());
      e(i, j) = 1.0;
      worst = std::max(worst, max_abs(Mat(a.apply(e) - b.apply(e))));
    }
  return worst;
}

Outcome criterion6() {
  Outcome o;
  auto fail = [&](const std::string& what) {
    o.pass = false;
    if (o.note.empty()) o.note = what;
  };

  // Kraus/Choi round trips and CPTP marginals on 100 random channels
  {
    std::mt19937_64 rng(404);
    for (int t = 0; t < 100; ++t) {
      int din = 2 + static_cast<int>(rng() % 3);
      int dout = 2 + static_cast<int>(rng() % 3);
      int kc = 1 + static_cast<int>(rng() % 3);
      CPMap n = random_channel(din, dout, kc, rng);
      CPMap back = CPMap::from_choi(n.choi(), din, dout);
      double dev = action_distance(n, back);
      o.worst = std::max(o.worst, dev);
      if (dev > 1e-8) fail("choi round trip");
      if (!n.is_cptp()) fail("random isometry-built channel not CPTP");
      Mat jin = partial_trace(n.choi(), {din, dout}, {0});
      if (max_abs(Mat(jin - Mat::Identity(din, din))) > 1e-10) fail("choi marginal");
    }
  }

  // diamond-distance metric axioms on 20 random triples
  {
    std::mt19937_64 rng(405);
    for (int t = 0; t < 20; ++t) {
      int d = 2 + t % 2;
      CPMap a = random_channel(d, d, 2, rng), b = random_channel(d, d, 2, rng),
            c = random_channel(d, d, 2, rng);
      double ab = diamond_distance(a, b).value;
      double bc = diamond_distance(b, c).value;
      double ac = diamond_distance(a, c).value;
      if (ab < -1e-9 || ac > ab + bc + 1e-7) fail("metric axioms");
      if (t % 5 == 0) {
        if (std::abs(diamond_distance(b, a).value - ab) > 1e-6) fail("symmetry");
        if (diamond_distance(a, a).value > 1e-7) fail("self distance");
      }
    }
  }

  // eta vanishes on 20 channels that are degradable by construction
  {
    std::mt19937_64 rng(406);
    int built = 0;
    auto expect_zero = [&](const CPMap& n, const char* what) {
      EtaChannelResult r = eta_channel(n);
      o.worst = std::max(o.worst, r.eta);
      if (r.eta > 1e-6) fail(std::string("eta nonzero for ") + what);
      ++built;
    };
    for (int i = 0; i < 8; ++i) expect_zero(amplitude_damping(0.03 + 0.055 * i), "damping");
    for (int i = 0; i < 4; ++i) {
      double q = 0.1 + 0.1 * i;  // dephasing
      Mat z(2, 2);
      z << 1, 0, 0, -1;
      expect_zero(CPMap::from_kraus({std::sqrt(1 - q) * Mat::Identity(2, 2), std::sqrt(q) * z}),
                  "dephasing");
    }
    for (int i = 0; i < 4; ++i) {
      // orthogonally flagged mixture of two damping channels
      double w = 0.2 + 0.15 * i;
      std::vector<Mat> k0 = amplitude_damping(0.1 + 0.08 * i).kraus();
      std::vector<Mat> k1 = amplitude_damping(0.45 - 0.08 * i).kraus();
      for (Mat& k : k0) k *= std::sqrt(w);
      for (Mat& k : k1) k *= std::sqrt(1 - w);
      CPDecomposition dec;
      dec.parts.push_back(CPMap::from_kraus(k0));
      dec.parts.push_back(CPMap::from_kraus(k1));
      expect_zero(pure_flag_family(dec.parts[0], dec.parts[1], 0.0), "flagged damping pair");
    }
    for (int i = 0; i < 4; ++i) {
      // unitary followed by appending a fixed mixed state
      CPMap u = random_channel(2, 2, 1, rng);
      Mat sigma = random_density(2, 2, rng);
      EigH eig = hermitian_eig(sigma);
      std::vector<Mat> kraus;
      for (int m = 0; m < 2; ++m) {
        Mat w = std::sqrt(std::max(eig.values[m], 0.0)) * eig.vectors.col(m);
        kraus.push_back(tensor(u.kraus()[0], w));
      }
      expect_zero(CPMap::from_kraus(kraus), "append channel");
    }
    if (built != 20) fail("construction count");
  }

  // upper bounds sandwich the coherent information on every family
  {
    BoundOptions fast;
    fast.alpha_grid = 11;
    fast.alpha_refine = 8;
    fast.q1.restarts = 4;
    Q1Options q1opts;
    q1opts.restarts = 6;
    for (int i = 0; i < 10; ++i) {
      double w = 0.002 + 0.0146 * i;
      DepolarizingModel dep = depolarizing(w * 4.0 / 3.0);
      double lower = q1_maximize(dep.channel, q1opts).value;
      if (approx_degradable_bound(dep.channel, fast).value < lower - 1e-4)
        fail("depolarizing sandwich");

      double p = 0.001 + 0.0035 * i;
      Bb84Model bb = bb84(p, p);
      double bb_lower = q1_maximize(bb.channel, q1opts).value;
      BoundReport bbr = degradable_flag_bound(bb.split, Flavor::quantum, fast);
      if (bbr.finite() && bbr.value < bb_lower - 1e-4) fail("bb84 sandwich");

      double y = 0.04 + 0.04 * i;
      GadModel g = gad(y, 0.35);
      double gad_lower = q1_maximize(g.channel, q1opts).value;
      CPMap nhat = pure_flag_family(g.split.parts[0], g.split.parts[1], 0.0);
      if (q1_diagonal_scan(nhat).value < gad_lower - 1e-4) fail("gad sandwich");

      CPMap ad = amplitude_damping(0.04 + 0.045 * i);
      double ad_lower = q1_maximize(ad, q1opts).value;
      if (approx_degradable_bound(ad, fast).value < ad_lower - 1e-4) fail("damping sandwich");
    }
  }

  // flag factorization at alpha = 1
  {
    BoundOptions fast;
    fast.q1.restarts = 4;
    GadModel g = gad(0.3, 0.2);
    double flagged = channel_flag_bound(g.split, 1.0, Flavor::quantum, fast).value;
    double plain = approx_degradable_bound(g.channel, fast).value;
    if (std::abs(flagged - plain) > 1e-5) fail("alpha=1 factorization (gad)");
    Bb84Model bb = bb84(0.015, 0.015);
    double bflag = channel_flag_bound(bb.split, 1.0, Flavor::quantum, fast).value;
    double bplain = approx_degradable_bound(bb.channel, fast).value;
    if (std::abs(bflag - bplain) > 1e-5) fail("alpha=1 factorization (bb84)");
  }

  // itemization sums exactly
  {
    BoundOptions fast;
    fast.q1.restarts = 4;
    DepolarizingModel dep = depolarizing(0.06);
    std::vector<BoundReport> reports;
    reports.push_back(approx_degradable_bound(dep.channel, fast));
    reports.push_back(state_pure_flag_bound(dep.tau, dep.omega, 0.7, fast));
    GadModel g = gad(0.25, 0.4);
    reports.push_back(channel_flag_bound(g.split, 0.4, Flavor::priv, fast));
    for (const BoundReport& r : reports) {
      double sum = 0.0;
      for (const TermItem& t : r.terms) sum += t.bits;
      if (std::abs(sum - r.value) > 1e-12) fail("itemization");
    }
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  const SolverStats& s = registry.stats;
  o.worst = std::max({s.max_gap, s.max_primal_residual, s.max_dual_residual});
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d solves, max gap %.2e, residuals %.2e/%.2e, recheck %.2e",
                s.solves, s.max_gap, s.max_primal_residual, s.max_dual_residual,
                s.recheck_delta);
  o.note = buf;
  if (!s.all_optimal || s.max_gap > 1e-7 || s.max_primal_residual > 1e-7 ||
      s.max_dual_residual > 1e-7 || s.recheck_delta > 1e-6)
    o.pass = false;
  return o;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {"depolarizing low-noise flagged bound matches the reference table", criterion1},
      {"depolarizing intermediate-noise flagged bound matches the reference table", criterion2},
      {"bb84 private flagged bound matches the reference table", criterion3},
      {"depolarizing approximate-degradability bound matches the reference table", criterion4},
      {"flagged gad degradability and vanishing bound at y=1/2", criterion5},
      {"property suites", criterion6},
      {"solver certification", criterion7},
  };
  bool all = true;
  int idx = 1;
  for (const Entry& e : entries) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.note = std::string("exception: ") + ex.what();
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(idx++, e.name, o, seconds);
    all = all && o.pass;
  }
  std::printf("%s\n", all ? "acceptance: all criteria passed" : "acceptance: FAILURES present");
  return all ? 0 : 1;
}
