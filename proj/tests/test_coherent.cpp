#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "capbound/coherent.hpp"
#include "capbound/zoo.hpp"

#include <random>

using namespace capbound;

namespace {

Mat bell_state() {
  Vec phi(4);
  phi << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
  return phi * phi.adjoint();
}

Mat random_density(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
  Mat rho = a * a.adjoint();
  return rho / rho.trace().real();
}

}  // namespace

TEST_CASE("state coherent information") {
  DensityMatrix phi(bell_state(), {2, 2});
  CHECK(state_coherent_info(phi) == doctest::Approx(1.0).epsilon(1e-12));

  DensityMatrix mixed(0.25 * Mat::Identity(4, 4), {2, 2});
  CHECK(state_coherent_info(mixed) == doctest::Approx(-1.0).epsilon(1e-12));

  DensityMatrix iso = isotropic_state(0.01 * 4.0 / 3.0);
  CHECK(state_coherent_info(iso) == doctest::Approx(0.903357239).epsilon(1e-8));
}

TEST_CASE("channel coherent information at fixed input") {
  DensityMatrix half(0.5 * Mat::Identity(2, 2), {2});
  CHECK(channel_coherent_info_at(identity_channel(2), half) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // full replacer: output entropy 1, environment keeps everything (entropy 2)
  DepolarizingModel dep1 = depolarizing(1.0);
  CHECK(channel_coherent_info_at(dep1.channel, half) == doctest::Approx(-1.0).epsilon(1e-9));

  Bb84Model bb = bb84(0.01, 0.01);
  CHECK(channel_coherent_info_at(bb.channel, half) ==
        doctest::Approx(0.838413728).epsilon(1e-8));
}

TEST_CASE("q1_maximize") {
  Q1Options opts;
  opts.restarts = 6;

  SUBCASE("identity channel") {
    Q1Result r = q1_maximize(identity_channel(2), opts);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.stationary);
    CHECK(max_abs(Mat(r.argmax - 0.5 * Mat::Identity(2, 2))) < 1e-5);
  }

  SUBCASE("depolarizing closed form") {
    double w = 0.05;
    DepolarizingModel dep = depolarizing(w * 4.0 / 3.0);
    Q1Result r = q1_maximize(dep.channel, opts);
    double expected = 1.0 - binary_entropy(w) - w * std::log2(3.0);
    CHECK(r.value == doctest::Approx(expected).epsilon(1e-6));
    // covariance symmetry puts the argmax at the maximally mixed state
    CHECK(0.5 * trace_norm(Mat(r.argmax - 0.5 * Mat::Identity(2, 2))) < 1e-5);
  }

  SUBCASE("maximally mixed start is never beaten by less") {
    DensityMatrix half(0.5 * Mat::Identity(2, 2), {2});
    for (int t = 0; t < 3; ++t) {
      GadModel g = gad(0.2 + 0.2 * t, 0.15);
      Q1Result r = q1_maximize(g.channel, opts);
      CHECK(r.value >= channel_coherent_info_at(g.channel, half) - 1e-9);
    }
  }

  SUBCASE("concavity spot check on a degradable channel") {
    CPMap ad = amplitude_damping(0.3);
    CPMap adc = complementary(ad);
    std::mt19937_64 rng(73);
    for (int t = 0; t < 6; ++t) {
      Mat a = random_density(2, rng), b = random_density(2, rng);
      double fmid = channel_coherent_info_at(ad, adc, Mat(0.5 * (a + b)));
      double favg = 0.5 * (channel_coherent_info_at(ad, adc, a) +
                           channel_coherent_info_at(ad, adc, b));
      CHECK(fmid >= favg - 1e-8);
    }
  }

  SUBCASE("finite differences agree with a finer-step gradient") {
    CPMap ad = amplitude_damping(0.3);
    CPMap adc = complementary(ad);
    auto f = [&](double x, double y, double z) {
      Mat rho(2, 2);
      rho(0, 0) = 0.5 * (1.0 + z);
      rho(1, 1) = 0.5 * (1.0 - z);
      rho(0, 1) = 0.5 * cplx(x, -y);
      rho(1, 0) = 0.5 * cplx(x, y);
      return channel_coherent_info_at(ad, adc, rho);
    };
    double h1 = 1e-5, h2 = 1e-6;
    double g1 = (f(0.2 + h1, 0.1, 0.3) - f(0.2 - h1, 0.1, 0.3)) / (2 * h1);
    double g2 = (f(0.2 + h2, 0.1, 0.3) - f(0.2 - h2, 0.1, 0.3)) / (2 * h2);
    CHECK(g1 == doctest::Approx(g2).epsilon(1e-5));
  }
}

TEST_CASE("q1_diagonal_scan") {
  SUBCASE("identity-like gad") {
    GadModel g = gad(0.0, 0.3);
    DiagScanResult r = q1_diagonal_scan(g.channel);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
  }

  SUBCASE("amplitude damping closed form") {
    // max over p of h((1-y)p) - h(yp), evaluated independently on a fine grid
    double y = 0.3;
    double best = -1.0;
    for (int i = 0; i <= 100000; ++i) {
      double p = i / 100000.0;
      best = std::max(best, binary_entropy((1.0 - y) * p) - binary_entropy(y * p));
    }
    DiagScanResult r = q1_diagonal_scan(amplitude_damping(y));
    CHECK(r.value == doctest::Approx(best).epsilon(1e-7));
  }

  SUBCASE("flagged gad agrees with the bloch-ball ascent") {
    GadModel g = gad(0.3, 0.2);
    CPMap nhat = pure_flag_family(g.split.parts[0], g.split.parts[1], 0.0);
    DiagScanResult scan = q1_diagonal_scan(nhat);
    Q1Options opts;
    opts.restarts = 8;
    Q1Result full = q1_maximize(nhat, opts);
    CHECK(scan.value == doctest::Approx(full.value).epsilon(1e-5));
  }

  SUBCASE("degenerate grid") {
    DiagScanResult r = q1_diagonal_scan(identity_channel(2), 1);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("choi-state consistency between state and channel coherent information") {
  for (double p : {0.05, 0.2}) {
    DepolarizingModel dep = depolarizing(p);
    DensityMatrix cs = choi_state(dep.channel);
    DensityMatrix half(0.5 * Mat::Identity(2, 2), {2});
    CHECK(state_coherent_info(cs) ==
          doctest::Approx(channel_coherent_info_at(dep.channel, half)).epsilon(1e-9));
  }
}
