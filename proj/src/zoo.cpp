#include "capbound/zoo.hpp"

#include <cmath>
#include <sstream>

namespace capbound {

namespace {

void check_range(double v, double lo, double hi, const char* what) {
  if (!(v >= lo && v <= hi)) {
    std::ostringstream os;
    os << what << " = " << v << " outside [" << lo << ", " << hi << "]";
    throw std::domain_error(os.str());
  }
}

Vec max_entangled(int d) {
  Vec phi = Vec::Zero(static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i) phi[static_cast<Eigen::Index>(i) * d + i] = 1.0 / std::sqrt(d);
  return phi;
}

// completely depolarizing channel rho -> tr(rho) I/d
std::vector<Mat> replacer_kraus(int d) {
  std::vector<Mat> kraus;
  for (int m = 0; m < d; ++m)
    for (int m2 = 0; m2 < d; ++m2) {
      Mat k = Mat::Zero(d, d);
      k(m, m2) = 1.0 / std::sqrt(d);
      kraus.push_back(std::move(k));
    }
  return kraus;
}

Mat pauli(char which) {
  Mat m(2, 2);
  switch (which) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

}  // namespace

DepolarizingModel depolarizing(double p, int d) {
  check_range(p, 0.0, 1.0, "depolarizing p");
  if (d < 2) throw std::domain_error("depolarizing: d must be at least 2");

  // shift-and-clock Kraus set: the identity keeps weight 1-p+p/d^2, every
  // other displacement operator has weight p/d^2
  Mat shift = Mat::Zero(d, d), clock = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    shift((i + 1) % d, i) = 1.0;
    clock(i, i) = std::exp(cplx(0.0, 2.0 * M_PI * i / d));
  }
  std::vector<Mat> kraus;
  Mat xj = Mat::Identity(d, d);
  for (int j = 0; j < d; ++j) {
    Mat w = xj;
    for (int k = 0; k < d; ++k) {
      double weight = (j == 0 && k == 0) ? 1.0 - p + p / (d * d) : p / (d * d);
      if (weight > 0.0) kraus.push_back(std::sqrt(weight) * w);
      w = w * clock;
    }
    xj = shift * xj;
  }
  CPMap channel = CPMap::from_kraus(std::move(kraus));

  Vec phi = max_entangled(d);
  Mat phim = phi * phi.adjoint();
  DensityMatrix tau = DensityMatrix::substate((1.0 - p) * phim, {d, d});
  DensityMatrix omega = DensityMatrix::substate(
      (p / (d * d)) * Mat::Identity(d * d, d * d), {d, d});

  CPDecomposition split;
  if (p < 1.0)
    split.parts.push_back(CPMap::from_kraus({std::sqrt(1.0 - p) * Mat::Identity(d, d)}));
  if (p > 0.0) {
    std::vector<Mat> rk = replacer_kraus(d);
    for (Mat& k : rk) k *= std::sqrt(p);
    split.parts.push_back(CPMap::from_kraus(std::move(rk)));
  }
  return DepolarizingModel{std::move(channel), std::move(tau), std::move(omega), std::move(split)};
}

GadModel gad(double y, double n) {
  check_range(y, 0.0, 1.0, "gad y");
  check_range(n, 0.0, 1.0, "gad N");
  Mat a1(2, 2), a2(2, 2), a3(2, 2), a4(2, 2);
  a1 << std::sqrt(1.0 - n), 0, 0, std::sqrt((1.0 - n) * (1.0 - y));
  a2 << 0, std::sqrt(y * (1.0 - n)), 0, 0;
  a3 << std::sqrt(n * (1.0 - y)), 0, 0, std::sqrt(n);
  a4 << 0, 0, std::sqrt(y * n), 0;

  std::vector<Mat> kraus;
  for (const Mat& k : {a1, a2, a3, a4})
    if (max_abs(k) > 0.0) kraus.push_back(k);
  CPMap channel = CPMap::from_kraus(kraus);

  CPDecomposition split;
  if (n < 1.0) split.parts.push_back(CPMap::from_kraus({a1, a2}));
  if (n > 0.0) split.parts.push_back(CPMap::from_kraus({a3, a4}));
  return GadModel{std::move(channel), std::move(split)};
}

CPMap amplitude_damping(double y) { return gad(y, 0.0).channel; }

Bb84Model bb84(double px, double pz) {
  check_range(px, 0.0, 0.5, "bb84 pX");
  check_range(pz, 0.0, 0.5, "bb84 pZ");
  const double qi = (1.0 - px) * (1.0 - pz);
  const double qx = px * (1.0 - pz);
  const double qz = pz * (1.0 - px);
  const double qy = px * pz;

  auto weighted = [](double q, char which) { return Mat(std::sqrt(q) * pauli(which)); };
  std::vector<Mat> kraus;
  if (qi > 0) kraus.push_back(weighted(qi, 'I'));
  if (qx > 0) kraus.push_back(weighted(qx, 'X'));
  if (qz > 0) kraus.push_back(weighted(qz, 'Z'));
  if (qy > 0) kraus.push_back(weighted(qy, 'Y'));
  CPMap channel = CPMap::from_kraus(kraus);

  CPDecomposition split;
  if (qi > 0) split.parts.push_back(CPMap::from_kraus({weighted(qi, 'I')}));
  std::vector<Mat> rest;
  if (qx > 0) rest.push_back(weighted(qx, 'X'));
  if (qz > 0) rest.push_back(weighted(qz, 'Z'));
  if (qy > 0) rest.push_back(weighted(qy, 'Y'));
  if (!rest.empty()) split.parts.push_back(CPMap::from_kraus(std::move(rest)));
  return Bb84Model{std::move(channel), std::move(split)};
}

DensityMatrix isotropic_state(double f, int d) {
  check_range(f, 0.0, 1.0, "isotropic f");
  Vec phi = max_entangled(d);
  Mat m = (1.0 - f) * (phi * phi.adjoint()) + (f / (d * d)) * Mat::Identity(d * d, d * d);
  return DensityMatrix(std::move(m), {d, d});
}

double smith_smolin_bb84(double p) {
  double q = 2.0 * p * (1.0 - p);
  return binary_entropy(0.5 - q) - binary_entropy(q);
}

ChannelSpec parse_channel_spec(const std::string& text) {
  ChannelSpec spec;
  auto colon = text.find(':');
  spec.family = text.substr(0, colon);
  if (spec.family.empty()) throw ParseError("channel spec: empty family name");
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ParseError("channel spec: expected key=value, got '" + item + "'");
      try {
        size_t used = 0;
        double v = std::stod(item.substr(eq + 1), &used);
        if (used != item.size() - eq - 1) throw std::invalid_argument("");
        spec.params[item.substr(0, eq)] = v;
      } catch (const std::exception&) {
        throw ParseError("channel spec: bad numeric value in '" + item + "'");
      }
    }
  }
  return spec;
}

ZooEntry build_channel(const ChannelSpec& spec) {
  auto get = [&](const std::string& key) -> std::optional<double> {
    auto it = spec.params.find(key);
    return it == spec.params.end() ? std::nullopt : std::optional<double>(it->second);
  };
  auto require = [&](const std::string& key) {
    auto v = get(key);
    if (!v) throw ParseError("channel spec: missing parameter '" + key + "'");
    return *v;
  };

  if (spec.family == "depolarizing") {
    double p = 0.0;
    if (auto w = get("w")) {
      p = *w * 4.0 / 3.0;  // Pauli-error weight 3p/4
      if (get("p")) throw ParseError("channel spec: give either p= or w=, not both");
    } else {
      p = require("p");
    }
    int d = static_cast<int>(get("d").value_or(2.0));
    DepolarizingModel m = depolarizing(p, d);
    std::ostringstream label;
    label << "depolarizing:p=" << p;
    return ZooEntry{std::move(m.channel), std::move(m.channel_split), true, std::move(m.tau),
                    std::move(m.omega), label.str()};
  }
  if (spec.family == "gad") {
    GadModel m = gad(require("y"), require("N"));
    std::ostringstream label;
    label << "gad:y=" << require("y") << ",N=" << require("N");
    return ZooEntry{std::move(m.channel), std::move(m.split), true, std::nullopt, std::nullopt,
                    label.str()};
  }
  if (spec.family == "bb84") {
    double px, pz;
    if (auto p = get("p")) {
      px = pz = *p;
    } else {
      px = require("pX");
      pz = require("pZ");
    }
    Bb84Model m = bb84(px, pz);
    std::ostringstream label;
    label << "bb84:pX=" << px << ",pZ=" << pz;
    return ZooEntry{std::move(m.channel), std::move(m.split), true, std::nullopt, std::nullopt,
                    label.str()};
  }
  if (spec.family == "amplitude-damping") {
    GadModel m = gad(require("y"), 0.0);
    std::ostringstream label;
    label << "amplitude-damping:y=" << require("y");
    return ZooEntry{std::move(m.channel), std::move(m.split), true, std::nullopt, std::nullopt,
                    label.str()};
  }
  throw ParseError("channel spec: unknown family '" + spec.family + "'");
}

}  // namespace capbound
