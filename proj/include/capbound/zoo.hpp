#pragma once

#include "capbound/channel.hpp"

#include <map>
#include <optional>
#include <string>

namespace capbound {

// d-dimensional depolarizing channel (1-p) rho + p tr(rho) I/d with the
// canonical substate split of its Choi state.
struct DepolarizingModel {
  CPMap channel;
  DensityMatrix tau;    // (1-p) * maximally entangled state
  DensityMatrix omega;  // p * I/d^2
  CPDecomposition channel_split;  // {(1-p) id, p completely-depolarizing}
};
DepolarizingModel depolarizing(double p, int d = 2);

// Generalized amplitude damping channel with Kraus operators
//   A1 = sqrt(1-N)(|0><0| + sqrt(1-y)|1><1|),  A2 = sqrt(y(1-N))|0><1|,
//   A3 = sqrt(N)(sqrt(1-y)|0><0| + |1><1|),    A4 = sqrt(yN)|1><0|,
// and the two-part CP split {A1,A2 terms}, {A3,A4 terms}. Each part scaled by
// 1/(1-N) resp. 1/N is itself a CPTP amplitude damping channel, so the split
// is a convex combination of degradable channels for y < 1/2.
struct GadModel {
  CPMap channel;
  CPDecomposition split;  // collapses to one part when N is 0 or 1
};
GadModel gad(double y, double n);

CPMap amplitude_damping(double y);

// Qubit Pauli channel with independent bit/phase flip probabilities, with the
// canonical split {(1-p)^2 id, rest} when pX == pZ == p.
struct Bb84Model {
  CPMap channel;
  CPDecomposition split;
};
Bb84Model bb84(double px, double pz);

DensityMatrix isotropic_state(double f, int d = 2);

// Closed-form comparison curve h(1/2 - 2p(1-p)) - h(2p(1-p)).
double smith_smolin_bb84(double p);

// Parsed "family:key=value,..." CLI channel spec.
struct ChannelSpec {
  std::string family;
  std::map<std::string, double> params;
};
ChannelSpec parse_channel_spec(const std::string& text);

struct ZooEntry {
  CPMap channel;
  CPDecomposition split;  // two-part split when the family has one
  bool has_split = false;
  std::optional<DensityMatrix> tau, omega;  // Choi-state substate split
  std::string label;
};
ZooEntry build_channel(const ChannelSpec& spec);

struct ParseError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace capbound
