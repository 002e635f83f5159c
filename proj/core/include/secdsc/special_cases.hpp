#pragma once

// Closed-form regions for the cases where inner and outer bounds meet, the
// degraded-eavesdropper collapse check, and the relabelings that give Alice
// access to other observations.

#include <optional>
#include <string>
#include <vector>

#include "secdsc/aux_channels.hpp"
#include "secdsc/bounds.hpp"
#include "secdsc/prob.hpp"

namespace secdsc {

// Same source with E replaced by a constant.
JointDistribution without_eve(const JointDistribution& dist);

// Relabels the source so that Alice's observation becomes the tuple
// (A, extra...) with `extra` a subset of {B, E}; the new A symbol index is
// row-major over (a, b, e) restricted to the included labels. A channel on
// the new A axis then realizes p(u|a,b), p(u|a,e) or p(u|a,b,e).
// Throws ArgumentError if `extra` is not a subset of {B, E}.
JointDistribution with_alice_observing(const JointDistribution& dist, VarSet extra);

// Eve has no side information (|E| = 1): ids eq21..eq26 with the min{} and
// [x]+ terms split into linear pieces. Throws PreconditionError otherwise.
ConstraintSystem region_no_eve_si(const JointDistribution& dist);

// Eve's side information is also available at Alice (ids eq27..eq29).
ConstraintSystem region_eve_si_at_alice(const JointDistribution& dist);

// Eve's side information is also available at Bob (ids eq33..eq40).
ConstraintSystem region_eve_si_at_bob(const JointDistribution& dist);

struct KeyCaseResult {
  double delta_a_max;
  double delta_c_max;
  AuxChannel v_witness;
  ChannelSearchConfig config;
};

// Alice holds B as a key: requires I(A;B,C) <= 1e-9 and I(B;E) <= 1e-9,
// otherwise throws PreconditionError naming the failing independence.
KeyCaseResult equivocations_key_case(const JointDistribution& dist,
                                     const ChannelSearchConfig& config);

enum class Side { kAlice, kCharlie };

struct DegradedReport {
  Side side;
  double markov_gap;        // I(X;E|B) measured for the precondition
  double ceiling;           // I(X;B,Y|E)
  double constant_value;    // inner body at a constant auxiliary channel
  double searched_value;    // best searched inner body
  AuxChannel witness;
  bool success;
  ChannelSearchConfig config;
};

// X - B - E degradedness check for X = A (Side::kAlice) or X = C. Throws
// PreconditionError, quoting the measured I(X;E|B), when the chain fails
// beyond 1e-9.
DegradedReport degraded_collapse_check(const JointDistribution& dist, Side side,
                                       const ChannelSearchConfig& config);

// Equal-valued written forms of the sum-equivocation bounds, each evaluated
// separately from mutual_information calls.
struct IdentityForms {
  std::string id;
  std::vector<std::string> expressions;
  std::vector<double> values;

  double spread() const;
};

std::vector<IdentityForms> chain_identity_forms(const JointDistribution& dist);

}  // namespace secdsc
