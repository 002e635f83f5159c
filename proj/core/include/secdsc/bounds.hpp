#pragma once

// Inner and outer constraint systems on (R_A, R_C, Delta_A, Delta_C),
// achievable corner points, region membership and the equivocation frontier.

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "secdsc/aux_channels.hpp"
#include "secdsc/prob.hpp"

namespace secdsc {

// Compression rates and equivocations in bits per source symbol.
struct RateQuadruple {
  double r_a = 0.0;
  double r_c = 0.0;
  double delta_a = 0.0;
  double delta_c = 0.0;

  friend bool operator==(const RateQuadruple&, const RateQuadruple&) = default;
};

// Throws ArgumentError unless all four components are finite and both
// equivocations are nonnegative.
void validate_quadruple(const RateQuadruple& q);

enum class Relation { kAtLeast, kAtMost };

std::string_view relation_symbol(Relation rel);

// coeffs . (r_a, r_c, delta_a, delta_c)  (>= | <=)  bound
struct LinearConstraint {
  std::string id;
  std::array<double, 4> coeffs;
  Relation relation;
  double bound;
  std::string expression;
};

struct ConstraintRecord {
  std::string id;
  double lhs;
  double rhs;
  Relation relation;
  bool satisfied;
  // Margin in the satisfied direction; negative when violated.
  double slack;
};

struct ConstraintReport {
  std::vector<ConstraintRecord> records;
  bool overall = true;

  double min_slack() const;
  // Throws ArgumentError for an unknown id.
  const ConstraintRecord& at(std::string_view id) const;
};

class ConstraintSystem {
 public:
  // A constraint counts as satisfied when its slack is >= -tolerance.
  static constexpr double kTolerance = 1e-9;

  ConstraintSystem() = default;
  ConstraintSystem(std::vector<LinearConstraint> constraints, std::string note = {})
      : constraints_(std::move(constraints)), note_(std::move(note)) {}

  ConstraintReport evaluate(const RateQuadruple& q,
                            double tolerance = kTolerance) const;

  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const LinearConstraint& at(std::string_view id) const;
  const std::string& note() const { return note_; }

 private:
  std::vector<LinearConstraint> constraints_;
  std::string note_;
};

// The eight inequalities of the inner bound at the fixed (U, V) in `ext`
// (ids eq1..eq8). No maximization over channels happens here.
ConstraintSystem inner_system(const ExtendedJoint& ext);
ConstraintReport inner_constraints(const ExtendedJoint& ext, const RateQuadruple& q);

// The ten inequalities of the outer bound at the fixed (U, V) (ids eq9..eq18).
ConstraintSystem outer_system(const ExtendedJoint& ext);
ConstraintReport outer_constraints(const ExtendedJoint& ext, const RateQuadruple& q);

struct MembershipResult {
  // True only with a verified witness; false means "not found within the
  // search budget", never a certificate of non-membership.
  bool found = false;
  std::optional<std::pair<AuxChannel, AuxChannel>> witness;
  // Report at the best channel pair the search reached.
  ConstraintReport report;
  AuxChannel best_u;
  AuxChannel best_v;
  ChannelSearchConfig config;
};

MembershipResult point_in_inner(const JointDistribution& dist,
                                const RateQuadruple& q,
                                const ChannelSearchConfig& config);
// The outer test takes eq12 and eq13 against their searched maxima over all
// channel pairs and requires the remaining constraints at one witness pair.
MembershipResult point_in_outer(const JointDistribution& dist,
                                const RateQuadruple& q,
                                const ChannelSearchConfig& config);

// Searched maxima of the equivocation bodies, reported separately from
// membership. `sum` is the inner sum body (eq6) for the inner bound and the
// closed form I(A;C) + I(A,C;B) (eq16) for the outer bound.
struct Ceilings {
  ChannelSearchResult delta_a;
  ChannelSearchResult delta_c;
  double sum;
  std::optional<ChannelSearchResult> sum_search;
};

Ceilings inner_ceilings(const JointDistribution& dist, const ChannelSearchConfig& config);
Ceilings outer_ceilings(const JointDistribution& dist, const ChannelSearchConfig& config);

// The four achievable corner quadruples of the binning scheme, in case order.
std::array<RateQuadruple, 4> corner_quadruples(const ExtendedJoint& ext);

// lambda * q1 + (1 - lambda) * q2. Throws ArgumentError unless 0 <= lambda <= 1.
RateQuadruple time_share(const RateQuadruple& q1, const RateQuadruple& q2,
                         double lambda);

struct FrontierPoint {
  double weight;
  RateQuadruple point;
  AuxChannel u;
  AuxChannel v;
  // inner_constraints(extend_joint(dist, u, v), point).overall
  bool verdict;
};

struct RegionSample {
  std::vector<FrontierPoint> points;
  std::size_t infeasible_weights = 0;
  ChannelSearchConfig config;
};

// Sweeps `grid_points` weights w in [0, 1] and for each finds channels and an
// inner-bound point at rates (r_a, r_c) maximizing w*Delta_A + (1-w)*Delta_C.
// The returned points are mutually non-dominated. Throws ArgumentError if
// grid_points < 2.
RegionSample equivocation_frontier(const JointDistribution& dist, double r_a,
                                   double r_c, const ChannelSearchConfig& config,
                                   std::size_t grid_points);

}  // namespace secdsc
