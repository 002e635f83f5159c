#include "secdsc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "secdsc/error.hpp"

namespace secdsc {

using namespace vars;

namespace {

constexpr double kDominanceTolerance = 1e-9;
constexpr double kInfeasiblePenalty = 1e3;

double dot(const std::array<double, 4>& c, const RateQuadruple& q) {
  return c[0] * q.r_a + c[1] * q.r_c + c[2] * q.delta_a + c[3] * q.delta_c;
}

LinearConstraint at_least(std::string id, std::array<double, 4> coeffs,
                          double bound, std::string expression) {
  return {std::move(id), coeffs, Relation::kAtLeast, bound, std::move(expression)};
}

LinearConstraint at_most(std::string id, std::array<double, 4> coeffs,
                         double bound, std::string expression) {
  return {std::move(id), coeffs, Relation::kAtMost, bound, std::move(expression)};
}

constexpr std::array<double, 4> kRA{1, 0, 0, 0};
constexpr std::array<double, 4> kRC{0, 1, 0, 0};
constexpr std::array<double, 4> kRSum{1, 1, 0, 0};
constexpr std::array<double, 4> kDA{0, 0, 1, 0};
constexpr std::array<double, 4> kDC{0, 0, 0, 1};
constexpr std::array<double, 4> kDSum{0, 0, 1, 1};
constexpr std::array<double, 4> kRADA{1, 0, 1, 0};
constexpr std::array<double, 4> kRCDC{0, 1, 0, 1};

// Rate constraints shared by both bounds.
void add_rate_constraints(Entropies& m, std::vector<LinearConstraint>& out,
                          const char* id1, const char* id2, const char* id3) {
  const double coupling = m.mi(A, C, U | V | B);
  out.push_back(at_least(id1, kRA, m.h(A, V | B) - coupling,
                         "R_A >= H(A|V,B) - I(A;C|U,V,B)"));
  out.push_back(at_least(id2, kRC, m.h(C, U | B) - coupling,
                         "R_C >= H(C|U,B) - I(A;C|U,V,B)"));
  out.push_back(at_least(id3, kRSum, m.h(A | C, B), "R_A + R_C >= H(A,C|B)"));
}

void add_floor_constraints(Entropies& m, std::vector<LinearConstraint>& out,
                           const char* id_a, const char* id_c) {
  out.push_back(at_least(id_a, kRADA, m.h(A, E), "R_A + Delta_A >= H(A|E)"));
  out.push_back(at_least(id_c, kRCDC, m.h(C, E), "R_C + Delta_C >= H(C|E)"));
}

MembershipResult membership(
    const JointDistribution& dist, const RateQuadruple& q,
    const ChannelSearchConfig& config,
    const std::function<ConstraintSystem(const ExtendedJoint&)>& system_of) {
  validate_quadruple(q);
  auto min_slack = [&](const ExtendedJoint& ext) {
    return system_of(ext).evaluate(q).min_slack();
  };
  auto found = search_channels(dist, min_slack, config, {},
                               -ConstraintSystem::kTolerance);
  const ExtendedJoint ext = extend_joint(dist, found.u, found.v);
  ConstraintReport report = system_of(ext).evaluate(q);
  MembershipResult result{report.overall, std::nullopt, report, found.u, found.v,
                          found.config};
  if (result.found) result.witness.emplace(found.u, found.v);
  return result;
}

// Inner-bound (Delta_A, Delta_C) polytope at fixed rates and channels.
struct EquivocationPolytope {
  double violation = 0.0;
  double floor_a = 0.0, floor_c = 0.0;
  double max_a = 0.0, max_c = 0.0, max_sum = 0.0;

  bool feasible() const { return violation <= ConstraintSystem::kTolerance; }

  std::pair<double, double> best_for(double w) const {
    if (w > 0.5) {
      const double da = std::min(max_a, max_sum - floor_c);
      return {da, std::min(max_c, max_sum - da)};
    }
    if (w < 0.5) {
      const double dc = std::min(max_c, max_sum - floor_a);
      return {std::min(max_a, max_sum - dc), dc};
    }
    if (max_a + max_c <= max_sum) return {max_a, max_c};
    const double da1 = std::min(max_a, max_sum - floor_c);
    const double dc2 = std::min(max_c, max_sum - floor_a);
    return {0.5 * (da1 + (max_sum - dc2)), 0.5 * ((max_sum - da1) + dc2)};
  }
};

EquivocationPolytope polytope_at(const ExtendedJoint& ext, double r_a, double r_c) {
  const ConstraintSystem sys = inner_system(ext);
  EquivocationPolytope p;
  double rate_slack = 0.0;
  for (const char* id : {"eq1", "eq2", "eq3"}) {
    const auto& c = sys.at(id);
    rate_slack = std::min(rate_slack, dot(c.coeffs, {r_a, r_c, 0, 0}) - c.bound);
  }
  p.floor_a = std::max(0.0, sys.at("eq7").bound - r_a);
  p.floor_c = std::max(0.0, sys.at("eq8").bound - r_c);
  p.max_a = sys.at("eq4").bound;
  p.max_c = sys.at("eq5").bound;
  p.max_sum = sys.at("eq6").bound;
  p.violation = std::max({0.0, -rate_slack, p.floor_a - p.max_a,
                          p.floor_c - p.max_c, p.floor_a + p.floor_c - p.max_sum});
  return p;
}

bool dominates(const RateQuadruple& x, const RateQuadruple& y) {
  const bool no_worse = x.delta_a >= y.delta_a - kDominanceTolerance &&
                        x.delta_c >= y.delta_c - kDominanceTolerance;
  const bool better = x.delta_a > y.delta_a + kDominanceTolerance ||
                      x.delta_c > y.delta_c + kDominanceTolerance;
  return no_worse && better;
}

bool same_point(const RateQuadruple& x, const RateQuadruple& y) {
  return std::abs(x.delta_a - y.delta_a) <= kDominanceTolerance &&
         std::abs(x.delta_c - y.delta_c) <= kDominanceTolerance;
}

}  // namespace

void validate_quadruple(const RateQuadruple& q) {
  if (!std::isfinite(q.r_a) || !std::isfinite(q.r_c) ||
      !std::isfinite(q.delta_a) || !std::isfinite(q.delta_c)) {
    throw ArgumentError("rate quadruple components must be finite");
  }
  if (q.delta_a < 0.0 || q.delta_c < 0.0) {
    throw ArgumentError("equivocations must be nonnegative");
  }
}

std::string_view relation_symbol(Relation rel) {
  return rel == Relation::kAtLeast ? ">=" : "<=";
}

double ConstraintReport::min_slack() const {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& r : records) s = std::min(s, r.slack);
  return s;
}

const ConstraintRecord& ConstraintReport::at(std::string_view id) const {
  for (const auto& r : records) {
    if (r.id == id) return r;
  }
  throw ArgumentError("no constraint with id " + std::string(id));
}

const LinearConstraint& ConstraintSystem::at(std::string_view id) const {
  for (const auto& c : constraints_) {
    if (c.id == id) return c;
  }
  throw ArgumentError("no constraint with id " + std::string(id));
}

ConstraintReport ConstraintSystem::evaluate(const RateQuadruple& q,
                                            double tolerance) const {
  ConstraintReport report;
  report.records.reserve(constraints_.size());
  for (const auto& c : constraints_) {
    const double lhs = dot(c.coeffs, q);
    const double slack = c.relation == Relation::kAtLeast ? lhs - c.bound
                                                          : c.bound - lhs;
    const bool ok = slack >= -tolerance;
    report.records.push_back({c.id, lhs, c.bound, c.relation, ok, slack});
    report.overall = report.overall && ok;
  }
  return report;
}

ConstraintSystem inner_system(const ExtendedJoint& ext) {
  Entropies m(ext);
  std::vector<LinearConstraint> cs;
  add_rate_constraints(m, cs, "eq1", "eq2", "eq3");
  cs.push_back(at_most("eq4", kDA, evaluate_objective(ext, Objective::kInnerDeltaA),
                       "Delta_A <= I(A;B,C|U) - I(A;E|U)"));
  cs.push_back(at_most("eq5", kDC, evaluate_objective(ext, Objective::kInnerDeltaC),
                       "Delta_C <= I(A,B;C|V) - I(C;E|V)"));
  cs.push_back(at_most("eq6", kDSum, evaluate_objective(ext, Objective::kInnerSum),
                       "Delta_A + Delta_C <= I(A,C;U,V,B) + I(A;C) - I(A;U,E) - I(C;V,E)"));
  add_floor_constraints(m, cs, "eq7", "eq8");
  return ConstraintSystem(std::move(cs));
}

ConstraintReport inner_constraints(const ExtendedJoint& ext, const RateQuadruple& q) {
  return inner_system(ext).evaluate(q);
}

ConstraintSystem outer_system(const ExtendedJoint& ext) {
  Entropies m(ext);
  std::vector<LinearConstraint> cs;
  add_rate_constraints(m, cs, "eq9", "eq10", "eq11");
  cs.push_back(at_most("eq12", kDA, evaluate_objective(ext, Objective::kOuterDeltaA),
                       "Delta_A <= I(A;B,V|U) - I(A;E|U)"));
  cs.push_back(at_most("eq13", kDC, evaluate_objective(ext, Objective::kOuterDeltaC),
                       "Delta_C <= I(C;B,U|V) - I(C;E|V)"));
  cs.push_back(at_most("eq14", {0, -1, 1, 0}, m.mi(A, B) - m.h(C, A | B),
                       "Delta_A - R_C <= I(A;B) - H(C|A,B)"));
  cs.push_back(at_most("eq15", {-1, 0, 0, 1}, m.mi(C, B) - m.h(A, B | C),
                       "Delta_C - R_A <= I(C;B) - H(A|B,C)"));
  cs.push_back(at_most("eq16", kDSum, m.mi(A, C) + m.mi(A | C, B),
                       "Delta_A + Delta_C <= I(A;C) + I(A,C;B)"));
  add_floor_constraints(m, cs, "eq17", "eq18");
  return ConstraintSystem(std::move(cs));
}

ConstraintReport outer_constraints(const ExtendedJoint& ext, const RateQuadruple& q) {
  return outer_system(ext).evaluate(q);
}

MembershipResult point_in_inner(const JointDistribution& dist,
                                const RateQuadruple& q,
                                const ChannelSearchConfig& config) {
  return membership(dist, q, config, &inner_system);
}

MembershipResult point_in_outer(const JointDistribution& dist,
                                const RateQuadruple& q,
                                const ChannelSearchConfig& config) {
  validate_quadruple(q);
  // eq12 and eq13 carry their own maximization; the rest share one witness.
  const double cap_a = optimize_channels(dist, Objective::kOuterDeltaA, config).value;
  const double cap_c = optimize_channels(dist, Objective::kOuterDeltaC, config).value;
  return membership(dist, q, config, [&](const ExtendedJoint& ext) {
    ConstraintSystem sys = outer_system(ext);
    std::vector<LinearConstraint> cs = sys.constraints();
    for (auto& c : cs) {
      if (c.id == "eq12") c.bound = cap_a;
      if (c.id == "eq13") c.bound = cap_c;
    }
    return ConstraintSystem(std::move(cs), "eq12 and eq13 against searched maxima");
  });
}

Ceilings inner_ceilings(const JointDistribution& dist,
                        const ChannelSearchConfig& config) {
  auto sum = optimize_channels(dist, Objective::kInnerSum, config);
  const double value = sum.value;
  return Ceilings{optimize_channels(dist, Objective::kInnerDeltaA, config),
                  optimize_channels(dist, Objective::kInnerDeltaC, config), value,
                  std::move(sum)};
}

Ceilings outer_ceilings(const JointDistribution& dist,
                        const ChannelSearchConfig& config) {
  return Ceilings{optimize_channels(dist, Objective::kOuterDeltaA, config),
                  optimize_channels(dist, Objective::kOuterDeltaC, config),
                  mutual_information(dist, A, C) + mutual_information(dist, A | C, B),
                  std::nullopt};
}

std::array<RateQuadruple, 4> corner_quadruples(const ExtendedJoint& ext) {
  Entropies m(ext);
  const double leak_a = m.mi(A, E, U);
  const double leak_c = m.mi(C, E, V);
  // Cases 1 and 2 share the equivocation pair, as do cases 3 and 4.
  const double da_12 = m.mi(A, V | B, U) - leak_a;
  const double dc_12 = m.mi(C, A | B, V) - leak_c;
  const double da_34 = m.mi(A, B | C, U) - leak_a;
  const double dc_34 = m.mi(C, U | B, V) - leak_c;
  return {{
      {m.h(A, B) - m.mi(A, V, U | B), m.h(C, U | B) - m.mi(A, C, U | V | B),
       da_12, dc_12},
      {m.h(A, V | B), m.h(C, B) - m.mi(A, C, V | B), da_12, dc_12},
      {m.h(A, B) - m.mi(A, C, U | B), m.h(C, U | B), da_34, dc_34},
      {m.h(A, V | B) - m.mi(A, C, U | V | B), m.h(C, B) - m.mi(C, U, V | B),
       da_34, dc_34},
  }};
}

RateQuadruple time_share(const RateQuadruple& q1, const RateQuadruple& q2,
                         double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ArgumentError("time-sharing weight must lie in [0, 1]");
  }
  const double mu = 1.0 - lambda;
  return {lambda * q1.r_a + mu * q2.r_a, lambda * q1.r_c + mu * q2.r_c,
          lambda * q1.delta_a + mu * q2.delta_a,
          lambda * q1.delta_c + mu * q2.delta_c};
}

RegionSample equivocation_frontier(const JointDistribution& dist, double r_a,
                                   double r_c, const ChannelSearchConfig& config,
                                   std::size_t grid_points) {
  if (grid_points < 2) throw ArgumentError("frontier needs at least 2 grid points");
  if (!std::isfinite(r_a) || !std::isfinite(r_c)) {
    throw ArgumentError("rates must be finite");
  }
  RegionSample sample;
  sample.config = config.resolved(dist);
  std::vector<FrontierPoint> raw;
  for (std::size_t k = 0; k < grid_points; ++k) {
    const double w = double(k) / double(grid_points - 1);
    auto score = [&](const ExtendedJoint& ext) {
      const auto p = polytope_at(ext, r_a, r_c);
      if (!p.feasible()) return -kInfeasiblePenalty - p.violation;
      const auto [da, dc] = p.best_for(w);
      return w * da + (1.0 - w) * dc;
    };
    auto found = search_channels(dist, score, config);
    const ExtendedJoint ext = extend_joint(dist, found.u, found.v);
    const auto p = polytope_at(ext, r_a, r_c);
    if (!p.feasible()) {
      ++sample.infeasible_weights;
      continue;
    }
    const auto [da, dc] = p.best_for(w);
    RateQuadruple q{r_a, r_c, std::max(0.0, da), std::max(0.0, dc)};
    const bool verdict = inner_constraints(ext, q).overall;
    raw.push_back({w, q, found.u, found.v, verdict});
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < raw.size() && keep; ++j) {
      if (i == j) continue;
      if (dominates(raw[j].point, raw[i].point)) keep = false;
      if (j < i && same_point(raw[j].point, raw[i].point)) keep = false;
    }
    if (keep) sample.points.push_back(raw[i]);
  }
  return sample;
}

}  // namespace secdsc
