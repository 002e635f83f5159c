#include "secdsc/special_cases.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "secdsc/error.hpp"

namespace secdsc {

using namespace vars;

namespace {

constexpr double kIndependenceTolerance = 1e-9;
constexpr double kCollapseTolerance = 1e-6;
constexpr double kCeilingTolerance = 1e-9;

constexpr std::array<double, 4> kRA{1, 0, 0, 0};
constexpr std::array<double, 4> kRC{0, 1, 0, 0};
constexpr std::array<double, 4> kRSum{1, 1, 0, 0};
constexpr std::array<double, 4> kDA{0, 0, 1, 0};
constexpr std::array<double, 4> kDC{0, 0, 0, 1};
constexpr std::array<double, 4> kDSum{0, 0, 1, 1};

LinearConstraint ge(std::string id, std::array<double, 4> c, double bound,
                    std::string expr) {
  return {std::move(id), c, Relation::kAtLeast, bound, std::move(expr)};
}

LinearConstraint le(std::string id, std::array<double, 4> c, double bound,
                    std::string expr) {
  return {std::move(id), c, Relation::kAtMost, bound, std::move(expr)};
}

std::string bits(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

JointDistribution without_eve(const JointDistribution& dist) {
  const auto [na, nb, nc, ne] = dist.source_dims();
  return JointDistribution({na, nb, nc, 1}, dist.marginal_pmf(A | B | C));
}

JointDistribution with_alice_observing(const JointDistribution& dist, VarSet extra) {
  if (!extra.subset_of(B | E)) {
    throw ArgumentError("Alice can additionally observe only B and/or E, got {" +
                        extra.to_string() + "}");
  }
  const auto [na, nb, nc, ne] = dist.source_dims();
  const std::size_t kb = extra.contains(Var::B) ? nb : 1;
  const std::size_t ke = extra.contains(Var::E) ? ne : 1;
  const std::size_t wide = na * kb * ke;
  std::vector<double> pmf(wide * nb * nc * ne, 0.0);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < nb; ++b) {
      for (std::size_t c = 0; c < nc; ++c) {
        for (std::size_t e = 0; e < ne; ++e) {
          const std::size_t code =
              (a * kb + (kb > 1 ? b : 0)) * ke + (ke > 1 ? e : 0);
          pmf[((code * nb + b) * nc + c) * ne + e] = dist.p(a, b, c, e);
        }
      }
    }
  }
  return JointDistribution({wide, nb, nc, ne}, std::move(pmf));
}

ConstraintSystem region_no_eve_si(const JointDistribution& dist) {
  if (dist.cardinality(Var::E) != 1) {
    throw PreconditionError(
        "no-eve-si region requires a constant E (cardinality 1), got " +
        std::to_string(dist.cardinality(Var::E)));
  }
  Entropies m(dist);
  std::vector<LinearConstraint> cs{
      ge("eq21", kRA, m.h(A, B | C), "R_A >= H(A|B,C)"),
      ge("eq22", kRC, m.h(C, A | B), "R_C >= H(C|A,B)"),
      ge("eq23", kRSum, m.h(A | C, B), "R_A + R_C >= H(A,C|B)"),
      ge("eq24.floor", kDA, 0.0, "Delta_A >= 0"),
      ge("eq24.floor_rate", {1, 0, 1, 0}, m.h(A), "R_A + Delta_A >= H(A)"),
      le("eq24.ceiling", kDA, m.mi(A, B | C), "Delta_A <= I(A;B,C)"),
      le("eq24.ceiling_rate", {0, -1, 1, 0}, m.mi(A, B) - m.h(C, A | B),
         "Delta_A - R_C <= I(A;B) - H(C|A,B)"),
      ge("eq25.floor", kDC, 0.0, "Delta_C >= 0"),
      ge("eq25.floor_rate", {0, 1, 0, 1}, m.h(C), "R_C + Delta_C >= H(C)"),
      le("eq25.ceiling", kDC, m.mi(A | B, C), "Delta_C <= I(A,B;C)"),
      le("eq25.ceiling_rate", {-1, 0, 0, 1}, m.mi(C, B) - m.h(A, B | C),
         "Delta_C - R_A <= I(C;B) - H(A|B,C)"),
      le("eq26", kDSum, m.mi(A | C, B) + m.mi(A, C),
         "Delta_A + Delta_C <= I(A,C;B) + I(A;C)"),
  };
  return ConstraintSystem(std::move(cs),
                          "achieved with constant U and V and Slepian-Wolf binning");
}

ConstraintSystem region_eve_si_at_alice(const JointDistribution& dist) {
  Entropies m(dist);
  const double ia = m.mi(A, B | C, E);
  std::vector<LinearConstraint> cs{
      le("eq27", kDA, ia, "Delta_A <= I(A;B,C|E)"),
      le("eq28", kDC, m.mi(C, A | B, E), "Delta_C <= I(C;A,B|E)"),
      le("eq29", kDSum, ia + m.mi(B, C, E),
         "Delta_A + Delta_C <= I(A;B,C|E) + I(B;C|E)"),
  };
  return ConstraintSystem(std::move(cs),
                          "achieved with U = E (Alice observes (A,E)) and constant V; "
                          "rates unconstrained");
}

ConstraintSystem region_eve_si_at_bob(const JointDistribution& dist) {
  Entropies m(dist);
  const double ia = m.mi(A, B | C, E);
  const double ic = m.mi(C, A | B, E);
  std::vector<LinearConstraint> cs{
      ge("eq33", kRA, m.h(A, B | C | E), "R_A >= H(A|B,C,E)"),
      ge("eq34", kRC, m.h(C, A | B | E), "R_C >= H(C|A,B,E)"),
      ge("eq35", kRSum, m.h(A | C, B | E), "R_A + R_C >= H(A,C|B,E)"),
      ge("eq36.floor", kDA, 0.0, "Delta_A >= 0"),
      le("eq36.ceiling", kDA, ia, "Delta_A <= I(A;B,C|E)"),
      ge("eq37.floor", kDC, 0.0, "Delta_C >= 0"),
      le("eq37.ceiling", kDC, ic, "Delta_C <= I(C;A,B|E)"),
      ge("eq38.floor", kDSum, 0.0, "Delta_A + Delta_C >= 0"),
      le("eq38.ceiling", kDSum, ia + m.mi(B, C, E),
         "Delta_A + Delta_C <= I(A;B,C|E) + I(B;C|E)"),
      ge("eq39", {1, 0, 1, 0}, m.h(A, E), "R_A + Delta_A >= H(A|E)"),
      ge("eq40", {0, 1, 0, 1}, m.h(C, E), "R_C + Delta_C >= H(C|E)"),
  };
  return ConstraintSystem(std::move(cs),
                          "inner bound with B replaced by (B,E) and constant U, V");
}

KeyCaseResult equivocations_key_case(const JointDistribution& dist,
                                     const ChannelSearchConfig& config) {
  Entropies m(dist);
  const double a_bc = m.mi(A, B | C);
  if (a_bc > kIndependenceTolerance) {
    throw PreconditionError("key case requires A independent of (B,C): I(A;B,C) = " +
                            bits(a_bc));
  }
  const double b_e = m.mi(B, E);
  if (b_e > kIndependenceTolerance) {
    throw PreconditionError("key case requires B independent of E: I(B;E) = " +
                            bits(b_e));
  }
  const double delta_a =
      std::max(0.0, std::min(m.h(B) - m.mi(A, E), m.h(A, E)));
  auto body = [](const ExtendedJoint& ext) {
    Entropies x(ext);
    return x.mi(C, B, V) - x.mi(C, E, V);
  };
  auto found = search_channels(dist, body, config, SearchScope{false, true});
  return KeyCaseResult{delta_a, found.value, std::move(found.v), found.config};
}

DegradedReport degraded_collapse_check(const JointDistribution& dist, Side side,
                                       const ChannelSearchConfig& config) {
  const bool alice = side == Side::kAlice;
  const VarSet x = alice ? A : C;
  const VarSet y = alice ? C : A;
  Entropies m(dist);
  const double gap = m.mi(x, E, B);
  if (gap > kIndependenceTolerance) {
    throw PreconditionError(std::string(alice ? "A" : "C") +
                            " - B - E does not hold: I(" + (alice ? "A" : "C") +
                            ";E|B) = " + bits(gap));
  }
  const double ceiling = m.mi(x, B | y, E);
  const double constant = m.mi(x, B | y) - m.mi(x, E);
  auto found = optimize_channels(
      dist, alice ? Objective::kInnerDeltaA : Objective::kInnerDeltaC, config);
  const bool success = std::abs(constant - found.value) <= kCollapseTolerance &&
                       constant <= ceiling + kCeilingTolerance &&
                       found.value <= ceiling + kCeilingTolerance;
  return DegradedReport{side,
                        gap,
                        ceiling,
                        constant,
                        found.value,
                        alice ? std::move(found.u) : std::move(found.v),
                        success,
                        found.config};
}

double IdentityForms::spread() const {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

std::vector<IdentityForms> chain_identity_forms(const JointDistribution& dist) {
  const auto mi = [&](VarSet x, VarSet y, VarSet z = {}) {
    return mutual_information(dist, x, y, z);
  };
  const IdentityForms given_e{
      "",
      {"I(A;B,C|E) + I(B;C|E)", "I(A,B;C|E) + I(A;B|E)"},
      {mi(A, B | C, E) + mi(B, C, E), mi(A | B, C, E) + mi(A, B, E)}};
  IdentityForms eq29 = given_e;
  eq29.id = "eq29";
  IdentityForms eq38 = given_e;
  eq38.id = "eq38";
  return {
      {"eq26",
       {"I(A,C;B) + I(A;C)", "I(A;B,C) + I(B;C)", "I(A,B;C) + I(A;B)"},
       {mi(A | C, B) + mi(A, C), mi(A, B | C) + mi(B, C), mi(A | B, C) + mi(A, B)}},
      std::move(eq29),
      std::move(eq38),
  };
}

}  // namespace secdsc
