#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "generators.hpp"
#include "secdsc/bounds.hpp"
#include "secdsc/error.hpp"
#include "secdsc/special_cases.hpp"

using namespace secdsc;
using namespace secdsc::vars;

namespace {

ExtendedJoint constant_ext(const JointDistribution& d) {
  const auto dims = d.source_dims();
  return extend_joint(d, AuxChannel::constant(Var::A, dims[0]),
                      AuxChannel::constant(Var::C, dims[2]));
}

bool region_no_eve_si_verdict(const JointDistribution& d, const RateQuadruple& q) {
  return region_no_eve_si(d).evaluate(q).overall;
}

ChannelSearchConfig small_config(std::uint64_t seed = 1) {
  ChannelSearchConfig cfg;
  cfg.grid_resolution = 2;
  cfg.restarts = 3;
  cfg.ascent_steps = 15;
  cfg.seed = seed;
  cfg.u_cardinality_cap = 2;
  cfg.v_cardinality_cap = 2;
  return cfg;
}

JointDistribution copies() {
  // A = B = C uniform bit, E constant.
  return JointDistribution({2, 2, 2, 1}, {0.5, 0, 0, 0, 0, 0, 0, 0.5});
}

// Bodies written out term by term from the measures.
struct InnerOracle {
  double eq1, eq2, eq3, eq4, eq5, eq6, eq7, eq8;
};

InnerOracle inner_oracle(const ExtendedJoint& x) {
  auto I = [&](VarSet a, VarSet b, VarSet g = {}) { return mutual_information(x, a, b, g); };
  auto H = [&](VarSet a, VarSet g = {}) { return entropy(x, a, g); };
  const double coupling = I(A, C, U | V | B);
  return {H(A, V | B) - coupling,
          H(C, U | B) - coupling,
          H(A | C, B),
          I(A, B | C, U) - I(A, E, U),
          I(A | B, C, V) - I(C, E, V),
          I(A | C, U | V | B) + I(A, C) - I(A, U | E) - I(C, V | E),
          H(A, E),
          H(C, E)};
}

}  // namespace

TEST(Quadruple, Validation) {
  EXPECT_THROW(validate_quadruple({1, 1, -0.1, 0}), ArgumentError);
  EXPECT_THROW(validate_quadruple({1, std::nan(""), 0, 0}), ArgumentError);
  EXPECT_NO_THROW(validate_quadruple({-1, 0, 0, 0}));
}

TEST(InnerConstraints, IndependentUniformTight) {
  const auto d = JointDistribution::uniform({2, 2, 2, 1});
  const auto rep = inner_constraints(constant_ext(d), {1, 1, 0, 0});
  EXPECT_TRUE(rep.overall);
  ASSERT_EQ(rep.records.size(), 8u);
  for (const char* id : {"eq1", "eq2", "eq3", "eq7", "eq8"}) {
    EXPECT_NEAR(rep.at(id).slack, 0.0, 1e-12) << id;
  }
}

TEST(InnerConstraints, Eq1Violated) {
  const auto d = JointDistribution::uniform({2, 2, 2, 1});
  const auto rep = inner_constraints(constant_ext(d), {0.5, 1, 0, 0});
  EXPECT_FALSE(rep.overall);
  EXPECT_FALSE(rep.at("eq1").satisfied);
  EXPECT_NEAR(rep.at("eq1").slack, -0.5, 1e-12);
  EXPECT_THROW(rep.at("eq99"), ArgumentError);
}

TEST(InnerConstraints, MatchesOracle) {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 40; ++t) {
    const auto dims = gen::dims(rng, 3);
    const auto d = gen::joint(rng, dims, 0.2);
    const auto x = extend_joint(d, gen::channel(rng, Var::A, dims[0], 2),
                                gen::channel(rng, Var::C, dims[2], 3));
    const auto o = inner_oracle(x);
    const auto sys = inner_system(x);
    const double want[] = {o.eq1, o.eq2, o.eq3, o.eq4, o.eq5, o.eq6, o.eq7, o.eq8};
    for (int i = 0; i < 8; ++i) {
      EXPECT_NEAR(sys.constraints()[i].bound, want[i], 1e-12) << sys.constraints()[i].id;
    }
  }
}

TEST(ReportProperties, OverallAndSlack) {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> r(0.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    const auto d = gen::joint(rng, {2, 2, 2, 2});
    const auto x = extend_joint(d, gen::channel(rng, Var::A, 2, 2), gen::channel(rng, Var::C, 2, 2));
    const RateQuadruple q{r(rng), r(rng), r(rng) / 2, r(rng) / 2};
    for (const auto& rep : {inner_constraints(x, q), outer_constraints(x, q)}) {
      bool all = true;
      for (const auto& rec : rep.records) {
        all = all && rec.satisfied;
        const double margin = rec.relation == Relation::kAtLeast ? rec.lhs - rec.rhs
                                                                 : rec.rhs - rec.lhs;
        EXPECT_NEAR(rec.slack, margin, 1e-15);
        EXPECT_EQ(rec.satisfied, rec.slack >= -ConstraintSystem::kTolerance);
      }
      EXPECT_EQ(rep.overall, all);
    }
  }
}

TEST(OuterConstraints, IndependentUniform) {
  const auto d = JointDistribution::uniform({2, 2, 2, 1});
  const auto rep = outer_constraints(constant_ext(d), {1, 1, 0, 0});
  EXPECT_TRUE(rep.overall);
  EXPECT_EQ(rep.records.size(), 10u);
  EXPECT_NEAR(rep.at("eq16").rhs, 0.0, 1e-12);
}

TEST(OuterConstraints, CopyDistributionEq16) {
  const auto rep = outer_constraints(constant_ext(copies()), {0, 0, 1, 1});
  EXPECT_NEAR(rep.at("eq16").rhs, 2.0, 1e-12);
  EXPECT_TRUE(rep.at("eq16").satisfied);
  EXPECT_NEAR(rep.at("eq16").slack, 0.0, 1e-12);
}

TEST(BoundsProperties, BridgeOuterToInner) {
  std::mt19937_64 rng(107);
  for (int t = 0; t < 50; ++t) {
    const auto dims = gen::dims(rng, 3);
    const auto d = gen::joint(rng, dims, 0.2);
    const auto u = gen::channel(rng, Var::A, dims[0], 2);
    const auto v = gen::channel(rng, Var::C, dims[2], 2);
    const auto with_copy_v = extend_joint(d, u, AuxChannel::identity(Var::C, dims[2]));
    EXPECT_NEAR(outer_system(with_copy_v).at("eq12").bound,
                inner_system(with_copy_v).at("eq4").bound, 1e-12);
    const auto with_copy_u = extend_joint(d, AuxChannel::identity(Var::A, dims[0]), v);
    EXPECT_NEAR(outer_system(with_copy_u).at("eq13").bound,
                inner_system(with_copy_u).at("eq5").bound, 1e-12);
  }
}

TEST(BoundsProperties, CornerIdentities) {
  std::mt19937_64 rng(109);
  for (int t = 0; t < 100; ++t) {
    const auto dims = gen::dims(rng, 3);
    const auto d = gen::joint(rng, dims, 0.2);
    const auto x = extend_joint(d, gen::channel(rng, Var::A, dims[0], 1 + rng() % 3),
                                gen::channel(rng, Var::C, dims[2], 1 + rng() % 3));
    const double rate_sum = entropy(d, A | C, B);
    const double eq6 = inner_oracle(x).eq6;
    for (const auto& q : corner_quadruples(x)) {
      EXPECT_NEAR(q.r_a + q.r_c, rate_sum, 1e-9);
      EXPECT_NEAR(q.delta_a + q.delta_c, eq6, 1e-9);
    }
  }
}

TEST(Corners, ConstantChannelsCollapse) {
  std::mt19937_64 rng(113);
  const auto d = gen::joint(rng, {2, 2, 2, 2});
  const auto x = constant_ext(d);
  for (const auto& q : corner_quadruples(x)) {
    EXPECT_NEAR(q.r_a + q.r_c, entropy(d, A | C, B), 1e-12);
  }
  const auto c = corner_quadruples(x);
  // Cases 1 and 2 keep A's full conditional entropy at Alice.
  EXPECT_NEAR(c[1].r_a, entropy(d, A, B), 1e-12);
  EXPECT_NEAR(c[1].r_c, entropy(d, C, B) - mutual_information(d, A, C, B), 1e-12);
  EXPECT_NEAR(c[2].delta_a, mutual_information(d, A, B | C) - mutual_information(d, A, E), 1e-12);
}

TEST(TimeShare, Examples) {
  const RateQuadruple q1{1, 2, 0.5, 0.25}, q2{3, 0, 0.1, 0.7};
  EXPECT_EQ(time_share(q1, q2, 0.0), q2);
  EXPECT_EQ(time_share(q1, q2, 1.0), q1);
  const auto mid = time_share(q1, q2, 0.5);
  EXPECT_DOUBLE_EQ(mid.r_a, 2.0);
  EXPECT_DOUBLE_EQ(mid.delta_c, 0.475);
  EXPECT_THROW(time_share(q1, q2, 1.5), ArgumentError);
  EXPECT_THROW(time_share(q1, q2, -0.1), ArgumentError);

  std::mt19937_64 rng(127);
  const auto d = gen::joint(rng, {2, 2, 2, 2});
  const auto x = extend_joint(d, gen::channel(rng, Var::A, 2, 2), gen::channel(rng, Var::C, 2, 2));
  const auto c = corner_quadruples(x);
  const auto m = time_share(c[0], c[1], 0.5);
  EXPECT_NEAR(m.r_a + m.r_c, entropy(d, A | C, B), 1e-12);
  EXPECT_NEAR(m.delta_a + m.delta_c, inner_oracle(x).eq6, 1e-12);
}

TEST(Membership, WorstCaseRatesZeroEquivocation) {
  std::mt19937_64 rng(131);
  const auto d = gen::joint(rng, {2, 2, 2, 2});
  const auto res = point_in_inner(d, {1.0, 1.0, 0, 0}, small_config());
  EXPECT_TRUE(res.found);
  ASSERT_TRUE(res.witness.has_value());
  EXPECT_TRUE(inner_constraints(extend_joint(d, res.witness->first, res.witness->second),
                                {1.0, 1.0, 0, 0})
                  .overall);
}

TEST(Membership, SlepianWolfCornerNoEve) {
  std::mt19937_64 rng(137);
  const auto d = gen::joint(rng, {2, 2, 2, 1});
  const RateQuadruple q{entropy(d, A, B | C), entropy(d, C, B), 0, 0};
  // Rates pass; zero equivocation then violates only the rate-equivocation
  // floors, which the no-Eve region also carries.
  const auto rep = inner_constraints(constant_ext(d), q);
  for (const char* id : {"eq1", "eq2", "eq3", "eq4", "eq5", "eq6"}) {
    EXPECT_TRUE(rep.at(id).satisfied) << id;
  }
  EXPECT_FALSE(rep.at("eq7").satisfied);
  EXPECT_FALSE(point_in_inner(d, q, small_config()).found);
  const auto region = region_no_eve_si_verdict(d, q);
  EXPECT_FALSE(region);
  const RateQuadruple lifted{q.r_a, q.r_c, entropy(d, A) - q.r_a, entropy(d, C) - q.r_c};
  EXPECT_EQ(point_in_inner(d, lifted, small_config()).found,
            region_no_eve_si_verdict(d, lifted));
}

TEST(Membership, CorollaryMaximalPoint) {
  std::mt19937_64 rng(139);
  for (int t = 0; t < 3; ++t) {
    const auto d = gen::joint(rng, {2, 2, 2, 1});
    const double ra = entropy(d, A), rc = entropy(d, C);
    const double da = std::min(mutual_information(d, A, B | C),
                               rc + mutual_information(d, A, B) - entropy(d, C, A | B));
    const RateQuadruple q{ra, rc, da, 0.0};
    ASSERT_TRUE(region_no_eve_si_verdict(d, q));
    const auto res = point_in_inner(d, q, small_config(t));
    EXPECT_TRUE(res.found);
  }
}

TEST(Membership, NegativeVerdictCarriesConfig) {
  const auto d = JointDistribution::uniform({2, 2, 2, 1});
  const auto res = point_in_inner(d, {0.1, 0.1, 0, 0}, small_config(5));
  EXPECT_FALSE(res.found);
  EXPECT_FALSE(res.witness.has_value());
  EXPECT_EQ(res.config.seed, 5u);
  EXPECT_EQ(res.config.u_cardinality_cap, 2u);
  EXPECT_FALSE(res.report.overall);
}

TEST(Membership, OuterAcceptsInnerCertifiedDsbsPoint) {
  std::vector<double> p{0.45, 0.05, 0.05, 0.45};
  const JointDistribution d({2, 1, 2, 1}, p);
  const RateQuadruple q{1, 1, 0.2, 0.2};
  auto cfg = small_config();
  cfg.grid_resolution = 4;
  EXPECT_TRUE(point_in_inner(d, q, cfg).found);
  EXPECT_TRUE(point_in_outer(d, q, cfg).found);
}

TEST(BoundsProperties, Containment) {
  std::mt19937_64 rng(149);
  int certified = 0;
  for (int t = 0; t < 8; ++t) {
    const auto d = gen::joint(rng, {2, 2, 2, 2});
    const auto x = extend_joint(d, gen::channel(rng, Var::A, 2, 2), gen::channel(rng, Var::C, 2, 2));
    const auto o = inner_oracle(x);
    const double cap = std::max(0.0, o.eq6);
    const RateQuadruple q{entropy(d, A), entropy(d, C),
                          0.5 * std::clamp(o.eq4, 0.0, cap),
                          0.5 * std::clamp(o.eq5, 0.0, cap)};
    if (!inner_constraints(x, q).overall) continue;
    ++certified;
    const auto out = point_in_outer(d, q, small_config(t));
    EXPECT_TRUE(out.found) << "inner-certified point not found in outer, min slack "
                           << out.report.min_slack();
  }
  EXPECT_GE(certified, 4);
}

TEST(Ceilings, InnerNotAboveOuter) {
  std::mt19937_64 rng(151);
  for (int t = 0; t < 4; ++t) {
    const auto d = gen::joint(rng, {2, 2, 2, 2});
    const auto in = inner_ceilings(d, small_config(t));
    const auto out = outer_ceilings(d, small_config(t));
    EXPECT_LE(in.sum, out.sum + 1e-9);
    EXPECT_NEAR(out.sum, mutual_information(d, A, C) + mutual_information(d, A | C, B), 1e-12);
    EXPECT_TRUE(in.sum_search.has_value());
    EXPECT_FALSE(out.sum_search.has_value());
  }
}

TEST(Frontier, AllIndependentIsOrigin) {
  const auto d = JointDistribution::uniform({2, 2, 2, 2});
  const auto s = equivocation_frontier(d, 1, 1, small_config(), 5);
  ASSERT_EQ(s.points.size(), 1u);
  EXPECT_NEAR(s.points[0].point.delta_a, 0.0, 1e-12);
  EXPECT_NEAR(s.points[0].point.delta_c, 0.0, 1e-12);
  EXPECT_THROW(equivocation_frontier(d, 1, 1, small_config(), 1), ArgumentError);
}

TEST(Frontier, ConstantEveEndpoints) {
  std::mt19937_64 rng(157);
  for (int t = 0; t < 3; ++t) {
    const auto d = gen::joint(rng, {2, 2, 2, 1});
    const double ra = entropy(d, A, B | C), rc = entropy(d, C, B);
    auto cfg = small_config(t);
    cfg.grid_resolution = 4;
    const auto s = equivocation_frontier(d, ra, rc, cfg, 5);
    ASSERT_FALSE(s.points.empty());
    const double ceiling_a =
        std::max(0.0, std::min(mutual_information(d, A, B | C),
                               rc + mutual_information(d, A, B) - entropy(d, C, A | B)));
    const double ceiling_c =
        std::max(0.0, std::min(mutual_information(d, A | B, C),
                               ra + mutual_information(d, C, B) - entropy(d, A, B | C)));
    double best_a = 0.0, best_c = 0.0;
    for (const auto& p : s.points) {
      best_a = std::max(best_a, p.point.delta_a);
      best_c = std::max(best_c, p.point.delta_c);
    }
    EXPECT_NEAR(best_a, ceiling_a, 1e-6);
    EXPECT_NEAR(best_c, ceiling_c, 1e-6);
  }
}

TEST(FrontierProperties, VerdictsDominanceAndSumCeiling) {
  std::mt19937_64 rng(163);
  for (int t = 0; t < 3; ++t) {
    const auto d = gen::joint(rng, {2, 2, 2, 2});
    const auto cfg = small_config(t);
    const auto s = equivocation_frontier(d, 1.0, 1.0, cfg, 6);
    const double eq6 = optimize_channels(d, Objective::kInnerSum, cfg).value;
    for (const auto& p : s.points) {
      EXPECT_TRUE(p.verdict);
      EXPECT_TRUE(inner_constraints(extend_joint(d, p.u, p.v), p.point).overall);
      EXPECT_LE(p.point.delta_a + p.point.delta_c, eq6 + 1e-9);
    }
    for (const auto& x : s.points)
      for (const auto& y : s.points) {
        const bool dominated = x.point.delta_a >= y.point.delta_a - 1e-9 &&
                               x.point.delta_c >= y.point.delta_c - 1e-9 &&
                               (x.point.delta_a > y.point.delta_a + 1e-9 ||
                                x.point.delta_c > y.point.delta_c + 1e-9);
        EXPECT_FALSE(dominated);
      }
    const auto again = equivocation_frontier(d, 1.0, 1.0, cfg, 6);
    ASSERT_EQ(again.points.size(), s.points.size());
    for (std::size_t i = 0; i < s.points.size(); ++i) EXPECT_EQ(again.points[i].point, s.points[i].point);
  }
}
