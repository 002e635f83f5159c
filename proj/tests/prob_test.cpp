#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "generators.hpp"
#include "secdsc/error.hpp"
#include "secdsc/prob.hpp"

using namespace secdsc;
using namespace secdsc::vars;

namespace {

// Product of four independent marginals.
JointDistribution product(std::array<std::vector<double>, 4> marginals) {
  std::array<std::size_t, 4> d{};
  for (int i = 0; i < 4; ++i) d[i] = marginals[i].size();
  std::vector<double> p;
  for (double pa : marginals[0])
    for (double pb : marginals[1])
      for (double pc : marginals[2])
        for (double pe : marginals[3]) p.push_back(pa * pb * pc * pe);
  return JointDistribution(d, p);
}

// A uniform bit, B = A xor Z with Z ~ Bernoulli(z), C and E constant.
JointDistribution bsc_pair(double z) {
  return JointDistribution({2, 2, 1, 1}, {0.5 * (1 - z), 0.5 * z, 0.5 * z, 0.5 * (1 - z)});
}

const std::array<VarSet, 4> kSingles{A, B, C, E};

VarSet random_subset(std::mt19937_64& rng, VarSet from) {
  VarSet s;
  for (Var v : from.members()) {
    if (rng() & 1U) s = s | VarSet{v};
  }
  return s;
}

}  // namespace

TEST(VarSet, ParsesAndPrints) {
  EXPECT_EQ(VarSet::parse("A,B"), A | B);
  EXPECT_EQ(VarSet::parse("C E"), C | E);
  EXPECT_EQ((A | C | U).to_string(), "U,A,C");
  EXPECT_THROW(VarSet::parse("AX"), Error);
  EXPECT_THROW((VarSet{Var::A, Var::A}), ArgumentError);
}

TEST(Distribution, RejectsBadInput) {
  EXPECT_THROW(JointDistribution({2, 1, 1, 1}, {0.5}), ShapeError);
  EXPECT_THROW(JointDistribution({2, 1, 1, 1}, {0.5, 0.4}), ValidationError);
  EXPECT_THROW(JointDistribution({2, 1, 1, 1}, {1.5, -0.5}), ValidationError);
  EXPECT_THROW(JointDistribution({0, 1, 1, 1}, {}), Error);
}

TEST(Marginalize, UniformKeepA) {
  const auto d = JointDistribution::uniform({2, 2, 2, 2});
  const auto m = marginalize(d, A);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(m.pmf()[0], 0.5);
  EXPECT_DOUBLE_EQ(m.pmf()[1], 0.5);
}

TEST(Marginalize, KeepAllIsIdentity) {
  std::mt19937_64 rng(7);
  const auto d = gen::joint(rng, {2, 3, 2, 2});
  const auto m = marginalize(d, kSourceVars);
  ASSERT_EQ(m.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(m.pmf()[i], d.pmf()[i]);
}

TEST(Marginalize, HandSummedMarginal) {
  // Entries chosen so that the a = 0 half sums to 0.7 by hand.
  std::vector<double> p{0.1, 0.05, 0.05, 0.1, 0.1, 0.1, 0.15, 0.05,
                        0.05, 0.05, 0.02, 0.03, 0.04, 0.06, 0.03, 0.02};
  const JointDistribution d({2, 2, 2, 2}, p);
  const auto m = marginalize(d, A);
  EXPECT_NEAR(m.pmf()[0], 0.7, 1e-15);
  EXPECT_NEAR(m.pmf()[1], 0.3, 1e-15);
}

TEST(Marginalize, Errors) {
  const auto d = JointDistribution::uniform({2, 2, 2, 2});
  EXPECT_THROW(marginalize(d, VarSet{}), ArgumentError);
  EXPECT_THROW(marginalize(d, U), LabelError);
}

TEST(Entropy, Examples) {
  const auto d = product({{{0.5, 0.5}, {1.0}, {1.0}, {1.0}}});
  EXPECT_DOUBLE_EQ(entropy(d, A), 1.0);
  EXPECT_THROW(entropy(d, A, A), ArgumentError);
  const auto d2 = product({{{0.11, 0.89}, {1.0}, {1.0}, {1.0}}});
  EXPECT_NEAR(entropy(d2, A), 0.4999, 1e-3);
  EXPECT_NEAR(binary_entropy(0.11), 0.4999, 1e-3);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
}

TEST(Entropy, SelfConditioningIsZeroAfterDisjointCheck) {
  // The overlapping form is rejected; conditioning on a copy gives zero.
  const JointDistribution d({2, 2, 1, 1}, {0.5, 0.0, 0.0, 0.5});
  EXPECT_EQ(entropy(d, A, B), 0.0);
}

TEST(Entropy, UnknownLabel) {
  const auto d = JointDistribution::uniform({2, 2, 2, 2});
  EXPECT_THROW(entropy(d, U), LabelError);
}

TEST(MutualInformation, Examples) {
  const auto ind = JointDistribution::uniform({2, 2, 1, 1});
  EXPECT_EQ(mutual_information(ind, A, B), 0.0);
  const JointDistribution copy({2, 2, 1, 1}, {0.5, 0.0, 0.0, 0.5});
  EXPECT_DOUBLE_EQ(mutual_information(copy, A, B), 1.0);
  EXPECT_NEAR(mutual_information(bsc_pair(0.11), A, B), 0.5001, 1e-3);
  EXPECT_NEAR(mutual_information(bsc_pair(0.11), A, B), 1.0 - binary_entropy(0.11),
              1e-12);
  EXPECT_THROW(mutual_information(ind, A, A | B), ArgumentError);
}

TEST(Markov, Examples) {
  // C = f(B) with f the parity of B over {0,1,2,3}.
  std::mt19937_64 rng(3);
  const auto ab = gen::simplex(rng, 8);
  std::vector<double> p(2 * 4 * 2, 0.0);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 4; ++b) p[(a * 4 + b) * 2 + (b % 2)] = ab[a * 4 + b];
  const JointDistribution fy({2, 4, 2, 1}, p);
  EXPECT_TRUE(is_markov_chain(fy, A, B, C));

  // A = C shared bit, B independent.
  const JointDistribution shared({2, 2, 2, 1},
                                 {0.25, 0, 0.25, 0, 0, 0.25, 0, 0.25});
  EXPECT_DOUBLE_EQ(mutual_information(shared, A, C, B), 1.0);
  EXPECT_FALSE(is_markov_chain(shared, A, B, C));

  // E = B copy.
  for (int t = 0; t < 10; ++t) {
    const auto pab = gen::simplex(rng, 6);
    std::vector<double> q(3 * 2 * 1 * 2, 0.0);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 2; ++b) q[(a * 2 + b) * 2 + b] = pab[a * 2 + b];
    const JointDistribution d({3, 2, 1, 2}, q);
    EXPECT_TRUE(is_markov_chain(d, A, B, E));
    EXPECT_LE(mutual_information(d, A, E, B), 1e-12);
  }
}

TEST(Entropy, MatchesIndependentOracle) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const auto d = gen::joint(rng, gen::dims(rng, 3), 0.3);
    EXPECT_NEAR(d.joint_entropy(kSourceVars),
                gen::entropy_of({d.pmf().begin(), d.pmf().end()}), 1e-12);
    EXPECT_NEAR(entropy(d, A | C), gen::entropy_of(marginalize(d, A | C).marginal_pmf(A | C)),
                1e-12);
  }
}

TEST(EntropyProperties, ChainRuleNonnegativityConditioning) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 200; ++t) {
    const auto d = gen::joint(rng, gen::dims(rng, 3), t % 3 == 0 ? 0.4 : 0.0);
    const VarSet x = random_subset(rng, kSourceVars);
    const VarSet y = random_subset(rng, kSourceVars - x);
    const VarSet z = random_subset(rng, kSourceVars - x - y);
    const double hxy = entropy(d, x | y, z);
    EXPECT_NEAR(hxy, entropy(d, x, z) + entropy(d, y, x | z), 1e-10);
    EXPECT_GE(entropy(d, x, z), -1e-12);
    EXPECT_GE(mutual_information(d, x, y, z), -1e-12);
    EXPECT_LE(entropy(d, x, y | z), entropy(d, x, z) + 1e-10);
    EXPECT_NEAR(mutual_information(d, x, y, z),
                std::max(0.0, entropy(d, x, z) - entropy(d, x, y | z)), 1e-10);
  }
}

TEST(EntropyProperties, MemoizedMatchesDirect) {
  std::mt19937_64 rng(5);
  const auto d = gen::joint(rng, {2, 3, 2, 2});
  Entropies m(d);
  EXPECT_NEAR(m.h(A, B | C), entropy(d, A, B | C), 1e-15);
  EXPECT_NEAR(m.mi(A | C, B, E), mutual_information(d, A | C, B, E), 1e-15);
  EXPECT_NEAR(m.joint(kSourceVars), entropy(d, kSourceVars), 1e-15);
}

TEST(MarginalizeProperties, Commutes) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 100; ++t) {
    const auto d = gen::joint(rng, gen::dims(rng, 3));
    const VarSet s = random_subset(rng, kSourceVars) | kSingles[t % 4];
    const VarSet extra = random_subset(rng, kSourceVars - s);
    const auto direct = marginalize(d, s);
    const auto staged = marginalize(marginalize(d, s | extra), s);
    ASSERT_EQ(direct.size(), staged.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
      EXPECT_NEAR(direct.pmf()[i], staged.pmf()[i], 1e-12);
    }
    double total = 0.0;
    for (double x : direct.pmf()) total += x;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}
