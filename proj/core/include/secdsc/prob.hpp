#pragma once

// Exact finite-alphabet probability tensors and Shannon measures in bits.

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace secdsc {

// Variable labels of the extended source model. The enumerator order is the
// canonical axis order of every tensor: (u, a, b, c, e, v).
enum class Var : std::uint8_t { U = 0, A, B, C, E, V };

inline constexpr std::size_t kVarCount = 6;

char to_char(Var v) noexcept;
std::optional<Var> var_from_char(char c) noexcept;

// Unordered set of labels; iteration is always in canonical order.
class VarSet {
 public:
  constexpr VarSet() = default;
  // Throws ArgumentError on duplicate labels.
  VarSet(std::initializer_list<Var> vars);

  // Parses "A,B" or "AB" (whitespace and commas ignored).
  static VarSet parse(std::string_view text);
  static constexpr VarSet from_bits(std::uint8_t bits) {
    VarSet s;
    s.bits_ = bits & 0x3F;
    return s;
  }

  constexpr bool contains(Var v) const {
    return (bits_ >> static_cast<unsigned>(v)) & 1U;
  }
  constexpr bool empty() const { return bits_ == 0; }
  std::size_t size() const;
  constexpr std::uint8_t bits() const { return bits_; }

  constexpr bool disjoint(VarSet other) const {
    return (bits_ & other.bits_) == 0;
  }
  constexpr bool subset_of(VarSet other) const {
    return (bits_ & ~other.bits_) == 0;
  }

  std::vector<Var> members() const;
  std::string to_string() const;

  friend constexpr VarSet operator|(VarSet x, VarSet y) {
    return from_bits(x.bits_ | y.bits_);
  }
  friend constexpr VarSet operator&(VarSet x, VarSet y) {
    return from_bits(x.bits_ & y.bits_);
  }
  friend constexpr VarSet operator-(VarSet x, VarSet y) {
    return from_bits(x.bits_ & ~y.bits_);
  }
  friend constexpr bool operator==(VarSet, VarSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

// Dense probability tensor over a canonical-ordered subset of labels,
// stored row-major (last label fastest).
class Distribution {
 public:
  // Tolerance on the total mass accepted at construction.
  static constexpr double kMassTolerance = 1e-9;

  // Validates: labels unique and canonical-ordered, every cardinality >= 1,
  // pmf size equal to the product of cardinalities, entries >= 0, and
  // total mass within kMassTolerance of 1. Throws ShapeError /
  // ValidationError.
  Distribution(VarSet labels, std::vector<std::size_t> dims,
               std::vector<double> pmf);

  VarSet labels() const { return labels_; }
  const std::vector<Var>& axes() const { return axes_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::span<const double> pmf() const { return pmf_; }
  std::size_t size() const { return pmf_.size(); }

  // Cardinality of `v`; throws LabelError if `v` is absent.
  std::size_t cardinality(Var v) const;
  // Product of cardinalities over `vars` (1 for the empty set).
  std::size_t cardinality(VarSet vars) const;

  // Probability at a full multi-index given in axis order.
  double at(std::span<const std::size_t> index) const;
  double at(std::initializer_list<std::size_t> index) const {
    return at(std::span<const std::size_t>(index.begin(), index.size()));
  }

  std::size_t axis_of(Var v) const;

  // Entropy of the marginal over `vars` in bits; H(empty) = 0.
  double joint_entropy(VarSet vars) const;

  // Marginal probabilities over `vars`, row-major in canonical order.
  std::vector<double> marginal_pmf(VarSet vars) const;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  VarSet labels_;
  std::vector<Var> axes_;
  std::vector<std::size_t> dims_;
  std::vector<double> pmf_;
};

// The source model p(a, b, c, e): a Distribution over exactly {A, B, C, E}.
class JointDistribution : public Distribution {
 public:
  JointDistribution(std::array<std::size_t, 4> dims, std::vector<double> pmf);
  // Accepts a generic distribution whose labels are exactly {A, B, C, E}.
  explicit JointDistribution(Distribution dist);

  static JointDistribution uniform(std::array<std::size_t, 4> dims);

  double p(std::size_t a, std::size_t b, std::size_t c, std::size_t e) const;
  std::array<std::size_t, 4> source_dims() const;
};

inline constexpr VarSet kSourceVars = VarSet::from_bits(0b011110);

// Singleton sets for composing measure arguments, e.g. mi(A, B | C, U).
namespace vars {
inline constexpr VarSet U = VarSet::from_bits(1U << 0);
inline constexpr VarSet A = VarSet::from_bits(1U << 1);
inline constexpr VarSet B = VarSet::from_bits(1U << 2);
inline constexpr VarSet C = VarSet::from_bits(1U << 3);
inline constexpr VarSet E = VarSet::from_bits(1U << 4);
inline constexpr VarSet V = VarSet::from_bits(1U << 5);
}  // namespace vars

// Sums out every axis not in `keep`. Throws ArgumentError when `keep` is
// empty and LabelError when it names a label not present in `dist`.
Distribution marginalize(const Distribution& dist, VarSet keep);

// H(X | Given) in bits. Throws ArgumentError if `x` and `given` overlap and
// LabelError for unknown labels.
double entropy(const Distribution& dist, VarSet x, VarSet given = {});

// I(X; Y | Given) in bits; values in [-1e-12, 0) are reported as 0.
double mutual_information(const Distribution& dist, VarSet x, VarSet y,
                          VarSet given = {});

// True iff I(X; Z | Y) <= tol, i.e. X - Y - Z.
bool is_markov_chain(const Distribution& dist, VarSet x, VarSet y, VarSet z,
                     double tol = 1e-9);

// Memoizing calculator over one distribution. Not thread-safe: create one
// per evaluation site. The referenced distribution must outlive it.
class Entropies {
 public:
  explicit Entropies(const Distribution& dist);

  double joint(VarSet vars);
  double h(VarSet x, VarSet given = {});
  double mi(VarSet x, VarSet y, VarSet given = {});

 private:
  const Distribution& dist_;
  std::array<double, 64> cache_{};
  std::bitset<64> known_;
};

// Binary entropy function in bits.
double binary_entropy(double p);

}  // namespace secdsc
