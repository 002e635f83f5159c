#pragma once

// Auxiliary random variables U ~ p(u|a) and V ~ p(v|c): representation,
// the extended joint p(u,a,b,c,e,v) = p(a,b,c,e) p(u|a) p(v|c), simplex-grid
// enumeration, and multistart search over channel pairs.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "secdsc/prob.hpp"

namespace secdsc {

// Row-stochastic matrix from an input alphabet (A or C) to an auxiliary one.
class AuxChannel {
 public:
  static constexpr double kRowTolerance = 1e-12;

  // `matrix` is row-major: input_cardinality rows of output_cardinality.
  // Throws ArgumentError for an input label other than A or C, ShapeError on
  // a size mismatch and ValidationError for a row that is not a
  // probability vector within kRowTolerance.
  AuxChannel(Var input, std::size_t input_cardinality,
             std::size_t output_cardinality, std::vector<double> matrix);

  // Single-symbol output: the auxiliary variable is constant.
  static AuxChannel constant(Var input, std::size_t input_cardinality);
  // Output copies the input.
  static AuxChannel identity(Var input, std::size_t cardinality);
  // Binary symmetric channel with crossover probability `p`.
  static AuxChannel bsc(Var input, double p);

  Var input() const { return input_; }
  std::size_t input_cardinality() const { return rows_; }
  std::size_t output_cardinality() const { return cols_; }
  double operator()(std::size_t in, std::size_t out) const {
    return matrix_[in * cols_ + out];
  }
  std::span<const double> row(std::size_t in) const {
    return std::span<const double>(matrix_).subspan(in * cols_, cols_);
  }
  std::span<const double> matrix() const { return matrix_; }

  std::string to_string() const;

  friend bool operator==(const AuxChannel&, const AuxChannel&) = default;

 private:
  Var input_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> matrix_;
};

// Lexicographic order on (shape, entries); used for deterministic ties.
bool lexicographically_less(const AuxChannel& x, const AuxChannel& y);

// Joint over {U, A, B, C, E, V} carrying the base source and both channels.
// Only extend_joint creates one, so the factorization always holds.
class ExtendedJoint : public Distribution {
 public:
  const JointDistribution& base() const { return base_; }
  const AuxChannel& u_channel() const { return u_; }
  const AuxChannel& v_channel() const { return v_; }

 private:
  friend ExtendedJoint extend_joint(const JointDistribution&,
                                    const AuxChannel&, const AuxChannel&);
  ExtendedJoint(Distribution joint, JointDistribution base, AuxChannel u,
                AuxChannel v);

  JointDistribution base_;
  AuxChannel u_;
  AuxChannel v_;
};

inline constexpr VarSet kExtendedVars = VarSet::from_bits(0b111111);

// Throws ShapeError unless u_channel reads A and v_channel reads C with the
// base distribution's cardinalities.
ExtendedJoint extend_joint(const JointDistribution& dist,
                           const AuxChannel& u_channel,
                           const AuxChannel& v_channel);

// Number of points of the simplex grid with `resolution` steps in dimension
// `output_cardinality`, raised to the number of rows.
std::size_t channel_grid_size(std::size_t input_cardinality,
                              std::size_t output_cardinality,
                              std::size_t resolution);

// Every row-stochastic matrix whose rows are grid points with denominator
// `resolution`, in ascending lexicographic order of the flattened matrix.
std::vector<AuxChannel> enumerate_channels(Var input,
                                           std::size_t input_cardinality,
                                           std::size_t output_cardinality,
                                           std::size_t resolution);

// Catalog of search objectives (bodies of the maximizations in the inner and
// outer bounds).
enum class Objective {
  kInnerDeltaA,  // I(A;B,C|U) - I(A;E|U)
  kInnerDeltaC,  // I(A,B;C|V) - I(C;E|V)
  kInnerSum,     // I(A,C;U,V,B) + I(A;C) - I(A;U,E) - I(C;V,E)
  kOuterDeltaA,  // I(A;B,V|U) - I(A;E|U)
  kOuterDeltaC,  // I(C;B,U|V) - I(C;E|V)
};

std::string_view objective_name(Objective objective);
double evaluate_objective(const ExtendedJoint& ext, Objective objective);

struct ChannelSearchConfig {
  // 0 selects the default |A| + 1 (resp. |C| + 1).
  std::size_t u_cardinality_cap = 0;
  std::size_t v_cardinality_cap = 0;
  std::size_t grid_resolution = 4;
  std::size_t restarts = 8;
  std::size_t ascent_steps = 50;
  std::uint64_t seed = 0;
  // Upper bound on objective evaluations in the exhaustive grid phase. A
  // larger grid runs the half-resolution search, then alternating one-channel
  // sweeps at full resolution.
  std::size_t max_grid_points = std::size_t{1} << 16;

  // Copy with the caps filled in for `dist`; throws ArgumentError if a count
  // is zero after resolution.
  ChannelSearchConfig resolved(const JointDistribution& dist) const;
};

// Which channels a search varies. A channel that is not searched is held
// constant (single-symbol output).
struct SearchScope {
  bool vary_u = true;
  bool vary_v = true;
};

SearchScope scope_of(Objective objective);

struct ChannelSearchResult {
  AuxChannel u;
  AuxChannel v;
  double value;
  ChannelSearchConfig config;  // resolved
  std::size_t evaluations = 0;
};

using ChannelObjective = std::function<double(const ExtendedJoint&)>;

// Multistart search: simplex grid seeding, then cyclic coordinate ascent from
// the best grid point and from `restarts` uniformly random channel pairs.
// If `stop_at` is given and the grid phase reaches it, the random restarts
// are skipped. Deterministic given the config seed.
ChannelSearchResult search_channels(const JointDistribution& dist,
                                    const ChannelObjective& objective,
                                    const ChannelSearchConfig& config,
                                    SearchScope scope = {},
                                    std::optional<double> stop_at = {});

ChannelSearchResult optimize_channels(const JointDistribution& dist,
                                      Objective objective,
                                      const ChannelSearchConfig& config);

// Exhaustive maximization over the product of the two simplex grids.
ChannelSearchResult grid_search(const JointDistribution& dist,
                                const ChannelObjective& objective,
                                std::size_t u_cardinality,
                                std::size_t v_cardinality,
                                std::size_t resolution, SearchScope scope = {});

}  // namespace secdsc
