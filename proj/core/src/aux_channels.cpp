#include "secdsc/aux_channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "secdsc/error.hpp"
#include "secdsc/parallel.hpp"
#include "secdsc/random.hpp"

namespace secdsc {

using namespace vars;

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kAscentTolerance = 1e-9;
constexpr std::size_t kLineSamples = 8;
constexpr std::size_t kGoldenIterations = 24;

std::size_t saturating_mul(std::size_t x, std::size_t y) {
  if (x != 0 && y > std::numeric_limits<std::size_t>::max() / x) {
    return std::numeric_limits<std::size_t>::max();
  }
  return x * y;
}

// C(n, k) with saturation.
std::size_t binomial(std::size_t n, std::size_t k) {
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t num = n - k + i;
    if (r > std::numeric_limits<std::size_t>::max() / num) {
      return std::numeric_limits<std::size_t>::max();
    }
    r = r * num / i;
  }
  return r;
}

void compositions(std::size_t parts, std::size_t total,
                  std::vector<std::size_t>& current,
                  std::vector<std::vector<std::size_t>>& out) {
  if (parts == 1) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (std::size_t first = 0; first <= total; ++first) {
    current.push_back(first);
    compositions(parts - 1, total - first, current, out);
    current.pop_back();
  }
}

struct Candidate {
  AuxChannel u;
  AuxChannel v;
  double value;
};

bool better(const Candidate& x, const Candidate& y) {
  if (x.value > y.value + kTieTolerance) return true;
  if (x.value < y.value - kTieTolerance) return false;
  if (lexicographically_less(x.u, y.u)) return true;
  if (lexicographically_less(y.u, x.u)) return false;
  return lexicographically_less(x.v, y.v);
}

class Searcher {
 public:
  Searcher(const JointDistribution& dist, const ChannelObjective& objective,
           SearchScope scope)
      : dist_(dist), objective_(objective), scope_(scope) {}

  double evaluate(const AuxChannel& u, const AuxChannel& v) {
    ++evaluations_;
    return objective_(extend_joint(dist_, u, v));
  }

  Candidate make(AuxChannel u, AuxChannel v) {
    const double value = evaluate(u, v);
    return Candidate{std::move(u), std::move(v), value};
  }

  // Cyclic coordinate ascent: every pair of entries within each row is
  // line-searched along the mass-transfer segment that keeps the row on the
  // simplex.
  Candidate ascend(Candidate start, std::size_t steps) {
    Candidate cur = std::move(start);
    for (std::size_t step = 0; step < steps; ++step) {
      const double before = cur.value;
      if (scope_.vary_u) sweep(cur, /*side_u=*/true);
      if (scope_.vary_v) sweep(cur, /*side_u=*/false);
      if (cur.value - before < kAscentTolerance) break;
    }
    return cur;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  void sweep(Candidate& cur, bool side_u) {
    const AuxChannel& ch = side_u ? cur.u : cur.v;
    const std::size_t rows = ch.input_cardinality();
    const std::size_t cols = ch.output_cardinality();
    if (cols < 2) return;
    std::vector<double> m(ch.matrix().begin(), ch.matrix().end());
    const Var input = ch.input();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t k = j + 1; k < cols; ++k) {
          double* row = m.data() + r * cols;
          const double total = row[j] + row[k];
          if (total <= 0.0) continue;
          auto eval_at = [&](double x) {
            std::vector<double> trial = m;
            trial[r * cols + j] = x;
            trial[r * cols + k] = total - x;
            AuxChannel t(input, rows, cols, std::move(trial));
            return side_u ? evaluate(t, cur.v) : evaluate(cur.u, t);
          };
          double best_x = row[j];
          double best_f = cur.value;
          std::size_t best_i = kLineSamples + 1;
          for (std::size_t i = 0; i <= kLineSamples; ++i) {
            const double x = total * double(i) / double(kLineSamples);
            const double f = eval_at(x);
            if (f > best_f) {
              best_f = f;
              best_x = x;
              best_i = i;
            }
          }
          // Golden-section refinement around the best sample.
          double lo, hi;
          if (best_i <= kLineSamples) {
            lo = total * double(best_i == 0 ? 0 : best_i - 1) / kLineSamples;
            hi = total * double(std::min(best_i + 1, kLineSamples)) / kLineSamples;
          } else {
            lo = std::max(0.0, best_x - total / kLineSamples);
            hi = std::min(total, best_x + total / kLineSamples);
          }
          constexpr double kInvPhi = 0.6180339887498949;
          double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
          double f1 = eval_at(x1), f2 = eval_at(x2);
          for (std::size_t it = 0; it < kGoldenIterations; ++it) {
            if (f1 >= f2) {
              hi = x2;
              x2 = x1;
              f2 = f1;
              x1 = hi - kInvPhi * (hi - lo);
              f1 = eval_at(x1);
            } else {
              lo = x1;
              x1 = x2;
              f1 = f2;
              x2 = lo + kInvPhi * (hi - lo);
              f2 = eval_at(x2);
            }
          }
          if (f1 > best_f) {
            best_f = f1;
            best_x = x1;
          }
          if (f2 > best_f) {
            best_f = f2;
            best_x = x2;
          }
          if (best_f > cur.value) {
            row[j] = best_x;
            row[k] = total - best_x;
            AuxChannel updated(input, rows, cols, m);
            if (side_u) {
              cur.u = std::move(updated);
            } else {
              cur.v = std::move(updated);
            }
            cur.value = best_f;
          }
        }
      }
    }
  }

  const JointDistribution& dist_;
  const ChannelObjective& objective_;
  SearchScope scope_;
  std::size_t evaluations_ = 0;
};

// For each channel of a grid with resolution `resolution`, the largest k such
// that every entry is a multiple of 2^k / resolution. A constant-channel grid
// (resolution 0) reports an unbounded level.
std::vector<std::size_t> dyadic_levels(const std::vector<AuxChannel>& grid,
                                       std::size_t resolution) {
  constexpr std::size_t kUnbounded = 64;
  std::vector<std::size_t> out;
  out.reserve(grid.size());
  for (const auto& ch : grid) {
    if (resolution == 0) {
      out.push_back(kUnbounded);
      continue;
    }
    std::size_t level = kUnbounded;
    std::size_t res = resolution;
    std::size_t k = 0;
    while (res % 2 == 0) {
      res /= 2;
      ++k;
      bool fits = true;
      for (double x : ch.matrix()) {
        const auto num = static_cast<std::size_t>(std::llround(x * double(resolution)));
        if (num % (std::size_t{1} << k) != 0) {
          fits = false;
          break;
        }
      }
      if (!fits) {
        level = k - 1;
        break;
      }
    }
    out.push_back(std::min(level, k));
  }
  return out;
}

AuxChannel random_channel(Var input, std::size_t rows, std::size_t cols,
                          Rng& rng) {
  std::vector<double> m;
  m.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    auto p = rng.simplex_point(cols);
    m.insert(m.end(), p.begin(), p.end());
  }
  return AuxChannel(input, rows, cols, std::move(m));
}

// Exhaustive dyadic-level grid phase when the product grid fits the budget.
// Otherwise the half-resolution phase runs first and alternating one-channel
// sweeps over the full grids refine its incumbent, so doubling the resolution
// never loses a candidate the coarser search reached.
void grid_phase(Searcher& searcher, Candidate& best, std::size_t na, std::size_t nc,
                std::size_t nu, std::size_t nv, std::size_t resolution,
                const ChannelSearchConfig& cfg) {
  auto consider = [&](Candidate c) {
    if (better(c, best)) best = std::move(c);
  };
  const std::size_t usize = nu > 1 ? channel_grid_size(na, nu, resolution) : 1;
  const std::size_t vsize = nv > 1 ? channel_grid_size(nc, nv, resolution) : 1;
  auto grid = [&](Var input, std::size_t rows, std::size_t cols) {
    return cols > 1 ? enumerate_channels(input, rows, cols, resolution)
                    : std::vector<AuxChannel>{AuxChannel::constant(input, rows)};
  };

  if (saturating_mul(usize, vsize) <= cfg.max_grid_points) {
    const auto ugrid = grid(Var::A, na, nu);
    const auto vgrid = grid(Var::C, nc, nv);
    // Track the best point of every dyadic sub-grid (resolution R, R/2, ...)
    // and ascend from each, so a finer grid never starts from fewer seeds.
    const auto ulevels = dyadic_levels(ugrid, nu > 1 ? resolution : 0);
    const auto vlevels = dyadic_levels(vgrid, nv > 1 ? resolution : 0);
    std::vector<std::optional<Candidate>> level_best;
    for (std::size_t i = 0; i < ugrid.size(); ++i) {
      for (std::size_t j = 0; j < vgrid.size(); ++j) {
        Candidate c = searcher.make(ugrid[i], vgrid[j]);
        const std::size_t level = std::min(ulevels[i], vlevels[j]);
        if (level_best.size() <= level) level_best.resize(level + 1);
        for (std::size_t k = 0; k <= level; ++k) {
          if (!level_best[k] || better(c, *level_best[k])) level_best[k] = c;
        }
      }
    }
    const Candidate* previous = nullptr;
    for (std::size_t k = level_best.size(); k-- > 0;) {
      if (!level_best[k]) continue;
      const Candidate& seed = *level_best[k];
      if (previous && previous->u == seed.u && previous->v == seed.v) continue;
      previous = &seed;
      consider(seed);
      consider(searcher.ascend(seed, cfg.ascent_steps));
    }
    return;
  }

  if (resolution % 2 == 0) {
    grid_phase(searcher, best, na, nc, nu, nv, resolution / 2, cfg);
  }
  // Alternating one-channel sweeps from the incumbent over whichever single
  // grids fit the budget.
  const bool sweep_u = usize <= cfg.max_grid_points;
  const bool sweep_v = vsize <= cfg.max_grid_points;
  const auto ugrid = sweep_u ? grid(Var::A, na, nu) : std::vector<AuxChannel>{};
  const auto vgrid = sweep_v ? grid(Var::C, nc, nv) : std::vector<AuxChannel>{};
  for (std::size_t round = 0; round < cfg.ascent_steps; ++round) {
    const double before = best.value;
    for (const auto& u : ugrid) consider(searcher.make(u, best.v));
    for (const auto& v : vgrid) consider(searcher.make(best.u, v));
    if (best.value - before < kAscentTolerance) break;
  }
  consider(searcher.ascend(best, cfg.ascent_steps));
}

}  // namespace

AuxChannel::AuxChannel(Var input, std::size_t input_cardinality,
                       std::size_t output_cardinality,
                       std::vector<double> matrix)
    : input_(input), rows_(input_cardinality), cols_(output_cardinality),
      matrix_(std::move(matrix)) {
  if (input != Var::A && input != Var::C) {
    throw ArgumentError(std::string("auxiliary channel input must be A or C, got ") +
                        to_char(input));
  }
  if (rows_ == 0 || cols_ == 0) {
    throw ShapeError("auxiliary channel cardinalities must be >= 1");
  }
  if (matrix_.size() != rows_ * cols_) {
    throw ShapeError("channel matrix has " + std::to_string(matrix_.size()) +
                     " entries, expected " + std::to_string(rows_ * cols_));
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) {
      const double x = matrix_[r * cols_ + c];
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw ValidationError("channel row " + std::to_string(r) +
                              " has a negative or non-finite entry");
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > kRowTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "channel row " << r << " sums to " << sum;
      throw ValidationError(os.str());
    }
  }
}

AuxChannel AuxChannel::constant(Var input, std::size_t input_cardinality) {
  return AuxChannel(input, input_cardinality, 1,
                    std::vector<double>(input_cardinality, 1.0));
}

AuxChannel AuxChannel::identity(Var input, std::size_t cardinality) {
  std::vector<double> m(cardinality * cardinality, 0.0);
  for (std::size_t i = 0; i < cardinality; ++i) m[i * cardinality + i] = 1.0;
  return AuxChannel(input, cardinality, cardinality, std::move(m));
}

AuxChannel AuxChannel::bsc(Var input, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ArgumentError("crossover probability must lie in [0, 1]");
  }
  return AuxChannel(input, 2, 2, {1.0 - p, p, p, 1.0 - p});
}

std::string AuxChannel::to_string() const {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (r) os << '|';
    for (std::size_t c = 0; c < cols_; ++c) {
      if (c) os << ';';
      os << matrix_[r * cols_ + c];
    }
  }
  return os.str();
}

bool lexicographically_less(const AuxChannel& x, const AuxChannel& y) {
  if (x.input_cardinality() != y.input_cardinality()) {
    return x.input_cardinality() < y.input_cardinality();
  }
  if (x.output_cardinality() != y.output_cardinality()) {
    return x.output_cardinality() < y.output_cardinality();
  }
  const auto mx = x.matrix();
  const auto my = y.matrix();
  return std::lexicographical_compare(mx.begin(), mx.end(), my.begin(),
                                      my.end());
}

ExtendedJoint::ExtendedJoint(Distribution joint, JointDistribution base,
                             AuxChannel u, AuxChannel v)
    : Distribution(std::move(joint)), base_(std::move(base)), u_(std::move(u)),
      v_(std::move(v)) {}

ExtendedJoint extend_joint(const JointDistribution& dist,
                           const AuxChannel& u_channel,
                           const AuxChannel& v_channel) {
  const auto [na, nb, nc, ne] = dist.source_dims();
  if (u_channel.input() != Var::A || u_channel.input_cardinality() != na) {
    throw ShapeError("U channel must read A with " + std::to_string(na) +
                     " input symbols");
  }
  if (v_channel.input() != Var::C || v_channel.input_cardinality() != nc) {
    throw ShapeError("V channel must read C with " + std::to_string(nc) +
                     " input symbols");
  }
  const std::size_t nu = u_channel.output_cardinality();
  const std::size_t nv = v_channel.output_cardinality();
  const auto base = dist.pmf();
  std::vector<double> pmf(nu * na * nb * nc * ne * nv);
  std::size_t out = 0;
  for (std::size_t u = 0; u < nu; ++u) {
    std::size_t src = 0;
    for (std::size_t a = 0; a < na; ++a) {
      const double pu = u_channel(a, u);
      for (std::size_t b = 0; b < nb; ++b) {
        for (std::size_t c = 0; c < nc; ++c) {
          const auto vrow = v_channel.row(c);
          for (std::size_t e = 0; e < ne; ++e, ++src) {
            const double w = base[src] * pu;
            for (std::size_t v = 0; v < nv; ++v) pmf[out++] = w * vrow[v];
          }
        }
      }
    }
  }
  Distribution joint(kExtendedVars, {nu, na, nb, nc, ne, nv}, std::move(pmf));
  return ExtendedJoint(std::move(joint), dist, u_channel, v_channel);
}

std::size_t channel_grid_size(std::size_t input_cardinality,
                              std::size_t output_cardinality,
                              std::size_t resolution) {
  const std::size_t per_row =
      binomial(output_cardinality - 1 + resolution, output_cardinality - 1);
  std::size_t total = 1;
  for (std::size_t i = 0; i < input_cardinality; ++i) {
    total = saturating_mul(total, per_row);
  }
  return total;
}

std::vector<AuxChannel> enumerate_channels(Var input,
                                           std::size_t input_cardinality,
                                           std::size_t output_cardinality,
                                           std::size_t resolution) {
  if (resolution == 0) throw ArgumentError("grid resolution must be >= 1");
  if (input_cardinality == 0 || output_cardinality == 0) {
    throw ShapeError("channel cardinalities must be >= 1");
  }
  std::vector<std::vector<std::size_t>> rows;
  std::vector<std::size_t> scratch;
  compositions(output_cardinality, resolution, scratch, rows);

  std::vector<AuxChannel> out;
  out.reserve(channel_grid_size(input_cardinality, output_cardinality, resolution));
  std::vector<std::size_t> pick(input_cardinality, 0);
  while (true) {
    std::vector<double> m;
    m.reserve(input_cardinality * output_cardinality);
    for (std::size_t r = 0; r < input_cardinality; ++r) {
      for (std::size_t k : rows[pick[r]]) {
        m.push_back(double(k) / double(resolution));
      }
    }
    out.emplace_back(input, input_cardinality, output_cardinality, std::move(m));
    // Odometer with the first row most significant.
    std::size_t r = input_cardinality;
    while (r > 0) {
      --r;
      if (++pick[r] < rows.size()) break;
      pick[r] = 0;
      if (r == 0) return out;
    }
  }
}

std::string_view objective_name(Objective objective) {
  switch (objective) {
    case Objective::kInnerDeltaA: return "inner-delta-a";
    case Objective::kInnerDeltaC: return "inner-delta-c";
    case Objective::kInnerSum: return "inner-sum";
    case Objective::kOuterDeltaA: return "outer-delta-a";
    case Objective::kOuterDeltaC: return "outer-delta-c";
  }
  return "unknown";
}

double evaluate_objective(const ExtendedJoint& ext, Objective objective) {
  Entropies m(ext);
  switch (objective) {
    case Objective::kInnerDeltaA:
      return m.mi(A, B | C, U) - m.mi(A, E, U);
    case Objective::kInnerDeltaC:
      return m.mi(A | B, C, V) - m.mi(C, E, V);
    case Objective::kInnerSum:
      return m.mi(A | C, U | V | B) + m.mi(A, C) - m.mi(A, U | E) -
             m.mi(C, V | E);
    case Objective::kOuterDeltaA:
      return m.mi(A, B | V, U) - m.mi(A, E, U);
    case Objective::kOuterDeltaC:
      return m.mi(C, B | U, V) - m.mi(C, E, V);
  }
  throw ArgumentError("unknown objective");
}

SearchScope scope_of(Objective objective) {
  switch (objective) {
    case Objective::kInnerDeltaA: return {true, false};
    case Objective::kInnerDeltaC: return {false, true};
    default: return {true, true};
  }
}

ChannelSearchConfig ChannelSearchConfig::resolved(
    const JointDistribution& dist) const {
  ChannelSearchConfig c = *this;
  if (c.u_cardinality_cap == 0) c.u_cardinality_cap = dist.cardinality(Var::A) + 1;
  if (c.v_cardinality_cap == 0) c.v_cardinality_cap = dist.cardinality(Var::C) + 1;
  if (c.grid_resolution == 0 || c.ascent_steps == 0 || c.max_grid_points == 0) {
    throw ArgumentError("channel search counts must be >= 1");
  }
  return c;
}

ChannelSearchResult search_channels(const JointDistribution& dist,
                                    const ChannelObjective& objective,
                                    const ChannelSearchConfig& config,
                                    SearchScope scope,
                                    std::optional<double> stop_at) {
  const ChannelSearchConfig cfg = config.resolved(dist);
  const std::size_t na = dist.cardinality(Var::A);
  const std::size_t nc = dist.cardinality(Var::C);
  const std::size_t nu = scope.vary_u ? cfg.u_cardinality_cap : 1;
  const std::size_t nv = scope.vary_v ? cfg.v_cardinality_cap : 1;

  Searcher searcher(dist, objective, scope);
  Candidate best = searcher.make(AuxChannel::constant(Var::A, na),
                                 AuxChannel::constant(Var::C, nc));

  grid_phase(searcher, best, na, nc, nu, nv, cfg.grid_resolution, cfg);
  auto consider = [&](Candidate c) {
    if (better(c, best)) best = std::move(c);
  };

  std::size_t evaluations = searcher.evaluations();
  if (!(stop_at && best.value >= *stop_at)) {
    std::vector<std::optional<Candidate>> results(cfg.restarts);
    std::vector<std::size_t> counts(cfg.restarts, 0);
    parallel_for(cfg.restarts, [&](std::size_t i) {
      Rng rng(cfg.seed, i + 1);
      Searcher local(dist, objective, scope);
      AuxChannel u = scope.vary_u ? random_channel(Var::A, na, nu, rng)
                                  : AuxChannel::constant(Var::A, na);
      AuxChannel v = scope.vary_v ? random_channel(Var::C, nc, nv, rng)
                                  : AuxChannel::constant(Var::C, nc);
      results[i] = local.ascend(local.make(std::move(u), std::move(v)),
                                cfg.ascent_steps);
      counts[i] = local.evaluations();
    });
    for (std::size_t i = 0; i < cfg.restarts; ++i) {
      consider(std::move(*results[i]));
      evaluations += counts[i];
    }
  }
  // Report the objective at the returned witness exactly.
  const double value = objective(extend_joint(dist, best.u, best.v));
  return ChannelSearchResult{std::move(best.u), std::move(best.v), value, cfg,
                             evaluations + 1};
}

ChannelSearchResult optimize_channels(const JointDistribution& dist,
                                      Objective objective,
                                      const ChannelSearchConfig& config) {
  return search_channels(
      dist,
      [objective](const ExtendedJoint& ext) {
        return evaluate_objective(ext, objective);
      },
      config, scope_of(objective));
}

ChannelSearchResult grid_search(const JointDistribution& dist,
                                const ChannelObjective& objective,
                                std::size_t u_cardinality,
                                std::size_t v_cardinality,
                                std::size_t resolution, SearchScope scope) {
  const std::size_t na = dist.cardinality(Var::A);
  const std::size_t nc = dist.cardinality(Var::C);
  const auto ugrid = scope.vary_u
                         ? enumerate_channels(Var::A, na, u_cardinality, resolution)
                         : std::vector<AuxChannel>{AuxChannel::constant(Var::A, na)};
  const auto vgrid = scope.vary_v
                         ? enumerate_channels(Var::C, nc, v_cardinality, resolution)
                         : std::vector<AuxChannel>{AuxChannel::constant(Var::C, nc)};
  Searcher searcher(dist, objective, scope);
  std::optional<Candidate> best;
  for (const auto& u : ugrid) {
    for (const auto& v : vgrid) {
      Candidate c = searcher.make(u, v);
      if (!best || better(c, *best)) best = std::move(c);
    }
  }
  ChannelSearchConfig cfg;
  cfg.u_cardinality_cap = u_cardinality;
  cfg.v_cardinality_cap = v_cardinality;
  cfg.grid_resolution = resolution;
  cfg.restarts = 0;
  return ChannelSearchResult{std::move(best->u), std::move(best->v), best->value,
                             cfg, searcher.evaluations()};
}

}  // namespace secdsc
