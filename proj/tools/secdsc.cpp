// secdsc: command-line front end. Every command writes `#` manifest lines
// followed by a CSV body on stdout; failures print one line
//   secdsc: error[<kind>]: <message>
// on stderr and exit nonzero.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "secdsc/aux_channels.hpp"
#include "secdsc/binning.hpp"
#include "secdsc/bounds.hpp"
#include "secdsc/error.hpp"
#include "secdsc/io.hpp"
#include "secdsc/prob.hpp"
#include "secdsc/special_cases.hpp"

namespace {

using namespace secdsc;
using namespace secdsc::vars;

constexpr double kIdentityTolerance = 1e-9;

std::vector<double> parse_numbers(const std::string& text, std::size_t count,
                                  const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ArgumentError(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  if (out.size() != count) {
    throw ArgumentError(std::string(what) + " expects " + std::to_string(count) +
                        " comma-separated values, got " + std::to_string(out.size()));
  }
  return out;
}

struct SearchOptions {
  std::string caps;
  std::size_t grid = ChannelSearchConfig{}.grid_resolution;
  std::size_t restarts = ChannelSearchConfig{}.restarts;
  std::size_t ascent_steps = ChannelSearchConfig{}.ascent_steps;

  void attach(CLI::App* cmd) {
    cmd->add_option("--caps", caps, "auxiliary cardinality caps |U|,|V| (default |A|+1,|C|+1)");
    cmd->add_option("--grid", grid, "simplex grid resolution")->capture_default_str();
    cmd->add_option("--restarts", restarts, "random restarts")->capture_default_str();
    cmd->add_option("--ascent-steps", ascent_steps, "coordinate-ascent sweeps")
        ->capture_default_str();
  }

  ChannelSearchConfig config(std::uint64_t seed) const {
    ChannelSearchConfig c;
    if (!caps.empty()) {
      const auto v = parse_numbers(caps, 2, "--caps");
      for (double x : v) {
        if (x < 1 || x != static_cast<double>(static_cast<std::size_t>(x))) {
          throw ArgumentError("--caps entries must be positive integers");
        }
      }
      c.u_cardinality_cap = static_cast<std::size_t>(v[0]);
      c.v_cardinality_cap = static_cast<std::size_t>(v[1]);
    }
    c.grid_resolution = grid;
    c.restarts = restarts;
    c.ascent_steps = ascent_steps;
    c.seed = seed;
    return c;
  }
};

void add_config(RunManifest& m, const ChannelSearchConfig& c) {
  m.config.emplace_back("u_cardinality_cap", std::to_string(c.u_cardinality_cap));
  m.config.emplace_back("v_cardinality_cap", std::to_string(c.v_cardinality_cap));
  m.config.emplace_back("grid_resolution", std::to_string(c.grid_resolution));
  m.config.emplace_back("restarts", std::to_string(c.restarts));
  m.config.emplace_back("ascent_steps", std::to_string(c.ascent_steps));
  m.config.emplace_back("max_grid_points", std::to_string(c.max_grid_points));
}

std::string yes_no(bool b) { return b ? "true" : "false"; }
std::string pass_fail(bool b) { return b ? "PASS" : "FAIL"; }

struct Context {
  std::string command_line;
  std::string dist_path;
  std::string digest_input;
  std::optional<std::uint64_t> seed;

  JointDistribution load() {
    const std::string text = read_file(dist_path);
    digest_input += text;
    return parse_distribution(text);
  }

  AuxChannel load_channel(const std::string& path) {
    const std::string text = read_file(path);
    digest_input += text;
    return parse_channel(text);
  }

  RunManifest manifest() const {
    RunManifest m;
    m.command = command_line;
    m.seed = seed;
    m.input_digest = fnv1a64(digest_input);
    m.wall_clock = utc_timestamp();
    return m;
  }
};

std::uint64_t require_seed(const Context& ctx, const char* command) {
  if (!ctx.seed) {
    throw ArgumentError(std::string(command) + " is stochastic and needs --seed");
  }
  return *ctx.seed;
}

void cmd_info(Context& ctx) {
  const JointDistribution dist = ctx.load();
  RunManifest m = ctx.manifest();
  const auto dims = dist.source_dims();
  m.config.emplace_back("dims", std::to_string(dims[0]) + "x" + std::to_string(dims[1]) +
                                    "x" + std::to_string(dims[2]) + "x" +
                                    std::to_string(dims[3]));
  std::cout << m.render() << csv_line({"measure", "value"});
  const std::vector<std::pair<std::string, VarSet>> singles{
      {"A", A}, {"B", B}, {"C", C}, {"E", E}};
  auto row = [](const std::string& name, double v) {
    std::cout << csv_line({name, format_number(v)});
  };
  for (const auto& [n, x] : singles) row("H(" + n + ")", entropy(dist, x));
  for (const auto& [nx, x] : singles) {
    for (const auto& [ny, y] : singles) {
      if (x == y) continue;
      row("H(" + nx + "|" + ny + ")", entropy(dist, x, y));
    }
  }
  for (std::size_t i = 0; i < singles.size(); ++i) {
    for (std::size_t j = i + 1; j < singles.size(); ++j) {
      const auto& [nx, x] = singles[i];
      const auto& [ny, y] = singles[j];
      row("I(" + nx + ";" + ny + ")", mutual_information(dist, x, y));
      for (const auto& [nz, z] : singles) {
        if (z == x || z == y) continue;
        row("I(" + nx + ";" + ny + "|" + nz + ")", mutual_information(dist, x, y, z));
      }
    }
  }
  row("H(A,C|B)", entropy(dist, A | C, B));
  row("H(A|B,C)", entropy(dist, A, B | C));
  row("H(C|A,B)", entropy(dist, C, A | B));
  row("I(A;B,C)", mutual_information(dist, A, B | C));
  row("I(A,B;C)", mutual_information(dist, A | B, C));
  row("I(A;B,C|E)", mutual_information(dist, A, B | C, E));
  row("I(C;A,B|E)", mutual_information(dist, C, A | B, E));
}

void cmd_bounds(Context& ctx, const std::string& point, const SearchOptions& so) {
  const std::uint64_t seed = require_seed(ctx, "bounds");
  const JointDistribution dist = ctx.load();
  const auto v = parse_numbers(point, 4, "--point");
  const RateQuadruple q{v[0], v[1], v[2], v[3]};
  validate_quadruple(q);
  const ChannelSearchConfig cfg = so.config(seed).resolved(dist);
  RunManifest m = ctx.manifest();
  m.config.emplace_back("point", point);
  add_config(m, cfg);
  std::cout << m.render()
            << csv_line({"bound", "id", "expression", "lhs", "relation", "rhs", "slack",
                         "satisfied"});

  auto emit_membership = [](const char* name, const ConstraintSystem& sys,
                            const MembershipResult& r) {
    for (const auto& rec : r.report.records) {
      std::cout << csv_line({name, rec.id, sys.at(rec.id).expression,
                             format_number(rec.lhs), std::string(relation_symbol(rec.relation)),
                             format_number(rec.rhs), format_number(rec.slack),
                             yes_no(rec.satisfied)});
    }
    std::cout << csv_line({name, "overall",
                           "U=" + r.best_u.to_string() + " V=" + r.best_v.to_string(), "",
                           "", "", format_number(r.report.min_slack()), yes_no(r.found)});
  };
  const MembershipResult inner = point_in_inner(dist, q, cfg);
  emit_membership("inner", inner_system(extend_joint(dist, inner.best_u, inner.best_v)),
                  inner);
  const MembershipResult outer = point_in_outer(dist, q, cfg);
  emit_membership("outer", outer_system(extend_joint(dist, outer.best_u, outer.best_v)),
                  outer);

  auto emit_ceiling = [](const char* name, const char* id, const ChannelSearchResult& r,
                         const char* expr) {
    std::cout << csv_line({name, id, expr, format_number(r.value), "max", "", "",
                           "U=" + r.u.to_string() + " V=" + r.v.to_string()});
  };
  const Ceilings ic = inner_ceilings(dist, cfg);
  emit_ceiling("inner-ceiling", "delta_a", ic.delta_a, "I(A;B,C|U) - I(A;E|U)");
  emit_ceiling("inner-ceiling", "delta_c", ic.delta_c, "I(A,B;C|V) - I(C;E|V)");
  std::cout << csv_line({"inner-ceiling", "sum",
                         "I(A,C;U,V,B) + I(A;C) - I(A;U,E) - I(C;V,E)",
                         format_number(ic.sum), "max", "", "", ""});
  const Ceilings oc = outer_ceilings(dist, cfg);
  emit_ceiling("outer-ceiling", "delta_a", oc.delta_a, "I(A;B,V|U) - I(A;E|U)");
  emit_ceiling("outer-ceiling", "delta_c", oc.delta_c, "I(C;B,U|V) - I(C;E|V)");
  std::cout << csv_line({"outer-ceiling", "sum", "I(A;C) + I(A,C;B)",
                         format_number(oc.sum), "max", "", "", ""});
}

void cmd_corners(Context& ctx, const std::string& u_path, const std::string& v_path) {
  const JointDistribution dist = ctx.load();
  const AuxChannel u = ctx.load_channel(u_path);
  const AuxChannel v = ctx.load_channel(v_path);
  const ExtendedJoint ext = extend_joint(dist, u, v);
  RunManifest m = ctx.manifest();
  m.config.emplace_back("u_channel", u.to_string());
  m.config.emplace_back("v_channel", v.to_string());
  m.config.emplace_back("identity_tolerance", format_number(kIdentityTolerance));
  std::cout << m.render()
            << csv_line({"case", "r_a", "r_c", "delta_a", "delta_c", "sum_rate",
                         "sum_rate_target", "sum_rate_check", "sum_equiv",
                         "sum_equiv_target", "sum_equiv_check"});
  const double rate_target = entropy(ext, A | C, B);
  const double equiv_target = evaluate_objective(ext, Objective::kInnerSum);
  const auto corners = corner_quadruples(ext);
  for (std::size_t k = 0; k < corners.size(); ++k) {
    const auto& q = corners[k];
    const double sr = q.r_a + q.r_c;
    const double se = q.delta_a + q.delta_c;
    std::cout << csv_line(
        {std::to_string(k + 1), format_number(q.r_a), format_number(q.r_c),
         format_number(q.delta_a), format_number(q.delta_c), format_number(sr),
         format_number(rate_target),
         pass_fail(std::abs(sr - rate_target) <= kIdentityTolerance), format_number(se),
         format_number(equiv_target),
         pass_fail(std::abs(se - equiv_target) <= kIdentityTolerance)});
  }
}

void cmd_frontier(Context& ctx, const std::string& rates, std::size_t points,
                  const SearchOptions& so) {
  const std::uint64_t seed = require_seed(ctx, "frontier");
  const JointDistribution dist = ctx.load();
  const auto r = parse_numbers(rates, 2, "--rates");
  const ChannelSearchConfig cfg = so.config(seed).resolved(dist);
  RunManifest m = ctx.manifest();
  m.config.emplace_back("rates", rates);
  m.config.emplace_back("points", std::to_string(points));
  add_config(m, cfg);
  const RegionSample sample = equivocation_frontier(dist, r[0], r[1], cfg, points);
  m.config.emplace_back("infeasible_weights", std::to_string(sample.infeasible_weights));
  std::cout << m.render()
            << csv_line({"weight", "r_a", "r_c", "delta_a", "delta_c", "u_channel",
                         "v_channel", "inner_check"});
  for (const auto& p : sample.points) {
    std::cout << csv_line({format_number(p.weight), format_number(p.point.r_a),
                           format_number(p.point.r_c), format_number(p.point.delta_a),
                           format_number(p.point.delta_c), p.u.to_string(),
                           p.v.to_string(), pass_fail(p.verdict)});
  }
}

void emit_system(const std::string& name, const ConstraintSystem& sys) {
  for (const auto& c : sys.constraints()) {
    std::cout << csv_line({name, c.id, c.expression,
                           std::string(relation_symbol(c.relation)),
                           format_number(c.bound)});
  }
}

void cmd_special(Context& ctx, const std::string& which, const SearchOptions& so) {
  const JointDistribution dist = ctx.load();
  RunManifest m = ctx.manifest();
  m.config.emplace_back("case", which);
  const std::string header = csv_line({"case", "id", "expression", "relation", "value"});
  auto row = [&](const std::string& id, const std::string& expr, const std::string& rel,
                 double value) {
    std::cout << csv_line({which, id, expr, rel, format_number(value)});
  };
  if (which == "no-eve-si") {
    const ConstraintSystem sys = region_no_eve_si(dist);
    std::cout << m.render() << header;
    emit_system(which, sys);
  } else if (which == "eve-at-alice") {
    const ConstraintSystem sys = region_eve_si_at_alice(dist);
    std::cout << m.render() << header;
    emit_system(which, sys);
  } else if (which == "eve-at-bob") {
    const ConstraintSystem sys = region_eve_si_at_bob(dist);
    std::cout << m.render() << header;
    emit_system(which, sys);
  } else if (which == "key-case") {
    const ChannelSearchConfig cfg = so.config(require_seed(ctx, "special key-case"));
    const KeyCaseResult r = equivocations_key_case(dist, cfg);
    add_config(m, r.config);
    std::cout << m.render() << header;
    row("delta_a_max", "[min(H(B) - I(A;E), H(A|E))]+", "max", r.delta_a_max);
    row("delta_c_max", "max_V I(C;B|V) - I(C;E|V), V=" + r.v_witness.to_string(), "max",
        r.delta_c_max);
  } else if (which == "degraded-A" || which == "degraded-C") {
    const ChannelSearchConfig cfg = so.config(require_seed(ctx, "special degraded"));
    const bool alice = which == "degraded-A";
    const DegradedReport r =
        degraded_collapse_check(dist, alice ? Side::kAlice : Side::kCharlie, cfg);
    add_config(m, r.config);
    std::cout << m.render() << header;
    const std::string x = alice ? "A" : "C";
    const std::string y = alice ? "C" : "A";
    row("markov_gap", "I(" + x + ";E|B)", "=", r.markov_gap);
    row("ceiling", "I(" + x + ";B," + y + "|E)", "=", r.ceiling);
    row("constant_value", alice ? "I(A;B,C) - I(A;E)" : "I(A,B;C) - I(C;E)", "=",
        r.constant_value);
    row("searched_value", "witness " + r.witness.to_string(), "max", r.searched_value);
    row("success", "constant == searched <= ceiling", "=", r.success ? 1.0 : 0.0);
  } else {
    throw ArgumentError("unknown case '" + which + "'");
  }
}

void cmd_simulate(Context& ctx, const std::string& plan_path, std::size_t trials) {
  const std::uint64_t seed = require_seed(ctx, "simulate");
  const JointDistribution dist = ctx.load();
  const std::string plan_text = read_file(plan_path);
  ctx.digest_input += plan_text;
  const SimulationPlan plan = parse_simulation_plan(plan_text, seed);
  const auto dims = dist.source_dims();
  const AuxChannel u = plan.u_channel.value_or(AuxChannel::constant(Var::A, dims[0]));
  const AuxChannel v = plan.v_channel.value_or(AuxChannel::constant(Var::C, dims[2]));
  RunManifest m = ctx.manifest();
  m.config.emplace_back("trials", std::to_string(trials));
  m.config.emplace_back("u_channel", u.to_string());
  m.config.emplace_back("v_channel", v.to_string());
  m.config.emplace_back("rows", std::to_string(plan.rows.size()));
  std::cout << m.render()
            << csv_line({"row", "scheme", "block_length", "u_codeword_count",
                         "v_codeword_count", "u_bin_count", "v_bin_count", "a_bin_count",
                         "c_bin_count", "typicality_delta", "codebook_seed", "trials",
                         "mc_seed", "rate_a", "rate_c", "decode_errors",
                         "encoder_failures", "p_e_hat", "ci_low", "ci_high",
                         "exact_error", "equiv_a", "equiv_c", "error"});
  const auto rows = run_experiment(dist, u, v, plan.rows, trials, seed);
  auto opt = [](const std::optional<double>& x) {
    return x ? format_number(*x) : std::string();
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto& s = r.spec;
    std::vector<std::string> f{std::to_string(i),
                               std::string(scheme_name(s.scheme)),
                               std::to_string(s.block_length),
                               std::to_string(s.u_codeword_count),
                               std::to_string(s.v_codeword_count),
                               std::to_string(s.u_bin_count),
                               std::to_string(s.v_bin_count),
                               std::to_string(s.a_bin_count),
                               std::to_string(s.c_bin_count),
                               format_number(s.typicality_delta),
                               std::to_string(s.seed),
                               std::to_string(r.trials),
                               std::to_string(r.seed)};
    if (r.result) {
      const SimResult& x = *r.result;
      f.insert(f.end(), {format_number(x.rate_a), format_number(x.rate_c),
                         std::to_string(x.decode_errors), std::to_string(x.encoder_failures),
                         format_number(x.p_e_hat), format_number(x.ci_low),
                         format_number(x.ci_high), opt(x.exact_error), opt(x.equiv_a),
                         opt(x.equiv_c), ""});
    } else {
      f.insert(f.end(), {"", "", "", "", "", "", "", "", "", "", r.error});
    }
    std::cout << csv_line(f);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compression-equivocation bounds and random-binning simulation for "
               "secure distributed source coding"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(secdsc::version()));

  Context ctx;
  for (int i = 0; i < argc; ++i) {
    if (i) ctx.command_line += ' ';
    ctx.command_line += argv[i];
  }
  std::uint64_t seed = 0;
  SearchOptions search;

  auto add_common = [&](CLI::App* cmd, bool seeded) {
    cmd->add_option("dist", ctx.dist_path, "distribution document (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    if (seeded) cmd->add_option("--seed", seed, "seed for every stochastic step");
  };

  auto* info = app.add_subcommand("info", "print entropies and mutual informations");
  add_common(info, false);

  std::string point;
  auto* bounds = app.add_subcommand("bounds", "inner/outer membership and ceilings");
  add_common(bounds, true);
  bounds->add_option("--point", point, "rA,rC,dA,dC")->required();
  search.attach(bounds);

  std::string ch_u, ch_v;
  auto* corners = app.add_subcommand("corners", "four corner quadruples with identity checks");
  add_common(corners, false);
  corners->add_option("--chU", ch_u, "U channel document")->required()->check(CLI::ExistingFile);
  corners->add_option("--chV", ch_v, "V channel document")->required()->check(CLI::ExistingFile);

  std::string rates;
  std::size_t points = 11;
  auto* frontier = app.add_subcommand("frontier", "equivocation Pareto sweep at fixed rates");
  add_common(frontier, true);
  frontier->add_option("--rates", rates, "rA,rC")->required();
  frontier->add_option("--points", points, "number of weights")->capture_default_str();
  search.attach(frontier);

  std::string which;
  auto* special = app.add_subcommand("special", "closed-form special cases");
  add_common(special, true);
  special->add_option("--case", which, "case name")
      ->required()
      ->check(CLI::IsMember({"no-eve-si", "eve-at-alice", "key-case", "eve-at-bob",
                             "degraded-A", "degraded-C"}));
  search.attach(special);

  std::string plan;
  std::size_t trials = 1000;
  auto* simulate = app.add_subcommand("simulate", "random-binning codec simulation");
  add_common(simulate, true);
  simulate->add_option("--spec", plan, "simulation plan (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--trials", trials, "Monte-Carlo trials per row")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "secdsc: error[usage]: " << e.what() << '\n';
    return 64;
  }

  try {
    for (auto* cmd : {bounds, frontier, special, simulate}) {
      if (cmd->parsed() && cmd->count("--seed") > 0) ctx.seed = seed;
    }
    if (info->parsed()) cmd_info(ctx);
    if (bounds->parsed()) cmd_bounds(ctx, point, search);
    if (corners->parsed()) cmd_corners(ctx, ch_u, ch_v);
    if (frontier->parsed()) cmd_frontier(ctx, rates, points, search);
    if (special->parsed()) cmd_special(ctx, which, search);
    if (simulate->parsed()) cmd_simulate(ctx, plan, trials);
  } catch (const secdsc::Error& e) {
    std::cout.flush();
    std::cerr << "secdsc: error[" << e.kind() << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cout.flush();
    std::cerr << "secdsc: error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
