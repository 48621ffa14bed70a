#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "popchaos/chaos.hpp"
#include "popchaos/equilibrium.hpp"
#include "popchaos/error.hpp"
#include "popchaos/mean_dynamics.hpp"
#include "popchaos/simulate.hpp"
#include "self_check.hpp"
#include "table.hpp"

namespace popchaos::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, MapKind> kMapNames{{"logistic", MapKind::logistic},
                                               {"ricker", MapKind::ricker}};
const std::map<std::string, Branch> kBranchNames{{"plus", Branch::plus},
                                                 {"minus", Branch::minus}};
const std::map<std::string, NoiseFamily> kNoiseNames{
    {"gamma", NoiseFamily::gamma}, {"lognormal", NoiseFamily::lognormal}};
const std::map<std::string, Format> kFormatNames{{"csv", Format::csv},
                                                 {"json", Format::json}};

struct Common {
  Format format = Format::csv;
  std::string output;
};

// Sends the table to --output or `out`, and notes to whichever stream the
// table did not take.
class Emitter {
 public:
  Emitter(const Common& common, std::ostream& out, std::ostream& err)
      : common_(common), out_(out), err_(err) {}

  void table(const Table& t) {
    if (common_.output.empty()) {
      t.write(out_, common_.format);
      return;
    }
    std::ofstream file(common_.output, std::ios::binary);
    if (!file) throw UsageError(fmt::format("cannot open {}", common_.output));
    t.write(file, common_.format);
    if (!file) throw UsageError(fmt::format("failed writing {}", common_.output));
  }

  std::ostream& note() { return common_.output.empty() ? err_ : out_; }

 private:
  const Common& common_;
  std::ostream& out_;
  std::ostream& err_;
};

// Enums with an ADL to_string confuse CLI11's own conversion, so they are
// bound through a callback.
template <typename Enum>
CLI::Option* add_enum(CLI::App* cmd, const std::string& name, Enum& target,
                      const std::map<std::string, Enum>& names,
                      const std::string& help) {
  std::vector<std::string> keys;
  for (const auto& [key, value] : names) keys.push_back(key);
  return cmd
      ->add_option_function<std::string>(
          name, [&target, &names](const std::string& s) { target = names.at(s); },
          help)
      ->check(CLI::IsMember(keys));
}

void add_common(CLI::App* cmd, Common& common) {
  add_enum(cmd, "--format", common.format, kFormatNames,
           "csv or json (one object per line)");
  cmd->add_option("--output", common.output, "write the table to PATH");
}

void add_map(CLI::App* cmd, MapKind& map) {
  add_enum(cmd, "--map", map, kMapNames, "logistic or ricker")->required();
}

Cell optional_cell(const std::optional<int>& v) {
  return v ? Cell{static_cast<std::int64_t>(*v)} : Cell{};
}

Cell size_cell(std::size_t n) { return Cell{static_cast<std::int64_t>(n)}; }

void require(bool ok, std::string_view message) {
  if (!ok) throw UsageError(std::string(message));
}

// solve

struct SolveArgs {
  MapKind map{};
  double k = 0.0;
  double var_eps = 0.0;
  double r_max = kRickerDefaultRMax;
};

void cmd_solve(const SolveArgs& a, Emitter& emit) {
  const EquilibriumSolution sol = solve_equilibrium(a.map, a.k, a.var_eps, a.r_max);
  Table t({"map", "k", "var_eps", "branch", "r", "theta", "degenerate",
           "variance_bound"});
  for (const auto& b : sol.branches) {
    t.add_row({std::string(to_string(a.map)), a.k, a.var_eps,
               std::string(to_string(b.label)), b.r, b.theta, b.degenerate,
               sol.bound_var});
  }
  emit.table(t);
  fmt::print(emit.note(), "{} k={} var_eps={}: {} branch(es), variance bound {}\n",
             to_string(a.map), a.k, a.var_eps, sol.branches.size(),
             format_number(sol.bound_var));
  if (sol.roots_beyond_r_max) {
    fmt::print(emit.note(), "another root lies above r_max={}\n", a.r_max);
  }
}

// scan

// Curves want the whole upper branch; at k = 0.01 it starts near r = 141.
constexpr double kCurveRMax = 200.0;

struct ScanArgs {
  MapKind map{};
  std::vector<double> ks;
  double var_eps_max = 0.0;
  std::size_t steps = 51;
  double r_max = kCurveRMax;
};

void cmd_scan(ScanArgs a, Emitter& emit) {
  if (a.ks.empty()) a.ks = {0.01, 1.0, 10.0, 100.0};
  if (a.var_eps_max == 0.0) a.var_eps_max = a.map == MapKind::logistic ? 0.5 : 3.0;
  require(a.steps >= 2, "--steps must be at least 2");
  require(a.var_eps_max > 0.0, "--var-eps-max must be positive");
  for (double k : a.ks) require(k > 0.0, "every --k must be positive");

  Table t({"k", "var_eps", "branch", "r", "theta", "feasible"});
  std::size_t infeasible = 0;
  auto unresolved = [&](double k, double v, Branch b, bool feasible) {
    t.add_row({k, v, std::string(to_string(b)), Cell{}, Cell{}, feasible});
  };
  for (const double k : a.ks) {
    for (std::size_t i = 0; i < a.steps; ++i) {
      const double v = a.var_eps_max * static_cast<double>(i) /
                       static_cast<double>(a.steps - 1);
      try {
        const auto sol = solve_equilibrium(a.map, k, v, a.r_max);
        // an upper root beyond r_max is feasible but not located
        if (sol.roots_beyond_r_max && !sol.has_branch(Branch::plus)) {
          unresolved(k, v, Branch::plus, true);
        }
        for (const auto& b : sol.branches) {
          t.add_row({k, v, std::string(to_string(b.label)), b.r, b.theta, true});
        }
      } catch (const InfeasibleError&) {
        ++infeasible;
        unresolved(k, v, Branch::plus, false);
        unresolved(k, v, Branch::minus, false);
      } catch (const NumericalError&) {
        unresolved(k, v, Branch::plus, true);
      }
    }
  }
  emit.table(t);
  fmt::print(emit.note(), "{} rows over {} k value(s), {} infeasible point(s)\n",
             t.size(), a.ks.size(), infeasible);
}

// ricker-curve

struct CurveArgs {
  double k_min = 0.5;
  double k_max = 100.0;
  std::size_t steps = 40;
  double r_max = kCurveRMax;
};

void cmd_ricker_curve(const CurveArgs& a, Emitter& emit) {
  require(a.steps >= 2, "--steps must be at least 2");
  require(a.k_min > 0.0 && a.k_min < a.k_max, "need 0 < --k-min < --k-max");
  Table t({"k", "r"});
  const double lo = std::log(a.k_min);
  const double hi = std::log(a.k_max);
  bool decreasing = true;
  double previous = INFINITY;
  double r_min = INFINITY;
  for (std::size_t i = 0; i < a.steps; ++i) {
    // log-spaced grid, endpoints exact
    const double k =
        i == 0 ? a.k_min
        : i + 1 == a.steps
            ? a.k_max
            : std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(a.steps - 1));
    const double r = ricker_solve(k, 0.0, a.r_max).branches.front().r;
    decreasing = decreasing && r < previous;
    previous = r;
    r_min = std::min(r_min, r);
    t.add_row({k, r});
  }
  emit.table(t);
  fmt::print(emit.note(), "r strictly decreasing in k: {}; smallest r {}\n",
             decreasing ? "yes" : "no", format_number(r_min));
}

// simulate

struct SimulateArgs {
  MapKind map{};
  std::optional<double> r;
  std::optional<double> x0;
  std::optional<double> k;
  Branch branch = Branch::plus;
  double var_eps = 0.0;
  NoiseFamily noise = NoiseFamily::gamma;
  std::size_t t_max = 100;
  std::size_t n_traj = 100000;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
};

Table ensemble_table(const EnsembleStats& s) {
  Table t({"t", "mean", "variance", "se_mean", "se_variance", "extinct_fraction"});
  for (std::size_t i = 0; i <= s.times; ++i) {
    t.add_row({size_cell(i), s.mean[i], s.variance[i], s.se_mean[i],
               s.se_variance[i], s.extinct_fraction[i]});
  }
  return t;
}

void cmd_simulate(const SimulateArgs& a, Emitter& emit) {
  require(a.r.has_value() != a.k.has_value(),
          "give exactly one of --r (point start) or --k (equilibrium start)");
  require(!(a.k && a.x0), "--x0 goes with --r");
  std::optional<MapSpec> map;
  InitialCondition init = PointInit{0.0};
  std::string start;
  if (a.r) {
    map.emplace(a.map, *a.r);
    const double x0 = a.x0.value_or(default_x0(a.map));
    init = PointInit{x0};
    start = fmt::format("point start x0={}", x0);
  } else {
    const auto sol = solve_equilibrium(a.map, *a.k, a.var_eps);
    const auto& b = sol.branch(a.branch);
    if (b.degenerate) {
      throw DomainError(fmt::format("{} branch is degenerate (r={}) at k={}, var_eps={}",
                                    to_string(a.branch), b.r, *a.k, a.var_eps));
    }
    map.emplace(a.map, b.r);
    init = GammaParams(*a.k, b.theta);
    start = fmt::format("equilibrium start Gamma(k={}, theta={}), mean {}", *a.k,
                        b.theta, format_number(*a.k * b.theta));
  }
  const auto stats = run_ensemble(*map, init, NoiseSpec(a.var_eps, a.noise),
                                  a.t_max, a.n_traj, a.seed, {a.threads});
  emit.table(ensemble_table(stats));
  fmt::print(emit.note(),
             "{} r={} {}: final mean {} (se {}), escaped fraction {}\n",
             to_string(a.map), format_number(map->r()), start,
             format_number(stats.mean.back()), format_number(stats.se_mean.back()),
             format_number(stats.extinct_fraction.back()));
}

// stationarity

struct StationarityArgs {
  MapKind map{};
  double k = 0.0;
  double var_eps = 0.0;
  Branch branch = Branch::plus;
  NoiseFamily noise = NoiseFamily::gamma;
  double r_offset = 0.0;
  std::size_t n_traj = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
};

void cmd_stationarity(const StationarityArgs& a, Emitter& emit) {
  require(a.n_traj >= 2, "--n-traj must be at least 2");
  const auto rep = stationarity_check(a.map, a.k, a.var_eps, a.branch, a.n_traj,
                                      a.seed, a.noise, a.r_offset, {a.threads});
  Table t({"map", "k", "var_eps", "branch", "r", "theta", "target_mean",
           "target_variance", "mean", "variance", "se_mean", "se_variance",
           "mean_z", "var_z", "pass"});
  t.add_row({std::string(to_string(a.map)), a.k, a.var_eps,
             std::string(to_string(a.branch)), rep.r, rep.theta, rep.target_mean,
             rep.target_variance, rep.sample.mean, rep.sample.variance,
             rep.sample.se_mean, rep.sample.se_variance, rep.mean_z, rep.var_z,
             rep.pass});
  emit.table(t);
  fmt::print(emit.note(), "{}: mean z {:.3f}, variance z {:.3f} (limit {})\n",
             rep.pass ? "PASS" : "FAIL", rep.mean_z, rep.var_z,
             kStationarityZLimit);
}

// bifurcate

struct BifurcateArgs {
  MapKind map{};
  std::optional<double> r_min;
  std::optional<double> r_max;
  std::size_t steps = 201;
  std::size_t samples = 32;
  unsigned threads = 0;
};

void cmd_bifurcate(const BifurcateArgs& a, Emitter& emit) {
  const double lo = a.r_min.value_or(a.map == MapKind::logistic ? 2.5 : 1.5);
  const double hi = a.r_max.value_or(a.map == MapKind::logistic ? 4.0 : 3.5);
  require(a.samples >= 1, "--samples must be at least 1");
  const auto rows = bifurcation_scan(a.map, lo, hi, a.steps, a.samples, {a.threads});
  Table t({"r", "x_sample", "lyapunov"});
  std::optional<double> onset;
  for (const auto& row : rows) {
    if (row.diverged) {
      t.add_row({row.r, Cell{}, Cell{}});
      continue;
    }
    if (!onset && row.lyapunov.value > kLambdaTolerance) onset = row.r;
    for (const double x : row.attractor) t.add_row({row.r, x, row.lyapunov.value});
  }
  emit.table(t);
  if (onset) {
    fmt::print(emit.note(), "first grid r with lyapunov > {}: {}\n",
               kLambdaTolerance, format_number(*onset));
  } else {
    fmt::print(emit.note(), "no grid r with lyapunov > {}\n", kLambdaTolerance);
  }
}

// lyapunov

struct LyapunovArgs {
  MapKind map{};
  double r = 0.0;
  std::optional<double> x0;
  std::size_t burn_in = kLyapunovBurnIn;
  std::size_t iters = kLyapunovIters;
};

void cmd_lyapunov(const LyapunovArgs& a, Emitter& emit) {
  require(a.r > 0.0, "--r must be positive");
  const double x0 = a.x0.value_or(default_x0(a.map));
  const auto est = lyapunov(a.map, a.r, x0, a.burn_in, a.iters);
  const auto regime = classify(a.map, a.r);
  Table t({"map", "r", "x0", "lyapunov", "superstable", "regime", "period"});
  t.add_row({std::string(to_string(a.map)), a.r, x0, est.value, est.superstable,
             std::string(to_string(regime.regime)), optional_cell(regime.period)});
  emit.table(t);
  fmt::print(emit.note(), "lambda = {}: {}\n", format_number(est.value),
             to_string(regime.regime));
}

// transition

struct TransitionArgs {
  MapKind map{};
  double k = 0.0;
  double var_eps = 0.0;
};

void cmd_transition(const TransitionArgs& a, Emitter& emit) {
  const auto rep = transition_report(a.map, a.k, a.var_eps);
  Table t({"branch", "r", "theta", "lyapunov", "regime", "period"});
  for (const auto& b : rep.branches) {
    t.add_row({std::string(to_string(b.branch.label)), b.branch.r, b.branch.theta,
               b.regime.lyapunov.value, std::string(to_string(b.regime.regime)),
               optional_cell(b.regime.period)});
  }
  emit.table(t);
  for (const auto& b : rep.branches) {
    fmt::print(emit.note(), "{} r={} {} (lambda {})\n", to_string(b.branch.label),
               format_number(b.branch.r), to_string(b.regime.regime),
               format_number(b.regime.lyapunov.value));
  }
  fmt::print(emit.note(), "{}\n", rep.transition_found ? "TRANSITION" : "NO TRANSITION");
}

// converge

struct ConvergeArgs {
  MapKind map{};
  double r = 0.0;
  std::vector<double> ladder{1e-2, 1e-3, 1e-4};
  std::size_t t_max = 20;
  ConvergenceOptions options;
};

void cmd_converge(const ConvergeArgs& a, Emitter& emit) {
  require(a.r > 0.0, "--r must be positive");
  const auto recs = convergence_sweep(a.map, a.r, a.ladder, a.t_max, a.options);
  Table t({"level", "max_deviation"});
  bool monotone = true;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    t.add_row({recs[i].level, recs[i].max_deviation});
    if (i > 0 && recs[i].max_deviation > recs[i - 1].max_deviation) monotone = false;
  }
  emit.table(t);
  fmt::print(emit.note(), "deviation decreases with the level: {}\n",
             monotone ? "yes" : "no");
}

// self-check

int cmd_self_check(const SelfCheckOptions& options, Emitter& emit) {
  const auto results = self_check(options);
  Table t({"check", "pass", "detail"});
  std::size_t failed = 0;
  for (const auto& r : results) {
    t.add_row({r.name, r.pass, r.detail});
    if (!r.pass) ++failed;
  }
  emit.table(t);
  if (failed == 0) {
    fmt::print(emit.note(), "all {} checks passed\n", results.size());
    return kExitOk;
  }
  fmt::print(emit.note(), "{} of {} checks FAILED\n", failed, results.size());
  return kExitNumerical;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Gamma-equilibrium growth rates and chaos detection for the "
               "stochastic logistic and Ricker maps",
               "popchaos"};
  app.require_subcommand(1);
  app.fallthrough(false);

  Common common;

  SolveArgs solve;
  auto* c_solve = app.add_subcommand("solve", "equilibrium growth-rate branches");
  add_map(c_solve, solve.map);
  c_solve->add_option("--k", solve.k, "gamma shape")->required();
  c_solve->add_option("--var-eps", solve.var_eps, "noise variance");
  c_solve->add_option("--r-max", solve.r_max, "Ricker root search ceiling");
  add_common(c_solve, common);

  ScanArgs scan;
  auto* c_scan = app.add_subcommand("scan", "branches over a noise-variance grid");
  add_map(c_scan, scan.map);
  c_scan->add_option("--k", scan.ks, "comma-separated shapes")->delimiter(',');
  c_scan->add_option("--var-eps-max", scan.var_eps_max,
                     "grid end (default 0.5 logistic, 3 Ricker)");
  c_scan->add_option("--steps", scan.steps, "grid points");
  c_scan->add_option("--r-max", scan.r_max, "Ricker root search ceiling");
  add_common(c_scan, common);

  CurveArgs curve;
  auto* c_curve =
      app.add_subcommand("ricker-curve", "Ricker growth rate against k without noise");
  c_curve->add_option("--k-min", curve.k_min);
  c_curve->add_option("--k-max", curve.k_max);
  c_curve->add_option("--steps", curve.steps, "log-spaced grid points");
  c_curve->add_option("--r-max", curve.r_max, "root search ceiling");
  add_common(c_curve, common);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo ensemble statistics");
  add_map(c_sim, sim.map);
  c_sim->add_option("--r", sim.r, "growth rate for a point start");
  c_sim->add_option("--x0", sim.x0, "point start value");
  c_sim->add_option("--k", sim.k, "start from the gamma equilibrium of this shape");
  add_enum(c_sim, "--branch", sim.branch, kBranchNames, "plus or minus");
  c_sim->add_option("--var-eps", sim.var_eps, "noise variance");
  add_enum(c_sim, "--noise", sim.noise, kNoiseNames, "gamma or lognormal");
  c_sim->add_option("--t-max", sim.t_max);
  c_sim->add_option("--n-traj", sim.n_traj);
  c_sim->add_option("--seed", sim.seed);
  c_sim->add_option("--threads", sim.threads, "0 = all cores");
  add_common(c_sim, common);

  StationarityArgs st;
  auto* c_st = app.add_subcommand("stationarity", "one-step z-test of an equilibrium");
  add_map(c_st, st.map);
  c_st->add_option("--k", st.k)->required();
  c_st->add_option("--var-eps", st.var_eps);
  add_enum(c_st, "--branch", st.branch, kBranchNames, "plus or minus");
  add_enum(c_st, "--noise", st.noise, kNoiseNames, "gamma or lognormal");
  c_st->add_option("--r-offset", st.r_offset, "shift r off the equilibrium");
  c_st->add_option("--n-traj", st.n_traj);
  c_st->add_option("--seed", st.seed);
  c_st->add_option("--threads", st.threads, "0 = all cores");
  add_common(c_st, common);

  BifurcateArgs bif;
  auto* c_bif = app.add_subcommand("bifurcate", "attractor samples and lyapunov over r");
  add_map(c_bif, bif.map);
  c_bif->add_option("--r-min", bif.r_min);
  c_bif->add_option("--r-max", bif.r_max);
  c_bif->add_option("--steps", bif.steps, "grid points");
  c_bif->add_option("--samples", bif.samples, "attractor points per r");
  c_bif->add_option("--threads", bif.threads, "0 = all cores");
  add_common(c_bif, common);

  LyapunovArgs lya;
  auto* c_lya = app.add_subcommand("lyapunov", "lyapunov exponent and regime");
  add_map(c_lya, lya.map);
  c_lya->add_option("--r", lya.r)->required();
  c_lya->add_option("--x0", lya.x0);
  c_lya->add_option("--burn-in", lya.burn_in);
  c_lya->add_option("--iters", lya.iters);
  add_common(c_lya, common);

  TransitionArgs tr;
  auto* c_tr = app.add_subcommand("transition", "steady state or chaos per branch");
  add_map(c_tr, tr.map);
  c_tr->add_option("--k", tr.k)->required();
  c_tr->add_option("--var-eps", tr.var_eps);
  add_common(c_tr, common);

  ConvergeArgs conv;
  std::optional<double> conv_y0;
  auto* c_conv = app.add_subcommand("converge", "ensemble mean against the deterministic orbit");
  add_map(c_conv, conv.map);
  c_conv->add_option("--r", conv.r)->required();
  c_conv->add_option("--ladder", conv.ladder, "decreasing variance levels")
      ->delimiter(',');
  c_conv->add_option("--t-max", conv.t_max);
  c_conv->add_option("--y0", conv_y0, "initial mean");
  c_conv->add_option("--noise-scale", conv.options.noise_scale,
                     "noise variance per unit level");
  c_conv->add_option("--n-traj", conv.options.n_traj);
  c_conv->add_option("--seed", conv.options.seed);
  c_conv->add_option("--threads", conv.options.parallel.threads, "0 = all cores");
  add_common(c_conv, common);

  SelfCheckOptions sc;
  sc.seed = kDefaultSeed;
  auto* c_sc = app.add_subcommand("self-check", "run the invariant suite");
  c_sc->add_option("--n-traj", sc.n_traj, "trajectories per Monte Carlo check");
  c_sc->add_option("--seed", sc.seed);
  c_sc->add_option("--threads", sc.threads, "0 = all cores");
  add_common(c_sc, common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Emitter emit(common, out, err);
  try {
    if (*c_solve) cmd_solve(solve, emit);
    else if (*c_scan) cmd_scan(scan, emit);
    else if (*c_curve) cmd_ricker_curve(curve, emit);
    else if (*c_sim) cmd_simulate(sim, emit);
    else if (*c_st) cmd_stationarity(st, emit);
    else if (*c_bif) cmd_bifurcate(bif, emit);
    else if (*c_lya) cmd_lyapunov(lya, emit);
    else if (*c_tr) cmd_transition(tr, emit);
    else if (*c_conv) {
      conv.options.y0 = conv_y0;
      cmd_converge(conv, emit);
    } else if (*c_sc) {
      return cmd_self_check(sc, emit);
    }
  } catch (const InfeasibleError& e) {
    fmt::print(err, "infeasible: {}\n", e.what());
    return kExitInfeasible;
  } catch (const NumericalError& e) {
    fmt::print(err, "numerical failure: {}\n", e.what());
    return kExitNumerical;
  } catch (const DomainError& e) {
    fmt::print(err, "invalid input: {}\n", e.what());
    return kExitUsage;
  } catch (const UsageError& e) {
    fmt::print(err, "usage: {}\n", e.what());
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace popchaos::cli
