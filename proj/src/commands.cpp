#include "vortexpatch/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <thread>

#include "vortexpatch/dynamics.hpp"
#include "vortexpatch/elliptic.hpp"
#include "vortexpatch/errors.hpp"
#include "vortexpatch/io.hpp"
#include "vortexpatch/stability.hpp"

namespace fs = std::filesystem;

namespace vpl {

namespace {

constexpr double kPi = 3.14159265358979323846;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

double patch_radius_estimate(const Grid& grid, const Field& omega, double lambda) {
  double support = measure_above(grid, omega, 0.5 * lambda);
  return std::sqrt(support / kPi);
}

Vec2 random_seed_center(const Grid& grid, const PatchSpec& spec, std::mt19937_64& rng) {
  const Domain& dom = grid.domain();
  double a = std::sqrt(spec.mass / (spec.lambda * kPi));
  Vec2 lo = dom.bbox_min(), hi = dom.bbox_max();
  for (int tries = 0; tries < 1000; ++tries) {
    Vec2 p{lo.x + uniform01(rng) * (hi.x - lo.x), lo.y + uniform01(rng) * (hi.y - lo.y)};
    if (!dom.contains(p)) continue;
    // keep the seed clear of the boundary when it fits
    double room;
    if (dom.kind != DomainKind::rectangle) {
      double r = norm(p - dom.center);
      room = dom.kind == DomainKind::disk ? dom.outer - r
                                          : std::min(dom.outer - r, r - dom.inner);
    } else {
      room = std::min({p.x, dom.width - p.x, p.y, dom.height - p.y});
    }
    if (room < 0.5 * a && tries < 900) continue;
    return p;
  }
  return {0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
}

struct SolveSettings {
  double tol;
  int max_iter;
  int restarts;
  std::uint64_t seed;
};

SolveSettings solve_settings(const Config& cfg) {
  SolveSettings s;
  s.tol = cfg.get_double("solver.tol", 1e-8);
  s.max_iter = cfg.get_int("solver.max_iter", 500);
  s.restarts = cfg.get_int("solver.restarts", 1);
  s.seed = cfg.get_uint64("run.seed", 12345);
  if (!(s.tol > 0.0)) throw ConfigError("solver.tol must be positive");
  if (s.restarts < 1) throw ConfigError("solver.restarts must be >= 1");
  return s;
}

struct MultiStartOutcome {
  MaximizerResult best;
  bool tie_flag = false;
  bool converged = false;
};

MultiStartOutcome solve_multistart(const Grid& grid, const PatchSpec& spec,
                                   const SolveSettings& s) {
  std::mt19937_64 rng(s.seed);
  std::vector<MaximizerResult> results;
  for (int r = 0; r < s.restarts; ++r) {
    Field init = r == 0 ? uniform_field(grid, spec)
                        : seed_patch(grid, spec, random_seed_center(grid, spec, rng));
    try {
      results.push_back(solve_maximizer(grid, spec, init, s.tol, s.max_iter));
    } catch (MaximizerNotConverged& e) {
      results.push_back(std::move(e.partial));
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < results.size(); ++k)
    if (results[k].energy > results[best].energy) best = k;
  MultiStartOutcome out;
  for (std::size_t k = 0; k < results.size(); ++k) {
    if (k == best) continue;
    if (std::abs(results[k].energy - results[best].energy) <= 1e-6 * results[best].energy)
      out.tie_flag = true;  // potential non-isolated maximizer set
  }
  out.converged = results[best].converged;
  out.best = std::move(results[best]);
  return out;
}

Field initial_field_for_evolve(const Config& cfg, const Grid& grid, const PatchSpec& spec) {
  std::string initial = cfg.get_string("evolve.initial", "maximizer");
  if (initial == "maximizer") return solve_multistart(grid, spec, solve_settings(cfg)).best.omega;
  if (initial == "uniform") return uniform_field(grid, spec);
  return load_field_for_grid(initial, grid);
}

EvolutionParams evolution_params(const Config& cfg) {
  EvolutionParams p;
  p.cfl = cfg.get_double("dynamics.cfl", 0.4);
  p.dt_max = cfg.get_double("dynamics.dt_max", 0.0);
  p.limiter = limiter_from_name(cfg.get_string("dynamics.limiter", "superbee"));
  p.profile_levels = cfg.get_int("dynamics.profile_levels", 64);
  p.sample_interval = cfg.get_double("dynamics.sample_interval", 0.0);
  if (!(p.cfl > 0.0 && p.cfl <= 1.0)) throw ConfigError("dynamics.cfl must be in (0,1]");
  return p;
}

double horizon_from_config(const Config& cfg, const Grid& grid, const Field& omega,
                           const PatchSpec& spec, const std::string& section) {
  if (cfg.has(section + ".T")) return cfg.get_double(section + ".T");
  double turnovers = cfg.get_double(section + ".turnovers", 10.0);
  return turnovers * eddy_turnover_time(grid, omega, spec);
}

}  // namespace

int cmd_solve(const Config& cfg, const fs::path& out_dir) {
  Grid grid = grid_from_config(cfg);
  PatchSpec spec = patch_spec_from_config(cfg);
  SolveSettings s = solve_settings(cfg);
  fs::create_directories(out_dir);

  MultiStartOutcome outcome = solve_multistart(grid, spec, s);
  const MaximizerResult& res = outcome.best;

  write_field_dump(out_dir / "maximizer.vpl", grid, res.omega);
  write_field_dump(out_dir / "stream.vpl", grid, res.psi);

  auto echo = cfg.echo_lines();
  {
    CsvWriter csv(out_dir / "energy_history.csv", echo, {"iteration", "energy", "l1_change", "mu"});
    for (std::size_t k = 0; k < res.l1_change_history.size(); ++k)
      csv.row({static_cast<double>(k + 1), res.energy_history[k + 1],
               res.l1_change_history[k], res.mu_history[k]});
  }
  {
    CsvWriter csv(out_dir / "summary.csv", echo,
                  {"energy", "mu", "iterations", "converged", "characterization_residual",
                   "steadiness_residual", "radius_estimate", "energy_tie_flag"});
    csv.row({res.energy, res.mu, static_cast<double>(res.iterations),
             res.converged ? 1.0 : 0.0, res.characterization_residual, res.steadiness_residual,
             patch_radius_estimate(grid, res.omega, spec.lambda), outcome.tie_flag ? 1.0 : 0.0});
  }
  if (!outcome.converged) {
    std::cerr << "solve: maximizer iteration did not converge within solver.max_iter; "
                 "partial outputs written\n";
    return kExitConvergenceFailure;
  }
  return kExitOk;
}

int cmd_evolve(const Config& cfg, const fs::path& out_dir) {
  Grid grid = grid_from_config(cfg);
  PatchSpec spec = patch_spec_from_config(cfg);
  EvolutionParams params = evolution_params(cfg);
  bool dump_fields = cfg.get_bool("output.dump_fields", false);
  fs::create_directories(out_dir);

  Field omega0 = initial_field_for_evolve(cfg, grid, spec);
  double T = horizon_from_config(cfg, grid, omega0, spec, "dynamics");

  CsvWriter csv(out_dir / "diagnostics.csv", cfg.echo_lines(),
                {"t", "dt", "E", "mass", "l1", "l2", "l4", "min_w", "max_w"});
  EvolutionState last_good;
  int sample_id = 0;
  auto on_sample = [&](const EvolutionState& s, const Diagnostics& d) {
    csv.row({d.t, d.dt, d.energy, d.mass, d.l1, d.l2, d.l4, d.min_w, d.max_w});
    last_good = s;
    if (dump_fields) {
      char name[48];
      std::snprintf(name, sizeof(name), "field_%05d.vpl", sample_id);
      write_field_dump(out_dir / name, grid, s.omega);
    }
    ++sample_id;
  };
  try {
    evolve(grid, omega0, T, spec, params, on_sample);
  } catch (const BlowUpError& e) {
    std::cerr << "evolve: " << e.what() << "\n";
    if (!last_good.omega.empty())
      write_field_dump(out_dir / "last_good.vpl", grid, last_good.omega);
    return kExitBlowUp;
  }
  return kExitOk;
}

int cmd_stability(const Config& cfg, const fs::path& out_dir, int threads) {
  Grid grid = grid_from_config(cfg);
  PatchSpec spec = patch_spec_from_config(cfg);
  EvolutionParams params = evolution_params(cfg);
  fs::create_directories(out_dir);

  std::vector<double> deltas = cfg.get_double_list("stability.delta");
  if (deltas.empty()) throw ConfigError("stability.delta: empty perturbation list");
  std::vector<std::string> kinds =
      cfg.has("stability.kinds") ? cfg.get_string_list("stability.kinds")
                                 : std::vector<std::string>{"translate"};
  std::vector<double> ps = cfg.has("stability.p") ? cfg.get_double_list("stability.p")
                                                  : std::vector<double>{2.0};
  std::vector<double> seeds = cfg.has("stability.seeds")
                                  ? cfg.get_double_list("stability.seeds")
                                  : std::vector<double>{static_cast<double>(
                                        cfg.get_uint64("run.seed", 12345))};
  double eps_factor = cfg.get_double("stability.epsilon_factor", 4.0);

  // maximizer: load or compute
  Field omega_star;
  if (cfg.has("stability.maximizer"))
    omega_star = load_field_for_grid(cfg.get_string("stability.maximizer"), grid);
  else
    omega_star = solve_multistart(grid, spec, solve_settings(cfg)).best.omega;

  MaximizerSetModel model;
  if (grid.domain().kind == DomainKind::annulus)
    model = orbit_model(grid, omega_star, spec, cfg.get_int("stability.n_theta", 64));
  else
    model = single_maximizer_model(omega_star);

  double T = horizon_from_config(cfg, grid, omega_star, spec, "stability");

  struct Entry {
    ExperimentConfig config;
    std::string name;
    ExperimentRecord record;
    bool failed = false;
    std::string error;
  };
  std::vector<Entry> entries;
  for (const auto& kind : kinds)
    for (double delta : deltas)
      for (double p : ps)
        for (double seed : seeds) {
          Entry e;
          e.config.kind = perturbation_kind_from_name(kind);
          e.config.delta = delta;
          e.config.p = static_cast<int>(p);
          e.config.seed = static_cast<std::uint64_t>(seed);
          e.config.T = T;
          e.name = "experiment_" + kind + "_d" + short_num(delta) + "_p" + short_num(p) +
                   "_s" + short_num(seed);
          entries.push_back(std::move(e));
        }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= entries.size()) return;
      Entry& e = entries[k];
      try {
        e.record = run_orbital_experiment(e.config, model, grid, spec, params);
      } catch (const std::exception& ex) {
        e.failed = true;
        e.error = ex.what();
      }
    }
  };
  int nthreads = std::max(1, threads);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  auto echo = cfg.echo_lines();
  bool any_blowup = false;
  for (const Entry& e : entries) {
    if (e.failed) continue;
    CsvWriter csv(out_dir / (e.name + ".csv"), echo,
                  {"t", "dist_p1", "dist_p2", "E", "mass", "profile_drift"});
    for (const auto& s : e.record.series)
      csv.row({s.t, s.dist_p1, s.dist_p, s.energy, s.mass, s.profile_drift});
    double eps = eps_factor * e.config.delta;
    csv.raw_line("# summary sup_dist=" + format_double(e.record.sup_dist) +
                 " baseline_sup=" + format_double(e.record.baseline_sup_dist) +
                 " excess=" + format_double(e.record.excess_sup_dist) +
                 " epsilon=" + format_double(eps) +
                 " verdict=" + (e.record.excess_sup_dist <= eps ? "PASS" : "FAIL"));
    if (!e.record.completed) any_blowup = true;
  }
  {
    CsvWriter csv(out_dir / "summary.csv", echo,
                  {"delta", "kind", "p", "seed", "initial_dist", "sup_dist", "baseline_sup",
                   "excess", "pass"});
    for (const Entry& e : entries) {
      if (e.failed) continue;
      double eps = eps_factor * e.config.delta;
      csv.row({e.config.delta, static_cast<double>(static_cast<int>(e.config.kind)),
               static_cast<double>(e.config.p), static_cast<double>(e.config.seed),
               e.record.initial_dist, e.record.sup_dist, e.record.baseline_sup_dist,
               e.record.excess_sup_dist, e.record.excess_sup_dist <= eps ? 1.0 : 0.0});
    }
  }
  for (const Entry& e : entries)
    if (e.failed) {
      std::cerr << "stability: " << e.name << " failed: " << e.error << "\n";
      return kExitConfigError;
    }
  return any_blowup ? kExitBlowUp : kExitOk;
}

namespace {

struct OracleCheck {
  std::string name;
  double measured;
  double bound;
  bool pass() const { return measured <= bound; }
};

OracleCheck radial_poisson_check(int resolution) {
  Grid grid = build_grid(Domain::disk(1.0), resolution);
  Field omega = zero_field(grid);
  for (int c : grid.interior_cells()) omega[c] = 1.0;
  Field psi = solve_stream(grid, omega);
  double err = 0.0;
  for (int c : grid.interior_cells()) {
    Vec2 p = grid.cell_center(c % grid.nx(), c / grid.nx());
    double exact = 0.25 * (1.0 - dot(p, p));
    err = std::max(err, std::abs(psi[c] - exact));
  }
  double h = grid.h();
  return {"radial_poisson_psi_max_error", err, 0.5 * h * h * std::abs(std::log(h))};
}

OracleCheck threshold_fuzz_check(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  int mismatches = 0;
  for (int trial = 0; trial < trials; ++trial) {
    int res = 8 + static_cast<int>(rng() % 25);  // grids up to 32x32
    Grid grid = build_grid(Domain::disk(1.0), res);
    PatchSpec spec;
    spec.lambda = 0.5 + 2.0 * uniform01(rng);
    double capacity = spec.lambda * grid.cell_area() * static_cast<double>(grid.interior_count());
    spec.mass = capacity * (0.05 + 0.9 * uniform01(rng));
    Field psi = zero_field(grid);
    for (int c : grid.interior_cells()) psi[c] = uniform01(rng);

    auto thr = threshold_level(psi, spec, grid);
    Field got = field_from_threshold(thr, spec, grid);

    // independent sort-and-accumulate oracle
    std::vector<int> order = grid.interior_cells();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (psi[a] != psi[b]) return psi[a] > psi[b];
      return a < b;
    });
    Field want = zero_field(grid);
    double remaining = spec.mass;
    const double cell_mass = spec.lambda * grid.cell_area();
    for (int c : order) {
      if (remaining <= 0.0) break;
      double take = std::min(cell_mass, remaining);
      want[c] = spec.lambda * take / cell_mass;
      remaining -= take;
    }
    for (int c : grid.interior_cells())
      if (std::abs(got[c] - want[c]) > 1e-9 * spec.lambda) {
        ++mismatches;
        break;
      }
  }
  return {"threshold_sort_oracle_mismatches", static_cast<double>(mismatches), 0.0};
}

OracleCheck images_kernel_check(int resolution, std::uint64_t seed) {
  Grid grid = build_grid(Domain::disk(1.0), resolution);
  PatchSpec spec{4.0 / kPi, 1.0};
  Field omega = seed_patch(grid, spec, {0.1, -0.05});
  Field psi = solve_stream(grid, omega);
  std::mt19937_64 rng(seed);
  double err = 0.0;
  int tested = 0;
  while (tested < 64) {
    int c = grid.interior_cells()[rng() % grid.interior_count()];
    Vec2 p = grid.cell_center(c % grid.nx(), c / grid.nx());
    if (norm(p) > 0.95) continue;  // keep quadrature points off the boundary
    err = std::max(err, std::abs(psi[c] - kernel_stream_at(grid, omega, p)));
    ++tested;
  }
  double h = grid.h();
  return {"images_kernel_vs_grid_solve", err, 4.0 * h * h * std::abs(std::log(h))};
}

}  // namespace

int cmd_oracle(const Config& cfg, const fs::path& out_dir) {
  int resolution = cfg.get_int("grid.resolution", 64);
  std::uint64_t seed = cfg.get_uint64("run.seed", 12345);
  int trials = cfg.get_int("oracle.threshold_trials", 1000);
  fs::create_directories(out_dir);

  std::vector<OracleCheck> checks;
  checks.push_back(radial_poisson_check(resolution));
  checks.push_back(threshold_fuzz_check(seed, trials));
  checks.push_back(images_kernel_check(resolution, seed));

  CsvWriter csv(out_dir / "oracle_report.csv", cfg.echo_lines(),
                {"check", "measured", "bound", "pass"});
  bool all_pass = true;
  for (const auto& c : checks) {
    csv.raw_line(c.name + "," + format_double(c.measured) + "," + format_double(c.bound) + "," +
                 (c.pass() ? "1" : "0"));
    std::cout << (c.pass() ? "PASS " : "FAIL ") << c.name << ": measured "
              << format_double(c.measured) << ", bound " << format_double(c.bound) << "\n";
    if (!c.pass()) {
      std::cerr << "oracle check failed: " << c.name << "\n";
      all_pass = false;
    }
  }
  return all_pass ? kExitOk : kExitOracleFailure;
}

}  // namespace vpl
