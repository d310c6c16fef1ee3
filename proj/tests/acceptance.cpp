// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit when
// any criterion fails. Expensive shared artifacts (maximizers, long
// evolutions) are computed once and reused.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "vortexpatch/commands.hpp"
#include "vortexpatch/config.hpp"
#include "vortexpatch/dynamics.hpp"
#include "vortexpatch/elliptic.hpp"
#include "vortexpatch/grid.hpp"
#include "vortexpatch/maximizer.hpp"
#include "vortexpatch/stability.hpp"

using namespace vpl;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

int g_failures = 0;

void report(int n, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", n, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct DiskCase {
  Grid grid;
  PatchSpec spec;
  MaximizerResult result;
};

DiskCase solve_disk(int resolution) {
  Grid grid = build_grid(Domain::disk(1.0), resolution);
  PatchSpec spec{4.0 / kPi, 1.0};
  MaximizerResult res = solve_maximizer(grid, spec, uniform_field(grid, spec));
  return {std::move(grid), spec, std::move(res)};
}

Field exact_disk_patch(const Grid& g, double radius, double lambda) {
  Field w = zero_field(g);
  for (int c : g.interior_cells()) {
    int i = c % g.nx(), j = c / g.nx();
    if (norm(g.cell_center(i, j)) < radius) w[c] = lambda;
  }
  return w;
}

// --- criterion 1: disk maximizer radius oracle ------------------------------

void criterion_1(const DiskCase& d256) {
  const Grid& g = d256.grid;
  double target_r = 0.5;  // 1/sqrt(lambda*pi) with lambda = 4/pi
  double area = measure_above(g, d256.result.omega, d256.spec.lambda / 2.0);
  double r_est = std::sqrt(area / kPi);
  double symm = 0.0;  // L1 of (omega/lambda - exact indicator) = symmetric difference
  for (int c : g.interior_cells()) {
    int i = c % g.nx(), j = c / g.nx();
    double exact = norm(g.cell_center(i, j)) < target_r ? 1.0 : 0.0;
    symm += std::abs(d256.result.omega[c] / d256.spec.lambda - exact) * g.cell_area();
  }
  double r_tol = 2.0 * g.h();
  double symm_bound = 4.0 * g.h() * (2.0 * kPi * target_r);
  bool pass = d256.result.converged && std::abs(r_est - target_r) < r_tol && symm <= symm_bound;
  report(1, "disk maximizer radius oracle", pass,
         "radius " + fmt(r_est) + " vs 0.5 (tol " + fmt(r_tol) + "), symmdiff " + fmt(symm) +
             " (bound " + fmt(symm_bound) + ")");
}

// --- criterion 2: ascent monotonicity ---------------------------------------

void criterion_2() {
  Grid g = build_grid(Domain::disk(1.0), 64);
  PatchSpec spec{4.0 / kPi, 1.0};
  std::mt19937_64 rng(20240819);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Field w = zero_field(g);
    double mass = 0.0;
    for (int c : g.interior_cells()) {
      w[c] = spec.lambda * u(rng);
      mass += w[c] * g.cell_area();
    }
    for (int c : g.interior_cells()) w[c] *= spec.mass / mass;
    w = project_to_admissible(w, spec, g);
    double e0 = energy(g, w);
    double e1 = energy(g, ascent_step(w, spec, g));
    double rel = (e0 - e1) / std::abs(e0);
    worst = std::max(worst, rel);
    if (rel > 1e-12) ++violations;
  }
  report(2, "energy ascent monotonicity", violations == 0,
         "50 random starts, violations " + std::to_string(violations) + ", worst rel decrease " +
             fmt(worst));
}

// --- criterion 3: patchhood of fixed points ---------------------------------

void criterion_3(const DiskCase& d128, const DiskCase& d256) {
  auto interface_measure = [](const Grid& g) {
    int cells = 0;
    for (int c : g.interior_cells()) {
      int i = c % g.nx(), j = c / g.nx();
      if (std::abs(norm(g.cell_center(i, j)) - 0.5) <= g.h()) ++cells;
    }
    return cells * g.cell_area();
  };
  double r128 = d128.result.characterization_residual;
  double r256 = d256.result.characterization_residual;
  bool within = r128 <= interface_measure(d128.grid) && r256 <= interface_measure(d256.grid);
  // decrease by >= 1.5x, with an absolute floor of one cell (a residual that
  // is already below one cell's measure cannot meaningfully decrease)
  bool decreases = r256 <= std::max(r128 / 1.5, d256.grid.cell_area());
  report(3, "patchhood of fixed points", within && decreases,
         "characterization residual " + fmt(r128) + " @128 -> " + fmt(r256) + " @256 (interface " +
             fmt(interface_measure(d128.grid)) + " / " + fmt(interface_measure(d256.grid)) + ")");
}

// --- criterion 4: steadiness residual ---------------------------------------

void criterion_4(const DiskCase& d256) {
  const Grid& g = d256.grid;
  auto test_set = default_test_set(g);
  double got = steadiness_residual(d256.result.omega, d256.result.psi, g, test_set);
  // Radial oracle: the radius-ordered patch with the same (lambda, mass).
  // The sharp r<1/2 indicator is not in K on the grid (its cell mass is
  // ~1.002, not 1) and its residual swings by >10x with the staircase
  // phase of the radius, so the admissible same-mass radial field is the
  // fair reference.
  Field oracle = seed_patch(g, d256.spec, {0.0, 0.0});
  Field psi_o = solve_stream(g, oracle);
  double ref = steadiness_residual(oracle, psi_o, g, test_set);
  bool pass = got <= 10.0 * ref;
  report(4, "weak steadiness residual", pass,
         "maximizer " + fmt(got) + " vs 10 x analytic oracle " + fmt(ref));
}

// --- criterion 5: threshold oracle fuzz -------------------------------------

void criterion_5() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int res = 8 + static_cast<int>(rng() % 25);
    Domain dom = (trial % 2 == 0) ? Domain::disk(1.0) : Domain::rectangle(1.0, 1.0);
    Grid g = build_grid(dom, res);
    PatchSpec spec{0.5 + 2.0 * u(rng), 0.0};
    double capacity = spec.lambda * g.cell_area() * static_cast<double>(g.interior_count());
    spec.mass = capacity * (0.05 + 0.9 * u(rng));
    Field psi = zero_field(g);
    for (int c : g.interior_cells()) psi[c] = u(rng);

    Field got = field_from_threshold(threshold_level(psi, spec, g), spec, g);

    std::vector<int> order = g.interior_cells();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (psi[a] != psi[b]) return psi[a] > psi[b];
      return a < b;
    });
    Field want = zero_field(g);
    double remaining = spec.mass;
    const double cell_mass = spec.lambda * g.cell_area();
    for (int c : order) {
      if (remaining <= 0.0) break;
      double take = std::min(cell_mass, remaining);
      want[c] = spec.lambda * take / cell_mass;
      remaining -= take;
    }
    for (int c : g.interior_cells())
      if (std::abs(got[c] - want[c]) > 1e-9 * spec.lambda) {
        ++mismatches;
        break;
      }
  }
  report(5, "threshold oracle equivalence", mismatches == 0,
         "1000 fuzz trials, mismatching trials " + std::to_string(mismatches));
}

// --- criterion 6: conservation under evolution ------------------------------

struct DriftSample {
  double energy_drift = 0.0;
  double mass_drift = 0.0;
  double profile = 0.0;
};

DriftSample evolution_drift(int resolution, double T) {
  DiskCase d = solve_disk(resolution);
  EvolveResult res = evolve(d.grid, d.result.omega, T, d.spec, {});
  const Diagnostics& first = res.samples.front();
  DriftSample out;
  DistributionProfile p0 = first.profile;
  for (const Diagnostics& s : res.samples) {
    out.energy_drift = std::max(out.energy_drift,
                                std::abs(s.energy - first.energy) / std::abs(first.energy));
    out.mass_drift = std::max(out.mass_drift, std::abs(s.mass - first.mass) / first.mass);
    out.profile = std::max(out.profile, profile_drift(p0, s.profile));
  }
  return out;
}

void criterion_6() {
  // horizon: 10 eddy turnovers of the disk maximizer (resolution-independent)
  DiskCase d64 = solve_disk(64);
  double T = 10.0 * eddy_turnover_time(d64.grid, d64.result.omega, d64.spec);

  DriftSample s64 = evolution_drift(64, T);
  DriftSample s128 = evolution_drift(128, T);
  DriftSample s256 = evolution_drift(256, T);

  double e_order = std::log2(s64.energy_drift / s256.energy_drift) / 2.0;
  double p_order = std::log2(s64.profile / s256.profile) / 2.0;
  bool pass = s256.mass_drift <= 1e-9 && s256.energy_drift <= 1e-3 &&
              s128.energy_drift < s64.energy_drift && s256.energy_drift < s128.energy_drift &&
              s128.profile < s64.profile && s256.profile < s128.profile && e_order >= 1.0 &&
              p_order >= 1.0;
  report(6, "conservation under evolution", pass,
         "T=" + fmt(T) + ", @256 mass drift " + fmt(s256.mass_drift) + ", energy drift " +
             fmt(s256.energy_drift) + "; energy order " + fmt(e_order) + ", profile order " +
             fmt(p_order));
}

// --- criterion 7: orbital stability sweep -----------------------------------

void criterion_7() {
  DiskCase d = solve_disk(128);
  double T = 10.0 * eddy_turnover_time(d.grid, d.result.omega, d.spec);
  EvolutionParams params;
  params.sample_interval = T / 50.0;

  std::vector<double> deltas{0.025, 0.05, 0.1};
  std::vector<double> excess, sup;
  bool pass = true;
  std::ostringstream detail;
  for (double delta : deltas) {
    ExperimentConfig cfg;
    cfg.delta = delta;
    cfg.p = 1;
    cfg.T = T;
    cfg.kind = PerturbationKind::translate;
    cfg.seed = 12;
    ExperimentRecord rec = run_isolated_experiment(cfg, d.result.omega, d.grid, d.spec, params);
    excess.push_back(rec.excess_sup_dist);
    sup.push_back(rec.sup_dist);
    pass = pass && rec.completed && rec.excess_sup_dist <= 4.0 * delta;
    detail << "d=" << fmt(delta) << ": excess " << fmt(rec.excess_sup_dist) << " (bound "
           << fmt(4.0 * delta) << ") ";
  }
  for (std::size_t k = 1; k < sup.size(); ++k) pass = pass && sup[k] >= sup[k - 1] - 1e-12;
  report(7, "orbital stability sweep", pass, detail.str() + "; sup non-decreasing in delta");
}

// --- criterion 8: annulus orbit consistency ---------------------------------

void criterion_8() {
  Grid g = build_grid(Domain::annulus(0.4, 1.0), 128);
  PatchSpec spec{4.0, 0.3};
  double rho = 0.7;  // mid-circle radius

  std::vector<MaximizerResult> results;
  for (int q = 0; q < 4; ++q) {
    double theta = q * kPi / 2.0;
    Field init = seed_patch(g, spec, {rho * std::cos(theta), rho * std::sin(theta)});
    results.push_back(solve_maximizer(g, spec, init));
  }
  double emin = results[0].energy, emax = results[0].energy;
  for (const auto& r : results) {
    emin = std::min(emin, r.energy);
    emax = std::max(emax, r.energy);
  }
  double rel_spread = (emax - emin) / std::abs(emax);

  MaximizerSetModel model = orbit_model(g, results[0].omega, spec, 64);
  // sampling-gap bound: largest L1 distance between adjacent orbit samples
  double gap = 0.0;
  for (std::size_t k = 0; k < model.representatives.size(); ++k) {
    const Field& a = model.representatives[k];
    const Field& b = model.representatives[(k + 1) % model.representatives.size()];
    gap = std::max(gap, lp_distance(a, b, 1, g));
  }
  Field rotated = rotate_patch(g, results[0].omega, 0.37, {0.0, 0.0}, spec);
  double dist = distance_to_set(rotated, model, 1, g, spec);

  bool pass = rel_spread <= 1e-6 && dist <= gap;
  for (const auto& r : results) pass = pass && r.converged;
  report(8, "annulus orbit consistency", pass,
         "energy spread " + fmt(rel_spread) + " (<= 1e-6), rotated-copy distance " + fmt(dist) +
             " <= sampling gap " + fmt(gap));
}

// --- criterion 9: elliptic oracle -------------------------------------------

double radial_solve_error(int resolution) {
  Grid g = build_grid(Domain::disk(1.0), resolution);
  Field omega = zero_field(g);
  for (int c : g.interior_cells()) omega[c] = 1.0;
  Field psi = solve_stream(g, omega);
  double err = 0.0;
  for (int c : g.interior_cells()) {
    int i = c % g.nx(), j = c / g.nx();
    Vec2 p = g.cell_center(i, j);
    err = std::max(err, std::abs(psi[c] - (1.0 - dot(p, p)) / 4.0));
  }
  return err;
}

void criterion_9() {
  double e64 = radial_solve_error(64);
  double e128 = radial_solve_error(128);
  double e256 = radial_solve_error(256);
  double order = std::log2(e64 / e256) / 2.0;

  Grid g = build_grid(Domain::disk(1.0), 64);
  Field omega = exact_disk_patch(g, 0.5, 4.0 / kPi);
  Field psi = solve_stream(g, omega);
  double kerr = 0.0;
  for (Vec2 x : {Vec2{0.0, 0.0}, Vec2{0.35, 0.2}, Vec2{-0.6, 0.15}, Vec2{0.1, -0.45}}) {
    int i = static_cast<int>((x.x - g.origin().x) / g.h());
    int j = static_cast<int>((x.y - g.origin().y) / g.h());
    kerr = std::max(kerr, std::abs(kernel_stream_at(g, omega, x) - psi[g.index(i, j)]));
  }
  double kbound = 10.0 * g.h() * g.h() * std::abs(std::log(g.h()));
  bool pass = order >= 1.7 && e128 < e64 && e256 < e128 && kerr <= kbound;
  report(9, "elliptic oracle", pass,
         "max-norm errors " + fmt(e64) + "/" + fmt(e128) + "/" + fmt(e256) + ", order " +
             fmt(order) + "; kernel gap " + fmt(kerr) + " (bound " + fmt(kbound) + ")");
}

// --- criterion 10: determinism ----------------------------------------------

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[fs::relative(e.path(), dir).string()] = {std::istreambuf_iterator<char>(in),
                                                 std::istreambuf_iterator<char>()};
  }
  return out;
}

void criterion_10() {
  const std::string config_text =
      "[domain]\nkind = disk\nradius = 1.0\n"
      "[grid]\nresolution = 64\n"
      "[patch]\nlambda = 1.2732395447351628\nmass = 1.0\n"
      "[solver]\nrestarts = 2\n"
      "[run]\nseed = 7\n"
      "[dynamics]\nT = 1.0\n"
      "[evolve]\ninitial = maximizer\n";
  Config cfg = Config::from_string(config_text);

  fs::path base = fs::temp_directory_path() / "vpl_acceptance_determinism";
  fs::remove_all(base);
  bool pass = true;
  std::string detail;
  for (const char* sub : {"solve", "evolve"}) {
    fs::path a = base / (std::string(sub) + "_a");
    fs::path b = base / (std::string(sub) + "_b");
    int ra, rb;
    if (std::string(sub) == "solve") {
      ra = cmd_solve(cfg, a);
      rb = cmd_solve(cfg, b);
    } else {
      ra = cmd_evolve(cfg, a);
      rb = cmd_evolve(cfg, b);
    }
    auto da = read_dir(a), db = read_dir(b);
    bool same = (ra == rb) && (da == db) && !da.empty();
    if (!same) {
      pass = false;
      detail += std::string(sub) + " outputs differ; ";
    } else {
      detail += std::string(sub) + ": " + std::to_string(da.size()) + " files identical; ";
    }
  }
  fs::remove_all(base);
  report(10, "byte-identical reruns", pass, detail);
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  try {
    DiskCase d128 = solve_disk(128);
    DiskCase d256 = solve_disk(256);

    criterion_1(d256);
    criterion_2();
    criterion_3(d128, d256);
    criterion_4(d256);
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance suite aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d of 10 criteria passed\n", 10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
