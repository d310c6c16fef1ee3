#include "vortexpatch/stability.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vortexpatch/errors.hpp"

namespace vpl {

namespace {
constexpr double kPi = 3.14159265358979323846;

Vec2 centroid(const Grid& grid, const Field& omega) {
  double m = 0.0, sx = 0.0, sy = 0.0;
  for (int c : grid.interior_cells()) {
    double w = omega[c];
    if (w == 0.0) continue;
    Vec2 p = grid.cell_center(c % grid.nx(), c / grid.nx());
    m += w;
    sx += w * p.x;
    sy += w * p.y;
  }
  if (m == 0.0) return {0.0, 0.0};
  return {sx / m, sy / m};
}

double bilinear(const Grid& grid, const Field& f, Vec2 p) {
  // cell-center based bilinear interpolation, zero outside the mask
  double gx = (p.x - grid.origin().x) / grid.h() - 0.5;
  double gy = (p.y - grid.origin().y) / grid.h() - 0.5;
  int i0 = static_cast<int>(std::floor(gx));
  int j0 = static_cast<int>(std::floor(gy));
  double fx = gx - i0, fy = gy - j0;
  auto val = [&](int i, int j) { return grid.interior(i, j) ? f[grid.index(i, j)] : 0.0; };
  return (1 - fx) * (1 - fy) * val(i0, j0) + fx * (1 - fy) * val(i0 + 1, j0) +
         (1 - fx) * fy * val(i0, j0 + 1) + fx * fy * val(i0 + 1, j0 + 1);
}

/// Greedy patch fill: rank cells by `score` (descending; ties broken by
/// distance to `anchor`), assign lambda until the mass budget is spent, with
/// one fractional cell so the mass is exact.
Field fill_patch_by_score(const Grid& grid, const Field& score, Vec2 anchor,
                          const PatchSpec& spec) {
  std::vector<int> order;
  order.reserve(grid.interior_count());
  for (int c : grid.interior_cells())
    if (score[c] > 0.0) order.push_back(c);
  auto key = [&](int c) {
    Vec2 p = grid.cell_center(c % grid.nx(), c / grid.nx());
    return dot(p - anchor, p - anchor);
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (score[a] != score[b]) return score[a] > score[b];
    double ka = key(a), kb = key(b);
    if (ka != kb) return ka < kb;
    return a < b;
  });
  Field out = zero_field(grid);
  const double cell_mass = spec.lambda * grid.cell_area();
  double remaining = spec.mass;
  for (int c : order) {
    if (remaining <= 0.0) break;
    double take = std::min(cell_mass, remaining);
    out[c] = spec.lambda * take / cell_mass;
    remaining -= take;
  }
  if (remaining > kMassTol * spec.mass)
    throw InfeasiblePerturbation("patch fill: not enough positive-score cells for the mass");
  return out;
}

std::vector<ExperimentSample> run_series(const Field& omega0, const MaximizerSetModel& model,
                                         const ExperimentConfig& config, const Grid& grid,
                                         const PatchSpec& spec, const EvolutionParams& params,
                                         double T, bool& completed) {
  std::vector<ExperimentSample> series;
  DistributionProfile profile0 =
      distribution_profile(grid, omega0, spec.lambda, params.profile_levels);
  auto on_sample = [&](const EvolutionState& s, const Diagnostics& d) {
    ExperimentSample e;
    e.t = s.t;
    e.dist_p1 = distance_to_set(s.omega, model, 1, grid, spec);
    e.dist_p = config.p == 1 ? e.dist_p1 : distance_to_set(s.omega, model, config.p, grid, spec);
    e.energy = d.energy;
    e.mass = d.mass;
    e.profile_drift = profile_drift(d.profile, profile0);
    series.push_back(e);
  };
  completed = true;
  try {
    evolve(grid, omega0, T, spec, params, on_sample);
  } catch (const BlowUpError&) {
    completed = false;  // keep the partial series
  }
  return series;
}

}  // namespace

double lp_distance(const Field& a, const Field& b, int p, const Grid& grid) {
  if (a.size() != grid.mask().size() || b.size() != grid.mask().size())
    throw std::invalid_argument("lp_distance: field size does not match grid");
  if (p < 1) throw std::invalid_argument("lp_distance: p must be >= 1");
  double sum = 0.0;
  for (int c : grid.interior_cells()) sum += std::pow(std::abs(a[c] - b[c]), p);
  return std::pow(sum * grid.cell_area(), 1.0 / p);
}

MaximizerSetModel single_maximizer_model(Field omega_star) {
  MaximizerSetModel m;
  m.representatives.push_back(std::move(omega_star));
  return m;
}

Field rotate_patch(const Grid& grid, const Field& omega, double theta, Vec2 center,
                   const PatchSpec& spec) {
  Field score = zero_field(grid);
  double ct = std::cos(theta), st = std::sin(theta);
  for (int c : grid.interior_cells()) {
    Vec2 p = grid.cell_center(c % grid.nx(), c / grid.nx());
    Vec2 d = p - center;
    // pull back by -theta
    Vec2 q{center.x + ct * d.x + st * d.y, center.y - st * d.x + ct * d.y};
    score[c] = bilinear(grid, omega, q);
  }
  Vec2 anchor = centroid(grid, score);
  return fill_patch_by_score(grid, score, anchor, spec);
}

MaximizerSetModel orbit_model(const Grid& grid, const Field& base, const PatchSpec& spec,
                              int n_theta) {
  if (n_theta < 1) throw std::invalid_argument("orbit_model: n_theta must be >= 1");
  MaximizerSetModel m;
  m.orbit = true;
  m.center = grid.domain().center;
  m.sample_step = 2.0 * kPi / n_theta;
  m.representatives.reserve(n_theta);
  for (int k = 0; k < n_theta; ++k)
    m.representatives.push_back(rotate_patch(grid, base, k * m.sample_step, m.center, spec));
  return m;
}

double distance_to_set(const Field& omega, const MaximizerSetModel& model, int p,
                       const Grid& grid, const PatchSpec& spec) {
  if (model.representatives.empty())
    throw std::invalid_argument("distance_to_set: empty model");
  double best = lp_distance(omega, model.representatives[0], p, grid);
  std::size_t best_k = 0;
  for (std::size_t k = 1; k < model.representatives.size(); ++k) {
    double d = lp_distance(omega, model.representatives[k], p, grid);
    if (d < best) {
      best = d;
      best_k = k;
    }
  }
  if (model.orbit && model.sample_step > 0.0) {
    // refine the rotation angle around the best sample
    const Field& base = model.representatives[0];
    double theta0 = static_cast<double>(best_k) * model.sample_step;
    double step = model.sample_step / 8.0;
    for (int k = -8; k <= 8; ++k) {
      if (k == 0) continue;
      Field cand = rotate_patch(grid, base, theta0 + k * step, model.center, spec);
      best = std::min(best, lp_distance(omega, cand, p, grid));
    }
  }
  return best;
}

PerturbationKind perturbation_kind_from_name(const std::string& name) {
  if (name == "translate") return PerturbationKind::translate;
  if (name == "boundary-noise" || name == "boundary_noise") return PerturbationKind::boundary_noise;
  if (name == "amplitude-dent" || name == "amplitude_dent") return PerturbationKind::amplitude_dent;
  throw std::invalid_argument("unknown perturbation kind: " + name);
}

std::string to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::translate: return "translate";
    case PerturbationKind::boundary_noise: return "boundary-noise";
    case PerturbationKind::amplitude_dent: return "amplitude-dent";
  }
  return "?";
}

Field project_to_admissible(const Field& omega, const PatchSpec& spec, const Grid& grid) {
  Field out = zero_field(grid);
  double mass = 0.0;
  for (int c : grid.interior_cells()) {
    out[c] = std::clamp(omega[c], 0.0, spec.lambda);
    mass += out[c];
  }
  mass *= grid.cell_area();
  double deficit = spec.mass - mass;
  if (std::abs(deficit) <= 1e-15 * spec.mass) return out;
  // water-fill (deficit > 0) or drain (deficit < 0): find the uniform level
  // shift that restores the mass exactly under the [0, lambda] clamp
  auto shifted_mass = [&](double s) {
    double m = 0.0;
    for (int c : grid.interior_cells()) m += std::clamp(out[c] + s, 0.0, spec.lambda);
    return m * grid.cell_area();
  };
  double lo = deficit > 0.0 ? 0.0 : -spec.lambda;
  double hi = deficit > 0.0 ? spec.lambda : 0.0;
  if (shifted_mass(hi) < spec.mass - 1e-15 || shifted_mass(lo) > spec.mass + 1e-15)
    throw InfeasibleConstraint("project_to_admissible: mass outside reachable range");
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    if (shifted_mass(mid) < spec.mass)
      lo = mid;
    else
      hi = mid;
  }
  double s = 0.5 * (lo + hi);
  for (int c : grid.interior_cells()) out[c] = std::clamp(out[c] + s, 0.0, spec.lambda);
  // final exact correction spread over unsaturated cells
  double m2 = 0.0;
  for (int c : grid.interior_cells()) m2 += out[c];
  double corr = (spec.mass / grid.cell_area() - m2);
  std::vector<int> free;
  for (int c : grid.interior_cells())
    if (out[c] > 0.0 && out[c] < spec.lambda) free.push_back(c);
  if (!free.empty()) {
    double per = corr / static_cast<double>(free.size());
    for (int c : free) out[c] = std::clamp(out[c] + per, 0.0, spec.lambda);
  }
  return out;
}

namespace {

Field translate_perturbation(const Field& omega_star, double delta, std::mt19937_64& rng,
                             const PatchSpec& spec, const Grid& grid) {
  double angle = 2.0 * kPi * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  Vec2 dir{std::cos(angle), std::sin(angle)};
  auto shifted = [&](int n) {
    int dx = static_cast<int>(std::lround(n * dir.x));
    int dy = static_cast<int>(std::lround(n * dir.y));
    if (dx == 0 && dy == 0) { dx = (dir.x >= 0) ? n : -n; }
    Field f = zero_field(grid);
    double lost = 0.0;
    for (int c : grid.interior_cells()) {
      double w = omega_star[c];
      if (w == 0.0) continue;
      int i = c % grid.nx() + dx, j = c / grid.nx() + dy;
      if (grid.interior(i, j))
        f[grid.index(i, j)] += w;
      else
        lost += w;
    }
    if (lost * grid.cell_area() > 0.2 * spec.mass)
      throw InfeasiblePerturbation("translate: shift pushes the patch out of the domain");
    return project_to_admissible(f, spec, grid);
  };
  // find a shift at least delta away, then blend back toward omega_star: the
  // admissible set is convex, so the blend is admissible with exact distance
  Field far;
  double d_far = 0.0;
  for (int n = 1; n <= std::max(2, grid.nx() / 4); ++n) {
    Field cand = shifted(n);
    double d = lp_distance(cand, omega_star, 1, grid);
    if (d > d_far) {
      far = std::move(cand);
      d_far = d;
    }
    if (d_far >= delta) break;
  }
  if (d_far < delta) throw InfeasiblePerturbation("translate: delta exceeds the reachable shifts");
  double alpha = delta / d_far;
  Field out = omega_star;
  for (int c : grid.interior_cells()) out[c] += alpha * (far[c] - omega_star[c]);
  return out;
}

Field boundary_noise_perturbation(const Field& omega_star, double delta, std::mt19937_64& rng,
                                  const PatchSpec& spec, const Grid& grid) {
  // swap interface cells pairwise (one on -> off, one off -> on): the result
  // stays a patch in the same rearrangement class with exact mass
  const double vtol = 1e-9 * spec.lambda;
  std::vector<int> on_edge, off_edge;
  const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
  for (int c : grid.interior_cells()) {
    int i = c % grid.nx(), j = c / grid.nx();
    bool on = omega_star[c] > spec.lambda - vtol;
    bool off = omega_star[c] < vtol;
    if (!on && !off) continue;
    for (int d = 0; d < 4; ++d) {
      int ni = i + di[d], nj = j + dj[d];
      if (!grid.interior(ni, nj)) continue;
      double wn = omega_star[grid.index(ni, nj)];
      if (on && wn < vtol) {
        on_edge.push_back(c);
        break;
      }
      if (off && wn > spec.lambda - vtol) {
        off_edge.push_back(c);
        break;
      }
    }
  }
  double pair_dist = 2.0 * spec.lambda * grid.cell_area();
  int n_pairs = static_cast<int>(std::lround(delta / pair_dist));
  if (n_pairs == 0)
    throw InfeasiblePerturbation("boundary-noise: delta below the one-pair swap floor");
  if (n_pairs > static_cast<int>(std::min(on_edge.size(), off_edge.size())))
    throw InfeasiblePerturbation("boundary-noise: delta too large for the interface length");
  std::shuffle(on_edge.begin(), on_edge.end(), rng);
  std::shuffle(off_edge.begin(), off_edge.end(), rng);
  Field out = omega_star;
  for (int k = 0; k < n_pairs; ++k) {
    out[off_edge[k]] = out[on_edge[k]];
    out[on_edge[k]] = 0.0;
  }
  return out;
}

Field amplitude_dent_perturbation(const Field& omega_star, double delta, std::mt19937_64& rng,
                                  const PatchSpec& spec, const Grid& grid) {
  Vec2 c0 = centroid(grid, omega_star);
  double area = spec.mass / spec.lambda;
  double radius = 0.7 * std::sqrt(area / kPi);
  // random small offset of the dent center inside the patch
  double ang = 2.0 * kPi * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  Vec2 center{c0.x + 0.3 * radius * std::cos(ang), c0.y + 0.3 * radius * std::sin(ang)};
  BumpFunction dent{center, radius};
  auto dented = [&](double alpha) {
    Field f = omega_star;
    for (int c : grid.interior_cells()) {
      Vec2 p = grid.cell_center(c % grid.nx(), c / grid.nx());
      f[c] *= 1.0 - alpha * dent.value(p);
    }
    return project_to_admissible(f, spec, grid);
  };
  double lo = 0.0, hi = 1.0;
  Field at_hi = dented(hi);
  if (lp_distance(at_hi, omega_star, 1, grid) < 0.5 * delta)
    throw InfeasiblePerturbation("amplitude-dent: delta too large for a single dent");
  Field best = at_hi;
  for (int it = 0; it < 40; ++it) {
    double mid = 0.5 * (lo + hi);
    Field f = dented(mid);
    double d = lp_distance(f, omega_star, 1, grid);
    if (d < delta)
      lo = mid;
    else
      hi = mid;
    best = std::move(f);
    if (std::abs(d - delta) < 0.05 * delta) break;
  }
  return best;
}

}  // namespace

Field perturb(const Field& omega_star, const ExperimentConfig& config, const PatchSpec& spec,
              const Grid& grid) {
  if (!(config.delta >= 0.0)) throw std::invalid_argument("perturb: delta must be nonnegative");
  if (config.delta == 0.0) return omega_star;
  if (!admissible(omega_star, spec, grid))
    throw std::invalid_argument("perturb: omega_star is not admissible");
  std::mt19937_64 rng(config.seed);
  Field out;
  switch (config.kind) {
    case PerturbationKind::translate:
      out = translate_perturbation(omega_star, config.delta, rng, spec, grid);
      break;
    case PerturbationKind::boundary_noise:
      out = boundary_noise_perturbation(omega_star, config.delta, rng, spec, grid);
      break;
    case PerturbationKind::amplitude_dent:
      out = amplitude_dent_perturbation(omega_star, config.delta, rng, spec, grid);
      break;
  }
  double d = lp_distance(out, omega_star, 1, grid);
  if (d < 0.5 * config.delta || d > 2.0 * config.delta)
    throw InfeasiblePerturbation("perturb: realized distance " + std::to_string(d) +
                                 " outside [delta/2, 2 delta]");
  return out;
}

ExperimentRecord run_orbital_experiment(const ExperimentConfig& config,
                                        const MaximizerSetModel& model, const Grid& grid,
                                        const PatchSpec& spec, const EvolutionParams& params) {
  if (model.representatives.empty())
    throw std::invalid_argument("run_orbital_experiment: empty model");
  const Field& omega_star = model.representatives[0];
  double T = config.T > 0.0 ? config.T : 10.0 * eddy_turnover_time(grid, omega_star, spec);

  ExperimentRecord rec;
  rec.horizon = T;
  Field omega0 = perturb(omega_star, config, spec, grid);
  rec.initial_dist = lp_distance(omega0, omega_star, 1, grid);

  bool ok_base = true, ok_pert = true;
  rec.baseline_series = run_series(omega_star, model, config, grid, spec, params, T, ok_base);
  rec.series = run_series(omega0, model, config, grid, spec, params, T, ok_pert);
  rec.completed = ok_base && ok_pert;

  for (const auto& s : rec.series) rec.sup_dist = std::max(rec.sup_dist, s.dist_p);
  for (const auto& s : rec.baseline_series)
    rec.baseline_sup_dist = std::max(rec.baseline_sup_dist, s.dist_p);
  std::size_t n = std::min(rec.series.size(), rec.baseline_series.size());
  for (std::size_t k = 0; k < n; ++k)
    rec.excess_sup_dist = std::max(
        rec.excess_sup_dist, rec.series[k].dist_p - rec.baseline_series[k].dist_p);
  rec.excess_sup_dist = std::max(rec.excess_sup_dist, 0.0);
  return rec;
}

ExperimentRecord run_isolated_experiment(const ExperimentConfig& config,
                                         const Field& omega_lambda, const Grid& grid,
                                         const PatchSpec& spec, const EvolutionParams& params) {
  return run_orbital_experiment(config, single_maximizer_model(omega_lambda), grid, spec,
                                params);
}

}  // namespace vpl
