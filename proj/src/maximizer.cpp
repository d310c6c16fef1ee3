#include "vortexpatch/maximizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vpl {

namespace {
constexpr double kTieRel = 1e-12;  // tie-band width relative to range of psi

double field_mass(const Field& f, const Grid& grid) {
  double sum = 0.0;
  for (int c : grid.interior_cells()) sum += f[c];
  return sum * grid.cell_area();
}
}  // namespace

bool admissible(const Field& omega, const PatchSpec& spec, const Grid& grid) {
  if (omega.size() != grid.mask().size()) return false;
  const double vtol = 1e-12 * std::max(1.0, spec.lambda);
  for (int c : grid.interior_cells()) {
    double v = omega[c];
    if (!(v >= -vtol && v <= spec.lambda + vtol)) return false;
  }
  return std::abs(field_mass(omega, grid) - spec.mass) <= kMassTol * spec.mass;
}

ThresholdResult threshold_level(const Field& psi, const PatchSpec& spec, const Grid& grid) {
  if (psi.size() != grid.mask().size())
    throw std::invalid_argument("threshold_level: field size does not match grid");
  const double cell_mass = spec.lambda * grid.cell_area();
  const std::size_t n = grid.interior_count();
  const double capacity = cell_mass * static_cast<double>(n);
  if (spec.mass > capacity * (1.0 + 1e-12))
    throw InfeasibleConstraint("threshold_level: mass exceeds lambda * |D|");

  ThresholdResult out;
  if (spec.mass >= capacity * (1.0 - 1e-12)) {
    // K degenerates to the single field omega = lambda
    double vmin = psi[grid.interior_cells()[0]];
    for (int c : grid.interior_cells()) vmin = std::min(vmin, psi[c]);
    out.mu = vmin - 1.0;
    out.plateau_fraction = 0.0;
    out.saturated = grid.interior_cells();
    return out;
  }

  // sort interior cells by descending psi, index ascending on ties
  std::vector<int> order = grid.interior_cells();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (psi[a] != psi[b]) return psi[a] > psi[b];
    return a < b;
  });
  const double vmax = psi[order.front()], vmin = psi[order.back()];
  const double tie_band = kTieRel * (vmax - vmin);

  const auto k_full = static_cast<std::size_t>(spec.mass / cell_mass);  // < n
  out.mu = psi[order[std::min(k_full, n - 1)]];
  out.tie_band = tie_band;
  double saturated_mass = 0.0;
  for (int c : order) {
    double v = psi[c];
    if (v > out.mu + tie_band) {
      out.saturated.push_back(c);
      saturated_mass += cell_mass;
    } else if (v >= out.mu - tie_band) {
      out.tie.push_back(c);
    }
  }
  if (!out.tie.empty()) {
    out.plateau_fraction = (spec.mass - saturated_mass) /
                           (cell_mass * static_cast<double>(out.tie.size()));
    out.plateau_fraction = std::clamp(out.plateau_fraction, 0.0, 1.0);
  }
  return out;
}

Field field_from_threshold(const ThresholdResult& thr, const PatchSpec& spec, const Grid& grid) {
  Field omega = zero_field(grid);
  for (int c : thr.saturated) omega[c] = spec.lambda;
  const double tie_value = spec.lambda * thr.plateau_fraction;
  for (int c : thr.tie) omega[c] = tie_value;
  return omega;
}

Field ascent_step(const Field& omega, const PatchSpec& spec, const Grid& grid) {
  Field psi = solve_stream(grid, omega);
  return field_from_threshold(threshold_level(psi, spec, grid), spec, grid);
}

Field uniform_field(const Grid& grid, const PatchSpec& spec) {
  Field omega = zero_field(grid);
  double v = spec.mass / (static_cast<double>(grid.interior_count()) * grid.cell_area());
  for (int c : grid.interior_cells()) omega[c] = v;
  return omega;
}

Field seed_patch(const Grid& grid, const PatchSpec& spec, Vec2 center) {
  std::vector<int> order = grid.interior_cells();
  auto dist2 = [&](int c) {
    Vec2 p = grid.cell_center(c % grid.nx(), c / grid.nx());
    return dot(p - center, p - center);
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double da = dist2(a), db = dist2(b);
    if (da != db) return da < db;
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
    throw InfeasibleConstraint("seed_patch: domain too small for the mass");
  return out;
}

MaximizerResult solve_maximizer(const Grid& grid, const PatchSpec& spec, const Field& init,
                                double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_maximizer: tol must be positive");
  if (!admissible(init, spec, grid))
    throw std::invalid_argument("solve_maximizer: init is not admissible");

  MaximizerResult res;
  const double cell_area = grid.cell_area();
  const double capacity = spec.lambda * cell_area * static_cast<double>(grid.interior_count());

  auto finalize = [&](Field omega, int iterations, bool converged) {
    res.omega = std::move(omega);
    res.psi = solve_stream(grid, res.omega);
    auto thr = threshold_level(res.psi, spec, grid);
    res.mu = thr.mu;
    res.energy = energy(grid, res.omega, res.psi);
    res.iterations = iterations;
    res.converged = converged;
    res.energy_history.push_back(res.energy);
    res.characterization_residual =
        characterization_residual(res.omega, res.psi, res.mu, spec, grid);
    res.steadiness_residual =
        steadiness_residual(res.omega, res.psi, grid, default_test_set(grid));
  };

  if (spec.mass >= capacity * (1.0 - 1e-12)) {
    Field omega = zero_field(grid);
    for (int c : grid.interior_cells()) omega[c] = spec.lambda;
    finalize(std::move(omega), 0, true);
    return res;
  }

  Field omega = init;
  for (int iter = 1; iter <= max_iter; ++iter) {
    Field psi = solve_stream(grid, omega);
    res.energy_history.push_back(energy(grid, omega, psi));
    auto thr = threshold_level(psi, spec, grid);
    res.mu_history.push_back(thr.mu);
    Field next = field_from_threshold(thr, spec, grid);
    double l1 = 0.0;
    for (int c : grid.interior_cells()) l1 += std::abs(next[c] - omega[c]);
    l1 *= cell_area;
    res.l1_change_history.push_back(l1);
    omega = std::move(next);
    if (l1 <= tol * spec.mass) {
      finalize(std::move(omega), iter, true);
      return res;
    }
  }
  finalize(std::move(omega), max_iter, false);
  throw MaximizerNotConverged("solve_maximizer: max_iter exhausted", std::move(res));
}

double characterization_residual(const Field& omega, const Field& psi, double mu,
                                 const PatchSpec& spec, const Grid& grid) {
  double vmax = psi[grid.interior_cells()[0]], vmin = vmax;
  for (int c : grid.interior_cells()) {
    vmax = std::max(vmax, psi[c]);
    vmin = std::min(vmin, psi[c]);
  }
  const double tie_band = kTieRel * (vmax - vmin);
  const double vtol = 1e-9 * std::max(1.0, spec.lambda);
  std::size_t violations = 0;
  for (int c : grid.interior_cells()) {
    double p = psi[c];
    if (std::abs(p - mu) <= tie_band) continue;
    double w = omega[c];
    bool ok = (p > mu) ? std::abs(w - spec.lambda) <= vtol : std::abs(w) <= vtol;
    if (!ok) ++violations;
  }
  return static_cast<double>(violations) * grid.cell_area();
}

double BumpFunction::value(Vec2 p) const {
  double s2 = dot(p - center, p - center) / (radius * radius);
  if (s2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s2));
}

Vec2 BumpFunction::gradient(Vec2 p) const {
  Vec2 d = p - center;
  double s2 = dot(d, d) / (radius * radius);
  if (s2 >= 1.0 || s2 == 0.0) return {0.0, 0.0};
  double one = 1.0 - s2;
  double val = std::exp(1.0 - 1.0 / one);
  double dds2 = -val / (one * one);              // d value / d s2
  double scale = 2.0 * dds2 / (radius * radius); // chain rule through s2 = |d|^2/r^2
  return {scale * d.x, scale * d.y};
}

namespace {
double distance_to_boundary(const Domain& dom, Vec2 p) {
  switch (dom.kind) {
    case DomainKind::disk:
      return dom.outer - norm(p - dom.center);
    case DomainKind::annulus: {
      double r = norm(p - dom.center);
      return std::min(dom.outer - r, r - dom.inner);
    }
    case DomainKind::rectangle:
      return std::min({p.x, dom.width - p.x, p.y, dom.height - p.y});
  }
  return 0.0;
}

double max_gradient_norm(const BumpFunction& b) {
  double m = 0.0;
  for (int k = 1; k < 256; ++k) {
    double s = k / 256.0;
    Vec2 g = b.gradient({b.center.x + s * b.radius, b.center.y});
    m = std::max(m, norm(g));
  }
  return m;
}
}  // namespace

std::vector<BumpFunction> default_test_set(const Grid& grid) {
  const Domain& dom = grid.domain();
  Vec2 lo = dom.bbox_min(), hi = dom.bbox_max();
  std::vector<Vec2> centers;
  const int lat = 7;
  for (int j = 1; j <= lat; ++j)
    for (int i = 1; i <= lat; ++i)
      centers.push_back({lo.x + i * (hi.x - lo.x) / (lat + 1),
                         lo.y + j * (hi.y - lo.y) / (lat + 1)});
  if (dom.kind == DomainKind::annulus) {
    double rm = 0.5 * (dom.inner + dom.outer);
    for (int k = 0; k < 12; ++k) {
      double th = 2.0 * 3.14159265358979323846 * k / 12;
      centers.push_back({dom.center.x + rm * std::cos(th), dom.center.y + rm * std::sin(th)});
    }
  }
  std::vector<BumpFunction> out;
  for (Vec2 c : centers) {
    if (!dom.contains(c)) continue;
    double r = 0.8 * distance_to_boundary(dom, c);
    if (r < 4.0 * grid.h()) continue;
    out.push_back({c, r});
  }
  return out;
}

double steadiness_residual(const Field& omega, const Field& psi, const Grid& grid,
                           const std::vector<BumpFunction>& test_set) {
  if (test_set.empty())
    throw std::invalid_argument("steadiness_residual: empty test set");
  Velocity v = velocity(grid, psi);
  double worst = 0.0;
  for (const auto& bump : test_set) {
    double integral = 0.0;
    for (int c : grid.interior_cells()) {
      double w = omega[c];
      if (w == 0.0) continue;
      Vec2 p = grid.cell_center(c % grid.nx(), c / grid.nx());
      Vec2 g = bump.gradient(p);
      // omega * d(xi, psi) = omega * (grad xi . v)
      integral += w * (g.x * v.vx[c] + g.y * v.vy[c]);
    }
    integral *= grid.cell_area();
    double scale = max_gradient_norm(bump);
    if (scale > 0.0) worst = std::max(worst, std::abs(integral) / scale);
  }
  return worst;
}

}  // namespace vpl
