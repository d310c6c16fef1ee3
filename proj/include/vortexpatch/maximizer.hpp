#pragma once

#include <vector>

#include "vortexpatch/elliptic.hpp"
#include "vortexpatch/errors.hpp"
#include "vortexpatch/grid.hpp"

namespace vpl {

/// Constraint data for the admissible set: 0 <= omega <= lambda with
/// prescribed total integral (mass).
struct PatchSpec {
  double lambda = 1.0;
  double mass = 1.0;
};

/// Relative tolerance on the mass constraint.
inline constexpr double kMassTol = 1e-9;

bool admissible(const Field& omega, const PatchSpec& spec, const Grid& grid);

/// Stream-function level separating the saturated region from the
/// irrotational one, plus the fractional fill assigned to cells in the
/// numeric tie-band around the level so the mass constraint holds exactly.
struct ThresholdResult {
  double mu = 0.0;
  double plateau_fraction = 0.0;
  std::vector<int> saturated;  // flat cell indices with value lambda
  std::vector<int> tie;        // flat cell indices with value lambda * plateau_fraction
  double tie_band = 0.0;       // half-width of the tie-band around mu
};

/// Picks mu by exact descending sort of the interior values of psi so that
/// lambda * (|{psi > mu}| + plateau_fraction * |tie-band|) = mass.
/// Throws InfeasibleConstraint when mass > lambda * |D_h|.
ThresholdResult threshold_level(const Field& psi, const PatchSpec& spec, const Grid& grid);

/// Materializes the field lambda on the saturated set, lambda * fraction on
/// the tie cells and zero elsewhere.
Field field_from_threshold(const ThresholdResult& thr, const PatchSpec& spec, const Grid& grid);

/// One rearrangement ascent step: omega -> lambda * I{psi_omega > mu}.
/// Maps admissible fields to admissible fields and never decreases energy.
Field ascent_step(const Field& omega, const PatchSpec& spec, const Grid& grid);

struct MaximizerResult {
  Field omega;
  Field psi;
  double mu = 0.0;
  double energy = 0.0;
  int iterations = 0;
  double characterization_residual = 0.0;
  double steadiness_residual = 0.0;
  std::vector<double> energy_history;
  std::vector<double> l1_change_history;
  std::vector<double> mu_history;
  bool converged = false;
};

struct MaximizerNotConverged : ConvergenceFailure {
  MaximizerNotConverged(const std::string& what, MaximizerResult partial)
      : ConvergenceFailure(what), partial(std::move(partial)) {}
  MaximizerResult partial;
};

/// Fixed-point iteration of ascent_step from `init` until the L1 change
/// between iterates drops below tol * mass. Throws MaximizerNotConverged
/// (carrying the partial result) when max_iter is exhausted.
MaximizerResult solve_maximizer(const Grid& grid, const PatchSpec& spec, const Field& init,
                                double tol = 1e-8, int max_iter = 500);

/// The uniform admissible field omega = mass / |D_h|.
Field uniform_field(const Grid& grid, const PatchSpec& spec);

/// A compact admissible patch seeded at `center`: cells filled with lambda
/// in order of distance to the center, one fractional cell for exact mass.
Field seed_patch(const Grid& grid, const PatchSpec& spec, Vec2 center);

/// Measure of cells violating the first-order patch structure: outside the
/// tie-band around mu, omega must be lambda where psi > mu and 0 where
/// psi < mu.
double characterization_residual(const Field& omega, const Field& psi, double mu,
                                 const PatchSpec& spec, const Grid& grid);

/// Smooth compactly supported test function: a radial bump at `center` with
/// support radius `radius`.
struct BumpFunction {
  Vec2 center;
  double radius;
  double value(Vec2 p) const;
  Vec2 gradient(Vec2 p) const;
};

/// Tensor lattice of bump functions whose supports lie strictly inside the
/// domain interior mask.
std::vector<BumpFunction> default_test_set(const Grid& grid);

/// Weak steadiness residual: max over the test set of
/// |sum omega (d1 xi d2 psi - d2 xi d1 psi) h^2| / max|grad xi|.
double steadiness_residual(const Field& omega, const Field& psi, const Grid& grid,
                           const std::vector<BumpFunction>& test_set);

}  // namespace vpl
