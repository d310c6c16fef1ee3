#pragma once

#include <memory>

#include "vortexpatch/grid.hpp"

namespace vpl {

/// Discrete inverse of -Laplace with homogeneous Dirichlet data on the
/// domain boundary: a symmetric positive definite linear map omega -> psi.
///
/// The stencil is the 5-point Laplacian; at cells whose neighbor center lies
/// outside the domain the zero boundary value is imposed at the true boundary
/// intersection along the grid line (symmetric ghost elimination), which
/// keeps the operator SPD and the solution second-order accurate.
class GreenOperator {
 public:
  explicit GreenOperator(const Grid& grid, double rel_tol = 1e-10);
  ~GreenOperator();
  GreenOperator(GreenOperator&&) noexcept;
  GreenOperator& operator=(GreenOperator&&) noexcept;

  /// Solves -Laplace psi = omega. Throws SolverFailure if the relative
  /// residual max-norm cannot be brought below the tolerance.
  Field solve(const Field& omega) const;

  /// Applies the discrete -Laplacian (the forward operator).
  Field apply(const Field& psi) const;

  /// max |A psi - omega| over interior cells.
  double residual_norm(const Field& omega, const Field& psi) const;

  const Grid& grid() const;
  double tolerance() const { return rel_tol_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double rel_tol_;
};

/// Shared, lazily-built GreenOperator for a grid (keyed by grid uid).
std::shared_ptr<const GreenOperator> green_operator(const Grid& grid);

/// Solves -Laplace psi = omega on the grid, psi = 0 on the boundary.
Field solve_stream(const Grid& grid, const Field& omega);

struct Velocity {
  Field vx, vy;
};

/// v = J grad psi = (d2 psi, -d1 psi), centered differences, one-sided at
/// mask edges. Zero on exterior cells.
Velocity velocity(const Grid& grid, const Field& psi);

/// Kinetic energy E = 1/2 <omega, psi> with the cell-area weighted inner
/// product. Requires psi = solve_stream(omega).
double energy(const Grid& grid, const Field& omega, const Field& psi);

/// Convenience: solve for psi internally.
double energy(const Grid& grid, const Field& omega);

/// Analytic Green function of -Laplace on the disk B_R(center) with zero
/// boundary values, by the method of images. Both points must lie strictly
/// inside the disk and must not coincide.
double disk_green_reference(Vec2 x, Vec2 y, double radius, Vec2 center = {0.0, 0.0});

/// Stream function at a point by direct kernel quadrature against the
/// analytic disk Green function (midpoint rule, self-cell handled by an
/// equal-area disk integral). Disk domains only.
double kernel_stream_at(const Grid& grid, const Field& omega, Vec2 x);

}  // namespace vpl
