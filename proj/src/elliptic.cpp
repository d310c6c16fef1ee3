#include "vortexpatch/elliptic.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <map>
#include <mutex>

#include "vortexpatch/errors.hpp"

namespace vpl {

namespace {
constexpr double kPi = 3.14159265358979323846;

/// Fraction theta in (0,1] of the segment from interior center p toward
/// exterior center q at which the domain boundary is crossed.
double boundary_fraction(const Domain& dom, Vec2 p, Vec2 q) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 40; ++it) {
    double mid = 0.5 * (lo + hi);
    Vec2 m = p + mid * (q - p);
    if (dom.contains(m))
      lo = mid;
    else
      hi = mid;
  }
  return std::max(0.5 * (lo + hi), 1e-6);
}
}  // namespace

struct GreenOperator::Impl {
  Grid grid;
  Eigen::SparseMatrix<double> A;  // reduced to interior cells, SPD
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;

  explicit Impl(const Grid& g) : grid(g) {
    const int n = static_cast<int>(grid.interior_count());
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 5);
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int row = 0; row < n; ++row) {
      int c = grid.interior_cells()[row];
      int i = c % grid.nx();
      int j = c / grid.nx();
      double diag = 0.0;
      for (int d = 0; d < 4; ++d) {
        int ni = i + di[d], nj = j + dj[d];
        if (grid.interior(ni, nj)) {
          diag += inv_h2;
          trip.emplace_back(row, grid.interior_ordinal(grid.index(ni, nj)), -inv_h2);
        } else {
          double theta = boundary_fraction(grid.domain(), grid.cell_center(i, j),
                                           grid.cell_center(ni, nj));
          diag += inv_h2 / theta;
        }
      }
      trip.emplace_back(row, row, diag);
    }
    A.resize(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    ldlt.compute(A);
    if (ldlt.info() != Eigen::Success)
      throw SolverFailure("GreenOperator: Cholesky factorization failed", 0.0);
  }
};

GreenOperator::GreenOperator(const Grid& grid, double rel_tol)
    : impl_(std::make_unique<Impl>(grid)), rel_tol_(rel_tol) {}
GreenOperator::~GreenOperator() = default;
GreenOperator::GreenOperator(GreenOperator&&) noexcept = default;
GreenOperator& GreenOperator::operator=(GreenOperator&&) noexcept = default;

const Grid& GreenOperator::grid() const { return impl_->grid; }

Field GreenOperator::solve(const Field& omega) const {
  const Grid& g = impl_->grid;
  if (omega.size() != g.mask().size())
    throw std::invalid_argument("solve_stream: field size does not match grid");
  const int n = static_cast<int>(g.interior_count());
  Eigen::VectorXd b(n);
  double bmax = 0.0;
  for (int row = 0; row < n; ++row) {
    double v = omega[g.interior_cells()[row]];
    if (!std::isfinite(v)) throw std::invalid_argument("solve_stream: non-finite vorticity");
    b[row] = v;
    bmax = std::max(bmax, std::abs(v));
  }
  Eigen::VectorXd x = impl_->ldlt.solve(b);
  // iterative refinement until the residual contract holds
  double scale = std::max(bmax, 1e-300);
  double res = (b - impl_->A * x).cwiseAbs().maxCoeff();
  for (int pass = 0; pass < 4 && res > rel_tol_ * scale; ++pass) {
    Eigen::VectorXd r = b - impl_->A * x;
    x += impl_->ldlt.solve(r);
    res = (b - impl_->A * x).cwiseAbs().maxCoeff();
  }
  if (res > rel_tol_ * scale)
    throw SolverFailure("solve_stream: residual tolerance not met", res / scale);
  Field psi = zero_field(g);
  for (int row = 0; row < n; ++row) psi[g.interior_cells()[row]] = x[row];
  return psi;
}

Field GreenOperator::apply(const Field& psi) const {
  const Grid& g = impl_->grid;
  const int n = static_cast<int>(g.interior_count());
  Eigen::VectorXd x(n);
  for (int row = 0; row < n; ++row) x[row] = psi[g.interior_cells()[row]];
  Eigen::VectorXd y = impl_->A * x;
  Field out = zero_field(g);
  for (int row = 0; row < n; ++row) out[g.interior_cells()[row]] = y[row];
  return out;
}

double GreenOperator::residual_norm(const Field& omega, const Field& psi) const {
  Field Ap = apply(psi);
  double res = 0.0;
  for (int c : impl_->grid.interior_cells()) res = std::max(res, std::abs(Ap[c] - omega[c]));
  return res;
}

std::shared_ptr<const GreenOperator> green_operator(const Grid& grid) {
  static std::mutex mu;
  static std::map<std::uint64_t, std::shared_ptr<const GreenOperator>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(grid.uid());
  if (it != cache.end()) return it->second;
  auto op = std::make_shared<const GreenOperator>(grid);
  if (cache.size() > 24) cache.clear();  // bound memory across many grids
  cache.emplace(grid.uid(), op);
  return op;
}

Field solve_stream(const Grid& grid, const Field& omega) {
  return green_operator(grid)->solve(omega);
}

Velocity velocity(const Grid& grid, const Field& psi) {
  Velocity v{zero_field(grid), zero_field(grid)};
  auto val = [&](int i, int j) { return grid.interior(i, j) ? psi[grid.index(i, j)] : 0.0; };
  const double h = grid.h();
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      if (!grid.interior(i, j)) continue;
      double p = psi[grid.index(i, j)];
      double dpx, dpy;
      bool e = grid.interior(i + 1, j), w = grid.interior(i - 1, j);
      if (e && w)
        dpx = (val(i + 1, j) - val(i - 1, j)) / (2 * h);
      else if (e)
        dpx = (val(i + 1, j) - p) / h;
      else if (w)
        dpx = (p - val(i - 1, j)) / h;
      else
        dpx = 0.0;
      bool nn = grid.interior(i, j + 1), s = grid.interior(i, j - 1);
      if (nn && s)
        dpy = (val(i, j + 1) - val(i, j - 1)) / (2 * h);
      else if (nn)
        dpy = (val(i, j + 1) - p) / h;
      else if (s)
        dpy = (p - val(i, j - 1)) / h;
      else
        dpy = 0.0;
      v.vx[grid.index(i, j)] = dpy;
      v.vy[grid.index(i, j)] = -dpx;
    }
  }
  return v;
}

double energy(const Grid& grid, const Field& omega, const Field& psi) {
  if (omega.size() != grid.mask().size() || psi.size() != grid.mask().size())
    throw std::invalid_argument("energy: field size does not match grid");
  double sum = 0.0;
  for (int c : grid.interior_cells()) sum += omega[c] * psi[c];
  return 0.5 * sum * grid.cell_area();
}

double energy(const Grid& grid, const Field& omega) {
  return energy(grid, omega, solve_stream(grid, omega));
}

double disk_green_reference(Vec2 x, Vec2 y, double radius, Vec2 center) {
  Vec2 a = x - center, b = y - center;
  double ra = norm(a), rb = norm(b);
  if (ra >= radius || rb >= radius)
    throw std::invalid_argument("disk_green_reference: point outside the disk");
  double d = norm(a - b);
  if (d == 0.0) throw std::invalid_argument("disk_green_reference: coincident points");
  double image;
  if (rb == 0.0) {
    image = std::log(radius);
  } else {
    Vec2 bstar = (radius * radius / (rb * rb)) * b;
    image = std::log(norm(a - bstar) * rb / radius);
  }
  return (image - std::log(d)) / (2.0 * kPi);
}

double kernel_stream_at(const Grid& grid, const Field& omega, Vec2 x) {
  const Domain& dom = grid.domain();
  if (dom.kind != DomainKind::disk)
    throw std::invalid_argument("kernel_stream_at: disk domains only");
  const double h2 = grid.cell_area();
  const double rho = grid.h() / std::sqrt(kPi);  // equal-area disk radius
  double sum = 0.0;
  for (int c : grid.interior_cells()) {
    double w = omega[c];
    if (w == 0.0) continue;
    int i = c % grid.nx(), j = c / grid.nx();
    Vec2 y = grid.cell_center(i, j);
    double d = norm(x - y);
    if (d < 0.5 * grid.h()) {
      // self cell: exact free-space integral over the equal-area disk,
      // image part evaluated at the cell center
      double free_part = 0.25 * rho * rho * (1.0 - 2.0 * std::log(rho));
      Vec2 b = y - dom.center;
      double rb = norm(b);
      double image;
      if (rb == 0.0) {
        image = std::log(dom.outer);
      } else {
        Vec2 bstar = (dom.outer * dom.outer / (rb * rb)) * b;
        image = std::log(norm((x - dom.center) - bstar) * rb / dom.outer);
      }
      sum += w * (free_part + h2 * image / (2.0 * kPi));
    } else {
      sum += w * h2 * disk_green_reference(x, y, dom.outer, dom.center);
    }
  }
  return sum;
}

}  // namespace vpl
