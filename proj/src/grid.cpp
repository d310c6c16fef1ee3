#include "vortexpatch/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace vpl {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

Domain Domain::disk(double radius, Vec2 center) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk: radius must be positive");
  Domain d;
  d.kind = DomainKind::disk;
  d.outer = radius;
  d.center = center;
  return d;
}

Domain Domain::annulus(double inner, double outer, Vec2 center) {
  if (!(inner > 0.0) || !(outer > inner))
    throw std::invalid_argument("annulus: need 0 < inner < outer");
  Domain d;
  d.kind = DomainKind::annulus;
  d.inner = inner;
  d.outer = outer;
  d.center = center;
  return d;
}

Domain Domain::rectangle(double width, double height) {
  if (!(width > 0.0) || !(height > 0.0))
    throw std::invalid_argument("rectangle: width and height must be positive");
  Domain d;
  d.kind = DomainKind::rectangle;
  d.width = width;
  d.height = height;
  return d;
}

bool Domain::contains(Vec2 p) const {
  switch (kind) {
    case DomainKind::disk:
      return norm(p - center) < outer;
    case DomainKind::annulus: {
      double r = norm(p - center);
      return r > inner && r < outer;
    }
    case DomainKind::rectangle:
      return p.x > 0.0 && p.x < width && p.y > 0.0 && p.y < height;
  }
  return false;
}

Vec2 Domain::bbox_min() const {
  if (kind == DomainKind::rectangle) return {0.0, 0.0};
  return {center.x - outer, center.y - outer};
}

Vec2 Domain::bbox_max() const {
  if (kind == DomainKind::rectangle) return {width, height};
  return {center.x + outer, center.y + outer};
}

double Domain::area() const {
  const double pi = 4.0 * std::atan(1.0);
  switch (kind) {
    case DomainKind::disk:
      return pi * outer * outer;
    case DomainKind::annulus:
      return pi * (outer * outer - inner * inner);
    case DomainKind::rectangle:
      return width * height;
  }
  return 0.0;
}

namespace {
std::atomic<std::uint64_t> g_next_grid_uid{1};
}

Grid::Grid(const Domain& domain, int nx, int ny, double h, Vec2 origin)
    : domain_(domain),
      nx_(nx),
      ny_(ny),
      h_(h),
      origin_(origin),
      mask_(static_cast<std::size_t>(nx) * ny, 0),
      ordinal_(static_cast<std::size_t>(nx) * ny, -1),
      uid_(g_next_grid_uid.fetch_add(1)) {
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i)
      if (domain_.contains(cell_center(i, j))) mask_[index(i, j)] = 1;
  for (int c = 0; c < nx_ * ny_; ++c)
    if (mask_[c]) {
      ordinal_[c] = static_cast<int>(interior_cells_.size());
      interior_cells_.push_back(c);
    }
}

Grid build_grid(const Domain& domain, int resolution) {
  if (resolution < 8) throw std::invalid_argument("build_grid: resolution must be >= 8");
  Vec2 lo = domain.bbox_min();
  Vec2 hi = domain.bbox_max();
  double wx = hi.x - lo.x;
  double wy = hi.y - lo.y;
  double h = std::max(wx, wy) / resolution;
  int nx = std::max(1, static_cast<int>(std::lround(wx / h)));
  int ny = std::max(1, static_cast<int>(std::lround(wy / h)));
  Grid grid(domain, nx, ny, h, lo);
  if (grid.interior_count() == 0)
    throw std::invalid_argument("build_grid: no interior cells at this resolution");
  return grid;
}

double measure(const Grid& grid, std::span<const double> indicator) {
  if (indicator.size() != static_cast<std::size_t>(grid.nx()) * grid.ny())
    throw std::invalid_argument("measure: indicator size does not match grid");
  double sum = 0.0;
  for (int c : grid.interior_cells()) sum += indicator[c];
  return sum * grid.cell_area();
}

double measure_above(const Grid& grid, std::span<const double> field, double level) {
  if (field.size() != static_cast<std::size_t>(grid.nx()) * grid.ny())
    throw std::invalid_argument("measure_above: field size does not match grid");
  std::size_t count = 0;
  for (int c : grid.interior_cells())
    if (field[c] > level) ++count;
  return static_cast<double>(count) * grid.cell_area();
}

Field zero_field(const Grid& grid) {
  return Field(static_cast<std::size_t>(grid.nx()) * grid.ny(), 0.0);
}

}  // namespace vpl
