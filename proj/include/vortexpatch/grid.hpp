#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace vpl {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double norm(Vec2 a);

enum class DomainKind { disk, annulus, rectangle };

/// A bounded planar domain: open disk, annulus (ring) or axis-aligned
/// rectangle. Lengths are in abstract spatial units.
struct Domain {
  DomainKind kind = DomainKind::disk;
  Vec2 center{0.0, 0.0};   // disk / annulus
  double outer = 1.0;      // disk radius, annulus outer radius
  double inner = 0.0;      // annulus inner radius
  double width = 1.0;      // rectangle, anchored at the origin
  double height = 1.0;

  static Domain disk(double radius, Vec2 center = {0.0, 0.0});
  static Domain annulus(double inner, double outer, Vec2 center = {0.0, 0.0});
  static Domain rectangle(double width, double height);

  bool contains(Vec2 p) const;
  Vec2 bbox_min() const;
  Vec2 bbox_max() const;
  double area() const;  // analytic area, used as reference in tests
};

/// Cell-centered uniform Cartesian discretization of a Domain with a binary
/// interior mask. Cells whose centers fall exactly on the boundary count as
/// exterior. Immutable after construction.
class Grid {
 public:
  Grid(const Domain& domain, int nx, int ny, double h, Vec2 origin);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }
  double cell_area() const { return h_ * h_; }
  Vec2 origin() const { return origin_; }
  const Domain& domain() const { return domain_; }
  std::uint64_t uid() const { return uid_; }

  int index(int i, int j) const { return j * nx_ + i; }
  Vec2 cell_center(int i, int j) const {
    return {origin_.x + (i + 0.5) * h_, origin_.y + (j + 0.5) * h_};
  }
  bool interior(int i, int j) const {
    return i >= 0 && i < nx_ && j >= 0 && j < ny_ && mask_[index(i, j)] != 0;
  }
  bool interior_flat(int c) const { return mask_[c] != 0; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  const std::vector<int>& interior_cells() const { return interior_cells_; }
  std::size_t interior_count() const { return interior_cells_.size(); }
  /// Interior ordinal of a flat cell index, or -1 for exterior cells.
  int interior_ordinal(int c) const { return ordinal_[c]; }

 private:
  Domain domain_;
  int nx_, ny_;
  double h_;
  Vec2 origin_;
  std::vector<std::uint8_t> mask_;
  std::vector<int> interior_cells_;  // flat indices, row-major order
  std::vector<int> ordinal_;
  std::uint64_t uid_;
};

/// Cell-valued scalar field, row-major nx*ny, zero on exterior cells.
using Field = std::vector<double>;

/// Builds a grid covering the domain's bounding box with `resolution` cells
/// across the wider side (square cells). resolution must be >= 8.
Grid build_grid(const Domain& domain, int resolution);

/// Discrete measure: sum of indicator * cell_area over interior cells.
/// The indicator may be fractional (values in [0,1]).
double measure(const Grid& grid, std::span<const double> indicator);

/// Measure of the level set {field > level}.
double measure_above(const Grid& grid, std::span<const double> field, double level);

Field zero_field(const Grid& grid);

}  // namespace vpl
