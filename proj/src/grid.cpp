#include "aglab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aglab {

Grid::Grid(Vec2 origin, double h, int nx, int ny, std::vector<NodeClass> mask)
    : origin_(origin), h_(h), nx_(nx), ny_(ny), mask_(std::move(mask)) {
  if (!(h > 0.0) || nx < 1 || ny < 1) throw std::invalid_argument("Grid: bad dimensions");
  if (mask_.size() != size()) throw std::invalid_argument("Grid: mask size mismatch");
}

std::vector<std::uint8_t> Grid::region(NodeClass c) const {
  std::vector<std::uint8_t> r(size());
  for (std::size_t k = 0; k < size(); ++k) r[k] = mask_[k] == c;
  return r;
}

std::vector<std::uint8_t> Grid::active_region() const {
  std::vector<std::uint8_t> r(size());
  for (std::size_t k = 0; k < size(); ++k) r[k] = mask_[k] != NodeClass::Exterior;
  return r;
}

std::size_t Grid::count(NodeClass c) const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), c));
}

GridPtr make_grid(const Domain& domain, double h, int ghost) {
  if (!(h > 0.0)) throw std::invalid_argument("make_grid: h must be positive");
  ghost = std::max(ghost, 2);
  auto [lo, hi] = domain.bounding_box();
  const double d = domain.delta();
  const int i0 = static_cast<int>(std::floor((lo.x - d) / h)) - ghost;
  const int i1 = static_cast<int>(std::ceil((hi.x + d) / h)) + ghost;
  const int j0 = static_cast<int>(std::floor((lo.y - d) / h)) - ghost;
  const int j1 = static_cast<int>(std::ceil((hi.y + d) / h)) + ghost;
  const int nx = i1 - i0 + 1, ny = j1 - j0 + 1;
  const Vec2 origin{i0 * h, j0 * h};

  std::vector<NodeClass> mask(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Vec2 x{origin.x + i * h, origin.y + j * h};
      const double sd = signed_distance(domain, x);
      NodeClass c = NodeClass::Exterior;
      if (sd >= -1e-12) {
        c = NodeClass::Interior;
      } else if (sd > -d) {
        c = NodeClass::Collar;
      }
      mask[static_cast<std::size_t>(j) * nx + i] = c;
    }
  }
  return std::make_shared<const Grid>(origin, h, nx, ny, std::move(mask));
}

GridPtr make_grid_resolution(const Domain& domain, int resolution, int ghost) {
  auto [lo, hi] = domain.bounding_box();
  const double d = domain.delta();
  const double extent = std::max(hi.x - lo.x, hi.y - lo.y) + 2.0 * d;
  return make_grid(domain, extent / resolution, ghost);
}

GridPtr make_square_grid(double h, int ghost) {
  const int n = static_cast<int>(std::lround(1.0 / h));
  const int nx = n + 1 + 2 * ghost;
  std::vector<NodeClass> mask(static_cast<std::size_t>(nx) * nx, NodeClass::Exterior);
  for (int j = ghost; j <= ghost + n; ++j) {
    for (int i = ghost; i <= ghost + n; ++i) mask[static_cast<std::size_t>(j) * nx + i] = NodeClass::Interior;
  }
  return std::make_shared<const Grid>(Vec2{-ghost * h, -ghost * h}, h, nx, nx, std::move(mask));
}

double CellMeasure::total() const {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

double CellMeasure::total(const std::vector<std::uint8_t>& region) const {
  double s = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    if (region[k]) s += mass[k];
  }
  return s;
}

double CellMeasure::total_variation() const {
  double s = 0.0;
  for (double m : mass) s += std::abs(m);
  return s;
}

double CellMeasure::total_variation(const std::vector<std::uint8_t>& region) const {
  double s = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    if (region[k]) s += std::abs(mass[k]);
  }
  return s;
}

}  // namespace aglab
