#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "aglab/domain.hpp"
#include "aglab/vec2.hpp"

namespace aglab {

enum class NodeClass : std::uint8_t { Interior = 0, Collar = 1, Exterior = 2 };

/// Uniform node lattice over a box covering Omega_delta. The lattice always contains the
/// coordinate axes (origin is an integer multiple of h), so the horizontal ridge is a node row.
class Grid {
 public:
  Grid(Vec2 origin, double h, int nx, int ny, std::vector<NodeClass> mask);

  Vec2 origin() const { return origin_; }
  double h() const { return h_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
  int i_of(std::size_t k) const { return static_cast<int>(k % nx_); }
  int j_of(std::size_t k) const { return static_cast<int>(k / nx_); }
  Vec2 node(int i, int j) const { return {origin_.x + i * h_, origin_.y + j * h_}; }
  Vec2 node(std::size_t k) const { return node(i_of(k), j_of(k)); }
  bool in_range(int i, int j) const { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }

  NodeClass cls(std::size_t k) const { return mask_[k]; }
  NodeClass cls(int i, int j) const { return mask_[index(i, j)]; }
  const std::vector<NodeClass>& mask() const { return mask_; }

  /// Node indicator of one class, as a region mask.
  std::vector<std::uint8_t> region(NodeClass c) const;
  /// Indicator of INTERIOR and COLLAR nodes.
  std::vector<std::uint8_t> active_region() const;
  std::size_t count(NodeClass c) const;

 private:
  Vec2 origin_;
  double h_;
  int nx_, ny_;
  std::vector<NodeClass> mask_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Grid with spacing h covering Omega_delta plus `ghost` exterior layers (at least 2).
GridPtr make_grid(const Domain& domain, double h, int ghost = 3);

/// Grid whose spacing puts `resolution` cells across the longer side of the Omega_delta box.
GridPtr make_grid_resolution(const Domain& domain, int resolution, int ghost = 3);

/// Unit square test grid [0,1]^2 with all nodes INTERIOR except `ghost` exterior layers.
GridPtr make_square_grid(double h, int ghost = 3);

struct ScalarField {
  GridPtr grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(GridPtr g, double fill = 0.0) : grid(std::move(g)), values(grid->size(), fill) {}
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }
};

struct VectorField {
  GridPtr grid;
  std::vector<Vec2> values;

  VectorField() = default;
  explicit VectorField(GridPtr g, Vec2 fill = {}) : grid(std::move(g)), values(grid->size(), fill) {}
  Vec2& operator[](std::size_t k) { return values[k]; }
  Vec2 operator[](std::size_t k) const { return values[k]; }
};

/// Signed mass per dual cell (one cell per node).
struct CellMeasure {
  GridPtr grid;
  std::vector<double> mass;

  CellMeasure() = default;
  explicit CellMeasure(GridPtr g) : grid(std::move(g)), mass(grid->size(), 0.0) {}

  double total() const;
  double total(const std::vector<std::uint8_t>& region) const;
  double total_variation() const;
  double total_variation(const std::vector<std::uint8_t>& region) const;
};

}  // namespace aglab
