#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "aglab/domain.hpp"
#include "aglab/grid.hpp"

namespace aglab {

// Finite-difference calculus on grid fields. Values at EXTERIOR nodes may be NaN (undefined);
// stencils fall back to one-sided second-order differences where a neighbour is not finite.

VectorField fd_gradient(const ScalarField& u);
/// (-d2 u, d1 u)
VectorField fd_perp_gradient(const ScalarField& u);

/// Nodewise sqrt(|D^2 u|_F^2 + eta^2) - eta.
ScalarField fd_hessian_norm(const ScalarField& u, double eta);

/// h^2 * sum over region of |u - v| + |grad u - grad v|.
double w11_distance(const ScalarField& u, const ScalarField& v, const std::vector<std::uint8_t>& region);

/// Distributional divergence tested against the bilinear hat of every node:
/// mass(p) = -int F_h . grad(phi_p) with F_h the bilinear interpolant of the nodal values.
/// Cells with a non-finite corner are skipped.
CellMeasure weak_divergence(const VectorField& F);

/// Sampled u-bar^delta and m-bar = grad-perp u-bar^delta on every node (exterior included).
struct LimitField {
  ScalarField u;
  VectorField m;
  /// 1 for nodes closer than h/2 to the ridge; their values are the one-sided traces.
  std::vector<std::uint8_t> ridge_near;
};

LimitField exact_limit_field(const Domain& domain, GridPtr grid);

/// Evaluate f at every node.
ScalarField sample_scalar(GridPtr grid, const std::function<double(Vec2)>& f);
VectorField sample_vector(GridPtr grid, const std::function<Vec2(Vec2)>& f);

/// Indicator of nodes within `radius` of the ridge segment.
std::vector<std::uint8_t> ridge_band(const Grid& grid, const RidgeSet& ridge, double radius);

// Field dumps: one line per node "i j x y value[ value2]" in row-major order plus a JSON sidecar.
void write_field_dump(const std::string& path, const ScalarField& u);
void write_field_dump(const std::string& path, const VectorField& m);
void write_grid_sidecar(const std::string& path, const Grid& grid);
/// Reads a scalar dump written for the same grid; throws std::runtime_error on mismatch.
ScalarField read_field_dump(const std::string& path, GridPtr grid);

}  // namespace aglab
