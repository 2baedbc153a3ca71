#include "aglab/fields.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace aglab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Access {
  const Grid& g;
  const std::vector<double>& v;
  bool ok(int i, int j) const { return g.in_range(i, j) && std::isfinite(v[g.index(i, j)]); }
  double at(int i, int j) const { return v[g.index(i, j)]; }
};

// First derivative along (di, dj) at node (i, j); centred when possible, else one-sided O(h^2).
double d1(const Access& A, int i, int j, int di, int dj, double h) {
  const bool fwd = A.ok(i + di, j + dj), bwd = A.ok(i - di, j - dj);
  if (fwd && bwd) return (A.at(i + di, j + dj) - A.at(i - di, j - dj)) / (2.0 * h);
  if (fwd && A.ok(i + 2 * di, j + 2 * dj)) {
    return (-3.0 * A.at(i, j) + 4.0 * A.at(i + di, j + dj) - A.at(i + 2 * di, j + 2 * dj)) / (2.0 * h);
  }
  if (bwd && A.ok(i - 2 * di, j - 2 * dj)) {
    return (3.0 * A.at(i, j) - 4.0 * A.at(i - di, j - dj) + A.at(i - 2 * di, j - 2 * dj)) / (2.0 * h);
  }
  if (fwd) return (A.at(i + di, j + dj) - A.at(i, j)) / h;
  if (bwd) return (A.at(i, j) - A.at(i - di, j - dj)) / h;
  return 0.0;
}

double d2(const Access& A, int i, int j, int di, int dj, double h) {
  const double h2 = h * h;
  const bool fwd = A.ok(i + di, j + dj), bwd = A.ok(i - di, j - dj);
  if (fwd && bwd) return (A.at(i + di, j + dj) - 2.0 * A.at(i, j) + A.at(i - di, j - dj)) / h2;
  auto one_sided = [&](int s) -> double {
    const int a = s * di, b = s * dj;
    if (A.ok(i + a, j + b) && A.ok(i + 2 * a, j + 2 * b) && A.ok(i + 3 * a, j + 3 * b)) {
      return (2.0 * A.at(i, j) - 5.0 * A.at(i + a, j + b) + 4.0 * A.at(i + 2 * a, j + 2 * b) -
              A.at(i + 3 * a, j + 3 * b)) / h2;
    }
    if (A.ok(i + a, j + b) && A.ok(i + 2 * a, j + 2 * b)) {
      return (A.at(i, j) - 2.0 * A.at(i + a, j + b) + A.at(i + 2 * a, j + 2 * b)) / h2;
    }
    return kNaN;
  };
  double r = fwd ? one_sided(1) : one_sided(-1);
  return std::isfinite(r) ? r : 0.0;
}

double dxy(const Access& A, int i, int j, double h) {
  const bool up = A.ok(i, j + 1), dn = A.ok(i, j - 1);
  if (up && dn) return (d1(A, i, j + 1, 1, 0, h) - d1(A, i, j - 1, 1, 0, h)) / (2.0 * h);
  if (up && A.ok(i, j + 2)) {
    return (-3.0 * d1(A, i, j, 1, 0, h) + 4.0 * d1(A, i, j + 1, 1, 0, h) - d1(A, i, j + 2, 1, 0, h)) / (2.0 * h);
  }
  if (dn && A.ok(i, j - 2)) {
    return (3.0 * d1(A, i, j, 1, 0, h) - 4.0 * d1(A, i, j - 1, 1, 0, h) + d1(A, i, j - 2, 1, 0, h)) / (2.0 * h);
  }
  return 0.0;
}

}  // namespace

VectorField fd_gradient(const ScalarField& u) {
  const Grid& g = *u.grid;
  VectorField out(u.grid, Vec2{kNaN, kNaN});
  const Access A{g, u.values};
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (!A.ok(i, j)) continue;
      out[g.index(i, j)] = {d1(A, i, j, 1, 0, g.h()), d1(A, i, j, 0, 1, g.h())};
    }
  }
  return out;
}

VectorField fd_perp_gradient(const ScalarField& u) {
  VectorField out = fd_gradient(u);
  for (auto& v : out.values) v = perp(v);
  return out;
}

ScalarField fd_hessian_norm(const ScalarField& u, double eta) {
  if (eta < 0.0) throw std::invalid_argument("fd_hessian_norm: eta must be >= 0");
  const Grid& g = *u.grid;
  ScalarField out(u.grid, kNaN);
  const Access A{g, u.values};
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (!A.ok(i, j)) continue;
      const double uxx = d2(A, i, j, 1, 0, g.h());
      const double uyy = d2(A, i, j, 0, 1, g.h());
      const double uxy = dxy(A, i, j, g.h());
      const double f2 = uxx * uxx + uyy * uyy + 2.0 * uxy * uxy;
      out[g.index(i, j)] = std::sqrt(f2 + eta * eta) - eta;
    }
  }
  return out;
}

double w11_distance(const ScalarField& u, const ScalarField& v, const std::vector<std::uint8_t>& region) {
  if (u.grid != v.grid) throw std::invalid_argument("w11_distance: fields on different grids");
  const VectorField gu = fd_gradient(u), gv = fd_gradient(v);
  const double h = u.grid->h();
  double s = 0.0;
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    if (!region[k]) continue;
    s += std::abs(u[k] - v[k]) + norm(gu[k] - gv[k]);
  }
  return h * h * s;
}

CellMeasure weak_divergence(const VectorField& F) {
  const Grid& g = *F.grid;
  const double h = g.h();
  CellMeasure mu(F.grid);
  auto finite = [](Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); };
  for (int j = 0; j + 1 < g.ny(); ++j) {
    for (int i = 0; i + 1 < g.nx(); ++i) {
      const std::size_t k[2][2] = {{g.index(i, j), g.index(i, j + 1)}, {g.index(i + 1, j), g.index(i + 1, j + 1)}};
      Vec2 c[2][2];
      bool ok = true;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          c[a][b] = F[k[a][b]];
          ok = ok && finite(c[a][b]);
        }
      }
      if (!ok) continue;
      // c[a][b] is the corner at (i + a, j + b)
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const double sx = a == 0 ? -1.0 : 1.0;
          const double sy = b == 0 ? -1.0 : 1.0;
          const double row_same = c[0][b].x + c[1][b].x, row_other = c[0][1 - b].x + c[1][1 - b].x;
          const double col_same = c[a][0].y + c[a][1].y, col_other = c[1 - a][0].y + c[1 - a][1].y;
          const double fx = sx * h * (row_same / 6.0 + row_other / 12.0);
          const double fy = sy * h * (col_same / 6.0 + col_other / 12.0);
          mu.mass[k[a][b]] -= fx + fy;
        }
      }
    }
  }
  return mu;
}

LimitField exact_limit_field(const Domain& domain, GridPtr grid) {
  LimitField out{ScalarField(grid), VectorField(grid), std::vector<std::uint8_t>(grid->size(), 0)};
  const RidgeSet ridge = ridge_set(domain);
  const double h = grid->h();
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const Vec2 x = grid->node(k);
    const LimitSample s = limit_sample(domain, x);
    out.u[k] = s.u;
    out.m[k] = s.m;
    out.ridge_near[k] = ridge.distance(x) < 0.5 * h;
  }
  return out;
}

ScalarField sample_scalar(GridPtr grid, const std::function<double(Vec2)>& f) {
  ScalarField out(grid);
  for (std::size_t k = 0; k < grid->size(); ++k) out[k] = f(grid->node(k));
  return out;
}

VectorField sample_vector(GridPtr grid, const std::function<Vec2(Vec2)>& f) {
  VectorField out(grid);
  for (std::size_t k = 0; k < grid->size(); ++k) out[k] = f(grid->node(k));
  return out;
}

std::vector<std::uint8_t> ridge_band(const Grid& grid, const RidgeSet& ridge, double radius) {
  std::vector<std::uint8_t> r(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) r[k] = ridge.distance(grid.node(k)) <= radius;
  return r;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

}  // namespace

void write_field_dump(const std::string& path, const ScalarField& u) {
  auto os = open_out(path);
  const Grid& g = *u.grid;
  char buf[160];
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const Vec2 x = g.node(i, j);
      std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g %.17g\n", i, j, x.x, x.y, u[g.index(i, j)]);
      os << buf;
    }
  }
}

void write_field_dump(const std::string& path, const VectorField& m) {
  auto os = open_out(path);
  const Grid& g = *m.grid;
  char buf[200];
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const Vec2 x = g.node(i, j);
      const Vec2 v = m[g.index(i, j)];
      std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g %.17g %.17g\n", i, j, x.x, x.y, v.x, v.y);
      os << buf;
    }
  }
}

void write_grid_sidecar(const std::string& path, const Grid& grid) {
  nlohmann::ordered_json j;
  j["origin"] = {grid.origin().x, grid.origin().y};
  j["h"] = grid.h();
  j["nx"] = grid.nx();
  j["ny"] = grid.ny();
  j["order"] = "row-major, i fastest";
  j["columns"] = "i j x y value[ value2]";
  j["interior_nodes"] = grid.count(NodeClass::Interior);
  j["collar_nodes"] = grid.count(NodeClass::Collar);
  j["exterior_nodes"] = grid.count(NodeClass::Exterior);
  auto os = open_out(path);
  os << j.dump(2) << "\n";
}

ScalarField read_field_dump(const std::string& path, GridPtr grid) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open field dump " + path);
  ScalarField u(grid, kNaN);
  std::string line;
  std::size_t seen = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int i, j;
    double x, y, v;
    if (!(ls >> i >> j >> x >> y >> v)) throw std::runtime_error("malformed field dump line in " + path);
    if (!grid->in_range(i, j)) throw std::runtime_error("field dump does not match grid: " + path);
    const Vec2 node = grid->node(i, j);
    if (std::abs(node.x - x) > 1e-9 || std::abs(node.y - y) > 1e-9) {
      throw std::runtime_error("field dump coordinates do not match grid: " + path);
    }
    u[grid->index(i, j)] = v;
    ++seen;
  }
  if (seen != grid->size()) throw std::runtime_error("field dump has wrong node count: " + path);
  return u;
}

}  // namespace aglab
