#include "aglab/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "aglab/errors.hpp"
#include "aglab/fields.hpp"

namespace aglab {

namespace {

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

using SpMat = Eigen::SparseMatrix<double>;

// Gauss-Newton model of the energy Hessian restricted to the free nodes: the hessian term with
// its weight frozen at the current state plus 8/eps (grad u . grad du)^2 for the potential term.
class GaussNewton {
 public:
  GaussNewton(const Grid& g, const std::vector<std::size_t>& free_nodes) : g_(g), col_(g.size(), -1) {
    for (std::size_t c = 0; c < free_nodes.size(); ++c) col_[free_nodes[c]] = static_cast<long>(c);
    n_ = free_nodes.size();
  }

  void assemble(const ScalarField& u, const EnergyParams& p) {
    const double h = g_.h(), h2 = h * h;
    const int nx = g_.nx();
    const double* v = u.values.data();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n_ * 60);
    struct Entry {
      long c;
      double w;
    };
    Entry row[4];
    auto add_row = [&](std::initializer_list<std::pair<std::size_t, double>> terms, double weight) {
      int m = 0;
      for (const auto& [node, coef] : terms) {
        if (col_[node] >= 0 && coef != 0.0) row[m++] = {col_[node], coef};
      }
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) trip.emplace_back(row[a].c, row[b].c, weight * row[a].w * row[b].w);
      }
    };
    const double ih2 = 1.0 / h2, i2h = 1.0 / (2.0 * h), i4h2 = 1.0 / (4.0 * h2);
    for (int j = 1; j + 1 < g_.ny(); ++j) {
      for (int i = 1; i + 1 < nx; ++i) {
        const std::size_t k = g_.index(i, j);
        if (g_.cls(k) == NodeClass::Exterior) continue;
        const std::size_t e = k + 1, w = k - 1, n = k + nx, s = k - nx;
        double fprime = 1.0;
        if (p.hessian_power == 1) {
          const double uxx = (v[e] - 2 * v[k] + v[w]) * ih2, uyy = (v[n] - 2 * v[k] + v[s]) * ih2;
          const double uxy = (v[n + 1] - v[s + 1] - v[n - 1] + v[s - 1]) * i4h2;
          fprime = 0.5 / std::sqrt(uxx * uxx + uyy * uyy + 2 * uxy * uxy + p.eta * p.eta + 1e-300);
        }
        const double wh = 2.0 * p.eps * h2 * fprime;
        add_row({{e, ih2}, {k, -2 * ih2}, {w, ih2}}, wh);
        add_row({{n, ih2}, {k, -2 * ih2}, {s, ih2}}, wh);
        add_row({{n + 1, i4h2}, {s - 1, i4h2}, {s + 1, -i4h2}, {n - 1, -i4h2}}, 2.0 * wh);
        const double gx = (v[e] - v[w]) * i2h, gy = (v[n] - v[s]) * i2h;
        add_row({{e, gx * i2h}, {w, -gx * i2h}, {n, gy * i2h}, {s, -gy * i2h}}, 8.0 * h2 / p.eps);
      }
    }
    SpMat P(static_cast<long>(n_), static_cast<long>(n_));
    P.setFromTriplets(trip.begin(), trip.end());
    double dmax = 0.0;
    for (long c = 0; c < P.outerSize(); ++c) dmax = std::max(dmax, P.coeff(c, c));
    for (long c = 0; c < P.outerSize(); ++c) P.coeffRef(c, c) += 1e-12 * dmax;
    P_ = std::move(P);
    solver_.compute(P_);
    if (solver_.info() != Eigen::Success) throw std::runtime_error("preconditioner factorization failed");
  }

  void solve(const std::vector<double>& r, std::vector<double>& z) const {
    Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<long>(r.size()));
    z.resize(r.size());
    Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<long>(z.size())) = solver_.solve(rv);
  }

  double energy_norm2(const std::vector<double>& s) const {
    Eigen::Map<const Eigen::VectorXd> sv(s.data(), static_cast<long>(s.size()));
    return sv.dot(P_ * sv);
  }

 private:
  const Grid& g_;
  std::vector<long> col_;
  std::size_t n_ = 0;
  SpMat P_;
  Eigen::SimplicialLDLT<SpMat> solver_;
};

class LevelSolver {
 public:
  LevelSolver(ScalarField& u, const EnergyParams& p, const MinimizeOptions& o, MinimizeResult& r)
      : u_(u), p_(p), o_(o), r_(r), h_(u.grid->h()) {
    const Grid& g = *u.grid;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g.cls(k) == NodeClass::Interior) free_.push_back(k);
    }
    if (o.precondition) pc_.emplace(g, free_);
  }

  // Returns true when grad_norm <= tol was reached.
  bool run() {
    const std::size_t n = free_.size();
    std::vector<double> x(n), g, d(n), z, x_old, g_new;
    for (std::size_t c = 0; c < n; ++c) x[c] = u_[free_[c]];
    EnergySplit e = eval(x, g);
    double gn = grad_norm(g, h_);
    record(e, gn);
    std::deque<double> recent{e.total};
    std::deque<std::vector<double>> S, Y;
    double alpha = 1.0;
    int since_refresh = o_.precond_refresh;

    for (int it = 0; it < o_.max_iter; ++it) {
      if (gn <= o_.tol) return true;
      if (pc_ && since_refresh >= o_.precond_refresh) {
        pc_->assemble(u_, p_);
        since_refresh = 0;
      }

      if (o_.optimizer == Optimizer::BB || S.empty()) {
        apply_h0(g, z, nullptr);
        const double a0 = (it == 0 || !(alpha > 0.0)) ? initial_step(g) : alpha;
        for (std::size_t c = 0; c < n; ++c) d[c] = -a0 * z[c];
      } else {
        lbfgs_direction(g, S, Y, d);
      }
      if (!(dotv(d, g) < 0.0)) {
        S.clear();
        Y.clear();
        apply_h0(g, z, nullptr);
        const double a0 = initial_step(g);
        for (std::size_t c = 0; c < n; ++c) d[c] = -a0 * z[c];
      }

      const double slope = dotv(d, g);
      const double e_ref = *std::max_element(recent.begin(), recent.end());
      x_old = x;
      double t = 1.0;
      bool accepted = false;
      EnergySplit e_new;
      for (int ls = 0; ls < 60; ++ls) {
        for (std::size_t c = 0; c < n; ++c) x[c] = x_old[c] + t * d[c];
        try {
          e_new = eval(x, g_new);
          // Armijo, or the approximate Wolfe test once energy differences sit at rounding level
          const bool armijo = e_new.total < e_ref + 1e-4 * t * slope;
          const double dphi = t * dotv(g_new, d);
          const bool approx_wolfe = e_new.total <= e_ref + 1e-12 * std::abs(e_ref) && dphi >= 0.9 * t * slope &&
                                    dphi <= -0.8 * t * slope;
          if (armijo || approx_wolfe) {
            accepted = true;
            break;
          }
        } catch (const NonFiniteEnergy&) {
        }
        t *= 0.5;
      }
      if (!accepted) {
        x = x_old;
        eval(x, g_new);
        if (r_.energy_history.size() == level_start_ + 1) {
          throw LineSearchFailure("line search failed at the first step of an eta level");
        }
        stopped_ = true;
        return false;
      }

      std::vector<double> s(n), y(n);
      for (std::size_t c = 0; c < n; ++c) {
        s[c] = x[c] - x_old[c];
        y[c] = g_new[c] - g[c];
      }
      const double sy = dotv(s, y);
      if (o_.optimizer == Optimizer::BB) {
        const double sPs = pc_ ? pc_->energy_norm2(s) : dotv(s, s);
        alpha = sy > 0.0 ? std::clamp(sPs / sy, 1e-12, 1e12) : 2.0 * t * alpha;
      } else if (sy > 1e-12 * std::sqrt(dotv(s, s) * dotv(y, y))) {
        S.push_back(std::move(s));
        Y.push_back(std::move(y));
        if (static_cast<int>(S.size()) > o_.lbfgs_memory) {
          S.pop_front();
          Y.pop_front();
        }
      }

      g.swap(g_new);
      e = e_new;
      gn = grad_norm(g, h_);
      record(e, gn);
      ++r_.iterations;
      ++since_refresh;
      recent.push_back(e.total);
      if (static_cast<int>(recent.size()) > std::max(1, o_.nonmonotone_memory)) recent.pop_front();
    }
    return gn <= o_.tol;
  }

  bool stopped() const { return stopped_; }
  void set_level_start(std::size_t s) { level_start_ = s; }

 private:
  EnergySplit eval(const std::vector<double>& x, std::vector<double>& g) {
    for (std::size_t c = 0; c < free_.size(); ++c) u_[free_[c]] = x[c];
    const EnergySplit e = energy_and_gradient(u_, p_, full_);
    g.resize(free_.size());
    for (std::size_t c = 0; c < free_.size(); ++c) g[c] = full_[free_[c]];
    return e;
  }

  double initial_step(const std::vector<double>& g) const {
    return pc_ ? 1.0 : 0.01 * h_ / std::max(max_abs(g), 1e-300);
  }

  // z = H0 g; gamma is the unpreconditioned L-BFGS scaling.
  void apply_h0(const std::vector<double>& g, std::vector<double>& z, const double* gamma) const {
    if (pc_) {
      pc_->solve(g, z);
    } else {
      z = g;
      if (gamma) {
        for (double& v : z) v *= *gamma;
      }
    }
  }

  void record(const EnergySplit& e, double gn) {
    r_.energy_history.push_back(e);
    r_.grad_norm_history.push_back(gn);
  }

  void lbfgs_direction(const std::vector<double>& g, const std::deque<std::vector<double>>& S,
                       const std::deque<std::vector<double>>& Y, std::vector<double>& d) const {
    const std::size_t m = S.size();
    std::vector<double> q = g, a(m), rho(m), r;
    for (std::size_t i = m; i-- > 0;) {
      rho[i] = 1.0 / dotv(Y[i], S[i]);
      a[i] = rho[i] * dotv(S[i], q);
      for (std::size_t k = 0; k < q.size(); ++k) q[k] -= a[i] * Y[i][k];
    }
    const double gamma = dotv(S[m - 1], Y[m - 1]) / dotv(Y[m - 1], Y[m - 1]);
    apply_h0(q, r, &gamma);
    for (std::size_t i = 0; i < m; ++i) {
      const double b = rho[i] * dotv(Y[i], r);
      for (std::size_t k = 0; k < r.size(); ++k) r[k] += S[i][k] * (a[i] - b);
    }
    for (std::size_t k = 0; k < r.size(); ++k) d[k] = -r[k];
  }

  ScalarField& u_;
  EnergyParams p_;
  const MinimizeOptions& o_;
  MinimizeResult& r_;
  double h_;
  std::vector<std::size_t> free_;
  std::vector<double> full_;
  std::optional<GaussNewton> pc_;
  std::size_t level_start_ = 0;
  bool stopped_ = false;
};

}  // namespace

ScalarField pinned_limit_field(const Domain& domain, GridPtr grid) {
  ScalarField u(grid);
  for (std::size_t k = 0; k < grid->size(); ++k) u[k] = signed_distance(domain, grid->node(k));
  return u;
}

ScalarField mollify_interior(const ScalarField& u, double radius) {
  const Grid& g = *u.grid;
  if (radius <= 0.0) return u;
  const int w = static_cast<int>(std::ceil(3.0 * radius));
  std::vector<double> ker(2 * w + 1);
  for (int q = -w; q <= w; ++q) ker[q + w] = std::exp(-0.5 * (q / radius) * (q / radius));

  auto pass = [&](const std::vector<double>& in, bool along_x) {
    std::vector<double> out(in.size());
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        double s = 0.0, wsum = 0.0;
        for (int q = -w; q <= w; ++q) {
          const int ii = along_x ? i + q : i, jj = along_x ? j : j + q;
          if (!g.in_range(ii, jj)) continue;
          s += ker[q + w] * in[g.index(ii, jj)];
          wsum += ker[q + w];
        }
        out[g.index(i, j)] = s / wsum;
      }
    }
    return out;
  };
  const std::vector<double> blurred = pass(pass(u.values, true), false);
  ScalarField out = u;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.cls(k) == NodeClass::Interior) out[k] = blurred[k];
  }
  return out;
}

std::vector<double> eta_schedule(double eta0, double eta_min) {
  if (!(eta0 > 0.0) || !(eta_min > 0.0)) throw std::invalid_argument("eta_schedule: eta0 and eta_min must be positive");
  std::vector<double> out;
  double eta = eta0;
  while (true) {
    out.push_back(std::max(eta_min, eta));
    if (eta <= eta_min) break;
    eta *= 0.5;
  }
  return out;
}

MinimizeResult minimize(const Domain& domain, GridPtr grid, double eps, const MinimizeOptions& opts) {
  if (!(eps > 0.0)) throw std::invalid_argument("minimize: eps must be positive");
  const ScalarField pinned = pinned_limit_field(domain, grid);
  ScalarField u;
  if (opts.warm_start) {
    if (opts.warm_start->grid->size() != grid->size()) throw std::invalid_argument("minimize: warm start on another grid");
    u = ScalarField(grid);
    u.values = opts.warm_start->values;
  } else {
    u = mollify_interior(pinned, opts.blur_radius);
  }
  for (std::size_t k = 0; k < grid->size(); ++k) {
    if (grid->cls(k) != NodeClass::Interior) u[k] = pinned[k];
  }

  MinimizeResult res;
  res.eps = eps;
  std::vector<double> levels;
  if (opts.hessian_power == 1) {
    const double eta_min = opts.eta_min > 0.0 ? opts.eta_min : 1e-4 / grid->h();
    levels = eta_schedule(std::max(opts.eta0, eta_min), eta_min);
  } else {
    levels = {0.0};
  }

  bool ok = false;
  for (double eta : levels) {
    res.level_starts.push_back(res.energy_history.size());
    res.eta_levels.push_back(eta);
    LevelSolver solver(u, EnergyParams{eps, eta, opts.hessian_power}, opts, res);
    solver.set_level_start(res.energy_history.size());
    ok = solver.run();
    res.eta_final = eta;
    if (solver.stopped()) break;
  }
  res.converged = ok;
  res.u = std::move(u);
  return res;
}

std::vector<LimitRow> energy_limit_table(const Domain& domain, GridPtr grid, const std::vector<double>& eps_list,
                                         double f0, const MinimizeOptions& opts) {
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) throw std::invalid_argument("energy_limit_table: eps_list must be decreasing");
  }
  const ScalarField ubar = pinned_limit_field(domain, grid);
  const auto interior = grid->region(NodeClass::Interior);
  std::vector<LimitRow> rows;
  MinimizeOptions o = opts;
  for (double eps : eps_list) {
    MinimizeResult r = minimize(domain, grid, eps, o);
    LimitRow row;
    row.eps = eps;
    row.energy = energy(r.u, EnergyParams{eps, r.eta_final, opts.hessian_power});
    row.w11 = w11_distance(r.u, ubar, interior);
    row.energy_gap = f0 != 0.0 ? std::abs(row.energy.total - f0) / f0 : std::numeric_limits<double>::quiet_NaN();
    row.iterations = r.iterations;
    row.converged = r.converged;
    rows.push_back(row);
    o.warm_start = std::move(r.u);
  }
  return rows;
}

}  // namespace aglab
