#include "aglab/functional.hpp"

#include <cmath>
#include <stdexcept>

#include "aglab/errors.hpp"

namespace aglab {

namespace {

void check_params(const EnergyParams& p) {
  if (!(p.eps > 0.0)) throw std::invalid_argument("energy: eps must be positive");
  if (p.eta < 0.0) throw std::invalid_argument("energy: eta must be >= 0");
  if (p.hessian_power != 1 && p.hessian_power != 2) throw std::invalid_argument("energy: hessian_power must be 1 or 2");
}

template <bool WithGrad>
EnergySplit evaluate(const ScalarField& u, const EnergyParams& p, std::vector<double>* grad) {
  check_params(p);
  const Grid& g = *u.grid;
  const double h = g.h(), h2 = h * h;
  const double inv2h = 1.0 / (2.0 * h), invh2 = 1.0 / h2, inv4h2 = 1.0 / (4.0 * h2);
  const int nx = g.nx();
  const double* v = u.values.data();
  if constexpr (WithGrad) grad->assign(g.size(), 0.0);
  double* gr = WithGrad ? grad->data() : nullptr;

  double hess = 0.0, pot = 0.0;
  for (int j = 1; j + 1 < g.ny(); ++j) {
    for (int i = 1; i + 1 < nx; ++i) {
      const std::size_t k = g.index(i, j);
      if (g.cls(k) == NodeClass::Exterior) continue;
      const std::size_t e = k + 1, w = k - 1, n = k + nx, s = k - nx;
      const double gx = (v[e] - v[w]) * inv2h;
      const double gy = (v[n] - v[s]) * inv2h;
      const double uxx = (v[e] - 2.0 * v[k] + v[w]) * invh2;
      const double uyy = (v[n] - 2.0 * v[k] + v[s]) * invh2;
      const double uxy = (v[n + 1] - v[s + 1] - v[n - 1] + v[s - 1]) * inv4h2;
      const double H2 = uxx * uxx + uyy * uyy + 2.0 * uxy * uxy;
      const double defect = 1.0 - gx * gx - gy * gy;

      double hterm, dH2;
      if (p.hessian_power == 1) {
        const double r = std::sqrt(H2 + p.eta * p.eta);
        hterm = r - p.eta;
        dH2 = r > 0.0 ? 0.5 / r : 0.0;
      } else {
        hterm = H2;
        dH2 = 1.0;
      }
      hess += hterm;
      pot += defect * defect;

      if constexpr (WithGrad) {
        const double cg = -4.0 * defect / p.eps * h2;
        const double cx = cg * gx * inv2h, cy = cg * gy * inv2h;
        gr[e] += cx;
        gr[w] -= cx;
        gr[n] += cy;
        gr[s] -= cy;
        const double ch = p.eps * dH2 * h2;
        const double axx = ch * 2.0 * uxx * invh2, ayy = ch * 2.0 * uyy * invh2;
        gr[e] += axx;
        gr[w] += axx;
        gr[k] -= 2.0 * (axx + ayy);
        gr[n] += ayy;
        gr[s] += ayy;
        const double axy = ch * 4.0 * uxy * inv4h2;
        gr[n + 1] += axy;
        gr[s - 1] += axy;
        gr[s + 1] -= axy;
        gr[n - 1] -= axy;
      }
    }
  }
  EnergySplit out;
  out.hessian_term = p.eps * h2 * hess;
  out.potential_term = h2 * pot / p.eps;
  out.total = out.hessian_term + out.potential_term;
  if (!std::isfinite(out.total)) throw NonFiniteEnergy("energy evaluation produced a non-finite value");
  if constexpr (WithGrad) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g.cls(k) != NodeClass::Interior) gr[k] = 0.0;
    }
  }
  return out;
}

}  // namespace

EnergySplit energy(const ScalarField& u, const EnergyParams& p) { return evaluate<false>(u, p, nullptr); }

ScalarField energy_gradient(const ScalarField& u, const EnergyParams& p) {
  ScalarField g(u.grid);
  evaluate<true>(u, p, &g.values);
  return g;
}

EnergySplit energy_and_gradient(const ScalarField& u, const EnergyParams& p, std::vector<double>& grad) {
  return evaluate<true>(u, p, &grad);
}

double grad_norm(const std::vector<double>& grad, double h) {
  double s = 0.0;
  for (double x : grad) s += x * x;
  return std::sqrt(s) / h;
}

}  // namespace aglab
