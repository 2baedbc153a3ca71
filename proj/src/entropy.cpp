#include "aglab/entropy.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/trapezoidal.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aglab/errors.hpp"
#include "aglab/fields.hpp"

namespace aglab {

double TrigPoly::operator()(double s) const {
  double v = cos_c.empty() ? 0.0 : cos_c[0];
  for (std::size_t k = 1; k < cos_c.size(); ++k) {
    v += cos_c[k] * std::cos(k * s) + sin_c[k] * std::sin(k * s);
  }
  return v;
}

TrigPoly TrigPoly::derivative() const {
  TrigPoly d(degree());
  for (std::size_t k = 1; k < cos_c.size(); ++k) {
    d.cos_c[k] = k * sin_c[k];
    d.sin_c[k] = -static_cast<double>(k) * cos_c[k];
  }
  return d;
}

TrigPoly TrigPoly::antiderivative() const {
  TrigPoly a(degree());
  for (std::size_t k = 1; k < cos_c.size(); ++k) {
    a.cos_c[k] = -sin_c[k] / k;
    a.sin_c[k] = cos_c[k] / k;
  }
  return a;
}

TrigPoly TrigPoly::shifted(double shift) const {
  TrigPoly r(degree());
  if (cos_c.empty()) return r;
  r.cos_c[0] = cos_c[0];
  for (std::size_t k = 1; k < cos_c.size(); ++k) {
    const double c = std::cos(k * shift), s = std::sin(k * shift);
    r.cos_c[k] = cos_c[k] * c + sin_c[k] * s;
    r.sin_c[k] = -cos_c[k] * s + sin_c[k] * c;
  }
  return r;
}

// cos(ks) cos s = (cos((k+1)s) + cos((k-1)s)) / 2, sin(ks) cos s = (sin((k+1)s) + sin((k-1)s)) / 2
TrigPoly TrigPoly::times_cos() const {
  TrigPoly r(degree() + 1);
  for (std::size_t k = 0; k < cos_c.size(); ++k) {
    const double c = cos_c[k], s = k > 0 ? sin_c[k] : 0.0;
    if (k == 0) {
      r.cos_c[1] += c;
      continue;
    }
    r.cos_c[k + 1] += 0.5 * c;
    r.sin_c[k + 1] += 0.5 * s;
    if (k == 1) {
      r.cos_c[0] += 0.5 * c;
    } else {
      r.cos_c[k - 1] += 0.5 * c;
      r.sin_c[k - 1] += 0.5 * s;
    }
  }
  return r;
}

// cos(ks) sin s = (sin((k+1)s) - sin((k-1)s)) / 2, sin(ks) sin s = (cos((k-1)s) - cos((k+1)s)) / 2
TrigPoly TrigPoly::times_sin() const {
  TrigPoly r(degree() + 1);
  for (std::size_t k = 0; k < cos_c.size(); ++k) {
    const double c = cos_c[k], s = k > 0 ? sin_c[k] : 0.0;
    if (k == 0) {
      r.sin_c[1] += c;
      continue;
    }
    r.sin_c[k + 1] += 0.5 * c;
    r.cos_c[k + 1] -= 0.5 * s;
    if (k == 1) {
      r.cos_c[0] += 0.5 * s;
    } else {
      r.sin_c[k - 1] -= 0.5 * c;
      r.cos_c[k - 1] += 0.5 * s;
    }
  }
  return r;
}

TrigPoly TrigPoly::operator+(const TrigPoly& o) const {
  TrigPoly r(std::max(degree(), o.degree()));
  for (std::size_t k = 0; k < cos_c.size(); ++k) {
    r.cos_c[k] += cos_c[k];
    r.sin_c[k] += sin_c[k];
  }
  for (std::size_t k = 0; k < o.cos_c.size(); ++k) {
    r.cos_c[k] += o.cos_c[k];
    r.sin_c[k] += o.sin_c[k];
  }
  return r;
}

TrigPoly TrigPoly::operator*(double k) const {
  TrigPoly r = *this;
  for (double& c : r.cos_c) c *= k;
  for (double& s : r.sin_c) s *= k;
  return r;
}

TrigPoly TrigPoly::fit(const std::function<double(double)>& f, std::size_t degree, std::size_t n) {
  n = std::max(n, 2 * degree + 2);
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = f(kTwoPi * j / n);
  TrigPoly p(degree);
  for (std::size_t k = 0; k <= degree; ++k) {
    double c = 0.0, s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double t = kTwoPi * static_cast<double>(k * j % n) / n;
      c += v[j] * std::cos(t);
      s += v[j] * std::sin(t);
    }
    const double scale = (k == 0 || 2 * k == n) ? 1.0 / n : 2.0 / n;
    p.cos_c[k] = c * scale;
    p.sin_c[k] = k == 0 ? 0.0 : s * scale;
  }
  return p;
}

TrigPoly TrigPoly::cos_mode(int k, double amp) {
  TrigPoly p(static_cast<std::size_t>(k));
  p.cos_c[k] = amp;
  return p;
}

TrigPoly TrigPoly::sin_mode(int k, double amp) {
  if (k < 1) throw std::invalid_argument("sin_mode: k must be >= 1");
  TrigPoly p(static_cast<std::size_t>(k));
  p.sin_c[k] = amp;
  return p;
}

Vec2 sigma_frame(const Frame& frame, Vec2 z) {
  const Vec2 a1 = frame.alpha1(), a2 = frame.alpha2();
  const double p1 = dot(z, a1), p2 = dot(z, a2);
  return (a1 * (p2 * p2 * p2) + a2 * (p1 * p1 * p1)) * (4.0 / 3.0);
}

bool EntropyGenerator::pi_periodic(double tol) const {
  for (std::size_t k = 1; k < psi.cos_c.size(); k += 2) {
    if (std::abs(psi.cos_c[k]) > tol || std::abs(psi.sin_c[k]) > tol) return false;
  }
  return true;
}

Vec2 EntropyMap::derivative(double s) const { return {x.derivative()(s), y.derivative()(s)}; }

EntropyMap entropy_from_generator(const EntropyGenerator& gen) {
  const TrigPoly& psi = gen.psi;
  if (psi.degree() >= 1 && (std::abs(psi.cos_c[1]) > 1e-12 || std::abs(psi.sin_c[1]) > 1e-12)) {
    throw NonClosed("generator has a first harmonic; the entropy does not close on the circle");
  }
  // dPhi/ds = 2 psi(s + pi/2) (-sin s, cos s)
  const TrigPoly q = psi.shifted(0.5 * kPi) * 2.0;
  const TrigPoly dx = q.times_sin() * -1.0;
  const TrigPoly dy = q.times_cos();
  if (std::abs(dx.cos_c[0]) > 1e-12 || std::abs(dy.cos_c[0]) > 1e-12) {
    throw NonClosed("closure integral of the entropy derivative is nonzero");
  }
  return {dx.antiderivative(), dy.antiderivative()};
}

EntropyMap entropy_from_function(const std::function<Vec2(double)>& phi, std::size_t degree) {
  return {TrigPoly::fit([&](double s) { return phi(s).x; }, degree),
          TrigPoly::fit([&](double s) { return phi(s).y; }, degree)};
}

EntropyGenerator generator_of(const EntropyMap& phi) {
  const std::size_t deg = std::max(phi.x.degree(), phi.y.degree()) + 1;
  return {TrigPoly::fit([&](double t) { return 0.5 * dot(phi.derivative(t - 0.5 * kPi), unit(t)); }, deg)};
}

EntropyMap frame_entropy(const Frame& frame) {
  return entropy_from_function([frame](double s) { return sigma_frame(frame, unit(s)); }, 3);
}

double entropy_defect(const EntropyMap& phi, std::size_t samples) {
  double m = 0.0;
  for (std::size_t j = 0; j < samples; ++j) {
    const double s = kTwoPi * j / samples;
    m = std::max(m, std::abs(dot(phi.derivative(s), unit(s))));
  }
  return m;
}

CellMeasure entropy_production(const VectorField& m, const EntropyMap& phi, std::size_t* flagged) {
  VectorField F(m.grid);
  std::size_t bad = 0;
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < m.values.size(); ++k) {
    const double r = norm(m[k]);
    if (!std::isfinite(r) || std::abs(r - 1.0) > 0.1) {
      F[k] = {kNaN, kNaN};
      if (m.grid->cls(k) != NodeClass::Exterior) ++bad;
      continue;
    }
    F[k] = phi.at(m[k]);
  }
  if (flagged) *flagged = bad;
  return weak_divergence(F);
}

double f0_tilde_two_frames(const VectorField& m) {
  const auto active = m.grid->active_region();
  const double te = entropy_production(m, frame_entropy(Frame{0.0})).total_variation(active);
  const double tr = entropy_production(m, frame_entropy(Frame{0.25 * kPi})).total_variation(active);
  return std::hypot(te, tr);
}

double f0_tilde_sup(const VectorField& m, int n_frames) {
  if (n_frames < 2) throw std::invalid_argument("f0_tilde_sup: n_frames must be >= 2");
  const Grid& g = *m.grid;
  std::vector<double> best(g.size(), 0.0);
  for (int k = 0; k < n_frames; ++k) {
    const CellMeasure mu = entropy_production(m, frame_entropy(Frame{k * kPi / (2.0 * n_frames)}));
    for (std::size_t c = 0; c < g.size(); ++c) best[c] = std::max(best[c], std::abs(mu.mass[c]));
  }
  double s = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (g.cls(c) != NodeClass::Exterior) s += best[c];
  }
  return s;
}

double f0_jump(const Domain& domain) {
  const RidgeSet ridge = ridge_set(domain);
  if (ridge.degenerate()) return 0.0;
  auto density = [&](double x1) {
    if (x1 <= ridge.p_minus.x || x1 >= ridge.p_plus.x) return 0.0;
    const double j = ridge_traces(domain, x1).jump();
    return j * j * j / 3.0;
  };
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(density, ridge.p_minus.x, ridge.p_plus.x,
                                                                                  15, 1e-12, &err);
  if (!(err <= 1e-8 * std::max(1.0, std::abs(v)))) throw QuadratureFailure("f0_jump: quadrature error above 1e-8");
  return v;
}

double sigma_boundary_flux(const Domain& domain, const Frame& frame) {
  const double d = domain.delta();
  // Offset point q = p + d nu, outward normal nu, arc element (1 + kappa d) ds.
  auto integrand = [&](Vec2 p, Vec2 nu, double kappa, double ds) {
    const LimitSample s = limit_sample(domain, p + nu * d);
    return dot(sigma_frame(frame, s.m), nu) * (1.0 + kappa * d) * ds;
  };
  if (const auto* e = std::get_if<Ellipse>(&domain.shape())) {
    const double a = e->a, b = e->b;
    auto f = [&](double t) {
      const Vec2 p{a * std::cos(t), b * std::sin(t)};
      const double speed = std::hypot(a * std::sin(t), b * std::cos(t));
      const double kappa = a * b / (speed * speed * speed);
      return integrand(p, domain.outward_normal(p), kappa, speed);
    };
    return boost::math::quadrature::trapezoidal(f, 0.0, kTwoPi, 1e-13);
  }
  const auto& st = std::get<Stadium>(domain.shape());
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double top = GK::integrate([&](double x) { return integrand({x, st.R}, {0.0, 1.0}, 0.0, 1.0); }, 0.0, st.L, 10, 1e-13);
  const double bottom = GK::integrate([&](double x) { return integrand({x, -st.R}, {0.0, -1.0}, 0.0, 1.0); }, 0.0, st.L, 10, 1e-13);
  auto cap = [&](double cx, double t0) {
    return GK::integrate(
        [&](double t) {
          const Vec2 nu = unit(t);
          return integrand(Vec2{cx, 0.0} + nu * st.R, nu, 1.0 / st.R, st.R);
        },
        t0, t0 + kPi, 10, 1e-13);
  };
  return top + bottom + cap(st.L, -0.5 * kPi) + cap(0.0, 0.5 * kPi);
}

}  // namespace aglab
