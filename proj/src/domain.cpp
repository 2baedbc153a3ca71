#include "aglab/domain.hpp"

#include <algorithm>
#include <boost/math/quadrature/trapezoidal.hpp>
#include <cmath>
#include <stdexcept>

#include "aglab/errors.hpp"

namespace aglab {

namespace {

constexpr double kTieTol = 1e-12;
constexpr double kNewtonTol = 1e-12;
constexpr int kNewtonMaxIter = 60;

struct QuadrantProjection {
  Vec2 p;
  bool tie = false;
};

// Closest point of the ellipse to y with y1, y2 >= 0. For y2 > 0, y1 > 0 the closest point is
// p = (a^2 y1 / (t + a^2), b^2 y2 / (t + b^2)) where t > -b^2 is the root of the decreasing
// convex function F(t) = (a y1/(t+a^2))^2 + (b y2/(t+b^2))^2 - 1; Newton from the left is monotone.
QuadrantProjection ellipse_quadrant(double a, double b, double y1, double y2) {
  if (a == b) {
    const double r = std::hypot(y1, y2);
    if (r <= kTieTol * a) return {{0.0, b}, true};
    return {{a * y1 / r, a * y2 / r}, false};
  }
  if (y2 <= 0.0) {
    const double end = (a * a - b * b) / a;
    if (y1 < end) {
      const double p1 = a * a * y1 / (a * a - b * b);
      const double q = p1 / a;
      return {{p1, b * std::sqrt(std::max(0.0, 1.0 - q * q))}, true};
    }
    return {{a, 0.0}, false};
  }
  if (y1 <= 0.0) return {{0.0, b}, false};

  const double ay = a * y1, by = b * y2;
  double t = -b * b + by;
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const double da = t + a * a, db = t + b * b;
    const double r1 = ay / da, r2 = by / db;
    const double f = r1 * r1 + r2 * r2 - 1.0;
    const double df = -2.0 * (r1 * r1 / da + r2 * r2 / db);
    double step = -f / df;
    // damping: never cross the pole at t = -b^2
    while (t + step + b * b <= 0.0) step *= 0.5;
    t += step;
    if (std::abs(step) <= kNewtonTol * std::max(1.0, std::abs(t))) {
      return {{a * a * y1 / (t + a * a), b * b * y2 / (t + b * b)}, false};
    }
  }
  throw NoConvergence("ellipse projection did not converge");
}

QuadrantProjection project_ellipse(const Ellipse& e, Vec2 x, Side side) {
  const double sx = x.x < 0.0 ? -1.0 : 1.0;
  double sy = x.y < 0.0 ? -1.0 : 1.0;
  if (std::abs(x.y) <= kTieTol * e.b) {
    auto q = ellipse_quadrant(e.a, e.b, std::abs(x.x), 0.0);
    if (q.tie) sy = side == Side::Upper ? 1.0 : -1.0;
    return {{sx * q.p.x, sy * q.p.y}, q.tie};
  }
  auto q = ellipse_quadrant(e.a, e.b, std::abs(x.x), std::abs(x.y));
  return {{sx * q.p.x, sy * q.p.y}, q.tie};
}

QuadrantProjection project_stadium(const Stadium& st, Vec2 x, Side side) {
  if (x.x >= 0.0 && x.x <= st.L) {
    if (std::abs(x.y) <= kTieTol * st.R) {
      return {{x.x, side == Side::Upper ? st.R : -st.R}, true};
    }
    return {{x.x, x.y > 0.0 ? st.R : -st.R}, false};
  }
  const Vec2 c{x.x < 0.0 ? 0.0 : st.L, 0.0};
  const Vec2 d = x - c;
  const double r = norm(d);
  if (r <= kTieTol * st.R) return {{c.x, side == Side::Upper ? st.R : -st.R}, true};
  return {c + d * (st.R / r), false};
}

QuadrantProjection project(const Domain& domain, Vec2 x, Side side) {
  return std::visit(
      [&](const auto& s) -> QuadrantProjection {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ellipse>) {
          return project_ellipse(s, x, side);
        } else {
          return project_stadium(s, x, side);
        }
      },
      domain.shape());
}

}  // namespace

Domain::Domain(Shape shape, double delta) : shape_(shape) {
  if (const auto* e = std::get_if<Ellipse>(&shape_)) {
    if (!(e->b > 0.0) || e->a < e->b) throw std::invalid_argument("ellipse requires a >= b > 0");
  } else {
    const auto& s = std::get<Stadium>(shape_);
    if (!(s.L > 0.0) || !(s.R > 0.0)) throw std::invalid_argument("stadium requires L > 0 and R > 0");
  }
  delta_ = delta > 0.0 ? delta : 0.1 * minor_scale();
  if (delta_ > 0.5 * minor_scale() * (1.0 + 1e-12)) {
    throw std::invalid_argument("collar width exceeds half the minor scale");
  }
}

double Domain::minor_scale() const {
  if (const auto* e = std::get_if<Ellipse>(&shape_)) return e->b;
  return std::get<Stadium>(shape_).R;
}

std::pair<Vec2, Vec2> Domain::bounding_box() const {
  if (const auto* e = std::get_if<Ellipse>(&shape_)) return {{-e->a, -e->b}, {e->a, e->b}};
  const auto& s = std::get<Stadium>(shape_);
  return {{-s.R, -s.R}, {s.L + s.R, s.R}};
}

bool Domain::contains(Vec2 x) const {
  if (const auto* e = std::get_if<Ellipse>(&shape_)) {
    const double u = x.x / e->a, v = x.y / e->b;
    return u * u + v * v < 1.0;
  }
  const auto& s = std::get<Stadium>(shape_);
  const double cx = std::clamp(x.x, 0.0, s.L);
  return std::hypot(x.x - cx, x.y) < s.R;
}

Vec2 Domain::outward_normal(Vec2 p) const {
  if (const auto* e = std::get_if<Ellipse>(&shape_)) {
    const Vec2 n{p.x / (e->a * e->a), p.y / (e->b * e->b)};
    return n / norm(n);
  }
  const auto& s = std::get<Stadium>(shape_);
  const double cx = std::clamp(p.x, 0.0, s.L);
  const Vec2 d{p.x - cx, p.y};
  return d / norm(d);
}

double Domain::area() const {
  if (const auto* e = std::get_if<Ellipse>(&shape_)) return kPi * e->a * e->b;
  const auto& s = std::get<Stadium>(shape_);
  return 2.0 * s.R * s.L + kPi * s.R * s.R;
}

double Domain::perimeter() const {
  if (const auto* e = std::get_if<Ellipse>(&shape_)) {
    const double a = e->a, b = e->b;
    auto speed = [a, b](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); };
    return boost::math::quadrature::trapezoidal(speed, 0.0, kTwoPi, 1e-14);
  }
  const auto& s = std::get<Stadium>(shape_);
  return 2.0 * s.L + kTwoPi * s.R;
}

Vec2 project_to_boundary(const Domain& domain, Vec2 x) {
  auto q = project(domain, x, Side::Upper);
  if (q.tie) throw AmbiguousProjection("point lies on the ridge; closest point is not unique");
  return q.p;
}

Vec2 project_to_boundary_side(const Domain& domain, Vec2 x, Side side) {
  return project(domain, x, side).p;
}

double signed_distance(const Domain& domain, Vec2 x) {
  const Vec2 p = project(domain, x, Side::Upper).p;
  const double d = norm(x - p);
  return domain.contains(x) ? d : -d;
}

double RidgeSet::distance(Vec2 x) const {
  const double cx = std::clamp(x.x, p_minus.x, p_plus.x);
  return std::hypot(x.x - cx, x.y - p_minus.y);
}

RidgeSet ridge_set(const Domain& domain) {
  if (const auto* e = std::get_if<Ellipse>(&domain.shape())) {
    const double end = (e->a * e->a - e->b * e->b) / e->a;
    return {{-end, 0.0}, {end, 0.0}};
  }
  const auto& s = std::get<Stadium>(domain.shape());
  return {{0.0, 0.0}, {s.L, 0.0}};
}

RidgeTraces ridge_traces(const Domain& domain, double x1) {
  const RidgeSet ridge = ridge_set(domain);
  if (!(x1 > ridge.p_minus.x && x1 < ridge.p_plus.x)) {
    throw std::invalid_argument("ridge_traces: x1 outside the open ridge segment");
  }
  RidgeTraces tr;
  tr.point = {x1, 0.0};
  const Vec2 up = project_to_boundary_side(domain, tr.point, Side::Upper);
  const Vec2 down{up.x, -up.y};
  const Vec2 g_plus = (tr.point - up) / norm(tr.point - up);
  const Vec2 g_minus = (tr.point - down) / norm(tr.point - down);
  tr.m_plus = perp(g_plus);
  tr.m_minus = perp(g_minus);

  const double th_plus = angle_of(tr.m_plus);
  const double th_minus = angle_of(tr.m_minus);
  const double d = wrap_angle(th_plus - th_minus);
  tr.beta = 0.5 * d;
  tr.s_bar = wrap_angle(th_minus + tr.beta);
  tr.half_angle = std::min(tr.beta, kPi - tr.beta);
  tr.orientation = dot(tr.normal, unit(tr.s_bar)) >= 0.0 ? 1.0 : -1.0;
  return tr;
}

LimitSample limit_sample(const Domain& domain, Vec2 x) {
  const Side side = x.y >= 0.0 ? Side::Upper : Side::Lower;
  const Vec2 p = project_to_boundary_side(domain, x, side);
  const double d = norm(x - p);
  const bool inside = domain.contains(x);
  LimitSample s;
  s.u = inside ? d : -d;
  if (d > 1e-14) {
    s.grad = (x - p) * ((inside ? 1.0 : -1.0) / d);
  } else {
    s.grad = -domain.outward_normal(p);
  }
  s.m = perp(s.grad);
  return s;
}

}  // namespace aglab
