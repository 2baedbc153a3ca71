#pragma once

#include <optional>
#include <string>
#include <variant>

#include "aglab/vec2.hpp"

namespace aglab {

/// Ellipse x1^2/a^2 + x2^2/b^2 < 1 with the major axis on the x1-axis.
struct Ellipse {
  double a = 1.0;
  double b = 0.5;
};

/// Stadium {x : dist(x, [0,L] x {0}) < R}.
struct Stadium {
  double L = 2.0;
  double R = 1.0;
};

/// Analytic convex domain together with the collar width delta of the extended domain.
class Domain {
 public:
  using Shape = std::variant<Ellipse, Stadium>;

  /// delta <= 0 selects the default collar width (0.1 b resp. 0.1 R).
  explicit Domain(Shape shape, double delta = -1.0);

  static Domain ellipse(double a, double b, double delta = -1.0) { return Domain(Ellipse{a, b}, delta); }
  static Domain stadium(double L, double R, double delta = -1.0) { return Domain(Stadium{L, R}, delta); }

  const Shape& shape() const { return shape_; }
  double delta() const { return delta_; }
  bool is_ellipse() const { return std::holds_alternative<Ellipse>(shape_); }
  std::string kind_name() const { return is_ellipse() ? "ellipse" : "stadium"; }

  /// Length scale of the shortest half-axis (b for ellipses, R for stadiums).
  double minor_scale() const;

  /// Axis-aligned bounding box of Omega (without collar).
  std::pair<Vec2, Vec2> bounding_box() const;

  bool contains(Vec2 x) const;

  /// Outward unit normal at a boundary point p.
  Vec2 outward_normal(Vec2 p) const;

  double area() const;
  double perimeter() const;

 private:
  Shape shape_;
  double delta_;
};

/// Tie-break for points whose closest boundary point is not unique (ridge points).
enum class Side { Upper, Lower };

/// Unique closest point on the boundary. Throws AmbiguousProjection on the ridge and
/// NoConvergence if the ellipse iteration stalls.
Vec2 project_to_boundary(const Domain& domain, Vec2 x);

/// Closest point; on the ridge the tie is resolved towards the given side instead of throwing.
Vec2 project_to_boundary_side(const Domain& domain, Vec2 x, Side side);

/// dist(x, dOmega) inside, -dist(x, dOmega) outside.
double signed_distance(const Domain& domain, Vec2 x);

/// Traces of grad-perp of the distance function at a ridge point.
struct RidgeTraces {
  Vec2 point;
  Vec2 normal{0.0, 1.0};
  Vec2 m_plus;   // upper side (x2 > 0)
  Vec2 m_minus;  // lower side
  double beta = 0.0;        // in (0, pi), m_plus = e^{i(s_bar + beta)}
  double s_bar = 0.0;       // in [0, 2pi), m_minus = e^{i(s_bar - beta)}
  double half_angle = 0.0;  // min(beta, pi - beta), in (0, pi/2]
  double orientation = 1.0; // normal . e^{i s_bar}, either +1 or -1

  /// |m_plus - m_minus|
  double jump() const { return 2.0 * std::sin(beta); }
};

/// Horizontal ridge segment [x_left, x_right] x {0} of the distance function.
struct RidgeSet {
  Vec2 p_minus;
  Vec2 p_plus;

  bool degenerate() const { return p_plus.x - p_minus.x <= 0.0; }
  double length() const { return p_plus.x - p_minus.x; }
  /// Euclidean distance from x to the segment.
  double distance(Vec2 x) const;
};

RidgeSet ridge_set(const Domain& domain);

/// Traces at the ridge point (x1, 0); x1 must lie in the open segment.
RidgeTraces ridge_traces(const Domain& domain, double x1);

/// Exact limit data at one point: value of u-bar^delta and m-bar = grad-perp u-bar^delta.
/// Ridge points take the value from the side selected by sign(x2), x2 = 0 counting as upper.
struct LimitSample {
  double u = 0.0;
  Vec2 grad;
  Vec2 m;
};

LimitSample limit_sample(const Domain& domain, Vec2 x);

}  // namespace aglab
