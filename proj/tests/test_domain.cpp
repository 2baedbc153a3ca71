#include <doctest.h>

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <random>

#include "aglab/domain.hpp"
#include "aglab/errors.hpp"

using namespace aglab;

namespace {

// Brute-force closest point on the ellipse: dense parameter sampling, then Brent refinement
// around the best sample.
struct SampledProjection {
  Vec2 p;
  double dist;
};

SampledProjection sampled_ellipse_projection(double a, double b, Vec2 x, int n = 1000000) {
  auto d2 = [&](double t) {
    const double dx = a * std::cos(t) - x.x, dy = b * std::sin(t) - x.y;
    return dx * dx + dy * dy;
  };
  double best_t = 0.0, best = d2(0.0);
  const double dt = kTwoPi / n;
  for (int k = 1; k < n; ++k) {
    const double v = d2(k * dt);
    if (v < best) {
      best = v;
      best_t = k * dt;
    }
  }
  auto r = boost::math::tools::brent_find_minima(d2, best_t - dt, best_t + dt, 52);
  return {{a * std::cos(r.first), b * std::sin(r.first)}, std::sqrt(r.second)};
}

}  // namespace

TEST_CASE("signed distance on the ellipse") {
  const Domain e = Domain::ellipse(1.0, 0.5);
  CHECK(signed_distance(e, {0.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(signed_distance(e, {2.0, 0.0}) == doctest::Approx(-1.0).epsilon(1e-14));

  const auto oracle = sampled_ellipse_projection(1.0, 0.5, {0.3, 0.1});
  CHECK(std::abs(signed_distance(e, {0.3, 0.1}) - oracle.dist) < 1e-8);
  const Vec2 p = project_to_boundary(e, {0.3, 0.1});
  CHECK(norm(p - oracle.p) < 1e-8);
}

TEST_CASE("projection against the sampling oracle at random points") {
  const Domain e = Domain::ellipse(1.0, 0.5);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-1.3, 1.3), uy(-0.8, 0.8);
  for (int k = 0; k < 20; ++k) {
    const Vec2 x{ux(rng), uy(rng)};
    if (std::abs(x.y) < 1e-3) continue;
    const auto oracle = sampled_ellipse_projection(1.0, 0.5, x, 200000);
    CHECK(std::abs(std::abs(signed_distance(e, x)) - oracle.dist) < 1e-9);
    CHECK(norm(project_to_boundary(e, x) - oracle.p) < 1e-7);
  }
}

TEST_CASE("stadium projection") {
  const Domain s = Domain::stadium(2.0, 1.0);
  const Vec2 p = project_to_boundary(s, {1.0, 3.0});
  CHECK(p.x == doctest::Approx(1.0));
  CHECK(p.y == doctest::Approx(1.0));
  CHECK(signed_distance(s, {1.0, 3.0}) == doctest::Approx(-2.0));
  CHECK(signed_distance(s, {-0.5, 0.0}) == doctest::Approx(0.5));
  CHECK(signed_distance(s, {3.0, 1.0}) == doctest::Approx(1.0 - std::sqrt(2.0)));
  CHECK_THROWS_AS(project_to_boundary(s, {1.0, 0.0}), AmbiguousProjection);
}

TEST_CASE("ridge endpoints") {
  const RidgeSet r = ridge_set(Domain::ellipse(1.0, 0.5));
  CHECK(r.p_minus.x == doctest::Approx(-0.75));
  CHECK(r.p_plus.x == doctest::Approx(0.75));
  CHECK(r.p_plus.y == 0.0);

  // Inside the segment the axis point (1,0) is not the closest one; beyond it, it is.
  CHECK(sampled_ellipse_projection(1.0, 0.5, {0.7, 0.0}, 200000).dist < 0.3 - 1e-4);
  const auto beyond = sampled_ellipse_projection(1.0, 0.5, {0.8, 0.0}, 200000);
  CHECK(beyond.dist == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(norm(beyond.p - Vec2{1.0, 0.0}) < 1e-6);

  const RidgeSet st = ridge_set(Domain::stadium(2.0, 1.0));
  CHECK(st.p_minus.x == 0.0);
  CHECK(st.p_plus.x == 2.0);
  CHECK(ridge_set(Domain::ellipse(0.7, 0.7)).degenerate());
}

TEST_CASE("ridge traces") {
  const Domain e = Domain::ellipse(1.0, 0.5);
  const RidgeTraces t0 = ridge_traces(e, 0.0);
  CHECK(t0.normal == Vec2{0.0, 1.0});
  CHECK(t0.m_plus.x == doctest::Approx(-t0.m_minus.x));
  CHECK(t0.beta == doctest::Approx(kPi / 2));
  CHECK(t0.half_angle == doctest::Approx(kPi / 2));

  for (double x1 = -0.74; x1 < 0.745; x1 += 0.02) {
    const RidgeTraces t = ridge_traces(e, x1);
    CHECK(norm(t.m_plus) == doctest::Approx(1.0));
    CHECK(norm(t.m_minus) == doctest::Approx(1.0));
    CHECK(t.m_plus.x == doctest::Approx(-t.m_minus.x).epsilon(1e-12));
    CHECK(t.m_plus.y == doctest::Approx(t.m_minus.y).epsilon(1e-12));
    CHECK(norm(t.m_plus - unit(t.s_bar + t.beta)) < 1e-12);
    CHECK(norm(t.m_minus - unit(t.s_bar - t.beta)) < 1e-12);
    CHECK(t.beta > 0.0);
    CHECK(t.beta < kPi);
    CHECK(t.half_angle > 0.0);
    CHECK(t.half_angle <= kPi / 2 + 1e-15);
    CHECK(t.s_bar == doctest::Approx(3 * kPi / 2));
    CHECK(t.orientation == -1.0);
    CHECK(t.jump() == doctest::Approx(norm(t.m_plus - t.m_minus)));
  }

  const Domain s = Domain::stadium(2.0, 1.0);
  for (double x1 = 0.1; x1 < 2.0; x1 += 0.3) CHECK(ridge_traces(s, x1).beta == doctest::Approx(kPi / 2));
  CHECK_THROWS(ridge_traces(e, 0.8));
}

TEST_CASE("limit field samples") {
  const Domain e = Domain::ellipse(1.0, 0.5);
  CHECK(limit_sample(e, {0.0, 0.0}).u == doctest::Approx(0.5));
  CHECK(norm(limit_sample(e, {0.3, 0.2}).m) == doctest::Approx(1.0));
  for (int k = 0; k < 64; ++k) {
    const double t = kTwoPi * k / 64;
    CHECK(std::abs(limit_sample(e, {std::cos(t), 0.5 * std::sin(t)}).u) < 1e-10);
  }
  // outside the field continues as -dist with unit gradient pointing inwards
  const LimitSample out = limit_sample(e, {1.05, 0.0});
  CHECK(out.u == doctest::Approx(-0.05));
  CHECK(norm(out.grad - Vec2{-1.0, 0.0}) < 1e-12);
}

TEST_CASE("unit gradient and idempotent projection") {
  const Domain e = Domain::ellipse(1.0, 0.5);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(-1.04, 1.04), uy(-0.54, 0.54);
  const double h = 1e-4;
  int checked = 0;
  while (checked < 200) {
    const Vec2 x{ux(rng), uy(rng)};
    if (std::abs(x.y) < 0.05 || signed_distance(e, x) < -0.05) continue;
    const double gx = (signed_distance(e, x + Vec2{h, 0}) - signed_distance(e, x - Vec2{h, 0})) / (2 * h);
    const double gy = (signed_distance(e, x + Vec2{0, h}) - signed_distance(e, x - Vec2{0, h})) / (2 * h);
    CHECK(std::abs(std::hypot(gx, gy) - 1.0) < 1e-6);
    const Vec2 p = project_to_boundary(e, x);
    CHECK(norm(project_to_boundary(e, p) - p) < 1e-10);
    ++checked;
  }
}

TEST_CASE("domain validation") {
  CHECK_THROWS(Domain::ellipse(0.5, 1.0));
  CHECK_THROWS(Domain::stadium(-1.0, 1.0));
  CHECK_THROWS(Domain::ellipse(1.0, 0.5, 0.3));
  CHECK(Domain::ellipse(1.0, 0.5).delta() == doctest::Approx(0.05));
  CHECK(Domain::stadium(2.0, 1.0).area() == doctest::Approx(4.0 + kPi));
  CHECK(Domain::ellipse(1.0, 1.0).perimeter() == doctest::Approx(kTwoPi));
}
