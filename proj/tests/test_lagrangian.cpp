#include <doctest.h>

#include <cmath>
#include <random>

#include "aglab/lagrangian.hpp"

using namespace aglab;

namespace {

const Domain kEllipse = Domain::ellipse(1.0, 0.5);

TraceSettings settings(double T = 2.0) {
  TraceSettings st;
  st.T = T;
  st.dt = 1.0 / 128;
  return st;
}

double omega_prime_gap(const Domain& d, const TraceSettings& st, Vec2 x) {
  return signed_distance(d, x) + d.delta() - 2.0 * st.dt;
}

void check_unit_speed(const Characteristic& c) {
  for (std::size_t i = 0; i + 1 < c.x_path.size(); ++i) {
    const auto& [t0, x0] = c.x_path[i];
    const auto& [t1, x1] = c.x_path[i + 1];
    CHECK(norm(x1 - x0) == doctest::Approx(t1 - t0).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("straight exit without jumps") {
  const TraceSettings st = settings();
  // moving up on the left half, where m-bar has a positive vertical component
  const Characteristic c = trace_characteristic(kEllipse, {-0.1, 0.2}, 0.5 * kPi, st);
  CHECK(c.jumps.empty());
  CHECK_FALSE(c.stuck);
  CHECK(c.total_variation() == 0.0);
  CHECK(sigma_gamma(c).empty());
  const Vec2 end = c.x_path.back().second;
  CHECK(end.x == doctest::Approx(-0.1).epsilon(1e-14));
  CHECK(std::abs(omega_prime_gap(kEllipse, st, end)) < 1e-9);
  CHECK(c.t_plus == doctest::Approx(end.y - 0.2).epsilon(1e-12));
  check_unit_speed(c);
  CHECK_THROWS(trace_characteristic(kEllipse, {0.1, 0.2}, 0.5 * kPi, st));
}

TEST_CASE("mirror reflection at the ridge") {
  const TraceSettings st = settings();
  const double s0 = kTwoPi - 0.4;
  const Vec2 x0{0.1, 0.2};
  const Characteristic c = trace_characteristic(kEllipse, x0, s0, st);
  REQUIRE(c.jumps.size() == 1);
  const AngleJump& j = c.jumps[0];
  const double tc = 0.2 / std::sin(0.4);
  CHECK(j.t == doctest::Approx(tc).epsilon(1e-10));
  CHECK(std::abs(j.x.y) <= st.dt);
  CHECK(j.x.x == doctest::Approx(0.1 + tc * std::cos(0.4)).epsilon(1e-10));
  CHECK(j.s_minus == doctest::Approx(s0));
  CHECK(j.s_plus == doctest::Approx(0.4));
  CHECK(j.arc_sign == 1);
  CHECK(j.arc_length() == doctest::Approx(0.8).epsilon(1e-12));

  const auto arcs = sigma_gamma(c);
  REQUIRE(arcs.size() == 1);
  CHECK(arcs[0].mass == doctest::Approx(0.8));
  CHECK(c.total_variation() == doctest::Approx(0.8));
  CHECK(c.s_at(tc - 1e-9) == doctest::Approx(s0));
  CHECK(c.s_at(tc) == doctest::Approx(0.4));

  // after the jump the curve moves along the mirrored direction
  const double t = 0.5 * (tc + c.t_plus);
  const Vec2 expect = j.x + unit(0.4) * (t - tc);
  CHECK(norm(c.x_at(t) - expect) < 1e-10);
  check_unit_speed(c);

  // vertical motion crosses the ridge: the normal component of m-bar is continuous
  const Characteristic down = trace_characteristic(kEllipse, x0, 1.5 * kPi, st);
  CHECK(down.jumps.empty());
  CHECK(down.x_path.back().second.y < -0.4);
}

TEST_CASE("backward tracing inverts forward tracing") {
  const TraceSettings st = settings(1.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ux(-0.6, 0.6), uy(-0.3, 0.3), us(0.0, kTwoPi);
  int checked = 0;
  while (checked < 50) {
    const Vec2 x{ux(rng), uy(rng)};
    const double s = us(rng);
    if (dot(unit(s), limit_sample(kEllipse, x).m) <= 1e-3) continue;
    const Characteristic f = trace_characteristic(kEllipse, x, s, st, 0.0, 1);
    const double t1 = 0.5 * f.t_plus;
    const Characteristic b = trace_characteristic(kEllipse, f.x_at(t1), f.s_at(t1), st, t1, -1);
    CHECK(b.t_minus == doctest::Approx(0.0));
    CHECK(norm(b.x_path.front().second - x) < 1e-9);
    CHECK(wrap_angle(b.s_start - s) == doctest::Approx(0.0).epsilon(1e-12));
    for (const AngleJump& j : f.jumps) {
      CHECK(std::abs(j.x.y) <= st.dt);
      CHECK(j.arc_length() < kPi);
    }
    check_unit_speed(f);
    check_unit_speed(b);
    ++checked;
  }
}

TEST_CASE("two-sample KS statistic") {
  std::vector<double> a, b;
  for (int i = 0; i < 500; ++i) {
    a.push_back(i / 500.0);
    b.push_back((i + 0.5) / 500.0);
  }
  auto [d0, p0] = ks_two_sample(a, a);
  CHECK(d0 == 0.0);
  CHECK(p0 == 1.0);
  auto [d1, p1] = ks_two_sample(a, b);
  CHECK(d1 == doctest::Approx(1.0 / 500));
  CHECK(p1 > 0.99);
  std::vector<double> c;
  for (double v : a) c.push_back(v + 0.1999);
  auto [d2, p2] = ks_two_sample(a, c);
  CHECK(d2 == doctest::Approx(0.2));
  // lambda = (sqrt(250) + 0.12 + 0.11/sqrt(250)) * 0.2, Q = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2)
  CHECK(p2 == doctest::Approx(2.0 * std::exp(-2.0 * std::pow((std::sqrt(250.0) + 0.12 + 0.11 / std::sqrt(250.0)) * 0.2, 2)))
                  .epsilon(1e-6));
}

TEST_CASE("small ensemble on the ellipse") {
  TraceSettings st;
  st.T = 0.5;
  st.dt = 1.0 / 128;
  const Ensemble ens = build_ensemble(kEllipse, 20000, st, 17);
  CHECK(ens.n_inflow == ens.n_outflow);
  CHECK(ens.n_inflow > 0);
  const EnsembleReport r = analyze_ensemble(kEllipse, ens, st);
  CHECK(r.stuck == 0);
  CHECK(r.chi_violations == 0);
  CHECK(r.jumps > 0);
  CHECK(r.dof > 100);
  CHECK(r.chi2_max_z < 4.0);
  CHECK(r.ridge_fraction == 1.0);
  CHECK(r.max_jump_offset <= st.dt);
  CHECK(r.max_arc < kPi);
  CHECK(r.cancellation_ratio == doctest::Approx(1.0).epsilon(0.05));

  const EnsembleReport again = ensemble_representation_check(kEllipse, 20000, st, 17);
  CHECK(again.to_json() == r.to_json());
  CHECK_THROWS(ensemble_representation_check(kEllipse, 10, st, 17));
}
