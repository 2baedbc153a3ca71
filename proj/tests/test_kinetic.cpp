#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "aglab/errors.hpp"
#include "aglab/fields.hpp"
#include "aglab/kinetic.hpp"

using namespace aglab;

namespace {

using boost::math::quadrature::gauss_kronrod;

// int_0^{2pi} |unnormalized gbar_beta| by adaptive quadrature of the displayed three-case formula
double gbar_l1_oracle(double beta) {
  if (beta > 0.5 * kPi) beta = kPi - beta;
  auto raw = [beta](double s) {
    const double t = std::fmod(s, kPi);
    const double ind = (t >= 0.5 * kPi - beta && t <= 0.5 * kPi + beta) ? std::sin(t) - std::cos(beta) : 0.0;
    return beta <= 0.25 * kPi ? ind : ind + std::cos(beta) - std::sqrt(0.5);
  };
  std::vector<double> cuts{0.0, kPi, kTwoPi};
  for (double base : {0.0, kPi}) {
    cuts.push_back(base + 0.5 * kPi - beta);
    cuts.push_back(base + 0.5 * kPi + beta);
    if (beta > 0.25 * kPi) {
      cuts.push_back(base + 0.25 * kPi);
      cuts.push_back(base + 0.75 * kPi);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] < 1e-15) continue;
    sum += gauss_kronrod<double, 61>::integrate([&](double s) { return std::abs(raw(s)); }, cuts[i], cuts[i + 1], 10, 1e-13);
  }
  return sum;
}

const std::vector<EntropyGenerator>& generators() {
  static const std::vector<EntropyGenerator> g{
      EntropyGenerator::from(TrigPoly::cos_mode(2)), EntropyGenerator::from(TrigPoly::sin_mode(2)),
      EntropyGenerator::from(TrigPoly::cos_mode(4)), EntropyGenerator::from(TrigPoly::sin_mode(4))};
  return g;
}

}  // namespace

TEST_CASE("chi sample") {
  const GridPtr g = make_square_grid(1.0 / 8);
  const KineticSample flat = chi_sample(VectorField(g, {1.0, 0.0}), 8);
  for (std::size_t k = 0; k < g->size(); ++k) {
    for (int j = 0; j < 8; ++j) {
      const double s = flat.angle(j);
      CHECK(flat.chi(k, j) == (std::cos(s) > 1e-14));
    }
  }
  // s = pi/2 is a tie and records 0
  CHECK_FALSE(flat.chi(0, 2));
  CHECK_THROWS(chi_sample(VectorField(g, {1.0, 0.0}), 7));

  const Domain e = Domain::ellipse(1.0, 0.5);
  const GridPtr ge = make_grid(e, 1.0 / 32);
  const LimitField lf = exact_limit_field(e, ge);
  const int ns = 64;
  const KineticSample ks = chi_sample(lf.m, ns);
  for (std::size_t k = 0; k < ge->size(); ++k) {
    if (ge->cls(k) == NodeClass::Exterior) continue;
    CHECK(std::abs(ks.measure(k) - kPi) <= kPi * 2.0 * kPi / ns + 1e-12);
    for (int j = 0; j < ns / 2; ++j) {
      if (std::abs(dot(unit(ks.angle(j)), lf.m[k])) <= 1e-14) continue;
      CHECK(ks.chi(k, j) + ks.chi(k, j + ns / 2) == 1);
    }
  }
}

TEST_CASE("g_beta closed form") {
  CHECK(g_beta(0.5 * kPi, 0.5 * kPi) == doctest::Approx(1.0 - 2.0 / kPi).epsilon(1e-15));
  for (double beta : {0.3, 1.0, 1.5}) {
    for (double s : {0.1, 1.2, 2.9, -0.7}) CHECK(std::abs(g_beta(beta, s) - g_beta(beta, s + kPi)) <= 1e-14);
    // zero mean over a period
    const double mean = gauss_kronrod<double, 61>::integrate([&](double s) { return g_beta(beta, s); }, 0.0,
                                                             0.5 * kPi - beta, 10) +
                        gauss_kronrod<double, 61>::integrate([&](double s) { return g_beta(beta, s); }, 0.5 * kPi - beta,
                                                             0.5 * kPi + beta, 10) +
                        gauss_kronrod<double, 61>::integrate([&](double s) { return g_beta(beta, s); }, 0.5 * kPi + beta,
                                                             kPi, 10);
    CHECK(std::abs(mean) < 1e-13);
  }
  CHECK_THROWS_AS(g_beta(-0.1, 0.0), BetaOutOfRange);
  CHECK_THROWS_AS(gbar_beta(0.0), BetaOutOfRange);
  CHECK_THROWS_AS(gbar_beta(kPi), BetaOutOfRange);
}

TEST_CASE("normalization of gbar_beta") {
  CHECK(c_beta(0.5 * kPi) == doctest::Approx(1.0 / (4.0 * (std::sqrt(2.0) - 1.0))).epsilon(1e-14));
  for (double beta : {0.2, kPi / 4, 1.0, kPi / 3, 0.5 * kPi, 2.5}) {
    CHECK(c_beta(beta) == doctest::Approx(1.0 / gbar_l1_oracle(beta)).epsilon(1e-11));
  }
  for (int k = 1; k <= 100; ++k) {
    const double beta = kPi * k / 101.0;
    const CircleMeasure g = gbar_beta(beta);
    CHECK(std::abs(g.total_variation() - 1.0) <= 1e-10);
    // s + pi is rounded before evaluation, so the tolerance follows the density scale
    CHECK(g.pi_periodic(1e-14 * std::max(1.0, c_beta(beta))));
  }
  const CircleMeasure a = gbar_beta(2 * kPi / 3), b = gbar_beta(kPi / 3);
  const CircleMeasure below = gbar_beta(kPi / 4 - 1e-9), above = gbar_beta(kPi / 4 + 1e-9);
  for (int k = 0; k < 200; ++k) {
    const double s = 0.031 * k;
    CHECK(std::abs(a.density(s) - b.density(s)) < 1e-14);
    CHECK(std::abs(below.density(s) - above.density(s)) < 1e-7);
  }
}

TEST_CASE("jump identity") {
  double worst = 0.0;
  for (double beta : {kPi / 8, kPi / 4, kPi / 3, 3 * kPi / 8, kPi / 2, 0.05, 1.3}) {
    for (const EntropyGenerator& gen : generators()) {
      const JumpIdentity j = jump_identity_check(beta, gen);
      worst = std::max(worst, std::abs(j.lhs - j.rhs));
    }
  }
  CHECK(worst <= 1e-8);
  const JumpIdentity tiny = jump_identity_check(1e-6, generators()[0]);
  CHECK(std::abs(tiny.lhs) < 1e-10);
  CHECK(std::abs(tiny.rhs) < 1e-10);
  CHECK(std::abs(jump_identity_check(0.0, generators()[2]).rhs) < 1e-14);
  CHECK_THROWS_AS(jump_identity_check(2.0, generators()[0]), BetaOutOfRange);
  CHECK_THROWS_AS(jump_identity_check(0.5, EntropyGenerator::from(TrigPoly::cos_mode(1))), NonClosed);
}

TEST_CASE("jump pairing matches the geometric bracket for a vertical normal") {
  const double s_bar = 0.5 * kPi;
  const Vec2 n = unit(s_bar);
  for (double beta : {0.4, kPi / 4, 1.2}) {
    for (const EntropyGenerator& gen : generators()) {
      const EntropyMap phi = entropy_from_generator(gen);
      const double bracket = dot(n, phi(s_bar + beta) - phi(s_bar - beta));
      const TrigPoly dpsi = gen.psi.derivative();
      std::vector<double> cuts{0.0, kTwoPi};
      for (double c : {s_bar + 0.5 * kPi - beta, s_bar + 0.5 * kPi + beta, s_bar + 1.5 * kPi - beta,
                       s_bar + 1.5 * kPi + beta, s_bar, s_bar + kPi}) {
        cuts.push_back(wrap_angle(c));
      }
      std::sort(cuts.begin(), cuts.end());
      double pairing = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] < 1e-14) continue;
        pairing -= gauss_kronrod<double, 61>::integrate([&](double s) { return g_beta(beta, s - s_bar) * dpsi(s); },
                                                        cuts[i], cuts[i + 1], 10, 1e-13);
      }
      CHECK(std::abs(pairing - bracket) <= 1e-8);
    }
  }
}

TEST_CASE("minimal disintegrations and minimality") {
  const CircleMeasure pair = minimal_disintegration(NonJump{0.0, 1});
  REQUIRE(pair.atoms().size() == 2);
  CHECK(pair.atoms()[0].first == doctest::Approx(0.5 * kPi));
  CHECK(pair.atoms()[1].first == doctest::Approx(1.5 * kPi));
  CHECK(pair.atoms()[0].second == 0.5);
  CHECK(pair.total_variation() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(minimality_check(pair, {0.01, -0.01, 0.1, -0.1, 1.0, -1.0}));
  CHECK(minimal_disintegration(NonJump{0.3, -1}).mass() == doctest::Approx(-1.0));

  const CircleMeasure j = minimal_disintegration(Jump{kPi / 3, 0.5 * kPi});
  CHECK(j.total_variation() == doctest::Approx(1.0).epsilon(1e-12));
  const CircleMeasure base = gbar_beta(kPi / 3);
  for (int k = 0; k < 100; ++k) CHECK(j.density(0.06 * k) == doctest::Approx(base.density(0.06 * k - 0.5 * kPi)));

  const CircleMeasure f0 = factorization_variant(0.0, 1);
  CHECK(f0.total_variation() == doctest::Approx(1.0).epsilon(1e-14));
  // the factorization normalization is not the minimal one: its constant part can be removed
  CHECK_FALSE(minimality_check(f0));

  for (int k = 1; k < 40; ++k) {
    const double beta = kPi * k / 40.0;
    for (double s_bar : {0.0, 1.1, 4.0}) {
      const CircleMeasure mu = minimal_disintegration(Jump{beta, s_bar});
      CHECK(minimality_check(mu));
      for (double c : {0.05, -0.05}) {
        const CircleMeasure p = mu.plus_constant(c);
        CHECK_FALSE(minimality_check(p.scaled(1.0 / p.total_variation())));
      }
    }
  }
  for (int sign : {1, -1}) {
    const CircleMeasure mu = minimal_disintegration(NonJump{0.7, sign});
    CHECK(minimality_check(mu));
    for (double c : {0.05, -0.05}) {
      const CircleMeasure p = mu.plus_constant(c);
      CHECK_FALSE(minimality_check(p.scaled(1.0 / p.total_variation())));
    }
  }
  CHECK_THROWS(minimality_check(pair.scaled(2.0)));
}

TEST_CASE("sign margins") {
  for (int k = 1; k < 30; ++k) {
    const double beta = kPi * k / 30.0;
    CHECK(sign_margin(gbar_beta(beta).shifted(kPi)) >= -1e-12);
    CHECK(sign_margin(gbar_beta(beta)) >= -1e-12);
    const double tilted = sign_margin(gbar_beta(beta).shifted(0.25 * kPi));
    // narrow jumps have no density slope on the tilted arcs
    if (std::min(beta, kPi - beta) > 0.25 * kPi + 0.01) {
      CHECK(tilted < -1e-3);
    } else {
      CHECK(tilted >= -1e-12);
    }
  }
  CHECK(sign_margin(minimal_disintegration(NonJump{0.5 * kPi + 0.3, 1})) < 0.0);
  CHECK(sign_margin(minimal_disintegration(NonJump{kPi, 1}), 0.0) >= 0.0);
}

TEST_CASE("ridge disintegration on the ellipse") {
  const Domain e = Domain::ellipse(1.0, 0.5);
  const GridPtr g = make_grid(e, 1.0 / 64);
  const KineticField kf = ridge_disintegration(e, g);
  REQUIRE(kf.nodes.size() == 97);
  double len = 0.0;
  for (const KineticNode& n : kf.nodes) {
    len += n.length;
    // calibrated scale is the orientation over c(beta)
    const double orientation = dot(n.normal, unit(n.s_bar));
    CHECK(std::abs(orientation) == doctest::Approx(1.0));
    CHECK(n.scale == doctest::Approx(orientation / c_beta(n.beta)).epsilon(1e-9));
    // the calibrated density reproduces the bracket of every bank entropy
    for (const EntropyGenerator& gen : generators()) {
      const EntropyMap phi = entropy_from_generator(gen);
      const TrigPoly dpsi = gen.psi.derivative();
      const double bracket = dot(n.normal, phi(n.s_bar + n.beta) - phi(n.s_bar - n.beta));
      const double pairing = -n.sigma.integrate([&](double s) { return dpsi(s); }) / n.length;
      CHECK(std::abs(pairing - bracket) <= 1e-8);
    }
  }
  CHECK(len == doctest::Approx(1.5).epsilon(1e-12));

  const KineticField plain = ridge_disintegration(e, g, false);
  for (std::size_t q = 0; q < kf.nodes.size(); ++q) {
    CHECK(plain.nodes[q].scale == doctest::Approx(kf.nodes[q].scale).epsilon(1e-9));
  }

  const SignStructureReport rep = sign_structure_report(kf);
  CHECK(rep.min_margin >= -1e-12);
  CHECK(rep.negative == 0);
  CHECK(rep.axis_fraction == 1.0);

  KineticField tilted = kf;
  tilted.nodes.resize(1);
  tilted.nodes[0].sigma = gbar_beta(1.0).shifted(0.25 * kPi);
  tilted.nodes[0].normal = unit(0.25 * kPi + 0.5 * kPi);
  tilted.nodes[0].scale = 1.0;
  tilted.nodes[0].length = 1.0;
  const SignStructureReport bad = sign_structure_report(tilted);
  CHECK(bad.negative == 1);
  CHECK(bad.axis_fraction == 0.0);
}

TEST_CASE("kinetic residual") {
  const Domain e = Domain::ellipse(1.0, 0.5);
  const TestBank bank = default_test_bank(e);
  CHECK(bank.bumps.size() > 10);
  for (const Bump& b : bank.bumps) CHECK(signed_distance(e, b.center) >= b.radius);

  const GridPtr g0 = make_grid(e, 1.0 / 64);
  CHECK(kinetic_residual(VectorField(g0, unit(0.4)), KineticField{g0, {}}, bank) < 1e-12);

  auto residuals = [&](double h) {
    const GridPtr g = make_grid(e, h);
    const LimitField lf = exact_limit_field(e, g);
    return std::pair{kinetic_residual(lf.m, ridge_disintegration(e, g), bank), kinetic_residual(lf.m, KineticField{g, {}}, bank)};
  };
  const auto [r1, z1] = residuals(1.0 / 64);
  const auto [r2, z2] = residuals(1.0 / 128);
  MESSAGE("residual " << r1 << " -> " << r2 << ", without sigma " << z1 << " " << z2);
  CHECK(r2 < r1);
  CHECK(std::log2(r1 / r2) >= 0.8);
  CHECK(r2 < 0.1 * z2);
  CHECK(z1 == doctest::Approx(z2).epsilon(0.05));
}
