#include "aglab/kinetic.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "aglab/errors.hpp"
#include "aglab/fields.hpp"

namespace aglab {

namespace {

void check_beta_open(double beta) {
  if (!(beta > 0.0 && beta < kPi)) throw BetaOutOfRange("beta must lie in (0, pi), got " + std::to_string(beta));
}

// Unnormalized density on [0, pi], copied to [pi, 2pi].
CircleMeasure gbar_unnormalized(double beta) {
  if (beta > 0.5 * kPi) beta = kPi - beta;
  const double cb = std::cos(beta);
  std::vector<DensityPiece> half;
  if (beta <= 0.25 * kPi) {
    half.push_back({0.5 * kPi - beta, 0.5 * kPi + beta, 1.0, 0.0, -cb});
  } else {
    const double k = cb - std::sqrt(0.5);
    half.push_back({0.0, 0.5 * kPi - beta, 0.0, 0.0, k});
    half.push_back({0.5 * kPi - beta, 0.5 * kPi + beta, 1.0, 0.0, -cb + k});
    half.push_back({0.5 * kPi + beta, kPi, 0.0, 0.0, k});
  }
  std::vector<DensityPiece> all = half;
  for (DensityPiece p : half) {
    p.s0 += kPi;
    p.s1 += kPi;
    p.phase += kPi;
    all.push_back(p);
  }
  return CircleMeasure({}, std::move(all));
}

double min_derivative(const DensityPiece& p, double a, double b) {
  if (p.amp == 0.0) return 0.0;
  double m = std::min(p.derivative(a), p.derivative(b));
  const double k0 = std::ceil((a - p.phase) / kPi);
  for (double s = p.phase + k0 * kPi; s < b; s += kPi) m = std::min(m, p.derivative(s));
  return m;
}

double bracket_e(const RidgeTraces& t) {
  const Frame e{0.0};
  return dot(t.normal, sigma_frame(e, t.m_plus) - sigma_frame(e, t.m_minus));
}

}  // namespace

double KineticSample::measure(std::size_t k) const {
  int c = 0;
  for (int j = 0; j < n_s; ++j) c += bits[k * n_s + j];
  return kTwoPi * c / n_s;
}

KineticSample chi_sample(const VectorField& m, int n_s) {
  if (n_s <= 0 || n_s % 2 != 0) throw std::invalid_argument("chi_sample: n_s must be even and positive");
  KineticSample out{m.grid, n_s, std::vector<std::uint8_t>(m.grid->size() * n_s, 0)};
  std::vector<Vec2> dirs(n_s);
  for (int j = 0; j < n_s; ++j) dirs[j] = unit(out.angle(j));
  for (std::size_t k = 0; k < m.grid->size(); ++k) {
    for (int j = 0; j < n_s; ++j) {
      const double v = dot(dirs[j], m[k]);
      out.bits[k * n_s + j] = v > 1e-14 ? 1 : 0;
    }
  }
  return out;
}

double g_beta(double beta, double s) {
  if (!(beta >= 0.0 && beta <= kPi)) throw BetaOutOfRange("beta must lie in [0, pi], got " + std::to_string(beta));
  double t = std::fmod(s, kPi);
  if (t < 0.0) t += kPi;
  const double base = (t >= 0.5 * kPi - beta && t <= 0.5 * kPi + beta) ? std::sin(t) - std::cos(beta) : 0.0;
  return base - 2.0 / kPi * (std::sin(beta) - beta * std::cos(beta));
}

double c_beta(double beta) {
  check_beta_open(beta);
  return 1.0 / gbar_unnormalized(beta).total_variation();
}

CircleMeasure gbar_beta(double beta) {
  check_beta_open(beta);
  const CircleMeasure raw = gbar_unnormalized(beta);
  return raw.scaled(1.0 / raw.total_variation());
}

JumpIdentity jump_identity_check(double beta, const EntropyGenerator& gen) {
  if (!(beta >= 0.0 && beta <= 0.5 * kPi)) throw BetaOutOfRange("jump identity needs beta in [0, pi/2]");
  const EntropyMap phi = entropy_from_generator(gen);
  JumpIdentity out;
  out.lhs = phi(beta).x - phi(-beta).x;

  const TrigPoly dpsi = gen.psi.derivative();
  std::vector<double> cuts{0.0, 0.5 * kPi - beta, 0.5 * kPi + beta, kPi, 1.5 * kPi - beta, 1.5 * kPi + beta, kTwoPi};
  std::sort(cuts.begin(), cuts.end());
  using boost::math::quadrature::gauss_kronrod;
  double rhs = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b - a <= 0.0) continue;
    const double mid = 0.5 * (a + b);
    // evaluate the indicator on the open piece so that the cut points do not matter
    const bool on = std::fmod(mid, kPi) >= 0.5 * kPi - beta && std::fmod(mid, kPi) <= 0.5 * kPi + beta;
    const double shift = mid >= kPi ? kPi : 0.0;
    const double k = 2.0 / kPi * (std::sin(beta) - beta * std::cos(beta));
    auto f = [&](double s) {
      const double g = (on ? std::sin(s - shift) - std::cos(beta) : 0.0) - k;
      return g * dpsi(s);
    };
    double err = 0.0;
    rhs += gauss_kronrod<double, 61>::integrate(f, a, b, 10, 1e-13, &err);
    if (err > 1e-10) throw QuadratureFailure("jump identity quadrature did not converge");
  }
  out.rhs = -rhs;
  return out;
}

CircleMeasure minimal_disintegration(const PointKind& kind) {
  if (const auto* j = std::get_if<Jump>(&kind)) return gbar_beta(j->beta).shifted(j->s_bar);
  const NonJump& n = std::get<NonJump>(kind);
  const double w = 0.5 * (n.sign >= 0 ? 1.0 : -1.0);
  return CircleMeasure({{n.s_bar - 0.5 * kPi, w}, {n.s_bar + 0.5 * kPi, w}}, {});
}

CircleMeasure factorization_variant(double s_bar, int sign) {
  const double w = 0.25 * (sign >= 0 ? 1.0 : -1.0);
  return CircleMeasure({{s_bar, w}, {s_bar + kPi, w}}, {{0.0, kTwoPi, 0.0, 0.0, -w / kPi}});
}

std::vector<double> default_alpha_grid() {
  std::vector<double> a{0.0, 0.01, -0.01, 0.1, -0.1, 1.0, -1.0};
  for (int k = -250; k <= 250; ++k) a.push_back(1e-3 * k);
  return a;
}

bool minimality_check(const CircleMeasure& mu, const std::vector<double>& alphas) {
  const double tv = mu.total_variation();
  if (std::abs(tv - 1.0) > 1e-10) throw std::invalid_argument("minimality_check: measure must have unit total variation");
  for (double a : alphas) {
    if (mu.plus_constant(a).total_variation() < tv - 1e-10) return false;
  }
  return true;
}

KineticField ridge_disintegration(const Domain& domain, GridPtr grid, bool calibrate) {
  KineticField out{grid, {}};
  const RidgeSet ridge = ridge_set(domain);
  if (ridge.degenerate()) return out;
  const double h = grid->h();
  const TrigPoly dpsi_e = generator_of(frame_entropy(Frame{0.0})).psi.derivative();
  for (std::size_t k = 0; k < grid->size(); ++k) {
    if (grid->cls(k) == NodeClass::Exterior) continue;
    const Vec2 x = grid->node(k);
    if (std::abs(x.y) >= 0.5 * h) continue;
    const double lo = std::max(x.x - 0.5 * h, ridge.p_minus.x), hi = std::min(x.x + 0.5 * h, ridge.p_plus.x);
    if (hi <= lo) continue;
    const RidgeTraces t = ridge_traces(domain, 0.5 * (lo + hi));
    KineticNode n;
    n.node = k;
    n.normal = t.normal;
    n.beta = t.beta;
    n.s_bar = t.s_bar;
    n.length = hi - lo;
    const CircleMeasure g = gbar_beta(t.beta).shifted(t.s_bar);
    n.scale = t.orientation / c_beta(t.beta);
    if (calibrate) {
      const double pairing = -g.integrate([&](double s) { return dpsi_e(s); });
      if (std::abs(pairing) > 1e-12) n.scale = bracket_e(t) / pairing;
    }
    n.sigma = g.scaled(n.scale * n.length);
    out.nodes.push_back(std::move(n));
  }
  return out;
}

double Bump::operator()(Vec2 x) const {
  const double r2 = dot(x - center, x - center) / (radius * radius);
  return r2 < 1.0 ? std::pow(1.0 - r2, 4) : 0.0;
}

TestBank default_test_bank(const Domain& domain) {
  TestBank bank;
  const double rho = 0.4 * domain.minor_scale();
  const auto [lo, hi] = domain.bounding_box();
  const double step = 0.5 * rho;
  const int nx = static_cast<int>(std::floor((hi.x - lo.x) / step)), ny = static_cast<int>(std::floor((hi.y - lo.y) / step));
  const Vec2 mid = 0.5 * (lo + hi);
  for (int i = -nx / 2; i <= nx / 2; ++i) {
    for (int j = -ny / 2; j <= ny / 2; ++j) {
      const Vec2 c{mid.x + i * step, mid.y + j * step};
      if (signed_distance(domain, c) >= rho) bank.bumps.push_back({c, rho});
    }
  }
  for (int k : {2, 4}) {
    bank.generators.push_back(EntropyGenerator::from(TrigPoly::cos_mode(k)));
    bank.generators.push_back(EntropyGenerator::from(TrigPoly::sin_mode(k)));
  }
  return bank;
}

double kinetic_residual(const VectorField& m, const KineticField& sigma, const TestBank& bank) {
  const Grid& g = *m.grid;
  double worst = 0.0;
  for (const EntropyGenerator& gen : bank.generators) {
    const EntropyMap phi = entropy_from_generator(gen);
    const TrigPoly dpsi = gen.psi.derivative();
    VectorField F(m.grid);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Vec2 v = m[k];
      F[k] = std::isfinite(v.x) && std::isfinite(v.y) ? phi.at(v) : Vec2{NAN, NAN};
    }
    const CellMeasure div = weak_divergence(F);
    std::vector<double> node_pairing(sigma.nodes.size());
    for (std::size_t q = 0; q < sigma.nodes.size(); ++q) {
      node_pairing[q] = sigma.nodes[q].sigma.integrate([&](double s) { return dpsi(s); });
    }
    for (const Bump& b : bank.bumps) {
      const double r = b.radius + g.h();
      const int i0 = std::max(0, static_cast<int>(std::floor((b.center.x - r - g.origin().x) / g.h())));
      const int i1 = std::min(g.nx() - 1, static_cast<int>(std::ceil((b.center.x + r - g.origin().x) / g.h())));
      const int j0 = std::max(0, static_cast<int>(std::floor((b.center.y - r - g.origin().y) / g.h())));
      const int j1 = std::min(g.ny() - 1, static_cast<int>(std::ceil((b.center.y + r - g.origin().y) / g.h())));
      double flux = 0.0;
      for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
          const std::size_t k = g.index(i, j);
          const double z = b(g.node(k));
          if (z != 0.0) flux -= z * div.mass[k];
        }
      }
      double kin = 0.0;
      for (std::size_t q = 0; q < sigma.nodes.size(); ++q) kin += b(g.node(sigma.nodes[q].node)) * node_pairing[q];
      worst = std::max(worst, std::abs(flux - kin));
    }
  }
  return worst;
}

double sign_margin(const CircleMeasure& mu, double shift) {
  double margin = std::numeric_limits<double>::infinity();
  const std::vector<DensityPiece>& pieces = mu.pieces();
  for (double start : {0.0, kPi}) {
    const double a = wrap_angle(start + shift);
    // the arc may wrap through 0
    std::vector<std::pair<double, double>> segs;
    if (a + 0.5 * kPi <= kTwoPi) {
      segs.emplace_back(a, a + 0.5 * kPi);
    } else {
      segs.emplace_back(a, kTwoPi);
      segs.emplace_back(0.0, a + 0.5 * kPi - kTwoPi);
    }
    bool covered_gap = false;
    for (auto [s0, s1] : segs) {
      double cursor = s0;
      for (const DensityPiece& p : pieces) {
        const double lo = std::max(s0, p.s0), hi = std::min(s1, p.s1);
        if (hi <= lo) continue;
        if (lo > cursor) covered_gap = true;
        margin = std::min(margin, min_derivative(p, lo, hi));
        cursor = hi;
      }
      if (cursor < s1) covered_gap = true;
      // density jumps at interior breakpoints
      for (const DensityPiece& p : pieces) {
        for (double t : {p.s0, p.s1}) {
          if (t <= s0 + 1e-13 || t >= s1 - 1e-13) continue;
          const double jump = mu.density(t + 1e-12) - mu.density(t - 1e-12);
          if (jump < -1e-9) margin = std::min(margin, jump);
        }
      }
      for (const auto& [s, w] : mu.atoms()) {
        if (s > s0 && s < s1 && w != 0.0) margin = std::min(margin, -std::abs(w));
      }
    }
    if (covered_gap) margin = std::min(margin, 0.0);
  }
  return margin;
}

SignStructureReport sign_structure_report(const KineticField& sigma, double angle_tol) {
  SignStructureReport r;
  r.nodes = sigma.nodes.size();
  r.min_margin = std::numeric_limits<double>::infinity();
  std::size_t aligned = 0;
  for (const KineticNode& n : sigma.nodes) {
    const double w = std::abs(n.scale * n.length);
    const double m = sign_margin(w > 0.0 ? n.sigma.scaled(1.0 / w) : n.sigma);
    r.margins.push_back(m);
    r.min_margin = std::min(r.min_margin, m);
    if (m < -1e-12) ++r.negative;
    const double a = angle_of(n.normal);
    const double off = std::abs(a - 0.5 * kPi * std::round(a / (0.5 * kPi)));
    if (off <= angle_tol) ++aligned;
  }
  if (r.nodes == 0) r.min_margin = 0.0;
  r.axis_fraction = r.nodes ? static_cast<double>(aligned) / r.nodes : 1.0;
  return r;
}

}  // namespace aglab
