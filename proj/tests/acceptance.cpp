#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "aglab/entropy.hpp"
#include "aglab/fields.hpp"
#include "aglab/functional.hpp"
#include "aglab/kinetic.hpp"
#include "aglab/lagrangian.hpp"
#include "aglab/minimize.hpp"

using namespace aglab;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAIL]");
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

const Domain kEllipse = Domain::ellipse(1.0, 0.5);
const Domain kStadium = Domain::stadium(2.0, 1.0);

Verdict a1() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const GridPtr g = make_grid(kEllipse, 1.0 / 256);
  const LimitField lf = exact_limit_field(kEllipse, g);
  const double jump = f0_jump(kEllipse);
  const double two = f0_tilde_two_frames(lf.m);
  const double flux = sigma_boundary_flux(kEllipse, Frame{0.0});
  const double worst = std::max({rel(jump, two), rel(jump, flux), rel(two, flux)});
  v.require(worst <= 0.02, "f0_jump=" + fmt("%.6f", jump) + " two_frames=" + fmt("%.6f", two) +
                               " flux=" + fmt("%.6f", flux) + " max_rel=" + fmt("%.2e", worst));
  const double t = seconds_since(t0);
  v.require(t < 60.0, "time=" + fmt("%.1fs", t));
  return v;
}

void limit_table_checks(Verdict& v, const Domain& d, const std::string& name, bool threshold) {
  const GridPtr g = make_grid_resolution(d, 128);
  MinimizeOptions opts;
  opts.hessian_power = 2;
  const auto rows = energy_limit_table(d, g, {0.4, 0.2, 0.1}, f0_jump(d), opts);
  std::string w11 = name + " w11=", gap = name + " gap=";
  bool w11_dec = true, gap_dec = true, converged = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    w11 += (i ? "," : "") + fmt("%.4f", rows[i].w11);
    gap += (i ? "," : "") + fmt("%.4f", rows[i].energy_gap);
    converged = converged && rows[i].converged;
    if (i > 0) {
      w11_dec = w11_dec && rows[i].w11 < rows[i - 1].w11;
      gap_dec = gap_dec && rows[i].energy_gap < rows[i - 1].energy_gap;
    }
  }
  v.require(converged, name + " converged");
  v.require(w11_dec, w11 + " strictly decreasing");
  v.require(gap_dec, gap + " decreasing");
  if (threshold) v.require(rows.back().energy_gap <= 0.25, name + " gap(0.1)=" + fmt("%.4f", rows.back().energy_gap) + " <= 0.25");
}

Verdict a2() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  limit_table_checks(v, kEllipse, "ellipse", true);
  limit_table_checks(v, kStadium, "stadium", false);
  const double t = seconds_since(t0);
  v.require(t < 600.0, "time=" + fmt("%.1fs", t));
  return v;
}

Verdict a3_a4(bool concentration) {
  Verdict v;
  std::vector<double> eps_tv;
  double e_tv = 0.0, near_share = 0.0;
  const RidgeSet ridge = ridge_set(kEllipse);
  for (double h : {1.0 / 64, 1.0 / 128, 1.0 / 256}) {
    const GridPtr g = make_grid(kEllipse, h);
    const LimitField lf = exact_limit_field(kEllipse, g);
    const auto interior = g->region(NodeClass::Interior);
    eps_tv.push_back(entropy_production(lf.m, frame_entropy(Frame{0.25 * kPi})).total_variation(interior));
    if (h == 1.0 / 256) {
      const CellMeasure mu = entropy_production(lf.m, frame_entropy(Frame{0.0}));
      auto band = ridge_band(*g, ridge, 3.0 * h);
      for (std::size_t k = 0; k < band.size(); ++k) band[k] = band[k] && interior[k];
      e_tv = mu.total_variation(interior);
      near_share = mu.total_variation(band) / e_tv;
    }
  }
  if (!concentration) {
    const double order = std::log2(eps_tv[0] / eps_tv[2]) / 2.0;
    v.require(eps_tv[1] < eps_tv[0] && eps_tv[2] < eps_tv[1],
              "tv_eps=" + fmt("%.3e", eps_tv[0]) + "," + fmt("%.3e", eps_tv[1]) + "," + fmt("%.3e", eps_tv[2]) +
                  " decreasing");
    v.require(order >= 0.8, "order=" + fmt("%.3f", order));
    v.require(eps_tv[2] <= 0.05 * e_tv, "ratio(1/256)=" + fmt("%.4f", eps_tv[2] / e_tv) + " <= 0.05");
    return v;
  }
  v.require(near_share >= 0.95, "share within 3h=" + fmt("%.4f", near_share));
  const KineticField kf = ridge_disintegration(kEllipse, make_grid(kEllipse, 1.0 / 256));
  std::size_t vertical = 0;
  for (const KineticNode& n : kf.nodes) vertical += std::abs(n.normal.x) < 1e-12 && std::abs(std::abs(n.normal.y) - 1.0) < 1e-12;
  v.require(!kf.nodes.empty() && vertical == kf.nodes.size(),
            "vertical normals=" + std::to_string(vertical) + "/" + std::to_string(kf.nodes.size()));
  return v;
}

Verdict a5() {
  Verdict v;
  const std::vector<EntropyGenerator> gens{
      EntropyGenerator::from(TrigPoly::cos_mode(2)), EntropyGenerator::from(TrigPoly::sin_mode(2)),
      EntropyGenerator::from(TrigPoly::cos_mode(4)), EntropyGenerator::from(TrigPoly::sin_mode(4))};
  double err = 0.0;
  for (double beta : {kPi / 8, kPi / 4, kPi / 3, 3 * kPi / 8, kPi / 2}) {
    for (const auto& g : gens) {
      const JumpIdentity id = jump_identity_check(beta, g);
      err = std::max(err, std::abs(id.lhs - id.rhs));
    }
  }
  v.require(err <= 1e-8, "max identity error=" + fmt("%.2e", err));
  double norm_err = 0.0;
  for (int k = 1; k <= 100; ++k) norm_err = std::max(norm_err, std::abs(gbar_beta(kPi * k / 101.0).total_variation() - 1.0));
  v.require(norm_err <= 1e-10, "max |TV-1|=" + fmt("%.2e", norm_err));

  std::vector<PointKind> kinds;
  for (int k = 1; k <= 20; ++k) {
    for (double s_bar : {0.0, 0.5 * kPi, 1.5 * kPi, 2.0}) kinds.emplace_back(Jump{kPi * k / 21.0, s_bar});
  }
  for (double s_bar : {0.0, 1.0, 0.5 * kPi + 0.3, 4.0}) {
    for (int sign : {1, -1}) kinds.emplace_back(NonJump{s_bar, sign});
  }
  std::size_t passed = 0, rejected = 0;
  for (const PointKind& kind : kinds) {
    const CircleMeasure mu = minimal_disintegration(kind);
    passed += minimality_check(mu);
    for (double a : {0.05, -0.05}) {
      const CircleMeasure p = mu.plus_constant(a);
      rejected += !minimality_check(p.scaled(1.0 / p.total_variation()));
    }
  }
  v.require(passed == kinds.size(), "minimal " + std::to_string(passed) + "/" + std::to_string(kinds.size()));
  v.require(rejected == 2 * kinds.size(),
            "perturbed rejected " + std::to_string(rejected) + "/" + std::to_string(2 * kinds.size()));
  return v;
}

Verdict a6() {
  Verdict v;
  const TestBank bank = default_test_bank(kEllipse);
  std::vector<double> r;
  double r0 = 0.0;
  for (double h : {1.0 / 64, 1.0 / 128, 1.0 / 256}) {
    const GridPtr g = make_grid(kEllipse, h);
    const LimitField lf = exact_limit_field(kEllipse, g);
    r.push_back(kinetic_residual(lf.m, ridge_disintegration(kEllipse, g), bank));
    if (h == 1.0 / 256) r0 = kinetic_residual(lf.m, KineticField{g, {}}, bank);
  }
  const double order = std::log2(r[0] / r[2]) / 2.0;
  v.require(r[1] < r[0] && r[2] < r[1],
            "residual=" + fmt("%.3e", r[0]) + "," + fmt("%.3e", r[1]) + "," + fmt("%.3e", r[2]) + " decreasing");
  v.require(order >= 0.8, "order=" + fmt("%.3f", order));
  v.require(r[2] <= 0.1 * r0, "ratio to sigma=0: " + fmt("%.4f", r[2] / r0) + " <= 0.1");
  return v;
}

Verdict a7() {
  Verdict v;
  const GridPtr g = make_grid(kEllipse, 1.0 / 32);
  const ScalarField base = pinned_limit_field(kEllipse, g);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const EnergyParams p{0.1, 0.1, trial < 5 ? 1 : 2};
    ScalarField u = base, du(g);
    for (std::size_t k = 0; k < g->size(); ++k) {
      if (g->cls(k) != NodeClass::Interior) continue;
      u[k] += 0.01 * nd(rng);
      du[k] = nd(rng);
    }
    const ScalarField grad = energy_gradient(u, p);
    double analytic = 0.0;
    for (std::size_t k = 0; k < g->size(); ++k) analytic += grad[k] * du[k];
    const double t = 1e-6;
    ScalarField up = u, um = u;
    for (std::size_t k = 0; k < g->size(); ++k) {
      up[k] += t * du[k];
      um[k] -= t * du[k];
    }
    const double fd = (energy(up, p).total - energy(um, p).total) / (2 * t);
    worst = std::max(worst, std::abs(fd - analytic) / std::abs(analytic));
  }
  v.require(worst <= 1e-5, "max relative error=" + fmt("%.2e", worst) + " over 10 states");
  return v;
}

Verdict a8() {
  Verdict v;
  TraceSettings st;
  st.T = 0.5;
  st.dt = 1.0 / 256;
  const auto t0 = std::chrono::steady_clock::now();
  const EnsembleReport r = ensemble_representation_check(kEllipse, 100000, st, 20240601);
  const double t = seconds_since(t0);
  v.require(r.stuck == 0 && r.chi_violations == 0, "curves=" + std::to_string(r.curves) + " stuck=" +
                                                       std::to_string(r.stuck) + " chi0=" + std::to_string(r.chi_violations));
  v.require(r.chi2_max_z <= 4.0, "chi2 max z=" + fmt("%.3f", r.chi2_max_z) + " (dof " + std::to_string(r.dof) + ")");
  v.require(r.ridge_fraction >= 0.95, "ridge fraction=" + fmt("%.4f", r.ridge_fraction));
  v.require(r.cancellation_ratio >= 0.95 && r.cancellation_ratio <= 1.05,
            "cancellation=" + fmt("%.6f", r.cancellation_ratio));
  v.require(r.ks_p >= 0.01, "KS p=" + fmt("%.4f", r.ks_p));
  v.require(t < 300.0, "time=" + fmt("%.1fs", t));
  const EnsembleReport again = ensemble_representation_check(kEllipse, 100000, st, 20240601);
  v.require(again.to_json() == r.to_json(), "reproducible");
  v.detail += "; minimal_ratio=" + fmt("%.3f", r.minimal_ratio);
  return v;
}

Verdict a9() {
  Verdict v;
  for (const auto& [name, d] : {std::pair{"ellipse", kEllipse}, std::pair{"stadium", kStadium}}) {
    const SignStructureReport rep = sign_structure_report(ridge_disintegration(d, make_grid(d, 1.0 / 128)));
    v.require(rep.nodes > 0 && rep.min_margin >= -1e-12,
              std::string(name) + " nodes=" + std::to_string(rep.nodes) + " min_margin=" + fmt("%.2e", rep.min_margin));
  }
  KineticField tilted = ridge_disintegration(kEllipse, make_grid(kEllipse, 1.0 / 128));
  tilted.nodes.resize(1);
  tilted.nodes[0].sigma = gbar_beta(kPi / 3).shifted(0.25 * kPi);
  tilted.nodes[0].normal = unit(0.75 * kPi);
  tilted.nodes[0].scale = 1.0;
  tilted.nodes[0].length = 1.0;
  const SignStructureReport bad = sign_structure_report(tilted);
  v.require(bad.negative == 1, "tilted control flagged (margin " + fmt("%.3f", bad.min_margin) + ")");
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"A1", a1}, {"A2", a2}, {"A3", [] { return a3_a4(false); }}, {"A4", [] { return a3_a4(true); }},
      {"A5", a5}, {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}};
  int failed = 0;
  for (const auto& [id, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += !v.pass;
    std::printf("%s %s %s\n", id.c_str(), v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
