#include "aglab/lagrangian.hpp"

#include <algorithm>
#include <array>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include "aglab/kinetic.hpp"
#include "aglab/parallel.hpp"

namespace aglab {

namespace {

constexpr double kTieTol = 1e-14;

double inset_of(const TraceSettings& st) { return st.inset > 0.0 ? st.inset : 2.0 * st.dt; }

// Outward offset of dOmega that bounds Omega'.
double offset_of(const Domain& domain, const TraceSettings& st) {
  const double d = domain.delta() - inset_of(st);
  if (d < 0.0) throw std::invalid_argument("inset wider than the collar");
  return d;
}

bool chi(const Domain& domain, Vec2 x, double s) { return dot(unit(s), limit_sample(domain, x).m) > kTieTol; }

struct BoundaryFrame {
  Vec2 point;   // on the offset curve
  Vec2 normal;
  double element = 0.0;  // offset arc length per unit parameter
};

// tau in [0, 1) runs once around the offset curve at distance d outside dOmega.
BoundaryFrame boundary_at(const Domain& domain, double d, double tau) {
  if (const auto* e = std::get_if<Ellipse>(&domain.shape())) {
    const double t = kTwoPi * tau;
    const Vec2 p{e->a * std::cos(t), e->b * std::sin(t)};
    const double speed = std::hypot(e->a * std::sin(t), e->b * std::cos(t));
    const double kappa = e->a * e->b / (speed * speed * speed);
    const Vec2 nu = domain.outward_normal(p);
    return {p + nu * d, nu, kTwoPi * speed * (1.0 + kappa * d)};
  }
  const auto& st = std::get<Stadium>(domain.shape());
  const double total = 2.0 * st.L + kTwoPi * st.R;
  double u = tau * total;
  if (u < st.L) return {{u, st.R + d}, {0.0, 1.0}, total};
  u -= st.L;
  if (u < kPi * st.R) {
    const double th = 0.5 * kPi - u / st.R;  // right cap, clockwise from the top
    const Vec2 nu = unit(th);
    return {Vec2{st.L, 0.0} + nu * (st.R + d), nu, total * (1.0 + d / st.R)};
  }
  u -= kPi * st.R;
  if (u < st.L) return {{st.L - u, -st.R - d}, {0.0, -1.0}, total};
  u -= st.L;
  const double th = -0.5 * kPi - u / st.R;
  const Vec2 nu = unit(th);
  return {nu * (st.R + d), nu, total * (1.0 + d / st.R)};
}

// Arc-length sampler of the offset curve.
class OffsetSampler {
 public:
  OffsetSampler(const Domain& domain, double d, int n = 8192) : domain_(domain), d_(d), cdf_(n + 1, 0.0) {
    for (int k = 0; k < n; ++k) {
      const double tau = (k + 0.5) / n;
      cdf_[k + 1] = cdf_[k] + boundary_at(domain, d, tau).element / n;
    }
  }
  double length() const { return cdf_.back(); }
  BoundaryFrame sample(double u) const {
    const double target = u * length();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
    const std::size_t k = std::clamp<std::size_t>(it - cdf_.begin(), 1, cdf_.size() - 1);
    const double frac = (target - cdf_[k - 1]) / (cdf_[k] - cdf_[k - 1]);
    const double tau = (k - 1 + std::clamp(frac, 0.0, 1.0)) / (cdf_.size() - 1);
    return boundary_at(domain_, d_, std::min(tau, std::nextafter(1.0, 0.0)));
  }

 private:
  const Domain& domain_;
  double d_;
  std::vector<double> cdf_;
};

std::mt19937_64 curve_rng(std::uint64_t seed, std::uint32_t group, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), group,
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32)};
  return std::mt19937_64(seq);
}

Characteristic merge(Characteristic back, const Characteristic& fwd) {
  Characteristic c = std::move(back);
  c.t_plus = fwd.t_plus;
  for (std::size_t i = 1; i < fwd.x_path.size(); ++i) c.x_path.push_back(fwd.x_path[i]);
  c.jumps.insert(c.jumps.end(), fwd.jumps.begin(), fwd.jumps.end());
  c.stuck = c.stuck || fwd.stuck;
  return c;
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

double AngleJump::arc_length() const {
  const double d = wrap_angle(s_plus - s_minus);
  return arc_sign > 0 ? d : kTwoPi - d;
}

double Characteristic::s_at(double t) const {
  double s = s_start;
  for (const AngleJump& j : jumps) {
    if (j.t <= t) s = j.s_plus;
  }
  return s;
}

Vec2 Characteristic::x_at(double t) const {
  if (x_path.empty()) return {};
  if (t <= x_path.front().first) return x_path.front().second;
  for (std::size_t i = 0; i + 1 < x_path.size(); ++i) {
    const auto& [t0, x0] = x_path[i];
    const auto& [t1, x1] = x_path[i + 1];
    if (t < t1) {
      const double f = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
      return x0 + (x1 - x0) * f;
    }
  }
  return x_path.back().second;
}

double Characteristic::total_variation() const {
  double tv = 0.0;
  for (const AngleJump& j : jumps) tv += j.arc_length();
  return tv;
}

Characteristic trace_characteristic(const Domain& domain, Vec2 x, double s, const TraceSettings& settings, double t0,
                                    int direction) {
  if (direction != 1 && direction != -1) throw std::invalid_argument("direction must be +1 or -1");
  if (!chi(domain, x, s)) throw std::invalid_argument("trace_characteristic: chi(x, s) = 0 at the start");
  const double d = offset_of(domain, settings);
  const RidgeSet ridge = ridge_set(domain);
  auto g = [&](Vec2 p) { return signed_distance(domain, p) + d; };
  auto done = [](double a, double b) { return std::abs(b - a) < 1e-10; };

  Characteristic c;
  s = wrap_angle(s);
  std::vector<std::pair<double, Vec2>> path{{t0, x}};
  std::vector<AngleJump> jumps;
  double t = t0;
  const double t_end = direction > 0 ? settings.T : 0.0;
  int side = x.y < 0.0 ? -1 : 1;
  double g_lb = g(x);
  bool stuck = false;

  while (direction * (t_end - t) > 1e-14) {
    const double step = std::min(settings.dt, std::abs(t_end - t));
    const Vec2 v = unit(s) * static_cast<double>(direction);
    const Vec2 xn = x + v * step;
    const int side_n = xn.y > 0.0 ? 1 : (xn.y < 0.0 ? -1 : side);
    if (side_n != side) {
      const double tau = std::clamp(-x.y / v.y, 0.0, step);
      Vec2 xc = x + v * tau;
      xc.y = 0.0;
      const double tc = t + direction * tau;
      const bool on_ridge = !ridge.degenerate() && xc.x > ridge.p_minus.x + 1e-12 && xc.x < ridge.p_plus.x - 1e-12;
      if (on_ridge) {
        const RidgeTraces tr = ridge_traces(domain, xc.x);
        const Vec2 m_far = side > 0 ? tr.m_minus : tr.m_plus;
        const Vec2 m_near = side > 0 ? tr.m_plus : tr.m_minus;
        if (dot(unit(s), m_far) > kTieTol) {
          side = -side;
        } else {
          const double s_new = wrap_angle(-s);
          AngleJump j;
          j.t = tc;
          j.x = xc;
          j.s_minus = direction > 0 ? s : s_new;
          j.s_plus = direction > 0 ? s_new : s;
          j.arc_sign = wrap_angle(j.s_plus - j.s_minus) <= kPi ? 1 : -1;
          jumps.push_back(j);
          path.emplace_back(tc, xc);
          s = s_new;
          if (!(dot(unit(s), m_near) > kTieTol)) {
            stuck = true;
            t = tc;
            x = xc;
            break;
          }
        }
      } else {
        side = -side;
      }
      g_lb -= tau;
      x = xc;
      t = tc;
      continue;
    }
    if (g_lb <= step + 1e-12) {
      const double gn = g(xn);
      if (gn <= 0.0) {
        const double g0 = g(x);
        double tau = 0.0;
        if (g0 > 0.0) tau = boost::math::tools::bisect([&](double q) { return g(x + v * q); }, 0.0, step, done).second;
        x = x + v * tau;
        t += direction * tau;
        break;
      }
      g_lb = gn;
    } else {
      g_lb -= step;
    }
    x = xn;
    t += direction * step;
  }
  path.emplace_back(t, x);

  if (direction < 0) {
    std::reverse(path.begin(), path.end());
    std::reverse(jumps.begin(), jumps.end());
    c.t_minus = t;
    c.t_plus = t0;
  } else {
    c.t_minus = t0;
    c.t_plus = t;
  }
  c.s_start = direction < 0 ? s : (jumps.empty() ? s : jumps.front().s_minus);
  c.x_path = std::move(path);
  c.jumps = std::move(jumps);
  c.stuck = stuck;
  return c;
}

std::vector<WeightedArc> sigma_gamma(const Characteristic& c) {
  std::vector<WeightedArc> arcs;
  for (const AngleJump& j : c.jumps) {
    WeightedArc a;
    a.t = j.t;
    a.x = j.x;
    a.s_from = j.s_minus;
    a.sign = j.arc_sign;
    a.mass = j.arc_length();
    a.s_to = j.s_minus + a.sign * a.mass;
    arcs.push_back(a);
  }
  return arcs;
}

Ensemble build_ensemble(const Domain& domain, std::size_t n, const TraceSettings& settings, std::uint64_t seed) {
  const double d = offset_of(domain, settings);
  const OffsetSampler boundary(domain, d);
  const double area = domain.area() + domain.perimeter() * d + kPi * d * d;
  Ensemble ens;
  ens.seed = seed;
  ens.weight = kPi * area / n;
  // flux of {chi = 1} through the offset curve is one per unit length and time
  const auto n_flow = static_cast<std::size_t>(std::llround(boundary.length() * 0.5 * settings.T / ens.weight));
  ens.n_phase = n;
  ens.n_inflow = n_flow;
  ens.n_outflow = n_flow;
  ens.curves.resize(n + 2 * n_flow);

  auto [lo, hi] = domain.bounding_box();
  lo = lo - Vec2{d, d};
  hi = hi + Vec2{d, d};
  const double half = 0.5 * settings.T;

  parallel_for(ens.curves.size(), [&](std::size_t i) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    try {
      if (i < n) {
        auto rng = curve_rng(seed, 0, i);
        Vec2 x;
        do {
          x = {lo.x + (hi.x - lo.x) * U(rng), lo.y + (hi.y - lo.y) * U(rng)};
        } while (!(signed_distance(domain, x) + d > 0.0));
        double s;
        const double base = angle_of(limit_sample(domain, x).m);
        do {
          s = base + (U(rng) - 0.5) * kPi;
        } while (!chi(domain, x, s));
        ens.curves[i] = merge(trace_characteristic(domain, x, s, settings, half, -1),
                              trace_characteristic(domain, x, s, settings, half, 1));
        return;
      }
      const bool inflow = i < n + n_flow;
      auto rng = curve_rng(seed, inflow ? 1 : 2, i);
      const BoundaryFrame b = boundary.sample(U(rng));
      const double phi = std::asin(U(rng));
      const double theta = angle_of(b.normal) + (inflow ? kPi : 0.0);
      const Vec2 m = limit_sample(domain, b.point).m;
      double s = theta + phi;
      if (dot(unit(s), m) <= kTieTol) s = theta - phi;
      const double t = inflow ? half + half * U(rng) : half * U(rng);
      ens.curves[i] = trace_characteristic(domain, b.point, s, settings, t, inflow ? 1 : -1);
    } catch (const std::exception&) {
      ens.curves[i] = Characteristic{};
      ens.curves[i].stuck = true;
    }
  });
  return ens;
}

std::pair<double, double> ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return {0.0, 1.0};
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = a.size(), nb = b.size();
  std::size_t i = 0, j = 0;
  double D = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    D = std::max(D, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  return {D, kolmogorov_q((sq + 0.12 + 0.11 / sq) * D)};
}

EnsembleReport analyze_ensemble(const Domain& domain, const Ensemble& ens, const TraceSettings& settings) {
  EnsembleReport r;
  const double d = offset_of(domain, settings);
  const double h = settings.dt;
  const double w = ens.weight;
  r.curves = ens.curves.size();
  for (const Characteristic& c : ens.curves) {
    r.stuck += c.stuck;
    r.jumps += c.jumps.size();
  }

  // pushforward at probe times, binned in (x, s - angle of m-bar)
  auto [lo, hi] = domain.bounding_box();
  lo = lo - Vec2{d, d};
  hi = hi + Vec2{d, d};
  const int nbx = 16, nby = 8, nr = 8, sub = 48;
  std::vector<double> cell_area(nbx * nby, 0.0);
  const double cw = (hi.x - lo.x) / nbx, ch = (hi.y - lo.y) / nby;
  parallel_for(cell_area.size(), [&](std::size_t c) {
    const int bx = static_cast<int>(c % nbx), by = static_cast<int>(c / nbx);
    int inside = 0;
    for (int p = 0; p < sub; ++p) {
      for (int q = 0; q < sub; ++q) {
        const Vec2 x{lo.x + (bx + (p + 0.5) / sub) * cw, lo.y + (by + (q + 0.5) / sub) * ch};
        inside += signed_distance(domain, x) + d > 0.0;
      }
    }
    cell_area[c] = cw * ch * inside / (sub * sub);
  });
  const int K = 4;
  for (int k = 0; k < K; ++k) r.probe_times.push_back(settings.T * (2 * k + 1) / (2.0 * K));
  std::vector<std::vector<double>> counts(K, std::vector<double>(nbx * nby * nr, 0.0));
  std::vector<std::size_t> violations(K, 0);
  parallel_for(static_cast<std::size_t>(K), [&](std::size_t k) {
    const double t = r.probe_times[k];
    for (const Characteristic& c : ens.curves) {
      if (c.stuck || c.x_path.empty() || t < c.t_minus || t >= c.t_plus) continue;
      const Vec2 x = c.x_at(t);
      double rel = wrap_angle(c.s_at(t) - angle_of(limit_sample(domain, x).m));
      if (rel > kPi) rel -= kTwoPi;
      if (std::abs(rel) >= 0.5 * kPi) {
        ++violations[k];
        continue;
      }
      const int bx = std::clamp(static_cast<int>((x.x - lo.x) / cw), 0, nbx - 1);
      const int by = std::clamp(static_cast<int>((x.y - lo.y) / ch), 0, nby - 1);
      const int br = std::clamp(static_cast<int>((rel + 0.5 * kPi) / kPi * nr), 0, nr - 1);
      counts[k][(by * nbx + bx) * nr + br] += 1.0;
    }
  });
  r.dof = 0;
  for (int k = 0; k < K; ++k) {
    double x2 = 0.0;
    int bins = 0;
    for (int c = 0; c < nbx * nby; ++c) {
      const double expected = cell_area[c] * (kPi / nr) / w;
      if (expected < 5.0) continue;
      for (int b = 0; b < nr; ++b) {
        const double o = counts[k][c * nr + b];
        x2 += (o - expected) * (o - expected) / expected;
        ++bins;
      }
    }
    r.chi2.push_back(x2);
    r.dof = bins;
    r.chi_violations += violations[k];
    if (bins > 0) {
      r.chi2_max_z = std::max(r.chi2_max_z, std::abs(x2 - bins) / std::sqrt(2.0 * bins));
      const boost::math::chi_squared dist(bins);
      r.chi2_min_p = std::min(r.chi2_min_p, boost::math::cdf(boost::math::complement(dist, x2)));
    }
  }

  // sigma-hat histogram over (x cells of size h) x 64 angle bins
  const int ns = 64;
  std::map<std::pair<long, long>, std::array<double, ns>> hist;
  double arc_total = 0.0, near_ridge = 0.0;
  const RidgeSet ridge = ridge_set(domain);
  const double ridge_mid = 0.5 * (ridge.p_minus.x + ridge.p_plus.x), ridge_quarter = 0.25 * ridge.length();
  std::vector<double> ks_a, ks_b;
  for (const Characteristic& c : ens.curves) {
    for (const WeightedArc& a : sigma_gamma(c)) {
      arc_total += a.mass;
      if (std::abs(a.x.y) <= 2.0 * h) near_ridge += a.mass;
      r.max_jump_offset = std::max(r.max_jump_offset, std::abs(a.x.y));
      r.max_arc = std::max(r.max_arc, a.mass);
      auto& bins = hist[{std::lround(std::floor(a.x.x / h)), std::lround(std::floor(a.x.y / h))}];
      // counterclockwise interval [start, start + mass]
      const double start = wrap_angle(a.sign > 0 ? a.s_from : a.s_to);
      const double bw = kTwoPi / ns;
      const double end = start + a.mass;
      for (int b = static_cast<int>(std::floor(start / bw)); b * bw < end; ++b) {
        const double take = std::min(end, (b + 1) * bw) - std::max(start, b * bw);
        if (take > 0.0) bins[((b % ns) + ns) % ns] += a.sign * take;
      }
      if (std::abs(a.x.x - ridge_mid) <= ridge_quarter) {
        (a.t < 0.5 * settings.T ? ks_a : ks_b).push_back(a.s_from);
      }
    }
  }
  double hat_tv = 0.0;
  for (const auto& [key, bins] : hist) {
    for (double v : bins) hat_tv += std::abs(v);
  }
  r.ridge_fraction = arc_total > 0.0 ? near_ridge / arc_total : 1.0;
  r.cancellation_ratio = arc_total > 0.0 ? hat_tv / arc_total : 1.0;
  const auto [D, p] = ks_two_sample(ks_a, ks_b);
  r.ks_statistic = D;
  r.ks_p = p;
  r.ks_n1 = ks_a.size();
  r.ks_n2 = ks_b.size();

  if (!ridge.degenerate()) {
    const double minimal = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double x1) { return 1.0 / c_beta(ridge_traces(domain, x1).beta); }, ridge.p_minus.x, ridge.p_plus.x, 10, 1e-10);
    r.minimal_ratio = w * hat_tv / (settings.T * minimal);
  }
  return r;
}

EnsembleReport ensemble_representation_check(const Domain& domain, std::size_t n, const TraceSettings& settings,
                                             std::uint64_t seed) {
  if (n < 1000) throw std::invalid_argument("ensemble_representation_check needs N >= 1000");
  return analyze_ensemble(domain, build_ensemble(domain, n, settings, seed), settings);
}

std::string EnsembleReport::to_json() const {
  nlohmann::ordered_json j;
  j["curves"] = curves;
  j["stuck"] = stuck;
  j["jumps"] = jumps;
  j["probe_times"] = probe_times;
  j["chi2"] = chi2;
  j["dof"] = dof;
  j["chi2_max_z"] = chi2_max_z;
  j["chi2_min_p"] = chi2_min_p;
  j["chi_violations"] = chi_violations;
  j["ridge_fraction"] = ridge_fraction;
  j["cancellation_ratio"] = cancellation_ratio;
  j["ks_statistic"] = ks_statistic;
  j["ks_p"] = ks_p;
  j["ks_n"] = {ks_n1, ks_n2};
  j["max_jump_offset"] = max_jump_offset;
  j["max_arc"] = max_arc;
  j["minimal_ratio"] = minimal_ratio;
  return j.dump(2);
}

void write_ensemble_csv(const std::string& dir, const Ensemble& ens, std::size_t max_curves,
                        const std::string& comment) {
  const std::string head = comment.empty() ? "" : "# " + comment + "\n";
  std::filesystem::create_directories(dir);
  std::ofstream jt(std::filesystem::path(dir) / "jumps.csv");
  jt.precision(17);
  jt << head << "curve,t,x1,x2,s_minus,s_plus,arc_sign\n";
  const std::size_t n = std::min(max_curves, ens.curves.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Characteristic& c = ens.curves[i];
    std::ofstream f(std::filesystem::path(dir) / ("curve_" + std::to_string(i) + ".csv"));
    f.precision(17);
    f << head << "t,x1,x2,s\n";
    for (const auto& [t, x] : c.x_path) f << t << ',' << x.x << ',' << x.y << ',' << c.s_at(t) << '\n';
    for (const AngleJump& j : c.jumps) {
      jt << i << ',' << j.t << ',' << j.x.x << ',' << j.x.y << ',' << j.s_minus << ',' << j.s_plus << ',' << j.arc_sign
         << '\n';
    }
  }
}

}  // namespace aglab
