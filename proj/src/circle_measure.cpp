#include "aglab/circle_measure.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <json.hpp>
#include <stdexcept>

#include "aglab/vec2.hpp"

namespace aglab {

namespace {

constexpr double kSeam = 1e-13;

// Zeros of amp sin(s - phase) + offset inside (a, b).
std::vector<double> roots_in(const DensityPiece& p, double a, double b) {
  std::vector<double> out;
  if (p.amp == 0.0 || std::abs(p.offset) > std::abs(p.amp)) return out;
  const double r = std::asin(std::clamp(-p.offset / p.amp, -1.0, 1.0));
  for (double base : {r, kPi - r}) {
    const double first = p.phase + base;
    double k = std::ceil((a - first) / kTwoPi);
    for (double s = first + k * kTwoPi; s < b; s += kTwoPi) {
      if (s > a) out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double primitive(const DensityPiece& p, double s) { return -p.amp * std::cos(s - p.phase) + p.offset * s; }

double abs_integral(const DensityPiece& p) {
  std::vector<double> pts{p.s0};
  for (double r : roots_in(p, p.s0, p.s1)) pts.push_back(r);
  pts.push_back(p.s1);
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) tv += std::abs(primitive(p, pts[i + 1]) - primitive(p, pts[i]));
  return tv;
}

void validate(const std::vector<DensityPiece>& pieces) {
  double last = 0.0;
  for (const DensityPiece& p : pieces) {
    if (!(p.s0 >= last - kSeam && p.s1 > p.s0 && p.s1 <= kTwoPi + kSeam)) {
      throw std::invalid_argument("density pieces must be sorted, disjoint and inside [0, 2pi]");
    }
    last = p.s1;
  }
}

}  // namespace

double DensityPiece::operator()(double s) const { return amp * std::sin(s - phase) + offset; }
double DensityPiece::derivative(double s) const { return amp * std::cos(s - phase); }

CircleMeasure::CircleMeasure(std::vector<std::pair<double, double>> atoms, std::vector<DensityPiece> pieces)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces)) {
  for (auto& a : atoms_) a.first = wrap_angle(a.first);
  std::sort(atoms_.begin(), atoms_.end());
  pieces_.erase(std::remove_if(pieces_.begin(), pieces_.end(), [](const DensityPiece& p) { return p.s1 - p.s0 <= kSeam; }),
                pieces_.end());
  std::sort(pieces_.begin(), pieces_.end(), [](const DensityPiece& a, const DensityPiece& b) { return a.s0 < b.s0; });
  validate(pieces_);
}

double CircleMeasure::density(double s) const {
  const double t = wrap_angle(s);
  for (const DensityPiece& p : pieces_) {
    if (t >= p.s0 && (t < p.s1 || (p.s1 >= kTwoPi && t <= p.s1))) return p(t);
  }
  return 0.0;
}

double CircleMeasure::total_variation() const {
  double tv = 0.0;
  for (std::size_t i = 0; i < atoms_.size();) {
    double w = 0.0;
    const double s = atoms_[i].first;
    while (i < atoms_.size() && atoms_[i].first - s <= kSeam) w += atoms_[i++].second;
    tv += std::abs(w);
  }
  for (const DensityPiece& p : pieces_) tv += abs_integral(p);
  return tv;
}

double CircleMeasure::mass() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.second;
  for (const DensityPiece& p : pieces_) m += primitive(p, p.s1) - primitive(p, p.s0);
  return m;
}

double CircleMeasure::integrate(const std::function<double(double)>& f) const {
  using boost::math::quadrature::gauss_kronrod;
  double sum = 0.0;
  for (const auto& a : atoms_) sum += a.second * f(a.first);
  for (const DensityPiece& p : pieces_) {
    sum += gauss_kronrod<double, 31>::integrate([&](double s) { return p(s) * f(s); }, p.s0, p.s1, 8, 1e-14);
  }
  return sum;
}

CircleMeasure CircleMeasure::plus_constant(double alpha) const {
  std::vector<DensityPiece> out;
  double cursor = 0.0;
  for (DensityPiece p : pieces_) {
    if (p.s0 > cursor + kSeam) out.push_back({cursor, p.s0, 0.0, 0.0, alpha});
    p.offset += alpha;
    out.push_back(p);
    cursor = p.s1;
  }
  if (cursor < kTwoPi - kSeam) out.push_back({cursor, kTwoPi, 0.0, 0.0, alpha});
  return CircleMeasure(atoms_, std::move(out));
}

CircleMeasure CircleMeasure::shifted(double shift) const {
  std::vector<std::pair<double, double>> atoms = atoms_;
  for (auto& a : atoms) a.first += shift;
  std::vector<DensityPiece> out;
  for (DensityPiece p : pieces_) {
    const double len = p.s1 - p.s0;
    p.s0 = wrap_angle(p.s0 + shift);
    if (p.s0 > kTwoPi - kSeam) p.s0 = 0.0;
    p.s1 = p.s0 + len;
    p.phase += shift;
    if (p.s1 > kTwoPi + kSeam) {
      DensityPiece tail = p;
      p.s1 = kTwoPi;
      tail.s0 = 0.0;
      tail.s1 -= kTwoPi;
      out.push_back(tail);
    } else {
      p.s1 = std::min(p.s1, kTwoPi);
    }
    out.push_back(p);
  }
  return CircleMeasure(std::move(atoms), std::move(out));
}

CircleMeasure CircleMeasure::scaled(double k) const {
  std::vector<std::pair<double, double>> atoms = atoms_;
  for (auto& a : atoms) a.second *= k;
  std::vector<DensityPiece> out = pieces_;
  for (DensityPiece& p : out) {
    p.amp *= k;
    p.offset *= k;
  }
  return CircleMeasure(std::move(atoms), std::move(out));
}

bool CircleMeasure::pi_periodic(double tol) const {
  for (const auto& a : atoms_) {
    const double t = wrap_angle(a.first + kPi);
    double w = 0.0;
    for (const auto& b : atoms_) {
      const double d = std::abs(b.first - t);
      if (std::min(d, kTwoPi - d) <= 1e-12) w += b.second;
    }
    if (std::abs(w - a.second) > tol) return false;
  }
  const int n = 4096;
  for (int k = 0; k < n; ++k) {
    const double s = kPi * (k + 0.37) / n;
    if (std::abs(density(s) - density(s + kPi)) > tol) return false;
  }
  return true;
}

std::string CircleMeasure::to_json() const {
  nlohmann::ordered_json j;
  j["atoms"] = nlohmann::ordered_json::array();
  for (const auto& a : atoms_) j["atoms"].push_back({a.first, a.second});
  j["pieces"] = nlohmann::ordered_json::array();
  for (const DensityPiece& p : pieces_) {
    nlohmann::ordered_json q;
    q["s0"] = p.s0;
    q["s1"] = p.s1;
    if (p.constant()) {
      q["kind"] = "const";
      q["params"] = {p.offset};
    } else {
      q["kind"] = "trig";
      q["params"] = {p.amp, p.phase, p.offset};
    }
    j["pieces"].push_back(q);
  }
  return j.dump();
}

CircleMeasure CircleMeasure::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  std::vector<std::pair<double, double>> atoms;
  for (const auto& a : j.at("atoms")) atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
  std::vector<DensityPiece> pieces;
  for (const auto& q : j.at("pieces")) {
    DensityPiece p;
    p.s0 = q.at("s0").get<double>();
    p.s1 = q.at("s1").get<double>();
    const auto& par = q.at("params");
    const std::string kind = q.at("kind").get<std::string>();
    if (kind == "const") {
      p.offset = par.at(0).get<double>();
    } else if (kind == "trig") {
      p.amp = par.at(0).get<double>();
      p.phase = par.at(1).get<double>();
      p.offset = par.at(2).get<double>();
    } else {
      throw std::invalid_argument("unknown piece kind " + kind);
    }
    pieces.push_back(p);
  }
  return CircleMeasure(std::move(atoms), std::move(pieces));
}

}  // namespace aglab
