#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace aglab {

/// amp * sin(s - phase) + offset on [s0, s1], with 0 <= s0 < s1 <= 2 pi.
struct DensityPiece {
  double s0 = 0.0;
  double s1 = 0.0;
  double amp = 0.0;
  double phase = 0.0;
  double offset = 0.0;

  double operator()(double s) const;
  double derivative(double s) const;
  bool constant() const { return amp == 0.0; }
};

/// Signed measure on R/2piZ: atoms plus a piecewise trig/constant density.
/// Pieces are sorted and do not overlap; gaps carry zero density.
class CircleMeasure {
 public:
  CircleMeasure() = default;
  CircleMeasure(std::vector<std::pair<double, double>> atoms, std::vector<DensityPiece> pieces);

  const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& pieces() const { return pieces_; }

  /// Density at s (atoms not included).
  double density(double s) const;

  /// Exact total variation: atom weights plus int |density| with the density's roots resolved.
  double total_variation() const;
  /// Signed total mass.
  double mass() const;

  /// int f dmu, by Gauss-Kronrod on each piece.
  double integrate(const std::function<double(double)>& f) const;

  /// mu + alpha L^1
  CircleMeasure plus_constant(double alpha) const;
  /// s -> mu(s - shift)
  CircleMeasure shifted(double shift) const;
  CircleMeasure scaled(double k) const;

  /// Invariance under s -> s + pi (atoms paired, density sampled).
  bool pi_periodic(double tol = 1e-12) const;

  std::string to_json() const;
  static CircleMeasure from_json(const std::string& text);

 private:
  std::vector<std::pair<double, double>> atoms_;
  std::vector<DensityPiece> pieces_;
};

}  // namespace aglab
