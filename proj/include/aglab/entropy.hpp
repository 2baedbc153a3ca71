#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "aglab/domain.hpp"
#include "aglab/grid.hpp"
#include "aglab/vec2.hpp"

namespace aglab {

/// c0 + sum_k c_k cos(ks) + s_k sin(ks); index 0 of sin_c is unused.
struct TrigPoly {
  std::vector<double> cos_c;
  std::vector<double> sin_c;

  TrigPoly() = default;
  explicit TrigPoly(std::size_t degree) : cos_c(degree + 1, 0.0), sin_c(degree + 1, 0.0) {}

  std::size_t degree() const { return cos_c.empty() ? 0 : cos_c.size() - 1; }
  double operator()(double s) const;
  TrigPoly derivative() const;
  /// Antiderivative with zero mean; the constant coefficient must vanish.
  TrigPoly antiderivative() const;
  /// t -> p(t + shift)
  TrigPoly shifted(double shift) const;
  TrigPoly times_cos() const;
  TrigPoly times_sin() const;
  TrigPoly operator+(const TrigPoly& o) const;
  TrigPoly operator*(double k) const;

  /// Exact for band-limited f of degree <= `degree` (DFT on n >= 2 degree + 2 samples).
  static TrigPoly fit(const std::function<double(double)>& f, std::size_t degree, std::size_t n = 0);
  static TrigPoly cos_mode(int k, double amp = 1.0);
  static TrigPoly sin_mode(int k, double amp = 1.0);
};

/// Orthonormal frame alpha1 = e^{i theta}, alpha2 = e^{i(theta + pi/2)}.
struct Frame {
  double theta = 0.0;
  Vec2 alpha1() const { return unit(theta); }
  Vec2 alpha2() const { return unit(theta + 0.5 * kPi); }
};

/// (4/3)((z.alpha2)^3 alpha1 + (z.alpha1)^3 alpha2)
Vec2 sigma_frame(const Frame& frame, Vec2 z);

struct EntropyGenerator {
  TrigPoly psi;

  /// Only even harmonics present.
  bool pi_periodic(double tol = 1e-14) const;
  static EntropyGenerator from(TrigPoly p) { return {std::move(p)}; }
};

/// s -> Phi(e^{is}) as a pair of trig polynomials.
struct EntropyMap {
  TrigPoly x;
  TrigPoly y;

  Vec2 operator()(double s) const { return {x(s), y(s)}; }
  /// Phi(z / |z|)
  Vec2 at(Vec2 z) const { return (*this)(std::atan2(z.y, z.x)); }
  Vec2 derivative(double s) const;
};

/// Phi with zero mean and dPhi/ds(e^{is}) = 2 psi(s + pi/2) e^{i(s + pi/2)}.
/// Throws NonClosed when psi carries a first harmonic (the closure integral is nonzero).
EntropyMap entropy_from_generator(const EntropyGenerator& gen);

/// Trig-polynomial representation of a circle map of known degree.
EntropyMap entropy_from_function(const std::function<Vec2(double)>& phi, std::size_t degree);

/// The generator psi with dPhi/ds(e^{is}) = 2 psi(s + pi/2) e^{i(s + pi/2)}.
EntropyGenerator generator_of(const EntropyMap& phi);

EntropyMap frame_entropy(const Frame& frame);

/// max over the given angles of |dPhi/ds . e^{is}|.
double entropy_defect(const EntropyMap& phi, std::size_t samples = 1024);

/// Weak divergence of Phi(m). Nodes whose |m| deviates from 1 by more than 0.1 (or is not finite)
/// are left out, which removes the cells touching them; their count goes to *flagged.
CellMeasure entropy_production(const VectorField& m, const EntropyMap& phi, std::size_t* flagged = nullptr);

/// (TV_e^2 + TV_eps^2)^{1/2} for the frames at theta = 0 and pi/4, TV over non-EXTERIOR cells.
double f0_tilde_two_frames(const VectorField& m);

/// Cellwise maximum over frames theta_k = k pi / (2 n_frames), summed over non-EXTERIOR cells.
double f0_tilde_sup(const VectorField& m, int n_frames);

/// (1/3) int_J |m+ - m-|^3 dH^1 along the ridge by adaptive quadrature.
/// Throws QuadratureFailure if the error estimate exceeds 1e-8 (relative).
double f0_jump(const Domain& domain);

/// int over the boundary of Omega_delta of Sigma_frame(m-bar) . n, by quadrature along the offset curve.
double sigma_boundary_flux(const Domain& domain, const Frame& frame);

}  // namespace aglab
