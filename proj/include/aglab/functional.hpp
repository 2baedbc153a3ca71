#pragma once

#include "aglab/grid.hpp"

namespace aglab {

struct EnergySplit {
  double hessian_term = 0.0;
  double potential_term = 0.0;
  double total = 0.0;
};

/// Discrete F_eps over the non-EXTERIOR nodes: h^2 * sum of eps*H(u) + (1 - |grad u|^2)^2 / eps,
/// with centred stencils (values at EXTERIOR ghost nodes are read but never integrated).
/// H = sqrt(|D^2 u|^2 + eta^2) - eta for hessian_power 1 and |D^2 u|^2 for hessian_power 2.
struct EnergyParams {
  double eps = 0.1;
  double eta = 0.0;
  int hessian_power = 1;
};

EnergySplit energy(const ScalarField& u, const EnergyParams& p);

/// Gradient of the discrete energy with respect to INTERIOR node values (zero elsewhere).
ScalarField energy_gradient(const ScalarField& u, const EnergyParams& p);

/// Both at once; returns the split and writes the gradient into grad (resized as needed).
EnergySplit energy_and_gradient(const ScalarField& u, const EnergyParams& p, std::vector<double>& grad);

/// L2 norm of the functional derivative: sqrt(sum g_p^2) / h.
double grad_norm(const std::vector<double>& grad, double h);

}  // namespace aglab
