#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aglab/domain.hpp"
#include "aglab/functional.hpp"
#include "aglab/grid.hpp"

namespace aglab {

enum class Optimizer { BB, LBFGS };

struct MinimizeOptions {
  int max_iter = 20000;      // per eta level
  double tol = 1e-6;         // on grad_norm
  double eta0 = 1.0;
  double eta_min = -1.0;     // <= 0: 1e-4 / h
  int hessian_power = 1;
  Optimizer optimizer = Optimizer::BB;
  int nonmonotone_memory = 1;
  int lbfgs_memory = 10;
  /// Sparse Gauss-Newton preconditioner, refactored every precond_refresh accepted steps.
  bool precondition = true;
  int precond_refresh = 1;
  double blur_radius = 2.0;  // Gaussian blur of the initial guess, in units of h
  std::optional<ScalarField> warm_start;
};

struct MinimizeResult {
  ScalarField u;
  std::vector<EnergySplit> energy_history;
  std::vector<double> grad_norm_history;
  /// Index into the histories where each eta level begins.
  std::vector<std::size_t> level_starts;
  std::vector<double> eta_levels;
  double eps = 0.0;
  double eta_final = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// u-bar^delta on every node (EXTERIOR ghosts included).
ScalarField pinned_limit_field(const Domain& domain, GridPtr grid);

/// Gaussian blur (standard deviation radius*h) of the INTERIOR values of u; other nodes untouched.
ScalarField mollify_interior(const ScalarField& u, double radius);

/// eta_k = max(eta_min, eta0 2^-k) up to and including the first level equal to eta_min.
std::vector<double> eta_schedule(double eta0, double eta_min);

/// Minimize the discrete energy over INTERIOR values with COLLAR and ghost values held at u-bar^delta.
/// Never throws on non-convergence; converged=false instead. Throws LineSearchFailure.
MinimizeResult minimize(const Domain& domain, GridPtr grid, double eps, const MinimizeOptions& opts = {});

struct LimitRow {
  double eps = 0.0;
  EnergySplit energy;
  double w11 = 0.0;
  double energy_gap = 0.0;  // |F_eps - F_0| / F_0 (NaN if F_0 = 0)
  int iterations = 0;
  bool converged = false;
};

/// Warm-started sweep over a decreasing eps list; f0 is the reference limit energy.
std::vector<LimitRow> energy_limit_table(const Domain& domain, GridPtr grid, const std::vector<double>& eps_list,
                                         double f0, const MinimizeOptions& opts = {});

}  // namespace aglab
