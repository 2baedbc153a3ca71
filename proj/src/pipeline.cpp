#include "aglab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "aglab/entropy.hpp"
#include "aglab/errors.hpp"
#include "aglab/fields.hpp"
#include "aglab/kinetic.hpp"
#include "aglab/lagrangian.hpp"
#include "aglab/minimize.hpp"

namespace aglab {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class Emitter {
 public:
  explicit Emitter(const ExperimentConfig& cfg)
      : dir_(cfg.output_dir()), hash_(hash_hex(config_hash(cfg))), seed_(cfg.seed) {
    fs::create_directories(dir_);
  }

  const fs::path& dir() const { return dir_; }
  std::string stamp() const { return "config_hash=" + hash_ + " seed=" + std::to_string(seed_); }

  // columns joined by sep; rows already formatted
  void table(const std::string& name, const std::vector<std::string>& columns,
             const std::vector<std::vector<double>>& rows, char sep = ',') const {
    std::ofstream f(dir_ / name);
    f << "# " << stamp() << '\n';
    if (sep == ' ') f << "# ";
    for (std::size_t i = 0; i < columns.size(); ++i) f << (i ? std::string(1, sep) : "") << columns[i];
    f << '\n';
    f << std::setprecision(17);
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) f << (i ? std::string(1, sep) : "") << r[i];
      f << '\n';
    }
  }

  void json(const std::string& name, ordered_json body) const {
    ordered_json j;
    j["config_hash"] = hash_;
    j["seed"] = seed_;
    for (auto& [k, v] : body.items()) j[k] = v;
    std::ofstream(dir_ / name) << j.dump(2) << '\n';
  }

 private:
  fs::path dir_;
  std::string hash_;
  std::uint64_t seed_;
};

std::string eps_tag(std::size_t k) { return "eps" + std::to_string(k); }

int minimize_pipeline(const ExperimentConfig& cfg, std::ostream& log) {
  const Emitter out(cfg);
  const Domain domain = cfg.domain.build();
  const GridPtr grid = make_grid_resolution(domain, cfg.resolution);
  MinimizeOptions opts = cfg.minimize_options();
  if (!cfg.warm_start.empty()) opts.warm_start = read_field_dump(cfg.resolve(cfg.warm_start).string(), grid);
  write_grid_sidecar((out.dir() / "grid.json").string(), *grid);

  std::vector<std::vector<double>> history;
  ordered_json runs = ordered_json::array();
  bool all_converged = true;
  for (std::size_t k = 0; k < cfg.eps_list.size(); ++k) {
    const double eps = cfg.eps_list[k];
    const MinimizeResult r = minimize(domain, grid, eps, opts);
    log << "minimize eps=" << eps << " iterations=" << r.iterations << " energy=" << r.energy_history.back().total
        << (r.converged ? "" : " (not converged)") << '\n';
    std::size_t level = 0;
    for (std::size_t i = 0; i < r.energy_history.size(); ++i) {
      while (level + 1 < r.level_starts.size() && i >= r.level_starts[level + 1]) ++level;
      const EnergySplit& e = r.energy_history[i];
      history.push_back({eps, static_cast<double>(i), r.eta_levels[level], e.total, e.hessian_term, e.potential_term,
                         r.grad_norm_history[i]});
    }
    write_field_dump((out.dir() / ("u_" + eps_tag(k) + ".txt")).string(), r.u);
    const EnergySplit& e = r.energy_history.back();
    runs.push_back({{"eps", eps},
                    {"field", "u_" + eps_tag(k) + ".txt"},
                    {"total", e.total},
                    {"hessian_term", e.hessian_term},
                    {"potential_term", e.potential_term},
                    {"grad_norm", r.grad_norm_history.back()},
                    {"eta_final", r.eta_final},
                    {"iterations", r.iterations},
                    {"converged", r.converged}});
    all_converged = all_converged && r.converged;
    opts.warm_start = r.u;
  }
  out.table("minimize_history.csv", {"eps", "step", "eta", "total", "hessian_term", "potential_term", "grad_norm"},
            history);
  out.json("minimize.json", {{"domain", cfg.domain.kind},
                             {"h", grid->h()},
                             {"hessian_power", cfg.hessian_power},
                             {"optimizer", cfg.optimizer},
                             {"runs", runs}});
  return all_converged ? kExitOk : kExitNotConverged;
}

int limit_table_pipeline(const ExperimentConfig& cfg, std::ostream& log) {
  const Emitter out(cfg);
  const Domain domain = cfg.domain.build();
  const GridPtr grid = make_grid_resolution(domain, cfg.resolution);
  MinimizeOptions opts = cfg.minimize_options();
  if (!cfg.warm_start.empty()) opts.warm_start = read_field_dump(cfg.resolve(cfg.warm_start).string(), grid);
  const double f0 = f0_jump(domain);
  const std::vector<LimitRow> rows = energy_limit_table(domain, grid, cfg.eps_list, f0, opts);

  std::vector<std::vector<double>> table;
  bool all_converged = true, w11_decreasing = true, gap_decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const LimitRow& r = rows[i];
    log << "limit-table eps=" << r.eps << " F=" << r.energy.total << " w11=" << r.w11 << '\n';
    table.push_back({r.eps, r.energy.total, r.energy.hessian_term, r.energy.potential_term, r.w11, r.energy_gap,
                     static_cast<double>(r.iterations), r.converged ? 1.0 : 0.0});
    all_converged = all_converged && r.converged;
    if (i > 0) {
      w11_decreasing = w11_decreasing && r.w11 < rows[i - 1].w11;
      gap_decreasing = gap_decreasing && r.energy_gap < rows[i - 1].energy_gap;
    }
  }
  const std::vector<std::string> cols{"eps", "total", "hessian_term", "potential_term", "w11", "energy_gap",
                                      "iterations", "converged"};
  out.table("limit_table.csv", cols, table);
  out.table("limit_table.dat", cols, table, ' ');
  ordered_json j{{"domain", cfg.domain.kind},
                 {"h", grid->h()},
                 {"hessian_power", cfg.hessian_power},
                 {"f0", f0},
                 {"w11_decreasing", w11_decreasing},
                 {"gap_decreasing", f0 > 0.0 ? ordered_json(gap_decreasing) : ordered_json(nullptr)},
                 {"all_converged", all_converged}};
  out.json("limit_table.json", j);
  return all_converged ? kExitOk : kExitNotConverged;
}

int entropy_report_pipeline(const ExperimentConfig& cfg, std::ostream& log) {
  const Emitter out(cfg);
  const Domain domain = cfg.domain.build();
  const GridPtr grid = make_grid_resolution(domain, cfg.resolution);
  const LimitField lf = exact_limit_field(domain, grid);
  const RidgeSet ridge = ridge_set(domain);
  const auto interior = grid->region(NodeClass::Interior);
  auto near = ridge_band(*grid, ridge, 3.0 * grid->h());
  for (std::size_t k = 0; k < near.size(); ++k) near[k] = near[k] && interior[k];

  ordered_json frames = ordered_json::array();
  for (double theta : cfg.entropy_frames) {
    const CellMeasure mu = entropy_production(lf.m, frame_entropy(Frame{theta}));
    frames.push_back({{"frame_theta", theta},
                      {"tv_interior", mu.total_variation(interior)},
                      {"tv_near_ridge", mu.total_variation(near)},
                      {"flux_boundary", sigma_boundary_flux(domain, Frame{theta})}});
  }
  const double f0 = f0_jump(domain);
  const double two = f0_tilde_two_frames(lf.m);
  log << "entropy-report f0_jump=" << f0 << " f0_tilde_two_frames=" << two << '\n';
  out.json("entropy_report.json", {{"domain", cfg.domain.kind},
                                   {"h", grid->h()},
                                   {"f0_jump", f0},
                                   {"f0_tilde_two_frames", two},
                                   {"f0_tilde_sup4", f0_tilde_sup(lf.m, 4)},
                                   {"frames", frames}});

  std::vector<std::vector<double>> rows;
  if (!ridge.degenerate()) {
    const int n = 101;
    for (int k = 0; k < n; ++k) {
      const double x1 = ridge.p_minus.x + (k + 0.5) / n * (ridge.p_plus.x - ridge.p_minus.x);
      const RidgeTraces tr = ridge_traces(domain, x1);
      const double jump = norm(tr.m_plus - tr.m_minus);
      rows.push_back({x1, tr.beta, tr.s_bar, jump * jump * jump / 3.0});
    }
  }
  out.table("ridge_report.csv", {"x1", "beta", "s_bar", "jump_density"}, rows);
  return kExitOk;
}

std::vector<std::pair<std::string, EntropyGenerator>> identity_generators() {
  return {{"cos2s", EntropyGenerator::from(TrigPoly::cos_mode(2))},
          {"sin2s", EntropyGenerator::from(TrigPoly::sin_mode(2))},
          {"cos4s", EntropyGenerator::from(TrigPoly::cos_mode(4))},
          {"sin4s", EntropyGenerator::from(TrigPoly::sin_mode(4))}};
}

int kinetic_check_pipeline(const ExperimentConfig& cfg, std::ostream& log) {
  const Emitter out(cfg);
  const Domain domain = cfg.domain.build();
  const auto gens = identity_generators();

  std::vector<std::vector<double>> rows;
  double max_err = 0.0;
  for (double beta : cfg.kinetic_betas) {
    for (std::size_t g = 0; g < gens.size(); ++g) {
      const JumpIdentity id = jump_identity_check(beta, gens[g].second);
      const double err = std::abs(id.lhs - id.rhs);
      max_err = std::max(max_err, err);
      rows.push_back({beta, static_cast<double>(g), id.lhs, id.rhs, err});
    }
  }
  out.table("jump_identity.csv", {"beta", "generator", "lhs", "rhs", "error"}, rows);

  double norm_err = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double beta = kPi * k / 101.0;
    norm_err = std::max(norm_err, std::abs(gbar_beta(beta).total_variation() - 1.0));
  }

  std::size_t ctor_checked = 0, ctor_passed = 0, perturbed = 0, perturbed_rejected = 0;
  std::vector<PointKind> kinds;
  for (double beta : cfg.kinetic_betas) {
    for (double s_bar : {0.0, 0.5 * kPi, 1.5 * kPi}) kinds.emplace_back(Jump{beta, s_bar});
  }
  for (double s_bar : {0.0, 1.0, 0.5 * kPi + 0.3}) {
    for (int sign : {1, -1}) kinds.emplace_back(NonJump{s_bar, sign});
  }
  for (const PointKind& kind : kinds) {
    const CircleMeasure mu = minimal_disintegration(kind);
    ++ctor_checked;
    ctor_passed += minimality_check(mu);
    for (double a : {0.05, -0.05}) {
      ++perturbed;
      const CircleMeasure p = mu.plus_constant(a);
      perturbed_rejected += !minimality_check(p.scaled(1.0 / p.total_variation()));
    }
  }

  const GridPtr grid = make_grid_resolution(domain, cfg.resolution);
  const LimitField lf = exact_limit_field(domain, grid);
  const KineticField sigma = ridge_disintegration(domain, grid);
  const TestBank bank = default_test_bank(domain);
  const double res = kinetic_residual(lf.m, sigma, bank);
  const double res0 = kinetic_residual(lf.m, KineticField{grid, {}}, bank);
  const SignStructureReport sign = sign_structure_report(sigma);
  log << "kinetic-check max identity error=" << max_err << " residual=" << res << " (sigma=0: " << res0 << ")\n";

  out.json("kinetic_check.json", {{"domain", cfg.domain.kind},
                                  {"h", grid->h()},
                                  {"max_identity_error", max_err},
                                  {"normalization_error", norm_err},
                                  {"minimality", {{"constructors", ctor_checked},
                                                  {"constructors_passed", ctor_passed},
                                                  {"perturbations", perturbed},
                                                  {"perturbations_rejected", perturbed_rejected}}},
                                  {"kinetic_residual", res},
                                  {"kinetic_residual_sigma0", res0},
                                  {"sign_structure", {{"nodes", sign.nodes},
                                                      {"min_margin", sign.min_margin},
                                                      {"negative", sign.negative},
                                                      {"axis_fraction", sign.axis_fraction}}}});
  return kExitOk;
}

int characteristics_pipeline(const ExperimentConfig& cfg, std::ostream& log) {
  const Emitter out(cfg);
  const Domain domain = cfg.domain.build();
  TraceSettings st;
  st.T = cfg.ensemble_T;
  st.dt = cfg.ensemble_dt;
  const Ensemble ens = build_ensemble(domain, cfg.ensemble_size, st, cfg.seed);
  const EnsembleReport r = analyze_ensemble(domain, ens, st);
  log << "characteristics curves=" << r.curves << " jumps=" << r.jumps << " chi2_max_z=" << r.chi2_max_z
      << " cancellation=" << r.cancellation_ratio << '\n';
  write_ensemble_csv((out.dir() / "curves").string(), ens, cfg.curve_dump, out.stamp());
  ordered_json body = ordered_json::parse(r.to_json());
  body["weight"] = ens.weight;
  body["n_phase"] = ens.n_phase;
  body["n_inflow"] = ens.n_inflow;
  body["n_outflow"] = ens.n_outflow;
  out.json("characteristics.json", body);
  return kExitOk;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"minimize", "limit-table", "entropy-report", "kinetic-check",
                                          "characteristics", "all"};
  return s;
}

int run_pipeline(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log) {
  if (subcommand == "minimize") return minimize_pipeline(cfg, log);
  if (subcommand == "limit-table") return limit_table_pipeline(cfg, log);
  if (subcommand == "entropy-report") return entropy_report_pipeline(cfg, log);
  if (subcommand == "kinetic-check") return kinetic_check_pipeline(cfg, log);
  if (subcommand == "characteristics") return characteristics_pipeline(cfg, log);
  if (subcommand == "all") {
    int status = kExitOk;
    for (const std::string& s : subcommands()) {
      if (s == "all" || s == "minimize") continue;
      status = std::max(status, run_pipeline(s, cfg, log));
    }
    return status;
  }
  throw std::invalid_argument("unknown subcommand '" + subcommand + "'");
}

int run(const std::string& subcommand, const std::string& config_path, std::ostream& log, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    err << config_path << ": " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    return run_pipeline(subcommand, cfg, log);
  } catch (const NoConvergence& e) {
    err << "not converged: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace aglab
