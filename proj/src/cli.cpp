#include "homog/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "homog/asymptotics.hpp"
#include "homog/errors.hpp"
#include "homog/format.hpp"
#include "homog/kernels.hpp"
#include "homog/neumann.hpp"

namespace homog::cli {

namespace {

using nlohmann::json;

ConvexDomain parse_domain(const json& j) {
  if (!j.contains("kind") || !j.contains("dim"))
    throw ConfigError("cli/config: domain needs 'kind' and 'dim'");
  const std::string kind = j.at("kind").get<std::string>();
  const int dim = j.at("dim").get<int>();
  std::optional<Vec> center;
  if (j.contains("center")) {
    auto c = j.at("center").get<std::vector<double>>();
    if (static_cast<int>(c.size()) != dim)
      throw ConfigError("cli/config: center length != dim");
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = c[i];
    center = v;
  }
  if (kind == "ball") return ConvexDomain::ball(dim, j.value("radius", 1.0), center);
  if (kind == "ellipsoid") {
    if (!j.contains("semi_axes"))
      throw ConfigError("cli/config: ellipsoid needs 'semi_axes'");
    return ConvexDomain::ellipsoid(dim, j.at("semi_axes").get<std::vector<double>>(),
                                   center);
  }
  throw ConfigError("cli/config: domain kind must be ball or ellipsoid");
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cli/config: cannot open file " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cli/config: JSON parse failure: ") + e.what());
  }
  return j;
}

}  // namespace

SweepConfig parse_sweep_config(const json& j) {
  SweepConfig cfg;
  cfg.raw_text = j.dump(2);
  if (!j.contains("problem")) throw ConfigError("cli/config: missing 'problem'");
  cfg.problem = j.at("problem").get<std::string>();
  if (cfg.problem != "dirichlet" && cfg.problem != "neumann" &&
      cfg.problem != "neumann_grad" && cfg.problem != "theorem13")
    throw ConfigError("cli/config: unknown problem '" + cfg.problem + "'");

  if (!j.contains("domain")) throw ConfigError("cli/config: missing 'domain'");
  cfg.domain = parse_domain(j.at("domain"));

  json data_json;
  if (j.contains("data"))
    data_json = j.at("data");
  else if (j.contains("data_file"))
    data_json = load_json_file(j.at("data_file").get<std::string>());
  else
    throw ConfigError("cli/config: missing 'data' or 'data_file'");
  TorusFunction g = TorusFunction::from_json(data_json);
  if (g.dim() != cfg.domain.dim())
    throw ConfigError("cli/config: data dimension != domain dimension");
  cfg.data = BoundaryData::from_torus(g);

  if (cfg.problem == "theorem13") {
    json tj;
    if (j.contains("tensor"))
      tj = j.at("tensor");
    else if (j.contains("tensor_file"))
      tj = load_json_file(j.at("tensor_file").get<std::string>());
    else
      throw ConfigError("cli/config: theorem13 needs 'tensor' or 'tensor_file'");
    cfg.tensor = PeriodicTensor::from_json(tj);
    if (cfg.tensor->dim() != cfg.domain.dim())
      throw ConfigError("cli/config: tensor dimension != domain dimension");
  }

  if (!j.contains("p")) throw ConfigError("cli/config: missing 'p'");
  cfg.p_list = j.at("p").get<std::vector<double>>();
  if (cfg.p_list.empty()) throw ConfigError("cli/config: empty p list");
  for (double p : cfg.p_list)
    if (!(p >= 1.0) || !std::isfinite(p))
      throw ConfigError("cli/config: p must satisfy 1 <= p < infinity");

  if (!j.contains("eps")) throw ConfigError("cli/config: missing 'eps'");
  cfg.eps_list = j.at("eps").get<std::vector<double>>();
  if (cfg.eps_list.size() < 2) throw ConfigError("cli/config: need at least 2 eps values");
  for (double e : cfg.eps_list)
    if (!(e > 0) || e > 1) throw ConfigError("cli/config: eps must lie in (0, 1]");
  const double ratio = cfg.eps_list[1] / cfg.eps_list[0];
  if (!(ratio < 1))
    throw ConfigError("cli/config: eps list must decrease");
  for (std::size_t i = 0; i + 1 < cfg.eps_list.size(); ++i) {
    const double r = cfg.eps_list[i + 1] / cfg.eps_list[i];
    if (std::abs(r - ratio) > 1e-9 * ratio)
      throw ConfigError("cli/config: eps list must be geometric");
  }

  if (j.contains("fit")) {
    const json& f = j.at("fit");
    const std::string model = f.value("model", "pure_power");
    if (model == "pure_power")
      cfg.model = FitModel::pure_power;
    else if (model == "power_log")
      cfg.model = FitModel::power_log;
    else
      throw ConfigError("cli/config: fit model must be pure_power or power_log");
    if (f.contains("min_slope")) cfg.min_slope = f.at("min_slope").get<double>();
    if (f.contains("max_slope")) cfg.max_slope = f.at("max_slope").get<double>();
  }
  cfg.kappa = j.value("kappa", 0.0);
  if (cfg.problem == "neumann_grad" && !(cfg.kappa > 0))
    throw ConfigError("cli/config: neumann_grad needs kappa in (0, 1/p)");

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    cfg.sweep.solve.q_per_wavelength = s.value("q_per_wavelength", 12.0);
    cfg.sweep.solve.rtol = s.value("rtol", 1e-7);
    cfg.sweep.mesh.tangential_per_wavelength =
        s.value("mesh_tangential_per_wavelength", 4.0);
    cfg.sweep.mesh_guard = s.value("mesh_guard", true);
    cfg.sweep.mesh_guard_tol = s.value("mesh_guard_tol", 0.02);
    cfg.sweep.dual_path_check = s.value("dual_path_check", true);
    cfg.sweep.dual_path_tol = s.value("dual_path_tol", 1e-6);
    cfg.sweep.dual_path_probes = s.value("dual_path_probes", 12);
  }
  return cfg;
}

namespace {

json fit_to_json(const RateFit& fit) {
  json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r2"] = fit.r2;
  j["model"] = fit.model == FitModel::pure_power ? "pure_power" : "power_log";
  j["points"] = fit.points;
  return j;
}

json entry_to_json(const SweepEntry& e) {
  json j;
  j["eps"] = e.eps;
  j["p"] = e.p;
  j["d"] = e.dim;
  j["ok"] = e.ok;
  if (e.ok) {
    j["norm"] = e.norm;
    j["resolution"] = e.resolution;
    j["mesh_nodes"] = e.mesh_nodes;
    j["mesh_guard_rel"] = e.mesh_guard_rel;
    j["dual_path_err"] = e.dual_path_err;
  } else {
    j["error"] = e.error;
  }
  j["wallclock_ms"] = e.wallclock_ms;
  return j;
}

bool is_resolution_error(const std::string& msg) {
  return msg.find("guard") != std::string::npos ||
         msg.find("not converged") != std::string::npos ||
         msg.find("self-test") != std::string::npos ||
         msg.find("dual-path") != std::string::npos ||
         msg.find("resolution") != std::string::npos;
}

}  // namespace

CliResult run_sweep_command(const SweepConfig& cfg, std::uint64_t seed, int threads) {
  CliResult res;
  SweepOptions opts = cfg.sweep;
  opts.threads = threads;

  EpsSweep sweep;
  json manifest;
  manifest["version"] = kVersion;
  manifest["seed"] = seed;
  manifest["threads"] = threads;
  manifest["config"] = json::parse(cfg.raw_text);

  if (cfg.problem == "theorem13") {
    auto rep = verify_theorem13_pipeline(*cfg.tensor, cfg.data, cfg.domain,
                                         cfg.p_list.front(), cfg.eps_list, opts);
    sweep = rep.sweep;
    manifest["divergence_free_residual"] = rep.divfree.max_residual;
    manifest["ahat_is_identity"] = rep.effective.is_identity();
    manifest["cell_weak_residual"] = rep.effective.weak_residual;
    manifest["fits"]["p=" + format_g17(cfg.p_list.front())] = {
        {"power_log", fit_to_json(rep.fit_log)},
        {"pure_power", fit_to_json(rep.fit_pure)}};
    const double min_slope = cfg.min_slope.value_or(rep.min_slope_required);
    const bool pass = rep.fit_log.slope >= min_slope;
    manifest["assertions"]["slope_min"] = min_slope;
    manifest["assertions"]["pass"] = pass;
    res.exit_code = pass ? kOk : kAssertionError;
    if (!pass) res.message = "norms_rates/fit: theorem13 slope assertion failed";
  } else {
    ProblemKind kind = ProblemKind::dirichlet;
    if (cfg.problem == "neumann") kind = ProblemKind::neumann;
    if (cfg.problem == "neumann_grad") kind = ProblemKind::neumann_grad;
    SweepProblem problem{kind, cfg.domain, cfg.data, cfg.problem};
    sweep = run_sweep(problem, cfg.p_list, cfg.eps_list, opts);

    bool all_pass = true;
    std::string fail_msg;
    for (double p : cfg.p_list) {
      json fits;
      RateFit primary;
      try {
        primary = fit_rate(sweep, p, cfg.model);
        fits[cfg.model == FitModel::pure_power ? "pure_power" : "power_log"] =
            fit_to_json(primary);
        if (cfg.report_both_models) {
          const FitModel other = cfg.model == FitModel::pure_power
                                     ? FitModel::power_log
                                     : FitModel::pure_power;
          fits[other == FitModel::pure_power ? "pure_power" : "power_log"] =
              fit_to_json(fit_rate(sweep, p, other));
        }
      } catch (const DegenerateFit& e) {
        fits["error"] = e.what();
        if (cfg.min_slope) {
          all_pass = false;
          fail_msg = std::string("norms_rates/fit: ") + e.what();
        }
        manifest["fits"]["p=" + format_g17(p)] = fits;
        continue;
      }
      double min_slope = cfg.min_slope.value_or(
          cfg.problem == "neumann_grad" ? cfg.kappa : 1.0 / p - 0.1);
      bool pass = primary.slope >= min_slope;
      if (cfg.max_slope && primary.slope > *cfg.max_slope) pass = false;
      fits["slope_min"] = min_slope;
      if (cfg.max_slope) fits["slope_max"] = *cfg.max_slope;
      fits["pass"] = pass;
      if (!pass) {
        all_pass = false;
        fail_msg = "norms_rates/fit: slope assertion failed at p = " + format_g17(p);
      }
      manifest["fits"]["p=" + format_g17(p)] = fits;
    }
    res.exit_code = all_pass ? kOk : kAssertionError;
    res.message = fail_msg;
  }

  int failed_entries = 0;
  bool resolution_failure = false;
  json entries = json::array();
  for (const auto& e : sweep.entries) {
    entries.push_back(entry_to_json(e));
    if (!e.ok) {
      ++failed_entries;
      if (is_resolution_error(e.error)) resolution_failure = true;
    }
  }
  manifest["entries"] = entries;
  manifest["failed_entries"] = failed_entries;
  if (failed_entries > 0 && resolution_failure) {
    res.exit_code = kResolutionError;
    res.message = "solver/guard: resolution guard failed on some sweep entries";
  }

  res.csv = sweep_csv(sweep);
  res.manifest = manifest.dump(2) + "\n";
  return res;
}

namespace {

json certify_kernel(std::uint64_t seed) {
  json rep;
  for (int d : {2, 3}) {
    ConvexDomain ball = ConvexDomain::ball(d, 1.0);
    const double res = d == 2 ? 2048.0 : 160.0 * 160.0;
    std::vector<double> dists;
    for (double t = 0.4; t >= 0.05 / 2; t *= 0.5) dists.push_back(t);
    auto mass = certify_poisson_mass(ball, res, dists);
    auto bounds = certify_poisson_bounds(ball, 4000, seed);
    json jd;
    jd["mass_max_deviation"] = mass.max_deviation;
    jd["mass_points"] = mass.entries.size();
    jd["mass_pass_1e-8"] = mass.pass(1e-8);
    jd["c0_full"] = bounds.c0_full;
    jd["c0_half"] = bounds.c0_half;
    jd["c1_full"] = bounds.c1_full;
    jd["c2_full"] = bounds.c2_full;
    jd["bounds_stable"] = bounds.stable();
    // exact sup of P |x-y|^d / d(x) on the unit ball: (1+|x|)/omega -> 2/omega
    jd["c0_exact"] = 2.0 / unit_sphere_area(d);
    jd["pass"] = mass.pass(1e-8) && bounds.stable() &&
                 bounds.c0_full <= 2.0 / unit_sphere_area(d) * (1 + 1e-6);
    rep["d=" + std::to_string(d)] = jd;
  }
  auto nb = certify_neumann_bounds(ConvexDomain::ball(3, 1.0), 4000, seed);
  rep["neumann"]["c0_full"] = nb.c0_full;
  rep["neumann"]["stable"] = nb.stable();
  rep["neumann"]["harmonicity_residual"] = nb.harmonicity_residual;
  rep["neumann"]["pass"] = nb.stable() && nb.harmonicity_residual < 1e-6;
  rep["pass"] = rep["d=2"]["pass"].get<bool>() && rep["d=3"]["pass"].get<bool>() &&
                rep["neumann"]["pass"].get<bool>();
  return rep;
}

json certify_equidist(std::uint64_t) {
  json rep;
  // fraction -> mu(A) for a ball of measure 0.2 at lambda = 512 (d = 2)
  ConvexDomain circle = ConvexDomain::ball(2, 1.0);
  TorusBall A{Vec{0.3, 0.6}, std::sqrt(0.2 / kPi)};
  auto eq = equidistribution_fraction(circle, 512.0, A, 160000.0);
  rep["lambda"] = 512.0;
  rep["target"] = eq.target;
  rep["smoothed"] = eq.smoothed;
  rep["hard"] = eq.hard;
  rep["within_0.02"] = std::abs(eq.smoothed - eq.target) <= 0.02;

  for (int d : {2, 3}) {
    ConvexDomain ball = ConvexDomain::ball(d, 1.0);
    Vec dir = d == 2 ? Vec{std::sqrt(0.5), std::sqrt(0.5)}
                     : Vec{std::sqrt(1.0 / 3), std::sqrt(1.0 / 3), std::sqrt(1.0 / 3)};
    auto decay = surface_fourier_decay(ball, dir, 8.0, 256.0);
    json jd;
    jd["slope"] = decay.fit.slope;
    jd["slope_max"] = -0.5 * (d - 1) + 0.1;
    jd["pass"] = decay.fit.slope <= -0.5 * (d - 1) + 0.1;
    rep["sigma_hat_d" + std::to_string(d)] = jd;
  }
  rep["pass"] = rep["within_0.02"].get<bool>() &&
                rep["sigma_hat_d2"]["pass"].get<bool>() &&
                rep["sigma_hat_d3"]["pass"].get<bool>();
  return rep;
}

json certify_stationary_phase(std::uint64_t, int threads) {
  json rep;
  ConvexDomain disk = ConvexDomain::ball(2, 1.0);
  TorusFunction g(2);
  g.set_coeff(Mode{0, 1}, 1.0);
  BoundaryData data = BoundaryData::from_torus(g);

  std::vector<Vec> probes;
  for (int i = 0; i < 20; ++i) {
    const double r = 0.1 + 0.35 * (i / 19.0);
    const double th = kTwoPi * i / 20.0 + 0.37;
    probes.push_back(Vec{r * std::cos(th), r * std::sin(th)});
  }
  std::vector<double> epss, errs;
  SolveOptions sopts;
  sopts.threads = threads;
  for (int k = 3; k <= 8; ++k) {
    const double eps = std::pow(2.0, -k);
    auto direct = solve_dirichlet(disk, data, eps, probes, sopts);
    double maxerr = 0;
    for (std::size_t i = 0; i < probes.size(); ++i)
      maxerr = std::max(maxerr,
                        std::abs(direct.values[i] - stationary_phase_2d(probes[i], eps)));
    epss.push_back(eps);
    errs.push_back(maxerr);
  }
  auto fit = fit_loglog(epss, errs, FitModel::pure_power);
  rep["remainder_slope"] = fit.slope;
  rep["remainder_slope_min"] = 1.4;
  rep["pass"] = fit.slope >= 1.4;
  return rep;
}

json certify_cell(std::uint64_t) {
  json rep;
  // constant tensor: Ahat = A exactly
  {
    PeriodicTensor A = PeriodicTensor::identity(3, 1);
    A.entry(0, 1, 0, 0).set_coeff(Mode{0, 0, 0}, 0.25);
    auto eff = solve_cell(A);
    double err = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double want = (a == b ? 1.0 : 0.0) + (a == 0 && b == 1 ? 0.25 : 0.0);
        err = std::max(err, std::abs(eff.ahat_entry(a, b, 0, 0) - want));
      }
    rep["constant_ahat_error"] = err;
    rep["constant_pass"] = err <= 1e-12;
  }
  // divergence-free shear with a nontrivial corrector and Ahat = I
  {
    PeriodicTensor A = PeriodicTensor::identity(3, 1);
    A.entry(2, 0, 0, 0).set_coeff(Mode{0, 0, 1}, Complex{0, -0.2});
    A.entry(2, 0, 0, 0).set_coeff(Mode{0, 0, -1}, Complex{0, 0.2});
    auto div = check_divergence_free(A);
    auto eff = solve_cell(A);
    rep["shear_divfree"] = div.holds;
    rep["shear_ahat_identity"] = eff.is_identity(1e-10);
    rep["shear_weak_residual"] = eff.weak_residual;
    double chi_max = 0;
    for (const auto& c : eff.correctors) chi_max = std::max(chi_max, c.coeff_abs_sum());
    rep["shear_corrector_nontrivial"] = chi_max > 1e-4;
    rep["shear_pass"] = div.holds && eff.is_identity(1e-10) && chi_max > 1e-4;
  }
  rep["pass"] = rep["constant_pass"].get<bool>() && rep["shear_pass"].get<bool>();
  return rep;
}

}  // namespace

CliResult run_certify_command(const std::string& kind, std::uint64_t seed, int threads) {
  CliResult res;
  json rep;
  if (kind == "kernel")
    rep = certify_kernel(seed);
  else if (kind == "equidist")
    rep = certify_equidist(seed);
  else if (kind == "stationary-phase")
    rep = certify_stationary_phase(seed, threads);
  else if (kind == "cell")
    rep = certify_cell(seed);
  else
    throw ConfigError("cli/certify: unknown kind '" + kind +
                      "' (kernel|equidist|stationary-phase|cell)");
  rep["kind"] = kind;
  rep["version"] = kVersion;
  rep["seed"] = seed;
  res.manifest = rep.dump(2) + "\n";
  res.exit_code = rep.value("pass", false) ? kOk : kAssertionError;
  if (res.exit_code != kOk) res.message = "certify/" + kind + ": check failed";
  return res;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{std::string(kVersion) +
               " - boundary-integral homogenization rate laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", certify_kind;
  std::uint64_t seed = 1;
  int threads = 0;

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a config-driven eps sweep");
  sweep_cmd->add_option("--config", config_path, "sweep config JSON")->required();
  sweep_cmd->add_option("--out", out_dir, "output directory");
  sweep_cmd->add_option("--threads", threads, "thread cap (0 = auto)");
  sweep_cmd->add_option("--seed", seed, "rng seed for sampled certificates");

  CLI::App* certify_cmd =
      app.add_subcommand("certify", "run a named certification check");
  certify_cmd
      ->add_option("kind", certify_kind, "kernel|equidist|stationary-phase|cell")
      ->required();
  certify_cmd->add_option("--out", out_dir, "output directory");
  certify_cmd->add_option("--threads", threads, "thread cap (0 = auto)");
  certify_cmd->add_option("--seed", seed, "rng seed for sampled certificates");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    std::filesystem::create_directories(out_dir);
    if (sweep_cmd->parsed()) {
      SweepConfig cfg = parse_sweep_config(load_json_file(config_path));
      CliResult res = run_sweep_command(cfg, seed, threads);
      std::ofstream(out_dir + "/sweep.csv") << res.csv;
      std::ofstream(out_dir + "/manifest.json") << res.manifest;
      if (!res.message.empty()) std::cerr << res.message << "\n";
      std::cout << res.csv;
      return res.exit_code;
    }
    CliResult res = run_certify_command(certify_kind, seed, threads);
    std::ofstream(out_dir + "/certify_" + certify_kind + ".json") << res.manifest;
    std::cout << res.manifest;
    if (!res.message.empty()) std::cerr << res.message << "\n";
    return res.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const QuadratureUnderResolved& e) {
    std::cerr << e.what() << "\n";
    return kResolutionError;
  } catch (const MeshUnderResolved& e) {
    std::cerr << e.what() << "\n";
    return kResolutionError;
  } catch (const PointTooCloseToBoundary& e) {
    std::cerr << e.what() << "\n";
    return kResolutionError;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kAssertionError;
  }
}

}  // namespace homog::cli
