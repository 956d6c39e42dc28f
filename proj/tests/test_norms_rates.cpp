#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "homog/errors.hpp"
#include "homog/norms_rates.hpp"
#include "homog/solver.hpp"

using namespace homog;

namespace {

SweepProblem disk_wave_problem() {
  ConvexDomain disk = ConvexDomain::ball(2, 1.0);
  TorusFunction g(2);
  g.set_coeff(Mode{0, 1}, 1.0);
  return SweepProblem{ProblemKind::dirichlet, disk, BoundaryData::from_torus(g), "d2"};
}

}  // namespace

TEST_CASE("volume mesh: measure, layer resolution, node placement") {
  for (int d : {2, 3}) {
    ConvexDomain ball = ConvexDomain::ball(d, 1.0);
    const double eps = 1.0 / 32.0;
    VolumeMesh mesh = build_volume_mesh(ball, eps, 1.0);
    const double vol = d == 2 ? kPi : 4.0 * kPi / 3.0;
    CHECK(mesh.weight_sum() == doctest::Approx(vol).epsilon(1e-12));
    CHECK(mesh.h_min <= eps / 4 + 1e-15);
    CHECK(mesh.layer_shells >= 4);
    // nodes strictly interior
    for (double r : mesh.r) {
      CHECK(r > 0);
      CHECK(r < 1.0);
    }
    // physical node round trip stays in the ball
    Vec x = mesh.node(0, mesh.a1.size() / 2, 0);
    CHECK(ball.strictly_inside(x));
  }
}

TEST_CASE("lp_norm: zero, constants, denser-mesh cross-check") {
  ConvexDomain disk = ConvexDomain::ball(2, 1.0);
  VolumeMesh mesh = build_volume_mesh(disk, 1.0 / 16.0, 1.0);
  std::vector<Complex> zero(mesh.size(), Complex{0, 0});
  CHECK(lp_norm(mesh, zero, 1.0) == 0.0);

  std::vector<Complex> cval(mesh.size(), Complex{0.75, 0});
  CHECK(lp_norm(mesh, cval, 1.0) == doctest::Approx(0.75 * kPi).epsilon(1e-8));
  CHECK(lp_norm(mesh, cval, 2.0) ==
        doctest::Approx(0.75 * std::sqrt(kPi)).epsilon(1e-8));

  CHECK_THROWS_AS(lp_norm(mesh, cval, 0.5), ConfigError);
  std::vector<Complex> bad(3);
  CHECK_THROWS_AS(lp_norm(mesh, bad, 1.0), ConfigError);
}

TEST_CASE("lp_norm of the oscillation difference matches a 10x denser mesh") {
  SweepProblem prob = disk_wave_problem();
  const double eps = 1.0 / 64.0;
  SolveOptions sopts;
  sopts.engine = SolveEngine::spectral;
  HarmonicField fe = analyze_boundary_field(prob.domain, prob.data, eps,
                                            HarmonicProblem::dirichlet, sopts);

  auto norm_on = [&](const MeshOptions& mo) {
    VolumeMesh mesh = build_volume_mesh(prob.domain, eps, 1.0, mo);
    auto grid = fe.eval_grid(mesh.r, mesh.a1, mesh.a2, false);
    return lp_norm(mesh, grid.values, 1.0);  // u_0 = 0 for mean-zero data
  };
  MeshOptions base;
  MeshOptions dense;
  dense.refine = 3.2;  // ~10x the nodes
  const double n1 = norm_on(base);
  const double n2 = norm_on(dense);
  CHECK(std::abs(n1 - n2) <= 0.01 * n2);
}

TEST_CASE("lp_norm monotone in p on the probability-normalized ball") {
  SweepProblem prob = disk_wave_problem();
  const double eps = 1.0 / 16.0;
  SolveOptions sopts;
  HarmonicField fe = analyze_boundary_field(prob.domain, prob.data, eps,
                                            HarmonicProblem::dirichlet, sopts);
  VolumeMesh mesh = build_volume_mesh(prob.domain, eps, 1.0);
  auto grid = fe.eval_grid(mesh.r, mesh.a1, mesh.a2, false);
  const double vol = kPi;
  double prev = 0;
  for (double p : {1.0, 1.5, 2.0, 3.0, 6.0}) {
    const double normalized = lp_norm(mesh, grid.values, p) / std::pow(vol, 1.0 / p);
    CHECK(normalized >= prev - 1e-12);
    prev = normalized;
  }
}

TEST_CASE("fit_rate on synthetic data") {
  EpsSweep sweep;
  for (int k = 2; k <= 7; ++k) {
    SweepEntry e;
    e.eps = std::pow(2.0, -k);
    e.p = 1.0;
    e.norm = std::pow(e.eps, 0.5);
    sweep.entries.push_back(e);
  }
  auto fit = fit_rate(sweep, 1.0, FitModel::pure_power);
  CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));

  EpsSweep logsweep;
  for (int k = 2; k <= 7; ++k) {
    SweepEntry e;
    e.eps = std::pow(2.0, -k);
    e.p = 1.0;
    e.norm = e.eps * std::abs(std::log(e.eps));
    logsweep.entries.push_back(e);
  }
  auto lfit = fit_rate(logsweep, 1.0, FitModel::power_log);
  CHECK(lfit.slope == doctest::Approx(1.0).epsilon(1e-12));

  EpsSweep tiny;
  for (int k = 2; k <= 6; ++k) {
    SweepEntry e;
    e.eps = std::pow(2.0, -k);
    e.p = 1.0;
    e.norm = 1e-14;
    tiny.entries.push_back(e);
  }
  CHECK_THROWS_AS(fit_rate(tiny, 1.0, FitModel::pure_power), DegenerateFit);
  CHECK_THROWS_AS(fit_rate(sweep, 2.0, FitModel::pure_power), DegenerateFit);  // < 4 pts
}

TEST_CASE("run_sweep: constant data gives vanishing norms") {
  ConvexDomain disk = ConvexDomain::ball(2, 1.0);
  TorusFunction g(2);
  g.set_coeff(Mode{0, 0}, 2.0);
  SweepProblem prob{ProblemKind::dirichlet, disk, BoundaryData::from_torus(g), "const"};
  const double ps[1] = {1.0};
  const double eps[4] = {0.25, 0.125, 0.0625, 0.03125};
  auto sweep = run_sweep(prob, ps, eps, {});
  for (const auto& e : sweep.entries) {
    REQUIRE(e.ok);
    CHECK(e.norm <= 1e-8);
  }
}

TEST_CASE("run_sweep: d=2 wave data decreases monotonically and fits the rate") {
  SweepProblem prob = disk_wave_problem();
  const double ps[2] = {1.0, 2.0};
  std::vector<double> eps;
  for (int k = 4; k <= 7; ++k) eps.push_back(std::pow(2.0, -k));
  auto sweep = run_sweep(prob, ps, eps, {});
  double prev = 1e9;
  for (const auto* e : sweep.ok_entries(1.0)) {
    CHECK(e->norm < prev);
    prev = e->norm;
    CHECK(e->dual_path_err < 1e-6);
    CHECK(e->mesh_guard_rel <= 0.02);
  }
  CHECK(sweep.ok_entries(1.0).size() == 4);

  // interpolation inequality with the explicit constant (2 sup|g|)^{1-1/p}
  auto interp = interpolation_check(sweep, 2.0, 1.0);
  CHECK(interp.entries.size() == 4);
  CHECK(interp.pass());
}

TEST_CASE("eps list validation") {
  SweepProblem prob = disk_wave_problem();
  const double ps[1] = {1.0};
  const double bad_order[3] = {0.125, 0.25, 0.0625};
  CHECK_THROWS_AS(run_sweep(prob, ps, bad_order, {}), ConfigError);
  const double bad_p[1] = {0.5};
  const double eps[2] = {0.25, 0.125};
  CHECK_THROWS_AS(run_sweep(prob, bad_p, eps, {}), ConfigError);
}

TEST_CASE("optimality check: ratios and NotApplicable") {
  SweepProblem prob = disk_wave_problem();
  TorusFunction g(2);
  g.set_coeff(Mode{0, 1}, 1.0);
  const double ps[1] = {2.0};
  std::vector<double> eps;
  for (int k = 4; k <= 7; ++k) eps.push_back(std::pow(2.0, -k));
  auto sweep = run_sweep(prob, ps, eps, {});
  auto rep = optimality_check(sweep, 2.0, g);
  REQUIRE(rep.applicable);
  CHECK(rep.ratios.size() == 4);
  CHECK(rep.min_ratio > 0);
  CHECK(rep.pass(0.5));

  TorusFunction gconst(2);
  gconst.set_coeff(Mode{0, 0}, 3.0);
  auto repc = optimality_check(sweep, 2.0, gconst);
  CHECK(!repc.applicable);
  CHECK(repc.note.find("NotApplicable") != std::string::npos);
}

TEST_CASE("sweep CSV: schema and determinism of numeric columns") {
  SweepProblem prob = disk_wave_problem();
  const double ps[1] = {1.0};
  const double eps[2] = {0.125, 0.0625};
  auto s1 = run_sweep(prob, ps, eps, {});
  auto s2 = run_sweep(prob, ps, eps, {});
  const std::string c1 = sweep_csv(s1);
  const std::string c2 = sweep_csv(s2);
  CHECK(c1.substr(0, c1.find('\n')) ==
        "eps,p,d,norm,slope_so_far,resolution,wallclock_ms");
  // identical up to the wallclock column (timings vary run to run)
  auto strip_wallclock = [](const std::string& csv) {
    std::string out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
      std::size_t eol = csv.find('\n', pos);
      if (eol == std::string::npos) eol = csv.size();
      const std::string line = csv.substr(pos, eol - pos);
      out += line.substr(0, line.rfind(','));
      out += '\n';
      pos = eol + 1;
    }
    return out;
  };
  CHECK(strip_wallclock(c1) == strip_wallclock(c2));
}
