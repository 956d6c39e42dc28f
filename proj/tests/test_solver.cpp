#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "homog/errors.hpp"
#include "homog/norms_rates.hpp"
#include "homog/solver.hpp"

#include "test_util.hpp"

using namespace homog;

namespace {

BoundaryData wave2d() {
  TorusFunction g(2);
  g.set_coeff(Mode{0, 1}, 1.0);
  return BoundaryData::from_torus(g);
}

}  // namespace

TEST_CASE("constant data reproduces constants through the kernel mass") {
  ConvexDomain disk = ConvexDomain::ball(2, 1.0);
  TorusFunction g(2);
  g.set_coeff(Mode{0, 0}, Complex{1.0, 0.0});
  BoundaryData data = BoundaryData::from_torus(g);
  std::vector<Vec> probes{Vec{0, 0}, Vec{0.5, 0.2}, Vec{-0.8, 0.1}};
  for (SolveEngine eng : {SolveEngine::quadrature, SolveEngine::spectral}) {
    SolveOptions opts;
    opts.engine = eng;
    auto u = solve_dirichlet(disk, data, 0.25, probes, opts);
    for (const auto& v : u.values) CHECK(std::abs(v - Complex{1, 0}) < 1e-8);
  }
}

TEST_CASE("d=2 oscillating solve matches the dense-quadrature oracle") {
  ConvexDomain disk = ConvexDomain::ball(2, 1.0);
  BoundaryData data = wave2d();
  const double eps = 1.0 / 40.0;
  const Vec x{0.0, 0.0};
  const Complex oracle = testing::disk_boundary_integral_brute(
      x, [&](const Vec& y) { return data.evaluate(y, eps); }, 1000000);
  auto u = solve_dirichlet(disk, data, eps, std::span<const Vec>(&x, 1), {});
  CHECK(std::abs(u.values[0] - oracle) < 1e-7);
}

TEST_CASE("mean-zero data has vanishing homogenized solution") {
  ConvexDomain disk = ConvexDomain::ball(2, 1.0);
  BoundaryData data = wave2d();  // gbar = 0
  std::vector<Vec> probes{Vec{0.1, 0.3}, Vec{-0.5, 0.5}};
  auto u0 = solve_dirichlet(disk, data, std::nullopt, probes, {});
  for (const auto& v : u0.values) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("linearity of the solve in the boundary data") {
  ConvexDomain disk = ConvexDomain::ball(2, 1.0);
  TorusFunction g1(2), g2(2);
  g1.set_coeff(Mode{0, 1}, 1.0);
  g2.set_coeff(Mode{1, 0}, Complex{0.5, 0.5});
  g2.set_coeff(Mode{0, 0}, 0.25);
  TorusFunction gc(2);
  const Complex a{2.0, -1.0}, b{0.5, 0.25};
  for (const auto& [m, c] : g1.coeffs()) gc.add_coeff(m, a * c);
  for (const auto& [m, c] : g2.coeffs()) gc.add_coeff(m, b * c);

  const double eps = 1.0 / 12.0;
  std::vector<Vec> probes{Vec{0.2, 0.1}, Vec{-0.4, 0.35}};
  auto u1 = solve_dirichlet(disk, BoundaryData::from_torus(g1), eps, probes, {});
  auto u2 = solve_dirichlet(disk, BoundaryData::from_torus(g2), eps, probes, {});
  auto uc = solve_dirichlet(disk, BoundaryData::from_torus(gc), eps, probes, {});
  for (std::size_t i = 0; i < probes.size(); ++i)
    CHECK(std::abs(uc.values[i] - (a * u1.values[i] + b * u2.values[i])) < 1e-10);
}

TEST_CASE("rotation equivariance on the ball (lattice rotation)") {
  // swapping the two coordinates maps data mode (0,1) to (1,0); rotating the
  // probes the same way must leave values unchanged
  ConvexDomain disk = ConvexDomain::ball(2, 1.0);
  TorusFunction ga(2), gb(2);
  ga.set_coeff(Mode{0, 1}, 1.0);
  gb.set_coeff(Mode{1, 0}, 1.0);
  const double eps = 1.0 / 24.0;
  std::vector<Vec> pa{Vec{0.3, 0.55}, Vec{-0.2, 0.1}};
  std::vector<Vec> pb{Vec{0.55, 0.3}, Vec{0.1, -0.2}};
  auto ua = solve_dirichlet(disk, BoundaryData::from_torus(ga), eps, pa, {});
  auto ub = solve_dirichlet(disk, BoundaryData::from_torus(gb), eps, pb, {});
  for (std::size_t i = 0; i < pa.size(); ++i)
    CHECK(std::abs(ua.values[i] - ub.values[i]) < 1e-10);
}

TEST_CASE("maximum principle for real data") {
  ConvexDomain disk = ConvexDomain::ball(2, 1.0);
  TorusFunction g(2, true);
  g.set_coeff(Mode{0, 0}, 0.3);
  g.set_coeff(Mode{0, 1}, Complex{0.5, 0});
  g.set_coeff(Mode{0, -1}, Complex{0.5, 0});  // 0.3 + cos(2 pi y2)
  g.validate();
  BoundaryData data = BoundaryData::from_torus(g);
  const double sup_g = g.sup_norm();
  std::vector<Vec> probes;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(-0.7, 0.7);
  for (int t = 0; t < 24; ++t) probes.push_back(Vec{unif(rng), unif(rng)});

  auto u0 = solve_dirichlet(disk, data, std::nullopt, probes, {});
  for (const auto& v : u0.values) {
    CHECK(v.real() >= 0.3 - 1e-10);  // gbar is constant 0.3
    CHECK(v.real() <= 0.3 + 1e-10);
  }
  auto ue = solve_dirichlet(disk, data, 1.0 / 32.0, probes, {});
  for (const auto& v : ue.values) CHECK(std::abs(v) <= sup_g + 1e-8);
}

TEST_CASE("pointwise oscillation convergence away from the boundary") {
  // |u_eps(x) - u_0(x)| decays at rate >= (d-1)/2 - 0.1 for d(x) >= 0.3
  for (int d : {2, 3}) {
    ConvexDomain ball = ConvexDomain::ball(d, 1.0);
    TorusFunction g(d);
    Mode m(d, {});
    m[d - 1] = 1;
    g.set_coeff(m, 1.0);
    BoundaryData data = BoundaryData::from_torus(g);
    Vec x(d);
    x[0] = 0.45;
    x[d - 1] = 0.35;  // d(x) about 0.43
    std::vector<double> eps, err;
    SolveOptions opts;
    opts.engine = SolveEngine::spectral;
    for (int k = 3; k <= 8; ++k) {
      const double e = std::pow(2.0, -k);
      auto u = solve_dirichlet(ball, data, e, std::span<const Vec>(&x, 1), opts);
      eps.push_back(e);
      err.push_back(std::abs(u.values[0]));  // u_0 = 0 for mean-zero g
    }
    auto fit = fit_loglog(eps, err, FitModel::pure_power);
    CHECK(fit.slope >= 0.5 * (d - 1) - 0.1);
  }
}

TEST_CASE("probe guards") {
  ConvexDomain disk = ConvexDomain::ball(2, 1.0);
  BoundaryData data = wave2d();
  const Vec outside{1.2, 0.0};
  CHECK_THROWS_AS(
      solve_dirichlet(disk, data, 0.25, std::span<const Vec>(&outside, 1), {}),
      PointNotInterior);

  // capped resolution leaves the kernel peak unresolvable near the boundary
  const Vec close{0.999, 0.0};
  SolveOptions opts;
  opts.max_linear_density = 100.0;  // 3/100 = 0.03 > d(x) = 0.001
  CHECK_THROWS_AS(solve_dirichlet(disk, data, 0.25, std::span<const Vec>(&close, 1), opts),
                  PointTooCloseToBoundary);

  // capped density also breaks the doubling self-test for oscillating data
  const Vec mid{0.3, 0.0};
  SolveOptions opts2;
  opts2.max_linear_density = 40.0;  // far below q B / eps at eps = 1/64
  CHECK_THROWS_AS(
      solve_dirichlet(disk, data, 1.0 / 64.0, std::span<const Vec>(&mid, 1), opts2),
      QuadratureUnderResolved);
}

TEST_CASE("neumann solve: constants, degree-1 data, dual-path waves") {
  ConvexDomain ball = ConvexDomain::ball(3, 1.0);
  std::vector<Vec> probes{Vec{0.3, 0.1, 0.2}, Vec{-0.2, 0.4, -0.3}};

  TorusFunction gc(3);
  gc.set_coeff(Mode{0, 0, 0}, 2.0);
  auto vc = solve_neumann_v(ball, BoundaryData::from_torus(gc), 0.25, probes, {});
  for (const auto& v : vc.values) CHECK(std::abs(v) < 1e-8);

  // g = Ex(m.y), |m| = 1, eps = 1/20: spectral vs quadrature to 1e-6
  TorusFunction gw(3);
  gw.set_coeff(Mode{0, 0, 1}, 1.0);
  BoundaryData data = BoundaryData::from_torus(gw);
  SolveOptions sq, ss;
  sq.engine = SolveEngine::quadrature;
  ss.engine = SolveEngine::spectral;
  auto vq = solve_neumann_v(ball, data, 1.0 / 20.0, probes, sq);
  auto vs = solve_neumann_v(ball, data, 1.0 / 20.0, probes, ss);
  for (std::size_t i = 0; i < probes.size(); ++i)
    CHECK(std::abs(vq.values[i] - vs.values[i]) < 1e-6);

  CHECK_THROWS_AS(solve_neumann_v(ConvexDomain::ball(2, 1.0), wave2d(), 0.25, probes, {}),
                  UnsupportedDimension);
}

TEST_CASE("neumann value invariant under adding a constant to the data") {
  ConvexDomain ball = ConvexDomain::ball(3, 1.0);
  TorusFunction g(3), gshift(3);
  g.set_coeff(Mode{0, 0, 1}, 1.0);
  gshift.set_coeff(Mode{0, 0, 1}, 1.0);
  gshift.set_coeff(Mode{0, 0, 0}, 5.0);
  std::vector<Vec> probes{Vec{0.5, 0.0, 0.1}};
  auto v1 = solve_neumann_v(ball, BoundaryData::from_torus(g), 0.125, probes, {});
  auto v2 = solve_neumann_v(ball, BoundaryData::from_torus(gshift), 0.125, probes, {});
  CHECK(std::abs(v1.values[0] - v2.values[0]) < 1e-10);
}

TEST_CASE("boundary concentration estimate") {
  ConvexDomain disk = ConvexDomain::ball(2, 1.0);

  // constant data: u == g
  TorusFunction gc(2);
  gc.set_coeff(Mode{0, 0}, 1.5);
  auto repc = boundary_concentration_check(disk, BoundaryData::from_torus(gc),
                                           1.0 / 64.0, Vec{0, 1});
  CHECK(repc.applicable);
  CHECK(repc.pass());

  // oscillating example at the north pole, two eps values (eps-uniformity)
  BoundaryData data = wave2d();
  for (double eps : {1.0 / 64.0, 1.0 / 128.0}) {
    auto rep = boundary_concentration_check(disk, data, eps, Vec{0, 1});
    REQUIRE(rep.applicable);
    CHECK(rep.pass());
    for (const auto& e : rep.entries) {
      CHECK(e.lhs <= 0.25 * rep.sup_g + 1e-8);  // the |g|_inf / 4 form
    }
  }
}
