#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "homog/errors.hpp"
#include "homog/neumann.hpp"

using namespace homog;

namespace {

BoundaryData zonal_wave() {
  TorusFunction g(3);
  g.set_coeff(Mode{0, 0, 1}, 1.0);
  return BoundaryData::from_torus(g);
}

std::vector<double> dyadic(int k0, int k1) {
  std::vector<double> eps;
  for (int k = k0; k <= k1; ++k) eps.push_back(std::pow(2.0, -k));
  return eps;
}

}  // namespace

TEST_CASE("neumann sweep: constants vanish, wave data fits the rate") {
  ConvexDomain ball = ConvexDomain::ball(3, 1.0);

  TorusFunction gc(3);
  gc.set_coeff(Mode{0, 0, 0}, 4.0);
  auto eps = dyadic(3, 6);
  auto repc = neumann_sweep(ball, BoundaryData::from_torus(gc), 1.0, eps,
                            SweepOptions{});
  for (const auto& e : repc.sweep.entries) {
    REQUIRE(e.ok);
    CHECK(e.norm <= 1e-8);
  }

  auto rep = neumann_sweep(ball, zonal_wave(), 1.0, eps, {});
  CHECK(rep.fit.slope >= 0.9);
  CHECK(rep.pass);
  // dual-path agreement recorded on every entry
  for (const auto& e : rep.sweep.entries) {
    REQUIRE(e.ok);
    CHECK(e.dual_path_err <= 1e-6);
  }

  auto rep2 = neumann_sweep(ball, zonal_wave(), 2.0, eps, {});
  CHECK(rep2.fit.slope >= 0.4);
}

TEST_CASE("neumann gradient sweep: rate and layer-refinement stability") {
  ConvexDomain ball = ConvexDomain::ball(3, 1.0);
  auto eps = dyadic(3, 6);

  TorusFunction gc(3);
  gc.set_coeff(Mode{0, 0, 0}, 4.0);
  auto repc = neumann_gradient_sweep(ball, BoundaryData::from_torus(gc), 1.0, eps,
                                     0.8, {});
  for (const auto& e : repc.sweep.entries) CHECK(e.norm <= 1e-8);

  auto rep = neumann_gradient_sweep(ball, zonal_wave(), 1.0, eps, 0.8, {});
  CHECK(rep.fit.slope >= 0.8);

  // halving the innermost shell thickness moves the slope by <= 0.05
  SweepOptions fine;
  fine.mesh.hmin_factor = 0.125;
  auto repf = neumann_gradient_sweep(ball, zonal_wave(), 1.0, eps, 0.8, fine);
  CHECK(std::abs(repf.fit.slope - rep.fit.slope) <= 0.05);

  CHECK_THROWS_AS(neumann_gradient_sweep(ball, zonal_wave(), 1.0, eps, 1.5, {}),
                  ConfigError);
}

TEST_CASE("F_eps decay at rate (d-1)/2") {
  ConvexDomain disk = ConvexDomain::ball(2, 1.0);
  TorusFunction g2(2);
  g2.set_coeff(Mode{0, 1}, 1.0);
  auto rep2 = f_eps_decay(disk, BoundaryData::from_torus(g2), dyadic(3, 7));
  CHECK(rep2.fit.slope >= 0.4);
  CHECK(rep2.pass);

  ConvexDomain ball = ConvexDomain::ball(3, 1.0);
  auto rep3 = f_eps_decay(ball, zonal_wave(), dyadic(3, 7));
  CHECK(rep3.fit.slope >= 0.9);

  // constant data: F_eps = F_0 exactly for every eps
  TorusFunction gc(3);
  gc.set_coeff(Mode{0, 0, 0}, 2.0);
  auto repc = f_eps_decay(ball, BoundaryData::from_torus(gc), dyadic(3, 6));
  for (double dev : repc.deviation) CHECK(dev < 1e-11);
}

TEST_CASE("neumann problems require d = 3") {
  ConvexDomain disk = ConvexDomain::ball(2, 1.0);
  TorusFunction g2(2);
  g2.set_coeff(Mode{0, 1}, 1.0);
  CHECK_THROWS_AS(neumann_sweep(disk, BoundaryData::from_torus(g2), 1.0, dyadic(3, 6), {}),
                  UnsupportedDimension);
}
