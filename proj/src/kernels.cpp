#include "homog/kernels.hpp"

#include <cmath>
#include <random>

#include "homog/errors.hpp"

namespace homog {

double unit_sphere_area(int d) {
  switch (d) {
    case 2: return kTwoPi;
    case 3: return 4.0 * kPi;
    case 4: return 2.0 * kPi * kPi;
    default: throw UnsupportedDimension("kernels: d must be 2, 3 or 4");
  }
}

namespace {

void require_ball(const ConvexDomain& domain, const char* where) {
  if (!domain.is_ball())
    throw UnsupportedDomain(std::string(where) + ": closed-form kernels exist for balls only");
}

void check_points(const ConvexDomain& ball, const Vec& x, const Vec& y, const char* where) {
  if (!ball.strictly_inside(x))
    throw PointNotInterior(std::string(where) + ": x must be strictly interior");
  if (std::abs(ball.implicit(y)) > 1e-8)
    throw PointNotOnBoundary(std::string(where) + ": y not on the boundary");
}

}  // namespace

double poisson_eval(const ConvexDomain& ball, const Vec& x, const Vec& y) {
  require_ball(ball, "kernels/poisson");
  check_points(ball, x, y, "kernels/poisson");
  const int d = ball.dim();
  const double R = ball.radius();
  const Vec xc = x - ball.center();
  const double rho2 = (x - y).norm2();
  const double rho_d = std::pow(rho2, 0.5 * d);
  return (R * R - xc.norm2()) / (unit_sphere_area(d) * R * rho_d);
}

double neumann_eval(const ConvexDomain& ball3, const Vec& x, const Vec& y) {
  require_ball(ball3, "kernels/neumann");
  if (ball3.dim() != 3)
    throw UnsupportedDimension("kernels/neumann: closed form implemented for d = 3");
  if (std::abs(ball3.radius() - 1.0) > 1e-14 || ball3.center().norm() > 1e-14)
    throw UnsupportedDomain("kernels/neumann: unit ball at the origin required");
  check_points(ball3, x, y, "kernels/neumann");
  const double rho = (x - y).norm();
  const double w = 1.0 - x.dot(y) + rho;
  return (2.0 / rho - 2.0 + std::log(2.0 / w)) / (4.0 * kPi);
}

Vec neumann_grad_x(const ConvexDomain& ball3, const Vec& x, const Vec& y) {
  require_ball(ball3, "kernels/neumann");
  if (ball3.dim() != 3)
    throw UnsupportedDimension("kernels/neumann: closed form implemented for d = 3");
  check_points(ball3, x, y, "kernels/neumann");
  const Vec diff = x - y;
  const double rho = diff.norm();
  const double w = 1.0 - x.dot(y) + rho;
  Vec g(3);
  for (int i = 0; i < 3; ++i) {
    const double dw = -y[i] + diff[i] / rho;
    g[i] = (-2.0 * diff[i] / (rho * rho * rho) - dw / w) / (4.0 * kPi);
  }
  return g;
}

bool PoissonBoundReport::stable(double factor) const {
  return c0_half > 0 && c1_half > 0 && c2_half > 0 && c0_full <= factor * c0_half &&
         c1_full <= factor * c1_half && c2_full <= factor * c2_half;
}

namespace {

// P(x, y(s)) along an arclength-parametrized boundary line:
//   P = (R^2-|x|^2) / (omega R) * rho2^{-d/2},  rho2(s) = |x - y(s)|^2,
//   d rho2/ds = 2 (y-x).t,   d2 rho2/ds2 = 2 (t.t + (y-x).y''),
// giving first and second parametric derivatives of the closed form.
struct TangentialDerivs {
  double p, dp, d2p;
};

TangentialDerivs poisson_tangential(const ConvexDomain& ball, const Vec& x, const Vec& y,
                                    const Vec& tangent, const Vec& curve_second) {
  const int d = ball.dim();
  const double R = ball.radius();
  const Vec xc = x - ball.center();
  const double amp = (R * R - xc.norm2()) / (unit_sphere_area(d) * R);
  const Vec diff = y - x;
  const double rho2 = diff.norm2();
  const double drho2 = 2.0 * diff.dot(tangent);
  const double d2rho2 = 2.0 * (tangent.dot(tangent) + diff.dot(curve_second));
  const double h = -0.5 * d;  // exponent of rho2
  const double f = std::pow(rho2, h);
  const double df = h * std::pow(rho2, h - 1) * drho2;
  const double d2f = h * (h - 1) * std::pow(rho2, h - 2) * drho2 * drho2 +
                     h * std::pow(rho2, h - 1) * d2rho2;
  return {amp * f, amp * df, amp * d2f};
}

}  // namespace

PoissonBoundReport certify_poisson_bounds(const ConvexDomain& ball,
                                          std::size_t sample_size, std::uint64_t seed) {
  require_ball(ball, "kernels/certify_bounds");
  if (sample_size < 1000)
    throw ConfigError("kernels/certify_bounds: sample_size >= 1000 required");
  const int d = ball.dim();
  const double R = ball.radius();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto random_dir = [&]() {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec v(d);
    double n2 = 0;
    do {
      for (int i = 0; i < d; ++i) v[i] = normal(rng);
      n2 = v.norm2();
    } while (n2 < 1e-12);
    return v * (1.0 / std::sqrt(n2));
  };

  PoissonBoundReport rep;
  rep.samples = sample_size;
  for (std::size_t k = 0; k < sample_size; ++k) {
    // bias |x| toward the boundary so the sup over d(x) -> 0 is probed
    const double u = unif(rng);
    const double r = R * (1.0 - u * u * u);
    const Vec x = ball.center() + random_dir() * r;
    const Vec ydir = random_dir();
    const Vec y = ball.center() + ydir * R;

    // boundary line through y: great circle in the plane (ydir, t)
    Vec t(d);
    {
      Vec seed_dir = random_dir();
      Vec proj = seed_dir - ydir * seed_dir.dot(ydir);
      while (proj.norm() < 1e-8) {
        seed_dir = random_dir();
        proj = seed_dir - ydir * seed_dir.dot(ydir);
      }
      t = proj.normalized();
    }
    // arclength parametrization y(s) = c + R(cos(s/R) ydir + sin(s/R) t)
    const Vec tangent = t;
    const Vec curve_second = ydir * (-1.0 / R);

    const auto der = poisson_tangential(ball, x, y, tangent, curve_second);
    const double rho = (x - y).norm();
    const double dist = ball.distance_to_boundary(x);
    const double r0 = der.p * std::pow(rho, d) / dist;
    const double r1 = std::abs(der.dp) * std::pow(rho, d);
    const double r2 = std::abs(der.d2p) * std::pow(rho, d + 1);

    if (k == sample_size / 2) {
      rep.c0_half = rep.c0_full;
      rep.c1_half = rep.c1_full;
      rep.c2_half = rep.c2_full;
    }
    rep.c0_full = std::max(rep.c0_full, r0);
    rep.c1_full = std::max(rep.c1_full, r1);
    rep.c2_full = std::max(rep.c2_full, r2);
  }
  return rep;
}

PoissonMassReport certify_poisson_mass(const ConvexDomain& ball, double resolution,
                                       std::vector<double> distances) {
  require_ball(ball, "kernels/certify_mass");
  const int d = ball.dim();
  const double R = ball.radius();
  SurfaceQuadrature quad = build_quadrature(ball, resolution);
  // node spacing along the boundary
  const double spacing =
      (d == 2) ? 1.0 / quad.resolution : 1.0 / std::sqrt(quad.resolution);

  if (distances.empty()) {
    double t = 0.45 * R;
    while (t >= 10.0 * spacing) {
      distances.push_back(t);
      t *= 0.5;
    }
    if (distances.empty()) distances.push_back(0.45 * R);
  }

  PoissonMassReport rep;
  rep.resolution = quad.resolution;
  std::vector<Vec> dirs;
  if (d == 2)
    dirs = {Vec{1, 0}, Vec{0, 1}, Vec{-std::sqrt(0.5), std::sqrt(0.5)}};
  else if (d == 3)
    dirs = {Vec{0, 0, 1}, Vec{1, 0, 0}, Vec{std::sqrt(1.0 / 3), std::sqrt(1.0 / 3), std::sqrt(1.0 / 3)}};
  else
    dirs = {Vec{0, 0, 0, 1}, Vec{0.5, 0.5, 0.5, 0.5}};

  for (double dist : distances) {
    for (const Vec& dir : dirs) {
      const Vec x = ball.center() + dir * (R - dist);
      double integral = 0;
      for (std::size_t k = 0; k < quad.nodes.size(); ++k)
        integral += quad.weights[k] * std::abs(poisson_eval(ball, x, quad.nodes[k]));
      const double dev = std::abs(integral - 1.0);
      rep.entries.push_back({x, dist, integral, dev});
      rep.max_deviation = std::max(rep.max_deviation, dev);
      if (dev > 0.01)
        throw QuadratureUnderResolved(
            "kernels/certify_mass: unit-mass deviation > 1% at d(x) = " +
            std::to_string(dist) + " (node spacing " + std::to_string(spacing) + ")");
    }
  }
  return rep;
}

bool NeumannBoundReport::stable(double factor) const {
  return c0_half > 0 && c0_full <= factor * c0_half;
}

NeumannBoundReport certify_neumann_bounds(const ConvexDomain& ball3,
                                          std::size_t sample_size, std::uint64_t seed) {
  require_ball(ball3, "kernels/certify_neumann");
  if (ball3.dim() != 3)
    throw UnsupportedDimension("kernels/certify_neumann: d = 3 required");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_dir = [&]() {
    Vec v(3);
    double n2 = 0;
    do {
      for (int i = 0; i < 3; ++i) v[i] = normal(rng);
      n2 = v.norm2();
    } while (n2 < 1e-12);
    return v * (1.0 / std::sqrt(n2));
  };

  NeumannBoundReport rep;
  rep.samples = sample_size;
  const double h = 1e-4;
  std::size_t fd_done = 0;
  for (std::size_t k = 0; k < sample_size; ++k) {
    const double u = unif(rng);
    const double r = 1.0 - u * u * u;
    const Vec x = random_dir() * r;
    const Vec y = random_dir();
    const double rho = (x - y).norm();
    const double ratio = std::abs(neumann_eval(ball3, x, y)) * rho;  // d - 2 = 1
    if (k == sample_size / 2) rep.c0_half = rep.c0_full;
    rep.c0_full = std::max(rep.c0_full, ratio);

    // finite-difference Laplacian in x on a subsample away from the boundary
    if (fd_done < 100 && r < 0.8 && rho > 0.3) {
      double lap = -6.0 * neumann_eval(ball3, x, y);
      for (int i = 0; i < 3; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        lap += neumann_eval(ball3, xp, y) + neumann_eval(ball3, xm, y);
      }
      rep.harmonicity_residual =
          std::max(rep.harmonicity_residual, std::abs(lap / (h * h)));
      ++fd_done;
    }
  }
  return rep;
}

}  // namespace homog
