#include "homog/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "homog/errors.hpp"
#include "homog/kernels.hpp"
#include "homog/parallel.hpp"

namespace homog {

namespace {

struct DensityPlan {
  double lin_theta;  // nodes per unit arclength along the polar direction
  double lin_phi;    // .. along the azimuthal direction (d >= 3)
  std::array<int, 3> counts;
};

// Oscillation-aware linear node densities. Along a surface direction the
// phase m.y/eps has at most |m|/eps cycles per unit length; a pole-aligned
// grid sees no azimuthal oscillation from modes parallel to the pole.
DensityPlan plan_quadrature(const ConvexDomain& domain, const BoundaryData& data,
                            std::optional<double> eps, double min_dist,
                            const SolveOptions& opts, bool aligned) {
  const int d = domain.dim();
  const double R = *std::max_element(domain.semi_axes().begin(),
                                     domain.semi_axes().end());
  double band = 0, band_perp = 0;
  if (eps) {
    band = data.max_band();
    if (aligned) {
      band_perp = 0;  // modes parallel to the grid pole
    } else {
      band_perp = band;
    }
  }
  const double slow = data.max_slow_band();
  const double base = std::max(8.0 / R, (slow + 4.0) * 4.0 / (kTwoPi * R));
  const double kernel_term = min_dist > 0 ? 3.2 / min_dist : 0.0;
  double lt = std::max({base, kernel_term, eps ? opts.q_per_wavelength * band / *eps : 0.0});
  double lp = std::max({base, kernel_term, eps ? opts.q_per_wavelength * band_perp / *eps : 0.0});
  if (opts.max_linear_density > 0) {
    lt = std::min(lt, opts.max_linear_density);
    lp = std::min(lp, opts.max_linear_density);
  }
  DensityPlan plan{lt, lp, {}};
  if (d == 2) {
    plan.counts[0] = std::max(16, static_cast<int>(std::ceil(lt * kTwoPi * R)));
  } else if (d == 3) {
    plan.counts[0] = std::max(12, static_cast<int>(std::ceil(lt * kPi * R)));
    plan.counts[1] = std::max(16, static_cast<int>(std::ceil(lp * kTwoPi * R)));
  } else {
    plan.counts[0] = std::max(12, static_cast<int>(std::ceil(lt * kPi * R)));
    plan.counts[1] = std::max(12, static_cast<int>(std::ceil(lt * kPi * R)));
    plan.counts[2] = std::max(16, static_cast<int>(std::ceil(lp * kTwoPi * R)));
  }
  return plan;
}

std::optional<RotMat> alignment_for(const ConvexDomain& domain, const BoundaryData& data) {
  if (!domain.is_ball() || domain.dim() == 2) return std::nullopt;
  auto axis = data.common_axis();
  if (!axis) return std::nullopt;
  return RotMat::pole_alignment(*axis);
}

// One quadrature pass: fixed summation order per probe, parallel over probes.
// mass[i] collects sum w |K f|, the rounding scale of any cancellation.
void integrate_kernel(const ConvexDomain& domain, const SurfaceQuadrature& quad,
                      const BoundaryData& data, std::optional<double> eps,
                      bool neumann, std::span<const Vec> probes,
                      std::span<Complex> out, std::span<double> mass, int threads) {
  std::vector<Complex> fvals(quad.nodes.size());
  for (std::size_t k = 0; k < quad.nodes.size(); ++k)
    fvals[k] = eps ? data.evaluate(quad.nodes[k], *eps) : data.mean_part(quad.nodes[k]);
  parallel_for(
      probes.size(),
      [&](std::size_t i) {
        Complex acc{0, 0};
        double m = 0;
        for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
          const double kv = neumann ? neumann_eval(domain, probes[i], quad.nodes[k])
                                    : poisson_eval(domain, probes[i], quad.nodes[k]);
          acc += quad.weights[k] * kv * fvals[k];
          m += std::abs(quad.weights[k] * kv) * std::abs(fvals[k]);
        }
        out[i] = acc;
        mass[i] = m;
      },
      threads);
}

FieldProbe solve_by_quadrature(const ConvexDomain& domain, const BoundaryData& data,
                               std::optional<double> eps, std::span<const Vec> probes,
                               const SolveOptions& opts, bool neumann) {
  FieldProbe probe;
  probe.engine = SolveEngine::quadrature;
  probe.kernel = neumann ? "neumann" : "poisson";
  probe.epsilon = eps.value_or(0.0);
  probe.points.assign(probes.begin(), probes.end());
  probe.dist.resize(probes.size());
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (!domain.strictly_inside(probes[i]))
      throw PointNotInterior("solver: probe point not strictly interior");
    probe.dist[i] = domain.distance_to_boundary(probes[i]);
    min_dist = std::min(min_dist, probe.dist[i]);
  }
  if (probes.empty()) return probe;

  auto align = alignment_for(domain, data);
  const bool aligned = align.has_value() || domain.dim() == 2;
  DensityPlan plan = plan_quadrature(domain, data, eps, min_dist, opts, aligned);
  const double lin = std::max(plan.lin_theta, plan.lin_phi);
  for (double dx : probe.dist)
    if (dx < 3.0 / lin)
      throw PointTooCloseToBoundary(
          "solver: probe distance below 3 / resolution; refine or move the probe");

  SurfaceQuadrature coarse =
      build_quadrature_counts(domain, plan.counts, align ? &*align : nullptr);
  std::array<int, 3> counts2 = plan.counts;
  for (int& c : counts2)
    if (c) c *= 2;
  SurfaceQuadrature fine =
      build_quadrature_counts(domain, counts2, align ? &*align : nullptr);

  std::vector<Complex> v1(probes.size()), v2(probes.size());
  std::vector<double> m1(probes.size()), m2(probes.size());
  integrate_kernel(domain, coarse, data, eps, neumann, probes, v1, m1, opts.threads);
  integrate_kernel(domain, fine, data, eps, neumann, probes, v2, m2, opts.threads);

  double scale = 0;
  for (const auto& z : v2) scale = std::max(scale, std::abs(z));
  scale = std::max(scale, 1e-12);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double diff = std::abs(v2[i] - v1[i]);
    // fully cancelled integrals bottom out at rounding level; below that the
    // doubling test carries no information
    if (diff > opts.rtol * scale && diff > 1e-12 * (1 + m2[i]))
      throw QuadratureUnderResolved(
          "solver: doubling self-test failed (pre-asymptotic quadrature)");
  }
  probe.values = std::move(v2);
  probe.linear_density = 2 * lin;
  return probe;
}

}  // namespace

HarmonicField analyze_boundary_field(const ConvexDomain& ball, const BoundaryData& data,
                                     std::optional<double> eps, HarmonicProblem problem,
                                     const SolveOptions& opts) {
  auto align = alignment_for(ball, data);
  AnalysisOptions aopts;
  const double R = *std::max_element(ball.semi_axes().begin(), ball.semi_axes().end());
  aopts.max_parametric_freq = eps ? kTwoPi * data.max_band() * R / *eps : 0.0;
  aopts.slow_band = data.max_slow_band();
  if (ball.dim() == 3) {
    if (!eps || align || data.max_band() == 0) {
      aopts.azimuthal_band = data.max_slow_band() + (eps ? 0 : 0);
    } else {
      // un-aligned oscillation: azimuthal budget must cover the full frequency
      aopts.azimuthal_band =
          static_cast<int>(std::ceil(aopts.max_parametric_freq)) + 8;
    }
  }
  aopts.rtol = opts.spectral_rtol;
  aopts.threads = opts.threads;
  HarmonicField::BoundaryFn f = [&data, eps](const Vec& y) {
    return eps ? data.evaluate(y, *eps) : data.mean_part(y);
  };
  return HarmonicField::analyze(ball, f, aopts, problem, align);
}

FieldProbe solve_dirichlet(const ConvexDomain& ball, const BoundaryData& data,
                           std::optional<double> eps, std::span<const Vec> probes,
                           const SolveOptions& opts) {
  if (!ball.is_ball())
    throw UnsupportedDomain("solver/dirichlet: closed-form kernels need a ball");
  if (eps && (!(*eps > 0) || *eps > 1))
    throw ConfigError("solver/dirichlet: eps must lie in (0, 1]");
  if (opts.engine == SolveEngine::quadrature)
    return solve_by_quadrature(ball, data, eps, probes, opts, /*neumann=*/false);

  HarmonicField field = analyze_boundary_field(ball, data, eps,
                                               HarmonicProblem::dirichlet, opts);
  FieldProbe probe;
  probe.engine = SolveEngine::spectral;
  probe.kernel = "poisson";
  probe.epsilon = eps.value_or(0.0);
  probe.points.assign(probes.begin(), probes.end());
  probe.dist.resize(probes.size());
  probe.values.resize(probes.size());
  probe.degree_cutoff = field.degree_cutoff();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (!ball.strictly_inside(probes[i]))
      throw PointNotInterior("solver: probe point not strictly interior");
    probe.dist[i] = ball.distance_to_boundary(probes[i]);
    probe.values[i] = field.value(probes[i]);
  }
  return probe;
}

FieldProbe solve_neumann_v(const ConvexDomain& ball3, const BoundaryData& data,
                           std::optional<double> eps, std::span<const Vec> probes,
                           const SolveOptions& opts) {
  if (ball3.dim() != 3)
    throw UnsupportedDimension("solver/neumann: d = 3 required");
  if (eps && (!(*eps > 0) || *eps > 1))
    throw ConfigError("solver/neumann: eps must lie in (0, 1]");
  if (opts.engine == SolveEngine::quadrature)
    return solve_by_quadrature(ball3, data, eps, probes, opts, /*neumann=*/true);

  HarmonicField field = analyze_boundary_field(ball3, data, eps,
                                               HarmonicProblem::neumann, opts);
  FieldProbe probe;
  probe.engine = SolveEngine::spectral;
  probe.kernel = "neumann";
  probe.epsilon = eps.value_or(0.0);
  probe.points.assign(probes.begin(), probes.end());
  probe.dist.resize(probes.size());
  probe.values.resize(probes.size());
  probe.degree_cutoff = field.degree_cutoff();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (!ball3.strictly_inside(probes[i]))
      throw PointNotInterior("solver: probe point not strictly interior");
    probe.dist[i] = ball3.distance_to_boundary(probes[i]);
    probe.values[i] = field.value(probes[i]);
  }
  return probe;
}

GradientProbe solve_neumann_gradient(const ConvexDomain& ball3, const BoundaryData& data,
                                     std::optional<double> eps,
                                     std::span<const Vec> probes,
                                     const SolveOptions& opts) {
  HarmonicField field = analyze_boundary_field(ball3, data, eps,
                                               HarmonicProblem::neumann, opts);
  GradientProbe gp;
  gp.points.assign(probes.begin(), probes.end());
  gp.gradients.resize(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i)
    gp.gradients[i] = field.gradient(probes[i]);
  return gp;
}

KernelMassConstants certified_mass_constants(const ConvexDomain& ball) {
  struct Key {
    int dim;
    double radius;
    bool operator<(const Key& o) const {
      return dim != o.dim ? dim < o.dim : radius < o.radius;
    }
  };
  static std::map<Key, KernelMassConstants> cache;
  static std::mutex mu;
  const Key key{ball.dim(), ball.radius()};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  KernelMassConstants kc;
  // c_mass: positivity + unit mass make sup_x int |P| = 1; certify by
  // quadrature on a small grid.
  auto mass = certify_poisson_mass(ball, ball.dim() == 2 ? 512.0 : 120.0 * 120.0);
  kc.c_mass = 1.0 + mass.max_deviation;

  // c_tail: sup of (delta / d(x)) * int_{|y - xi| >= delta} P(x, y) dsigma
  // over a sample of tail radii delta and probe depths.
  const double R = ball.radius();
  const int d = ball.dim();
  SurfaceQuadrature quad = build_quadrature(ball, d == 2 ? 2048.0 : 200.0 * 200.0);
  Vec xi = ball.center() + Vec::unit(d, d - 1) * R;
  double c_tail = 0;
  for (double delta : {0.05 * R, 0.1 * R, 0.2 * R}) {
    for (double frac : {0.05, 0.1, 0.25, 0.5}) {
      const double t = frac * delta;
      Vec x = ball.center() + Vec::unit(d, d - 1) * (R - t);
      double tail = 0;
      for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
        if ((quad.nodes[k] - xi).norm() < delta) continue;
        tail += quad.weights[k] * poisson_eval(ball, x, quad.nodes[k]);
      }
      c_tail = std::max(c_tail, tail * delta / t);
    }
  }
  kc.c_tail = c_tail;
  std::lock_guard<std::mutex> lock(mu);
  cache[key] = kc;
  return kc;
}

bool ConcentrationReport::pass(double slack) const {
  if (!applicable) return true;
  for (const auto& e : entries)
    if (e.lhs > e.bound + slack) return false;
  return true;
}

ConcentrationReport boundary_concentration_check(const ConvexDomain& ball,
                                                 const BoundaryData& data, double eps,
                                                 const Vec& xi,
                                                 const SolveOptions& opts) {
  ConcentrationReport rep;
  if (!data.pure()) {
    rep.applicable = false;
    rep.note = "needs data depending on the oscillating variable only";
    return rep;
  }
  const TorusFunction& g = *data.pure();
  const double lip_g = g.lipschitz_bound();
  const double sup_g = g.sup_norm();
  if (lip_g <= 0 || sup_g <= 0) {
    // constant data: u == g, check directly at a couple of points
    rep.applicable = true;
    rep.note = "constant data";
    rep.sup_g = sup_g;
    const Vec n = ball.normal(xi);
    const Vec x = xi - n * (0.05 * ball.radius());
    auto probe = solve_dirichlet(ball, data, eps, std::span<const Vec>(&x, 1), opts);
    const Complex gxi = data.evaluate(xi, eps);
    rep.entries.push_back({x, probe.dist[0], std::abs(probe.values[0] - gxi), 1e-8});
    return rep;
  }

  const auto kc = certified_mass_constants(ball);
  rep.c1 = kc.c_mass;
  rep.c2 = 1.0 / (16.0 * kc.c_tail);
  rep.lip_g_eps = lip_g / eps;
  rep.sup_g = sup_g;
  rep.delta = eps * sup_g / (8.0 * rep.c1 * lip_g);
  if (rep.delta >= ball.inradius() / 10.0) {
    rep.applicable = false;
    rep.note = "delta too large for this eps";
    return rep;
  }

  const Vec n = ball.normal(xi);
  const Complex gxi = data.evaluate(xi, eps);
  const double bound = rep.c1 * rep.delta * rep.lip_g_eps + sup_g / 8.0;
  for (double frac : {0.5, 0.25}) {
    const double t = frac * rep.c2 * rep.delta;
    const Vec x = xi - n * t;
    auto probe = solve_dirichlet(ball, data, eps, std::span<const Vec>(&x, 1), opts);
    rep.entries.push_back({x, probe.dist[0], std::abs(probe.values[0] - gxi), bound});
  }
  return rep;
}

}  // namespace homog
