#include "homog/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "homog/errors.hpp"
#include "homog/kernels.hpp"

namespace homog {

namespace {

// Quadrature of y -> f(y) over Gamma with linear node density resolving
// frequency k (radians per unit length) along the oscillation axis.
Complex oscillatory_surface_integral(const ConvexDomain& domain,
                                     const std::function<Complex(const Vec&)>& f,
                                     double freq, const Vec* axis, double q,
                                     double rtol) {
  const int d = domain.dim();
  const double R = *std::max_element(domain.semi_axes().begin(),
                                     domain.semi_axes().end());
  const double lin = std::max(16.0 / R, q * freq / kTwoPi);
  std::optional<RotMat> align;
  double lin_perp = lin;
  if (axis && domain.is_ball() && d == 3) {
    align = RotMat::pole_alignment(*axis);
    lin_perp = 16.0 / R;
  }
  std::array<int, 3> counts{};
  if (d == 2) {
    counts[0] = std::max(32, static_cast<int>(std::ceil(lin * kTwoPi * R)));
  } else if (d == 3) {
    counts[0] = std::max(16, static_cast<int>(std::ceil(lin * kPi * R)));
    counts[1] = std::max(16, static_cast<int>(std::ceil(lin_perp * kTwoPi * R)));
  } else {
    counts[0] = std::max(16, static_cast<int>(std::ceil(lin * kPi * R)));
    counts[1] = std::max(16, static_cast<int>(std::ceil(lin * kPi * R)));
    counts[2] = std::max(16, static_cast<int>(std::ceil(lin * kTwoPi * R)));
  }

  double abs_mass = 0;  // sum w |f|, the rounding scale of the cancellation
  auto integrate = [&](const std::array<int, 3>& c) {
    SurfaceQuadrature quad = build_quadrature_counts(domain, c, align ? &*align : nullptr);
    Complex acc{0, 0};
    double mass = 0;
    for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
      const Complex fv = f(quad.nodes[i]);
      acc += quad.weights[i] * fv;
      mass += quad.weights[i] * std::abs(fv);
    }
    abs_mass = std::max(abs_mass, mass);
    return acc;
  };
  const Complex v1 = integrate(counts);
  std::array<int, 3> counts2 = counts;
  for (int& c : counts2)
    if (c) c *= 2;
  const Complex v2 = integrate(counts2);
  // oscillatory integrals may cancel down to rounding level; below that floor
  // the doubling test cannot distinguish noise from error
  const double diff = std::abs(v2 - v1);
  const double floor = 1e-12 * (1 + abs_mass);
  if (diff > rtol * std::max(std::abs(v1), std::abs(v2)) && diff > floor)
    throw QuadratureUnderResolved("asymptotics: surface integral not converged");
  return v2;
}

}  // namespace

Complex surface_fourier(const ConvexDomain& domain, const Vec& xi,
                        double q_per_wavelength, double rtol) {
  const double norm_xi = xi.norm();
  if (!(norm_xi > 0)) throw ConfigError("asymptotics/surface_fourier: |xi| > 0 required");
  const Vec axis = xi.normalized();
  auto f = [&](const Vec& y) { return unit_character(-xi.dot(y)); };
  return oscillatory_surface_integral(domain, f, kTwoPi * norm_xi, &axis,
                                      q_per_wavelength, rtol);
}

DecaySweep surface_fourier_decay(const ConvexDomain& domain, const Vec& dir,
                                 double lambda_min, double lambda_max,
                                 int samples_per_octave) {
  if (!(lambda_min > 0) || !(lambda_max > lambda_min))
    throw ConfigError("asymptotics/decay: bad lambda range");
  DecaySweep sweep;
  const Vec d = dir.normalized();
  for (double lam = lambda_min; lam < lambda_max * (1 - 1e-12); lam *= 2) {
    double env = 0;
    for (int j = 0; j < samples_per_octave; ++j) {
      const double l = lam * std::pow(2.0, double(j) / samples_per_octave);
      env = std::max(env, std::abs(surface_fourier(domain, d * l)));
    }
    sweep.lambdas.push_back(lam);
    sweep.envelope.push_back(env);
  }
  sweep.fit = fit_loglog(sweep.lambdas, sweep.envelope, FitModel::pure_power,
                         std::min<int>(4, sweep.lambdas.size()));
  return sweep;
}

Complex stationary_phase_2d(const Vec& x, double eps) {
  if (x.dim() != 2) throw UnsupportedDimension("asymptotics/sp2d: d = 2 required");
  if (!(x.norm() < 0.5))
    throw ConfigError("asymptotics/sp2d: valid for |x| < 1/2 only");
  if (!(eps > 0) || eps > 0.125 + 1e-15)
    throw ConfigError("asymptotics/sp2d: eps <= 1/8 required");
  static const ConvexDomain disk = ConvexDomain::ball(2, 1.0);
  const Vec npole{0.0, 1.0};
  const Vec spole{0.0, -1.0};
  const double pp = poisson_eval(disk, x, npole);
  const double pm = poisson_eval(disk, x, spole);
  const Complex phase_plus = unit_character(1.0 / eps);   // e^{2 pi i / eps}
  const Complex eip4{std::sqrt(0.5), std::sqrt(0.5)};     // e^{+i pi/4}
  return std::sqrt(eps) *
         (std::conj(eip4) * pp * phase_plus + eip4 * pm * std::conj(phase_plus));
}

Complex oscillatory_boundary_average(const ConvexDomain& domain,
                                     const BoundaryData& data, double eps,
                                     double q_per_wavelength) {
  const double vol = domain.volume();
  if (eps <= 0) {
    auto f = [&](const Vec& y) { return data.mean_part(y); };
    return oscillatory_surface_integral(domain, f, 0.0, nullptr, q_per_wavelength,
                                        1e-9) *
           (1.0 / vol);
  }
  if (eps > 0.25 + 1e-15)
    throw ConfigError("asymptotics/boundary_average: eps <= 1/4 required");
  auto axis = data.common_axis();
  auto f = [&](const Vec& y) { return data.evaluate(y, eps); };
  const double freq = kTwoPi * data.max_band() / eps;
  return oscillatory_surface_integral(domain, f, freq, axis ? &*axis : nullptr,
                                      q_per_wavelength, 1e-9) *
         (1.0 / vol);
}

WeylReport weyl_limit_check(const ConvexDomain& domain, const TorusFunction& g,
                            std::span<const double> lambdas,
                            double q_per_wavelength) {
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i)
    if (!(lambdas[i] < lambdas[i + 1]))
      throw ConfigError("asymptotics/weyl: lambda list must increase");
  WeylReport rep;
  const Complex mean = g.mean();
  const double surf = domain.surface_measure();
  for (double lam : lambdas) {
    auto f = [&](const Vec& y) { return g.evaluate(y * lam); };
    const double freq = kTwoPi * g.band_limit() * lam;
    const Complex avg =
        oscillatory_surface_integral(domain, f, freq, nullptr, q_per_wavelength, 1e-8) /
        surf;
    rep.lambdas.push_back(lam);
    rep.residuals.push_back(std::abs(avg - mean));
  }
  // per-octave envelope
  if (!rep.lambdas.empty()) {
    double anchor = rep.lambdas.front();
    double env = 0;
    for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
      if (rep.lambdas[i] >= 2 * anchor * (1 - 1e-12)) {
        rep.octave_lambdas.push_back(anchor);
        rep.octave_envelope.push_back(env);
        anchor = rep.lambdas[i];
        env = 0;
      }
      env = std::max(env, rep.residuals[i]);
    }
    rep.octave_lambdas.push_back(anchor);
    rep.octave_envelope.push_back(env);
  }
  for (std::size_t i = 2; i < rep.octave_envelope.size(); ++i)
    if (rep.octave_envelope[i] > rep.octave_envelope[i - 1] * (1 + 1e-12))
      rep.octaves_monotone = false;
  if (rep.octave_envelope.size() >= 3) {
    bool all_zero = true;
    for (double e : rep.octave_envelope) all_zero = all_zero && e <= 1e-14;
    if (!all_zero)
      rep.fit = fit_loglog(rep.octave_lambdas, rep.octave_envelope,
                           FitModel::pure_power, std::min<int>(3, rep.octave_lambdas.size()));
  }
  return rep;
}

}  // namespace homog
