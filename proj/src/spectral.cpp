#include "homog/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "homog/errors.hpp"
#include "homog/quadrature_rules.hpp"

namespace homog {

void normalized_legendre_row(int m, int L, double u, std::span<double> p_out,
                             std::span<double> sdp_out) {
  const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
  std::fill(p_out.begin(), p_out.end(), 0.0);
  if (!sdp_out.empty()) std::fill(sdp_out.begin(), sdp_out.end(), 0.0);
  if (m > L) return;

  // seed P~_m^m and diagonal climb
  double pmm = std::sqrt(1.0 / (4.0 * kPi));
  for (int k = 1; k <= m; ++k) pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  p_out[m] = pmm;
  if (m + 1 <= L) p_out[m + 1] = std::sqrt(2.0 * m + 3.0) * u * pmm;
  for (int l = m + 2; l <= L; ++l) {
    const double al = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
    const double alm1 =
        std::sqrt((4.0 * (l - 1.0) * (l - 1.0) - 1.0) /
                  ((l - 1.0) * (l - 1.0) - double(m) * m));
    p_out[l] = al * (u * p_out[l - 1] - p_out[l - 2] / alm1);
  }
  if (!sdp_out.empty()) {
    // sin(theta) dP~_l^m/dtheta = l u P~_l - sqrt((l^2-m^2)(2l+1)/(2l-1)) P~_{l-1}
    sdp_out[m] = m * u * p_out[m];
    for (int l = m + 1; l <= L; ++l) {
      const double c =
          std::sqrt((double(l) * l - double(m) * m) * (2.0 * l + 1.0) / (2.0 * l - 1.0));
      sdp_out[l] = l * u * p_out[l] - c * p_out[l - 1];
    }
  }
}

double HarmonicField::multiplier(int l) const {
  if (problem_ == HarmonicProblem::dirichlet) return 1.0;
  return l == 0 ? 0.0 : 1.0 / l;
}

namespace {

struct SizedPlan {
  int L, M, Nu, Nphi;
};

// d=2 trapezoid-projection Fourier coefficients for |n| <= L.
std::vector<Complex> analyze_disk(const ConvexDomain& ball,
                                  const HarmonicField::BoundaryFn& f, int L, int N) {
  const double R = ball.radius();
  const Vec& c = ball.center();
  std::vector<Complex> coeff(2 * L + 1, Complex{0, 0});
  std::vector<Complex> fs(N);
  for (int j = 0; j < N; ++j) {
    const double th = kTwoPi * j / N;
    fs[j] = f(c + Vec{R * std::cos(th), R * std::sin(th)});
  }
  for (int j = 0; j < N; ++j) {
    const double th = kTwoPi * j / N;
    const Complex step{std::cos(th), -std::sin(th)};  // e^{-i theta_j}
    // start at n = -L: e^{+iL theta_j}
    Complex w{std::cos(L * th), std::sin(L * th)};
    const Complex fj = fs[j];
    for (int n = -L; n <= L; ++n) {
      coeff[n + L] += fj * w;
      w *= step;
    }
  }
  const double inv = 1.0 / N;
  for (auto& z : coeff) z *= inv;
  return coeff;
}

// d=3 spherical-harmonic analysis on GL(u) x trapezoid(phi).
std::vector<std::vector<Complex>> analyze_ball3(const ConvexDomain& ball,
                                                const HarmonicField::BoundaryFn& f,
                                                const RotMat& align, int L, int M,
                                                int Nu, int Nphi) {
  const double R = ball.radius();
  const Vec& c = ball.center();
  GaussRule gu = gauss_legendre(Nu, -1.0, 1.0);
  const double wphi = kTwoPi / Nphi;

  std::vector<std::vector<Complex>> rings(2 * M + 1,
                                          std::vector<Complex>(Nu, Complex{0, 0}));
  std::vector<Complex> row(Nphi);
  for (int j = 0; j < Nu; ++j) {
    const double u = gu.nodes[j];
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    for (int k = 0; k < Nphi; ++k) {
      const double phi = kTwoPi * (k + 0.5) / Nphi;
      Vec zh{s * std::cos(phi), s * std::sin(phi), u};
      row[k] = f(c + align.apply_transposed(zh * R));
    }
    for (int m = -M; m <= M; ++m) {
      Complex acc{0, 0};
      for (int k = 0; k < Nphi; ++k) {
        const double phi = kTwoPi * (k + 0.5) / Nphi;
        acc += row[k] * Complex{std::cos(m * phi), -std::sin(m * phi)};
      }
      rings[m + M][j] = acc * wphi;
    }
  }

  std::vector<std::vector<Complex>> coeff(2 * M + 1);
  std::vector<double> prow(L + 1);
  for (int mm = 0; mm <= M; ++mm) {
    std::vector<Complex> cpos(L + 1, Complex{0, 0});
    std::vector<Complex> cneg(L + 1, Complex{0, 0});
    for (int j = 0; j < Nu; ++j) {
      normalized_legendre_row(mm, L, gu.nodes[j], prow);
      const Complex gp = rings[mm + M][j] * gu.weights[j];
      const Complex gn = rings[-mm + M][j] * gu.weights[j];
      for (int l = mm; l <= L; ++l) {
        cpos[l] += gp * prow[l];
        if (mm > 0) cneg[l] += gn * prow[l];
      }
    }
    coeff[mm + M] = std::move(cpos);
    if (mm > 0) coeff[-mm + M] = std::move(cneg);
  }
  return coeff;
}

double sq_sum(const std::vector<Complex>& v) {
  double s = 0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

double sq_sum(const std::vector<std::vector<Complex>>& v) {
  double s = 0;
  for (const auto& row : v) s += sq_sum(row);
  return s;
}

}  // namespace

HarmonicField HarmonicField::analyze(const ConvexDomain& ball, const BoundaryFn& f,
                                     const AnalysisOptions& opts,
                                     HarmonicProblem problem,
                                     std::optional<RotMat> align) {
  if (!ball.is_ball())
    throw UnsupportedDomain("spectral/analyze: harmonic fields need a ball domain");
  const int d = ball.dim();
  if (d != 2 && d != 3)
    throw UnsupportedDimension("spectral/analyze: d must be 2 or 3");
  if (problem == HarmonicProblem::neumann) {
    if (d != 3) throw UnsupportedDimension("spectral/analyze: neumann needs d = 3");
    if (std::abs(ball.radius() - 1.0) > 1e-14 || ball.center().norm() > 1e-14)
      throw UnsupportedDomain("spectral/analyze: neumann needs the unit ball");
  }

  RotMat A = align.value_or(RotMat::identity(d));
  HarmonicField field(ball, problem, A);
  field.dim_ = d;

  const double k = std::max(0.0, opts.max_parametric_freq);
  int L = static_cast<int>(std::ceil(k + 8.0 * std::cbrt(k + 1.0) + 30.0)) +
          4 * opts.slow_band;
  const int M = (d == 3) ? opts.azimuthal_band + 2 : 0;
  if (d == 3 && double(2 * M + 1) * (L + 1) > 5e7)
    throw QuadratureUnderResolved(
        "spectral/analyze: azimuthal x degree budget too large; "
        "align the oscillation axis or use the quadrature engine");

  for (int attempt = 0; attempt < 3; ++attempt) {
    if (d == 2) {
      const int N = std::max(2 * L + 64, 128);
      auto coarse = analyze_disk(ball, f, L, N);
      auto fine = opts.doubling_guard ? analyze_disk(ball, f, L, 2 * N) : coarse;
      double diff2 = 0;
      for (std::size_t i = 0; i < fine.size(); ++i) diff2 += std::norm(fine[i] - coarse[i]);
      const double tot2 = sq_sum(fine);
      double tail2 = 0;
      const int tail_from = std::max(1, static_cast<int>(0.97 * L));
      for (int n = tail_from; n <= L; ++n)
        tail2 += std::norm(fine[n + L]) + std::norm(fine[-n + L]);
      if (tot2 < 1e-300 ||
          (diff2 <= opts.rtol * opts.rtol * tot2 && tail2 <= opts.rtol * tot2)) {
        field.L_ = L;
        field.M_ = 0;
        field.fourier_ = std::move(fine);
        return field;
      }
      if (tail2 > opts.rtol * tot2) {
        L = static_cast<int>(std::ceil(1.4 * L)) + 16;
        continue;
      }
      throw QuadratureUnderResolved("spectral/analyze: disk analysis did not converge");
    }

    const int Nu = L + 33;
    const int Nphi = std::max(16, 4 * (M + 2));
    auto coarse = analyze_ball3(ball, f, A, L, M, Nu, Nphi);
    auto fine = opts.doubling_guard ? analyze_ball3(ball, f, A, L, M, 2 * Nu, 2 * Nphi)
                                    : coarse;
    double diff2 = 0;
    for (std::size_t m = 0; m < fine.size(); ++m)
      for (std::size_t l = 0; l < fine[m].size(); ++l)
        diff2 += std::norm(fine[m][l] - coarse[m][l]);
    const double tot2 = sq_sum(fine);
    double tail2 = 0;
    const int tail_from = std::max(1, static_cast<int>(0.97 * L));
    for (const auto& row : fine)
      for (int l = tail_from; l <= L; ++l) tail2 += std::norm(row[l]);
    if (tot2 < 1e-300 ||
        (diff2 <= opts.rtol * opts.rtol * tot2 && tail2 <= opts.rtol * tot2)) {
      field.L_ = L;
      field.M_ = M;
      field.sph_ = std::move(fine);
      return field;
    }
    if (tail2 > opts.rtol * tot2) {
      L = static_cast<int>(std::ceil(1.4 * L)) + 16;
      continue;
    }
    throw QuadratureUnderResolved("spectral/analyze: sphere analysis did not converge");
  }
  throw QuadratureUnderResolved("spectral/analyze: degree cutoff kept growing; "
                                "data rougher than its declared band");
}

double HarmonicField::coeff_abs_sum() const {
  double s = 0;
  for (const auto& z : fourier_) s += std::abs(z);
  for (const auto& row : sph_)
    for (const auto& z : row) s += std::abs(z);
  return s;
}

Complex HarmonicField::value(const Vec& x_phys) const {
  const double R = ball_.radius();
  if (dim_ == 2) {
    const Vec z = x_phys - ball_.center();
    const double r = z.norm();
    const double rho = r / R;
    if (rho > 1 + 1e-12) throw PointNotInterior("spectral/value: point outside ball");
    const double theta = std::atan2(z[1], z[0]);
    Complex sum = fourier_[L_] * multiplier(0);
    const Complex zp_step{std::cos(theta), std::sin(theta)};
    Complex zp{1, 0};
    double rp = 1;
    for (int n = 1; n <= L_; ++n) {
      zp *= zp_step;
      rp *= rho;
      if (rp < 1e-300) break;
      sum += multiplier(n) * rp * (fourier_[n + L_] * zp + fourier_[-n + L_] * std::conj(zp));
    }
    return sum;
  }

  const Vec zv = align_.apply(x_phys - ball_.center());
  const double r = zv.norm();
  const double rho = r / R;
  if (rho > 1 + 1e-12) throw PointNotInterior("spectral/value: point outside ball");
  if (r < 1e-300) return sph_[M_][0] * multiplier(0) * std::sqrt(1.0 / (4.0 * kPi));
  const double u = std::clamp(zv[2] / r, -1.0, 1.0);
  const double phi = std::atan2(zv[1], zv[0]);

  std::vector<double> prow(L_ + 1);
  std::vector<double> rp(L_ + 1);
  rp[0] = 1;
  for (int l = 1; l <= L_; ++l) rp[l] = rp[l - 1] * rho;
  Complex sum{0, 0};
  for (int m = -M_; m <= M_; ++m) {
    normalized_legendre_row(std::abs(m), L_, u, prow);
    Complex acc{0, 0};
    for (int l = std::abs(m); l <= L_; ++l)
      acc += sph_[m + M_][l] * (multiplier(l) * rp[l] * prow[l]);
    sum += acc * Complex{std::cos(m * phi), std::sin(m * phi)};
  }
  return sum;
}

std::array<Complex, 4> HarmonicField::gradient(const Vec& x_phys) const {
  if (dim_ != 3)
    throw UnsupportedDimension("spectral/gradient: implemented for d = 3");
  const double R = ball_.radius();
  const Vec zv = align_.apply(x_phys - ball_.center());
  const double r = zv.norm();
  if (r < 1e-12)
    throw PointNotInterior("spectral/gradient: needs r > 0");
  const double u = std::clamp(zv[2] / r, -1.0, 1.0);
  const double s = std::sqrt(std::max(1e-30, 1.0 - u * u));
  const double phi = std::atan2(zv[1], zv[0]);
  const double rho = r / R;

  std::vector<double> prow(L_ + 1), sdp(L_ + 1);
  std::vector<double> rp(L_ + 1);
  rp[0] = 1;
  for (int l = 1; l <= L_; ++l) rp[l] = rp[l - 1] * rho;

  Complex gr{0, 0}, gt{0, 0}, gp{0, 0};
  for (int m = -M_; m <= M_; ++m) {
    normalized_legendre_row(std::abs(m), L_, u, prow, sdp);
    Complex sv{0, 0}, sr{0, 0}, st{0, 0};
    for (int l = std::abs(m); l <= L_; ++l) {
      const Complex a = sph_[m + M_][l] * (multiplier(l) * rp[l]);
      sv += a * prow[l];
      sr += a * (double(l) * prow[l]);
      st += a * sdp[l];
    }
    const Complex eim{std::cos(m * phi), std::sin(m * phi)};
    gr += (sr / r) * eim;
    gt += (st / (r * s)) * eim;
    gp += Complex{0, double(m)} / (r * s) * sv * eim;
  }
  const double cp = std::cos(phi), sp = std::sin(phi);
  const Vec er{s * cp, s * sp, u};
  const Vec et{u * cp, u * sp, -s};
  const Vec ep{-sp, cp, 0};
  std::array<Complex, 4> gint{};
  for (int i = 0; i < 3; ++i) gint[i] = gr * er[i] + gt * et[i] + gp * ep[i];
  // back to the physical frame: grad_phys = align^T grad_int
  std::array<Complex, 4> gphys{};
  for (int i = 0; i < 3; ++i) {
    Complex acc{0, 0};
    for (int j = 0; j < 3; ++j) acc += align_.r[j][i] * gint[j];
    gphys[i] = acc;
  }
  return gphys;
}

HarmonicField::GridEval HarmonicField::eval_grid(std::span<const double> radii,
                                                 std::span<const double> ang1,
                                                 std::span<const double> ang2,
                                                 bool want_gradient) const {
  GridEval out;
  const double R = ball_.radius();
  const std::size_t Nr = radii.size();

  if (dim_ == 2) {
    if (want_gradient)
      throw UnsupportedDimension("spectral/eval_grid: gradient implemented for d = 3");
    const std::size_t Nt = ang1.size();
    out.values.assign(Nr * Nt, Complex{0, 0});
    std::vector<Complex> b(2 * L_ + 1);
    for (std::size_t i = 0; i < Nr; ++i) {
      const double rho = radii[i] / R;
      // terms with rho^n below rounding contribute nothing
      int n_eff = L_;
      if (rho < 1.0 - 1e-14 && rho > 0) {
        n_eff = std::min<int>(L_, static_cast<int>(std::ceil(-42.0 / std::log(rho))));
      } else if (rho == 0) {
        n_eff = 0;
      }
      double rp = 1;
      b[L_] = fourier_[L_] * multiplier(0);
      for (int n = 1; n <= n_eff; ++n) {
        rp *= rho;
        b[L_ + n] = fourier_[L_ + n] * (multiplier(n) * rp);
        b[L_ - n] = fourier_[L_ - n] * (multiplier(n) * rp);
      }
      for (std::size_t j = 0; j < Nt; ++j) {
        const double th = ang1[j];
        const Complex step{std::cos(th), std::sin(th)};
        Complex zp{1, 0};
        Complex sum = b[L_];
        for (int n = 1; n <= n_eff; ++n) {
          zp *= step;
          sum += b[L_ + n] * zp + b[L_ - n] * std::conj(zp);
        }
        out.values[i * Nt + j] = sum;
      }
    }
    return out;
  }

  // d = 3: product grid (r_i, u_j, phi_k), internal frame, phi fastest.
  const std::size_t Nu = ang1.size();
  const std::size_t Np = ang2.size();
  const std::size_t total = Nr * Nu * Np;
  out.values.assign(total, Complex{0, 0});
  std::vector<Complex> grad_r, grad_t, grad_p;
  if (want_gradient) {
    grad_r.assign(total, Complex{0, 0});
    grad_t.assign(total, Complex{0, 0});
    grad_p.assign(total, Complex{0, 0});
  }

  // rho^l table
  std::vector<double> rho_pow((L_ + 1) * Nr);
  for (std::size_t i = 0; i < Nr; ++i) {
    const double rho = radii[i] / R;
    rho_pow[i * (L_ + 1)] = 1;
    for (int l = 1; l <= L_; ++l) rho_pow[i * (L_ + 1) + l] = rho_pow[i * (L_ + 1) + l - 1] * rho;
  }

  std::vector<double> prow(L_ + 1), sdp(L_ + 1);
  std::vector<Complex> sval(Nr), sdr(Nr), sdt(Nr);
  std::vector<Complex> eim(Np);

  for (int mm = 0; mm <= M_; ++mm) {
    for (int sign = 0; sign < (mm == 0 ? 1 : 2); ++sign) {
      const int m = sign == 0 ? mm : -mm;
      for (std::size_t k = 0; k < Np; ++k)
        eim[k] = Complex{std::cos(m * ang2[k]), std::sin(m * ang2[k])};
      for (std::size_t j = 0; j < Nu; ++j) {
        const double u = ang1[j];
        const double sth = std::sqrt(std::max(1e-30, 1.0 - u * u));
        normalized_legendre_row(mm, L_, u,
                                std::span<double>(prow),
                                want_gradient ? std::span<double>(sdp)
                                              : std::span<double>());
        const auto& am = sph_[m + M_];
        for (std::size_t i = 0; i < Nr; ++i) {
          const double* rp = &rho_pow[i * (L_ + 1)];
          Complex v{0, 0}, dr{0, 0}, dt{0, 0};
          if (want_gradient) {
            for (int l = mm; l <= L_; ++l) {
              const Complex a = am[l] * (multiplier(l) * rp[l]);
              v += a * prow[l];
              dr += a * (double(l) * prow[l]);
              dt += a * sdp[l];
            }
          } else {
            for (int l = mm; l <= L_; ++l)
              v += am[l] * (multiplier(l) * rp[l] * prow[l]);
          }
          sval[i] = v;
          if (want_gradient) {
            const double r = std::max(radii[i], 1e-300);
            sdr[i] = dr / r;
            sdt[i] = dt / (r * sth);
          }
        }
        for (std::size_t i = 0; i < Nr; ++i) {
          Complex* dst = &out.values[(i * Nu + j) * Np];
          const Complex v = sval[i];
          for (std::size_t k = 0; k < Np; ++k) dst[k] += v * eim[k];
          if (want_gradient) {
            Complex* dgr = &grad_r[(i * Nu + j) * Np];
            Complex* dgt = &grad_t[(i * Nu + j) * Np];
            Complex* dgp = &grad_p[(i * Nu + j) * Np];
            const double r = std::max(radii[i], 1e-300);
            const Complex gphi = Complex{0, double(m)} / (r * sth) * v;
            for (std::size_t k = 0; k < Np; ++k) {
              dgr[k] += sdr[i] * eim[k];
              dgt[k] += sdt[i] * eim[k];
              dgp[k] += gphi * eim[k];
            }
          }
        }
      }
    }
  }

  if (want_gradient) {
    out.gradients.assign(total, {});
    for (std::size_t j = 0; j < Nu; ++j) {
      const double u = ang1[j];
      const double sth = std::sqrt(std::max(0.0, 1.0 - u * u));
      for (std::size_t k = 0; k < Np; ++k) {
        const double cp = std::cos(ang2[k]), sp = std::sin(ang2[k]);
        const Vec er{sth * cp, sth * sp, u};
        const Vec et{u * cp, u * sp, -sth};
        const Vec ep{-sp, cp, 0};
        for (std::size_t i = 0; i < Nr; ++i) {
          const std::size_t idx = (i * Nu + j) * Np + k;
          std::array<Complex, 4> gint{};
          for (int ci = 0; ci < 3; ++ci)
            gint[ci] = grad_r[idx] * er[ci] + grad_t[idx] * et[ci] + grad_p[idx] * ep[ci];
          std::array<Complex, 4> gphys{};
          for (int ci = 0; ci < 3; ++ci) {
            Complex acc{0, 0};
            for (int cj = 0; cj < 3; ++cj) acc += align_.r[cj][ci] * gint[cj];
            gphys[ci] = acc;
          }
          out.gradients[idx] = gphys;
        }
      }
    }
  }
  return out;
}

}  // namespace homog
