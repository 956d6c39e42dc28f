#include "homog/cell.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "homog/errors.hpp"

namespace homog {

PeriodicTensor::PeriodicTensor(int dim, int N) : dim_(dim), n_(N) {
  if (dim < 1 || dim > 4) throw UnsupportedDimension("cell: dim must be in [1,4]");
  if (N < 1) throw ConfigError("cell: N >= 1 required");
  entries_.assign(static_cast<std::size_t>(dim) * dim * N * N,
                  TorusFunction(dim, /*real_valued=*/true));
}

TorusFunction& PeriodicTensor::entry(int alpha, int beta, int i, int j) {
  return entries_[((static_cast<std::size_t>(alpha) * dim_ + beta) * n_ + i) * n_ + j];
}

const TorusFunction& PeriodicTensor::entry(int alpha, int beta, int i, int j) const {
  return entries_[((static_cast<std::size_t>(alpha) * dim_ + beta) * n_ + i) * n_ + j];
}

PeriodicTensor PeriodicTensor::identity(int dim, int N) {
  PeriodicTensor A(dim, N);
  for (int a = 0; a < dim; ++a)
    for (int i = 0; i < N; ++i) A.entry(a, a, i, i).set_coeff(Mode(dim, {}), 1.0);
  return A;
}

double PeriodicTensor::evaluate_form(const Vec& y, std::span<const double> xi) const {
  // xi indexed as xi[i * d + alpha]
  double s = 0;
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b)
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          s += entry(a, b, i, j).evaluate(y).real() * xi[i * dim_ + a] * xi[j * dim_ + b];
  return s;
}

PeriodicTensor::Ellipticity PeriodicTensor::sample_ellipticity(std::uint64_t seed,
                                                               int nxi) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int grid = dim_ <= 2 ? 16 : (dim_ == 3 ? 12 : 8);
  Ellipticity res;
  res.lower = std::numeric_limits<double>::infinity();
  std::vector<double> xi(static_cast<std::size_t>(n_) * dim_);
  std::vector<Vec> ys;
  {
    std::array<int, 4> idx{};
    const int total = static_cast<int>(std::pow(grid, dim_));
    for (int t = 0; t < total; ++t) {
      int rem = t;
      Vec y(dim_);
      for (int c = 0; c < dim_; ++c) {
        idx[c] = rem % grid;
        rem /= grid;
        y[c] = (idx[c] + 0.5) / grid;
      }
      ys.push_back(y);
    }
  }
  for (int k = 0; k < nxi; ++k) {
    double n2 = 0;
    for (auto& v : xi) {
      v = normal(rng);
      n2 += v * v;
    }
    for (const Vec& y : ys) {
      const double q = evaluate_form(y, xi) / n2;
      res.lower = std::min(res.lower, q);
      res.upper = std::max(res.upper, q);
    }
  }
  return res;
}

double PeriodicTensor::max_band() const {
  double b = 0;
  for (const auto& e : entries_) b = std::max(b, e.band_limit());
  return b;
}

PeriodicTensor PeriodicTensor::from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  const int N = j.value("N", 1);
  PeriodicTensor A(dim, N);
  for (const auto& e : j.at("entries")) {
    const int a = e.at("alpha").get<int>();
    const int b = e.at("beta").get<int>();
    const int i = e.value("i", 0);
    const int jj = e.value("j", 0);
    if (a < 0 || a >= dim || b < 0 || b >= dim || i < 0 || i >= N || jj < 0 || jj >= N)
      throw ConfigError("cell: tensor entry index out of range");
    nlohmann::json tf;
    tf["dim"] = dim;
    tf["coeffs"] = e.at("coeffs");
    tf["real_valued"] = true;
    A.entry(a, b, i, jj) = TorusFunction::from_json(tf);
  }
  return A;
}

nlohmann::json PeriodicTensor::to_json() const {
  nlohmann::json j;
  j["dim"] = dim_;
  j["N"] = n_;
  auto arr = nlohmann::json::array();
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b)
      for (int i = 0; i < n_; ++i)
        for (int jj = 0; jj < n_; ++jj) {
          const TorusFunction& f = entry(a, b, i, jj);
          if (f.coeffs().empty()) continue;
          nlohmann::json e;
          e["alpha"] = a;
          e["beta"] = b;
          e["i"] = i;
          e["j"] = jj;
          e["coeffs"] = f.to_json().at("coeffs");
          arr.push_back(e);
        }
  j["entries"] = arr;
  return j;
}

DivergenceFreeReport check_divergence_free(const PeriodicTensor& A) {
  DivergenceFreeReport rep;
  const int d = A.dim();
  const int N = A.ncomp();
  for (int g = 0; g < d; ++g)
    for (int k = 0; k < N; ++k)
      for (int i = 0; i < N; ++i) {
        // collect all modes present in the row (A^{g 0}_{ki}, ..., A^{g d-1}_{ki})
        std::map<Mode, Complex> div;
        for (int a = 0; a < d; ++a)
          for (const auto& [m, c] : A.entry(g, a, k, i).coeffs()) div[m] += double(m[a]) * c;
        for (const auto& [m, v] : div)
          rep.max_residual = std::max(rep.max_residual, kTwoPi * std::abs(v));
      }
  rep.holds = rep.max_residual <= 1e-12;
  return rep;
}

double EffectiveTensor::ahat_entry(int alpha, int beta, int i, int j) const {
  return ahat[((static_cast<std::size_t>(alpha) * dim + beta) * n + i) * n + j];
}

bool EffectiveTensor::is_identity(double tol) const {
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double want = (a == b && i == j) ? 1.0 : 0.0;
          if (std::abs(ahat_entry(a, b, i, j) - want) > tol) return false;
        }
  return true;
}

namespace {

std::vector<Mode> modes_up_to(int d, int K) {
  std::vector<Mode> out;
  std::array<int, 4> idx{};
  const int side = 2 * K + 1;
  const int total = static_cast<int>(std::pow(side, d));
  for (int t = 0; t < total; ++t) {
    int rem = t;
    Mode m;
    m.dim = d;
    for (int c = 0; c < d; ++c) {
      idx[c] = rem % side;
      rem /= side;
      m[c] = idx[c] - K;
    }
    if (!m.is_zero()) out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int tensor_band_inf(const PeriodicTensor& A) {
  int b = 0;
  for (int a = 0; a < A.dim(); ++a)
    for (int be = 0; be < A.dim(); ++be)
      for (int i = 0; i < A.ncomp(); ++i)
        for (int j = 0; j < A.ncomp(); ++j)
          for (const auto& [m, c] : A.entry(a, be, i, j).coeffs())
            for (int cdim = 0; cdim < A.dim(); ++cdim)
              b = std::max(b, std::abs(m[cdim]));
  return b;
}

}  // namespace

EffectiveTensor solve_cell(const PeriodicTensor& A, const CellSolveOptions& opts) {
  const int d = A.dim();
  const int N = A.ncomp();
  const auto ell = A.sample_ellipticity();
  if (!ell.elliptic())
    throw ConfigError("cell/solve: tensor fails the sampled ellipticity check");

  const int bandA = std::max(1, tensor_band_inf(A));
  int K = bandA * (1 + opts.mode_margin);

  for (int attempt = 0;; ++attempt) {
    const std::vector<Mode> modes = modes_up_to(d, K);
    const int M = static_cast<int>(modes.size());
    const int dof = M * N;
    if (dof > 6000)
      throw IllConditioned("cell/solve: Galerkin system too large; reduce the band");
    std::map<Mode, int> index;
    for (int t = 0; t < M; ++t) index[modes[t]] = t;

    // K[(i,n),(j,m)] = sum_{ab} n_a m_b c_{n-m}(A^{ab}_{ij})
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(dof, dof);
    for (int tn = 0; tn < M; ++tn) {
      const Mode& n = modes[tn];
      for (int tm = 0; tm < M; ++tm) {
        const Mode& m = modes[tm];
        Mode diff;
        diff.dim = d;
        bool in_band = true;
        for (int c = 0; c < d; ++c) {
          diff[c] = n[c] - m[c];
          in_band = in_band && std::abs(diff[c]) <= bandA;
        }
        if (!in_band) continue;
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) {
            Complex acc{0, 0};
            for (int a = 0; a < d; ++a)
              for (int b = 0; b < d; ++b) {
                const Complex c = A.entry(a, b, i, j).coeff(diff);
                if (c != Complex{0, 0}) acc += double(n[a]) * double(m[b]) * c;
              }
            if (acc != Complex{0, 0}) G(tn * N + i, tm * N + j) = acc;
          }
      }
    }

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(G);
    // cheap condition estimate: ||G||_1 * max_j ||G^{-1} e_j||_1 over probes
    double norm1 = 0;
    for (int c = 0; c < dof; ++c) norm1 = std::max(norm1, G.col(c).cwiseAbs().sum());
    double inv1 = 0;
    for (int probe = 0; probe < std::min(5, dof); ++probe) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dof);
      e[(probe * 7919) % dof] = 1.0;
      inv1 = std::max(inv1, lu.solve(e).cwiseAbs().sum());
    }
    const double cond = norm1 * inv1;
    if (cond > opts.condition_limit)
      throw IllConditioned("cell/solve: condition estimate " + std::to_string(cond));

    EffectiveTensor eff;
    eff.dim = d;
    eff.n = N;
    eff.condition_estimate = cond;
    eff.ahat.assign(static_cast<std::size_t>(d) * d * N * N, 0.0);
    eff.correctors.assign(static_cast<std::size_t>(d) * N * N, TorusFunction(d));

    const Complex itwo_pi = Complex{0, 1} / kTwoPi;
    double residual = 0;
    std::vector<Eigen::VectorXcd> solutions(static_cast<std::size_t>(d) * N);
    for (int g = 0; g < d; ++g)
      for (int k = 0; k < N; ++k) {
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dof);
        for (int tn = 0; tn < M; ++tn) {
          const Mode& n = modes[tn];
          for (int i = 0; i < N; ++i) {
            Complex acc{0, 0};
            for (int a = 0; a < d; ++a) acc += double(n[a]) * A.entry(a, g, i, k).coeff(n);
            rhs[tn * N + i] = itwo_pi * acc;
          }
        }
        Eigen::VectorXcd x = lu.solve(rhs);
        solutions[g * N + k] = x;

        // residual on the enlarged test set: modes with |.|_inf <= K + bandA
        const std::vector<Mode> tests = modes_up_to(d, K + bandA);
        const double rhs_scale = 1.0 + rhs.cwiseAbs().maxCoeff();
        for (const Mode& n : tests) {
          for (int i = 0; i < N; ++i) {
            Complex acc{0, 0};
            for (int tm = 0; tm < M; ++tm) {
              const Mode& m = modes[tm];
              Mode diff;
              diff.dim = d;
              bool in_band = true;
              for (int c = 0; c < d; ++c) {
                diff[c] = n[c] - m[c];
                in_band = in_band && std::abs(diff[c]) <= bandA;
              }
              if (!in_band) continue;
              for (int j = 0; j < N; ++j) {
                Complex kern{0, 0};
                for (int a = 0; a < d; ++a)
                  for (int b = 0; b < d; ++b) {
                    const Complex c = A.entry(a, b, i, j).coeff(diff);
                    if (c != Complex{0, 0}) kern += double(n[a]) * double(m[b]) * c;
                  }
                acc += kern * x[tm * N + j];
              }
            }
            Complex r{0, 0};
            for (int a = 0; a < d; ++a) r += double(n[a]) * A.entry(a, g, i, k).coeff(n);
            r = itwo_pi * r;
            residual = std::max(residual, std::abs(acc - r) / rhs_scale);
          }
        }

        for (int j = 0; j < N; ++j) {
          TorusFunction chi(d);
          for (int tm = 0; tm < M; ++tm)
            if (x[tm * N + j] != Complex{0, 0}) chi.set_coeff(modes[tm], x[tm * N + j]);
          eff.correctors[(static_cast<std::size_t>(g) * N + k) * N + j] = chi;
        }

        // Ahat^{a g}_{ik} = c_0(A^{ag}_{ik}) + sum_{b,j,m} c_{-m}(A^{ab}_{ij}) 2pi i m_b X_{j,m}
        for (int a = 0; a < d; ++a)
          for (int i = 0; i < N; ++i) {
            Complex acc = A.entry(a, g, i, k).coeff(Mode(d, {}));
            for (int tm = 0; tm < M; ++tm) {
              const Mode& m = modes[tm];
              for (int b = 0; b < d; ++b) {
                for (int j = 0; j < N; ++j) {
                  const Complex c = A.entry(a, b, i, j).coeff(m.negated());
                  if (c != Complex{0, 0})
                    acc += c * Complex{0, kTwoPi * m[b]} * x[tm * N + j];
                }
              }
            }
            eff.ahat[((static_cast<std::size_t>(a) * d + g) * N + i) * N + k] = acc.real();
          }
      }

    eff.weak_residual = residual;
    if (residual <= opts.residual_tol) return eff;
    if (attempt >= opts.max_enlargements)
      throw IllConditioned("cell/solve: weak residual " + std::to_string(residual) +
                           " did not reach tolerance after mode enlargements");
    K *= 2;
  }
}

std::vector<double> h_matrix(const EffectiveTensor& ahat, const Vec& n) {
  if (std::abs(n.norm() - 1.0) > 1e-10)
    throw ConfigError("cell/h_matrix: |n| = 1 required");
  const int N = ahat.n;
  Eigen::MatrixXd M(N, N);
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) {
      double s = 0;
      for (int a = 0; a < ahat.dim; ++a)
        for (int b = 0; b < ahat.dim; ++b) s += ahat.ahat_entry(a, b, i, k) * n[a] * n[b];
      M(i, k) = s;
    }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible())
    throw SingularMatrix("cell/h_matrix: Ahat n n not invertible (ellipticity violated)");
  Eigen::MatrixXd H = lu.inverse();
  std::vector<double> out(static_cast<std::size_t>(N) * N);
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) out[static_cast<std::size_t>(i) * N + k] = H(i, k);
  return out;
}

std::vector<Complex> omega_eps(const PeriodicTensor& A, const EffectiveTensor& ahat,
                               const ConvexDomain& domain, const Vec& y, double eps) {
  auto div = check_divergence_free(A);
  if (!div.holds)
    throw ConditionViolated("cell/omega: divergence-free row condition fails, residual " +
                            std::to_string(div.max_residual));
  const int d = A.dim();
  const int N = A.ncomp();
  const Vec n = domain.normal(y);
  const auto h = h_matrix(ahat, n);
  const Vec ye = y * (1.0 / eps);
  std::vector<Complex> out(static_cast<std::size_t>(N) * N, Complex{0, 0});
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      Complex acc{0, 0};
      for (int k = 0; k < N; ++k) {
        Complex ann{0, 0};
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            ann += n[a] * n[b] * A.entry(a, b, k, j).evaluate(ye);
        acc += h[static_cast<std::size_t>(i) * N + k] * ann;
      }
      out[static_cast<std::size_t>(i) * N + j] = acc;
    }
  return out;
}

namespace {

void require_scalar(const PeriodicTensor& A, const char* where) {
  if (A.ncomp() != 1)
    throw ConfigError(std::string(where) + ": boundary-data form implemented for N = 1");
}

}  // namespace

BoundaryData g_star(const PeriodicTensor& A, const EffectiveTensor& ahat,
                    const ConvexDomain& domain, const BoundaryData& g) {
  require_scalar(A, "cell/g_star");
  auto div = check_divergence_free(A);
  if (!div.holds)
    throw ConditionViolated("cell/g_star: divergence-free row condition fails");
  const int d = A.dim();

  BoundaryData out(d);
  // pairing sum over shared modes: for each g-entry (m_g, c_g(x)) and each
  // A-mode with m_A = -m_g the product contributes to the zero mode
  for (const auto& ge : g.entries()) {
    std::vector<std::array<int, 2>> ab_terms;
    std::vector<Complex> ab_coeffs;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const Complex ca = A.entry(a, b, 0, 0).coeff(ge.mode.negated());
        if (ca != Complex{0, 0}) {
          ab_terms.push_back({a, b});
          ab_coeffs.push_back(ca);
        }
      }
    if (ab_terms.empty()) continue;
    auto slow = ge.coeff;
    auto f = [&domain, &ahat, ab_terms, ab_coeffs, slow](const Vec& y) {
      const Vec n = domain.normal(y);
      const auto h = h_matrix(ahat, n);
      Complex acc{0, 0};
      for (std::size_t t = 0; t < ab_terms.size(); ++t)
        acc += ab_coeffs[t] * n[ab_terms[t][0]] * n[ab_terms[t][1]];
      return h[0] * acc * slow(y);
    };
    out.add_mode(Mode(d, {}), f, ge.slow_band + 2);
  }
  if (out.entries().empty()) out.add_mode(Mode(d, {}), Complex{0, 0});
  return out;
}

BoundaryData omega_g_data(const PeriodicTensor& A, const EffectiveTensor& ahat,
                          const ConvexDomain& domain, const BoundaryData& g) {
  require_scalar(A, "cell/omega_g_data");
  auto div = check_divergence_free(A);
  if (!div.holds)
    throw ConditionViolated("cell/omega_g_data: divergence-free row condition fails");
  const int d = A.dim();

  BoundaryData out(d);
  for (const auto& ge : g.entries()) {
    // zero A-mode terms: h n n Ahat-free part; collect per (a, b, m_A)
    std::map<Mode, std::vector<std::pair<std::array<int, 2>, Complex>>> by_mode;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (const auto& [mA, cA] : A.entry(a, b, 0, 0).coeffs())
          by_mode[mA].push_back({{a, b}, cA});
    for (const auto& [mA, terms] : by_mode) {
      Mode mode = mA + ge.mode;
      auto slow = ge.coeff;
      auto terms_copy = terms;
      auto f = [&domain, &ahat, terms_copy, slow](const Vec& y) {
        const Vec n = domain.normal(y);
        const auto h = h_matrix(ahat, n);
        Complex acc{0, 0};
        for (const auto& [ab, cA] : terms_copy) acc += cA * n[ab[0]] * n[ab[1]];
        return h[0] * acc * slow(y);
      };
      out.add_mode(mode, f, ge.slow_band + 2);
    }
  }
  return out;
}

Theorem13Report verify_theorem13_pipeline(const PeriodicTensor& A,
                                          const BoundaryData& g,
                                          const ConvexDomain& domain, double p,
                                          std::span<const double> eps_list,
                                          const SweepOptions& opts) {
  if (domain.dim() != 3)
    throw UnsupportedDimension("cell/theorem13: d = 3 required");
  Theorem13Report rep;
  rep.divfree = check_divergence_free(A);
  if (!rep.divfree.holds)
    throw ConditionViolated("cell/theorem13: divergence-free row condition fails");
  rep.effective = solve_cell(A);
  if (!rep.effective.is_identity())
    throw ConditionViolated(
        "cell/theorem13: homogenized tensor must equal the identity for the "
        "closed-form kernel pipeline");

  SweepProblem problem{ProblemKind::dirichlet, domain,
                       omega_g_data(A, rep.effective, domain, g), "theorem13"};
  const double ps[1] = {p};
  rep.sweep = run_sweep(problem, ps, eps_list, opts);
  rep.sweep.problem_tag = "theorem13";
  rep.fit_log = fit_rate(rep.sweep, p, FitModel::power_log);
  rep.fit_pure = fit_rate(rep.sweep, p, FitModel::pure_power);
  rep.min_slope_required = 1.0 / p - 0.1;
  rep.pass = rep.fit_log.slope >= rep.min_slope_required;
  return rep;
}

}  // namespace homog
