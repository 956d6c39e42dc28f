#include "homog/norms_rates.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "homog/errors.hpp"
#include "homog/format.hpp"
#include "homog/quadrature_rules.hpp"

namespace homog {

double VolumeMesh::weight_sum() const {
  const double sr = std::accumulate(wr.begin(), wr.end(), 0.0);
  const double s1 = std::accumulate(wa1.begin(), wa1.end(), 0.0);
  const double s2 = wa2.empty() ? 1.0 : std::accumulate(wa2.begin(), wa2.end(), 0.0);
  return sr * s1 * s2;
}

Vec VolumeMesh::node(std::size_t i, std::size_t j, std::size_t k) const {
  if (dim == 2) {
    const double th = a1[j];
    return center + Vec{r[i] * std::cos(th), r[i] * std::sin(th)};
  }
  const double u = a1[j];
  const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
  const double phi = a2[k];
  Vec zh{s * std::cos(phi), s * std::sin(phi), u};
  return center + align.apply_transposed(zh * r[i]);
}

VolumeMesh build_volume_mesh(const ConvexDomain& ball, double eps, double data_band,
                             const MeshOptions& opts, std::optional<RotMat> align) {
  if (!ball.is_ball())
    throw UnsupportedDomain("norms/mesh: product meshes implemented for balls");
  const int d = ball.dim();
  if (d != 2 && d != 3)
    throw UnsupportedDimension("norms/mesh: d must be 2 or 3");
  const double R = ball.radius();

  VolumeMesh mesh;
  mesh.dim = d;
  mesh.radius = R;
  mesh.center = ball.center();
  mesh.align = align.value_or(RotMat::identity(d));

  // radial: geometric shells from the boundary inward, then a bulk rule
  const double refine = std::max(1.0, opts.refine);
  double h = eps > 0 ? opts.hmin_factor * eps / refine : opts.shell_cap_frac * R;
  mesh.h_min = h;
  const double depth_target = opts.layer_depth_frac * R;
  const double cap = opts.shell_cap_frac * R;
  double depth = 0;
  int per_shell = opts.per_shell_nodes + (refine > 1 ? 1 : 0);
  std::vector<std::pair<double, double>> shells;  // [lo, hi]
  while (depth < depth_target) {
    const double hi = R - depth;
    const double lo = std::max(R - depth_target, hi - h);
    shells.emplace_back(lo, hi);
    depth = R - lo;
    h = std::min(h / opts.radial_ratio, cap);
  }
  mesh.layer_shells = static_cast<int>(shells.size());
  for (auto [lo, hi] : shells) {
    GaussRule gr = gauss_legendre(per_shell, lo, hi);
    for (int q = 0; q < per_shell; ++q) {
      mesh.r.push_back(gr.nodes[q]);
      mesh.wr.push_back(gr.weights[q] * std::pow(gr.nodes[q], d - 1));
    }
  }
  const int bulk = static_cast<int>(std::lround(opts.bulk_nodes * refine));
  GaussRule gb = gauss_legendre(bulk, 0.0, R - depth);
  for (int q = 0; q < bulk; ++q) {
    mesh.r.push_back(gb.nodes[q]);
    mesh.wr.push_back(gb.weights[q] * std::pow(gb.nodes[q], d - 1));
  }

  // angular: resolve the tangential oscillation scale eps / band
  const double k = eps > 0 ? kTwoPi * data_band * R / eps : 0.0;
  if (d == 2) {
    const int nt = std::max<int>(opts.min_angular,
        static_cast<int>(std::ceil(opts.tangential_per_wavelength * k * refine)));
    mesh.a1.resize(nt);
    mesh.wa1.assign(nt, kTwoPi / nt);
    for (int j = 0; j < nt; ++j) mesh.a1[j] = kTwoPi * (j + 0.5) / nt;
  } else {
    const int nu = std::max<int>(opts.min_angular,
        static_cast<int>(std::ceil(opts.tangential_per_wavelength * 0.5 * k * refine)));
    GaussRule gu = gauss_legendre(nu, -1.0, 1.0);
    mesh.a1 = gu.nodes;
    mesh.wa1 = gu.weights;
    int np = opts.azimuthal_nodes > 0 ? opts.azimuthal_nodes : 8;
    np = static_cast<int>(std::lround(np * refine));
    mesh.a2.resize(np);
    mesh.wa2.assign(np, kTwoPi / np);
    for (int q = 0; q < np; ++q) mesh.a2[q] = kTwoPi * (q + 0.5) / np;
  }
  return mesh;
}

double lp_norm(const VolumeMesh& mesh, std::span<const Complex> values, double p) {
  if (!(p >= 1.0)) throw ConfigError("norms/lp: p >= 1 required");
  if (values.size() != mesh.size())
    throw ConfigError("norms/lp: value array does not match the mesh");
  const std::size_t n1 = mesh.a1.size();
  const std::size_t n2 = std::max<std::size_t>(1, mesh.a2.size());
  double acc = 0;
  for (std::size_t i = 0; i < mesh.r.size(); ++i)
    for (std::size_t j = 0; j < n1; ++j)
      for (std::size_t k = 0; k < n2; ++k)
        acc += mesh.weight(i, j, k) *
               std::pow(std::abs(values[(i * n1 + j) * n2 + k]), p);
  return std::pow(acc, 1.0 / p);
}

std::vector<const SweepEntry*> EpsSweep::ok_entries(double p) const {
  std::vector<const SweepEntry*> out;
  for (const auto& e : entries)
    if (e.ok && e.p == p) out.push_back(&e);
  return out;
}

RateFit fit_loglog(std::span<const double> eps, std::span<const double> norms,
                   FitModel model, int min_points) {
  if (eps.size() != norms.size() || static_cast<int>(eps.size()) < min_points)
    throw DegenerateFit("rates/fit: need at least " + std::to_string(min_points) +
                        " points");
  bool all_tiny = true;
  for (double v : norms) all_tiny = all_tiny && v <= 1e-12;
  if (all_tiny) throw DegenerateFit("rates/fit: all norms at rounding level");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const int n = static_cast<int>(eps.size());
  for (int i = 0; i < n; ++i) {
    if (!(norms[i] > 0)) throw DegenerateFit("rates/fit: nonpositive norm");
    const double le = std::log(eps[i]);
    const double x = model == FitModel::pure_power ? le : le + std::log(std::abs(le));
    const double y = std::log(norms[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vxx = sxx - sx * sx / n;
  const double vxy = sxy - sx * sy / n;
  const double vyy = syy - sy * sy / n;
  if (vxx <= 0) throw DegenerateFit("rates/fit: degenerate abscissa");
  RateFit fit;
  fit.model = model;
  fit.points = n;
  fit.slope = vxy / vxx;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.r2 = vyy > 0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
  return fit;
}

RateFit fit_rate(const EpsSweep& sweep, double p, FitModel model, int min_points) {
  std::vector<double> eps, norms;
  for (const SweepEntry* e : sweep.ok_entries(p)) {
    eps.push_back(e->eps);
    norms.push_back(e->norm);
  }
  return fit_loglog(eps, norms, model, min_points);
}

namespace {

std::vector<Vec> dual_check_probes(const ConvexDomain& ball, int n) {
  const int d = ball.dim();
  const double R = ball.radius();
  std::vector<Vec> probes;
  const double golden = 0.6180339887498949;
  for (int i = 0; i < n; ++i) {
    const double frac = 0.35 + 0.45 * ((i * golden) - std::floor(i * golden));
    Vec dir(d);
    if (d == 2) {
      const double th = kTwoPi * ((i * golden * golden) - std::floor(i * golden * golden));
      dir = Vec{std::cos(th), std::sin(th)};
    } else {
      const double z = 1.0 - 2.0 * (i + 0.5) / n;
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double th = kTwoPi * ((i * golden) - std::floor(i * golden));
      dir = Vec{s * std::cos(th), s * std::sin(th), z};
    }
    probes.push_back(ball.center() + dir * (frac * R));
  }
  return probes;
}

// |f_eps - f_0| per node; gradient problems take the Euclidean modulus of the
// gradient difference.
std::vector<Complex> mesh_diff_values(const VolumeMesh& mesh, const HarmonicField& fe,
                                      const HarmonicField& f0, bool gradient) {
  auto ge = fe.eval_grid(mesh.r, mesh.a1, mesh.a2, gradient);
  auto g0 = f0.eval_grid(mesh.r, mesh.a1, mesh.a2, gradient);
  std::vector<Complex> diff(ge.values.size());
  if (!gradient) {
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = ge.values[i] - g0.values[i];
  } else {
    for (std::size_t i = 0; i < diff.size(); ++i) {
      double s = 0;
      for (int c = 0; c < mesh.dim; ++c)
        s += std::norm(ge.gradients[i][c] - g0.gradients[i][c]);
      diff[i] = std::sqrt(s);
    }
  }
  return diff;
}

}  // namespace

EpsSweep run_sweep(const SweepProblem& problem, std::span<const double> p_list,
                   std::span<const double> eps_list, const SweepOptions& opts) {
  EpsSweep sweep;
  sweep.problem_tag = problem.tag;
  for (double p : p_list)
    if (!(p >= 1.0) || !std::isfinite(p))
      throw ConfigError("sweep: p must satisfy 1 <= p < infinity");
  for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
    if (!(eps_list[i + 1] < eps_list[i]))
      throw ConfigError("sweep: eps list must be strictly decreasing");
  for (double e : eps_list)
    if (!(e > 0) || e > 1) throw ConfigError("sweep: eps must lie in (0, 1]");

  const ConvexDomain& dom = problem.domain;
  const BoundaryData& data = problem.data;
  const bool gradient = problem.kind == ProblemKind::neumann_grad;
  const bool neumann = problem.kind != ProblemKind::dirichlet;
  if (neumann && dom.dim() != 3)
    throw UnsupportedDimension("sweep: Neumann problems need d = 3");

  std::optional<RotMat> align;
  if (dom.dim() == 3) {
    if (auto axis = data.common_axis()) align = RotMat::pole_alignment(*axis);
  }

  MeshOptions mesh_opts = opts.mesh;
  if (dom.dim() == 3 && mesh_opts.azimuthal_nodes == 0) {
    const int az = data.max_slow_band() + 2;
    mesh_opts.azimuthal_nodes = std::max(8, 4 * az);
    if (!align && data.max_band() > 0) {
      // no common oscillation axis: azimuth oscillates at the full scale
      mesh_opts.azimuthal_nodes = 0;  // resolved per-eps below
    }
  }

  for (double eps : eps_list) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<SweepEntry> batch;
    try {
      const HarmonicProblem hp =
          neumann ? HarmonicProblem::neumann : HarmonicProblem::dirichlet;
      SolveOptions sopts = opts.solve;
      sopts.engine = SolveEngine::spectral;
      sopts.threads = opts.threads;

      HarmonicField fe = analyze_boundary_field(dom, data, eps, hp, sopts);
      HarmonicField f0 = analyze_boundary_field(dom, data, std::nullopt, hp, sopts);

      MeshOptions mo = mesh_opts;
      if (dom.dim() == 3 && mo.azimuthal_nodes == 0)
        mo.azimuthal_nodes = std::max<int>(
            8, static_cast<int>(std::ceil(mo.tangential_per_wavelength * kTwoPi *
                                          data.max_band() * dom.radius() / eps)));
      VolumeMesh mesh = build_volume_mesh(dom, eps, data.max_band(), mo,
                                          fe.alignment().is_identity()
                                              ? std::optional<RotMat>{}
                                              : std::optional<RotMat>{fe.alignment()});
      auto diff = mesh_diff_values(mesh, fe, f0, gradient);

      double guard_rel = 0;
      std::vector<double> norms(p_list.size()), norms2(p_list.size());
      for (std::size_t ip = 0; ip < p_list.size(); ++ip)
        norms[ip] = lp_norm(mesh, diff, p_list[ip]);
      if (opts.mesh_guard) {
        MeshOptions mo2 = mo;
        mo2.refine = 2.0;
        VolumeMesh mesh2 = build_volume_mesh(dom, eps, data.max_band(), mo2,
                                             fe.alignment().is_identity()
                                                 ? std::optional<RotMat>{}
                                                 : std::optional<RotMat>{fe.alignment()});
        auto diff2 = mesh_diff_values(mesh2, fe, f0, gradient);
        for (std::size_t ip = 0; ip < p_list.size(); ++ip) {
          norms2[ip] = lp_norm(mesh2, diff2, p_list[ip]);
          const double scale = std::max({norms2[ip], norms[ip], 1e-14});
          guard_rel = std::max(guard_rel, std::abs(norms2[ip] - norms[ip]) / scale);
        }
        if (guard_rel > opts.mesh_guard_tol)
          throw MeshUnderResolved("sweep: mesh-refinement guard failed (rel change " +
                                  format_g17(guard_rel) + ")");
        norms = norms2;
      }

      double dual_err = 0;
      if (opts.dual_path_check && !gradient) {
        auto probes = dual_check_probes(dom, opts.dual_path_probes);
        SolveOptions qopts = opts.solve;
        qopts.engine = SolveEngine::quadrature;
        qopts.threads = opts.threads;
        FieldProbe qp = neumann
            ? solve_neumann_v(dom, data, eps, probes, qopts)
            : solve_dirichlet(dom, data, eps, probes, qopts);
        double scale = 1.0;
        for (const auto& z : qp.values) scale = std::max(scale, std::abs(z));
        for (std::size_t i = 0; i < probes.size(); ++i) {
          const Complex sv = fe.value(probes[i]);
          dual_err = std::max(dual_err, std::abs(sv - qp.values[i]) / scale);
        }
        if (dual_err > opts.dual_path_tol)
          throw QuadratureUnderResolved(
              "sweep: spectral/quadrature dual-path disagreement " +
              format_g17(dual_err));
      }

      const auto t1 = std::chrono::steady_clock::now();
      const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      for (std::size_t ip = 0; ip < p_list.size(); ++ip) {
        SweepEntry e;
        e.eps = eps;
        e.p = p_list[ip];
        e.norm = norms[ip];
        e.dim = dom.dim();
        e.resolution = fe.degree_cutoff();
        e.mesh_nodes = mesh.size();
        e.mesh_guard_rel = guard_rel;
        e.dual_path_err = dual_err;
        e.wallclock_ms = ms;
        batch.push_back(e);
      }
    } catch (const Error& err) {
      batch.clear();
      const auto t1 = std::chrono::steady_clock::now();
      const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      for (double p : p_list) {
        SweepEntry e;
        e.eps = eps;
        e.p = p;
        e.ok = false;
        e.error = err.what();
        e.dim = dom.dim();
        e.wallclock_ms = ms;
        batch.push_back(e);
      }
    }
    for (auto& e : batch) sweep.entries.push_back(std::move(e));
  }
  return sweep;
}

OptimalityReport optimality_check(const EpsSweep& sweep, double p,
                                  const TorusFunction& g) {
  OptimalityReport rep;
  rep.sup_g_minus_mean = g.sup_minus_mean();
  if (rep.sup_g_minus_mean <= 1e-14) {
    rep.applicable = false;
    rep.note = "NotApplicable: sup |g - gbar| = 0";
    return rep;
  }
  auto entries = sweep.ok_entries(p);
  if (entries.empty()) {
    rep.applicable = false;
    rep.note = "NotApplicable: no successful sweep entries";
    return rep;
  }
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (const SweepEntry* e : entries) {
    const double r = e->norm / (std::pow(e->eps, 1.0 / p) * rep.sup_g_minus_mean);
    rep.ratios.push_back(r);
    rep.min_ratio = std::min(rep.min_ratio, r);
    rep.max_ratio = std::max(rep.max_ratio, r);
  }
  return rep;
}

InterpolationReport interpolation_check(const EpsSweep& sweep, double p, double sup_g) {
  InterpolationReport rep;
  rep.constant = std::pow(2.0 * sup_g, 1.0 - 1.0 / p);
  auto l1 = sweep.ok_entries(1.0);
  for (const SweepEntry* ep : sweep.ok_entries(p)) {
    for (const SweepEntry* e1 : l1) {
      if (e1->eps == ep->eps) {
        rep.entries.push_back(
            {ep->eps, ep->norm, rep.constant * std::pow(e1->norm, 1.0 / p)});
        break;
      }
    }
  }
  return rep;
}

std::string sweep_csv(const EpsSweep& sweep) {
  std::ostringstream os;
  os << "eps,p,d,norm,slope_so_far,resolution,wallclock_ms\n";
  // running per-p slope over the entries seen so far
  std::vector<std::pair<double, std::vector<std::pair<double, double>>>> history;
  for (const auto& e : sweep.entries) {
    std::string slope_str;
    if (e.ok) {
      auto it = std::find_if(history.begin(), history.end(),
                             [&](const auto& h) { return h.first == e.p; });
      if (it == history.end()) {
        history.push_back({e.p, {}});
        it = std::prev(history.end());
      }
      it->second.push_back({e.eps, e.norm});
      if (it->second.size() >= 2) {
        std::vector<double> xs, ys;
        for (auto [eps, nm] : it->second) {
          xs.push_back(eps);
          ys.push_back(nm);
        }
        try {
          slope_str = format_g17(fit_loglog(xs, ys, FitModel::pure_power, 2).slope);
        } catch (const DegenerateFit&) {
          slope_str.clear();
        }
      }
    }
    os << format_g17(e.eps) << ',' << format_g17(e.p) << ',' << e.dim << ','
       << (e.ok ? format_g17(e.norm) : "nan") << ',' << slope_str << ','
       << format_g17(e.resolution) << ',' << format_g17(e.wallclock_ms) << '\n';
  }
  return os.str();
}

}  // namespace homog
