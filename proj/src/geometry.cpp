#include "homog/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "homog/errors.hpp"
#include "homog/quadrature_rules.hpp"

namespace homog {

RotMat RotMat::identity(int dim) {
  RotMat m;
  m.dim = dim;
  for (int i = 0; i < dim; ++i) m.r[i][i] = 1.0;
  return m;
}

RotMat RotMat::pole_alignment(const Vec& a) {
  const int d = a.dim();
  RotMat m;
  m.dim = d;
  // Rows: orthonormal basis whose last element is a, built by Gram-Schmidt
  // from coordinate seeds. Then R a = e_{d-1}.
  std::vector<Vec> rows;
  rows.reserve(d);
  Vec an = a.normalized();
  for (int seed = 0; seed < d && static_cast<int>(rows.size()) < d - 1; ++seed) {
    Vec v = Vec::unit(d, seed);
    v = v - an * v.dot(an);
    for (const Vec& r : rows) v = v - r * v.dot(r);
    if (v.norm() > 1e-8) rows.push_back(v.normalized());
  }
  rows.push_back(an);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m.r[i][j] = rows[i][j];
  return m;
}

Vec RotMat::apply(const Vec& v) const {
  Vec out(dim);
  for (int i = 0; i < dim; ++i) {
    double s = 0;
    for (int j = 0; j < dim; ++j) s += r[i][j] * v[j];
    out[i] = s;
  }
  return out;
}

Vec RotMat::apply_transposed(const Vec& v) const {
  Vec out(dim);
  for (int i = 0; i < dim; ++i) {
    double s = 0;
    for (int j = 0; j < dim; ++j) s += r[j][i] * v[j];
    out[i] = s;
  }
  return out;
}

bool RotMat::is_identity(double tol) const {
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (std::abs(r[i][j] - (i == j ? 1.0 : 0.0)) > tol) return false;
  return true;
}

ConvexDomain::ConvexDomain(int dim, DomainKind kind, std::vector<double> axes, Vec center)
    : dim_(dim), kind_(kind), axes_(std::move(axes)), center_(center) {}

ConvexDomain ConvexDomain::ball(int dim, double radius, std::optional<Vec> center) {
  if (dim < 2 || dim > 4) throw UnsupportedDimension("geometry: dim must be 2, 3 or 4");
  if (!(radius > 0)) throw ConfigError("geometry: ball radius must be positive");
  Vec c = center.value_or(Vec::zero(dim));
  return ConvexDomain(dim, DomainKind::ball, std::vector<double>(dim, radius), c);
}

ConvexDomain ConvexDomain::ellipsoid(int dim, std::vector<double> semi_axes,
                                     std::optional<Vec> center) {
  if (dim < 2 || dim > 4) throw UnsupportedDimension("geometry: dim must be 2, 3 or 4");
  if (static_cast<int>(semi_axes.size()) != dim)
    throw ConfigError("geometry: need one semi-axis per dimension");
  for (double a : semi_axes)
    if (!(a > 0)) throw ConfigError("geometry: semi-axes must be positive");
  bool all_equal = true;
  for (double a : semi_axes) all_equal = all_equal && a == semi_axes[0];
  Vec c = center.value_or(Vec::zero(dim));
  return ConvexDomain(dim, all_equal ? DomainKind::ball : DomainKind::ellipsoid,
                      std::move(semi_axes), c);
}

double ConvexDomain::implicit(const Vec& y) const {
  double s = 0;
  for (int i = 0; i < dim_; ++i) {
    const double t = (y[i] - center_[i]) / axes_[i];
    s += t * t;
  }
  return s - 1.0;
}

Vec ConvexDomain::normal(const Vec& y) const {
  if (std::abs(implicit(y)) > 1e-8)
    throw PointNotOnBoundary("geometry/normal: implicit residual > 1e-8");
  Vec g(dim_);
  for (int i = 0; i < dim_; ++i) g[i] = 2.0 * (y[i] - center_[i]) / (axes_[i] * axes_[i]);
  return g.normalized();
}

bool ConvexDomain::contains(const Vec& x) const { return implicit(x) <= 1e-12; }

bool ConvexDomain::strictly_inside(const Vec& x) const { return implicit(x) < -1e-12; }

double ConvexDomain::distance_to_boundary(const Vec& x) const {
  if (implicit(x) > 1e-12)
    throw PointNotInterior("geometry/distance: point outside closure");
  if (kind_ == DomainKind::ball) return axes_[0] - (x - center_).norm();

  // Point-to-ellipsoid projection via the Lagrange parameter t:
  //   foot_i = a_i^2 z_i / (a_i^2 + t),  sum_i (a_i z_i / (a_i^2 + t))^2 = 1,
  // root in (-a_min^2, 0] for interior z. Components are nudged off exact
  // zero; by 1-Lipschitz continuity this perturbs the distance by <= 1e-12.
  Vec z = x - center_;
  for (int i = 0; i < dim_; ++i)
    if (std::abs(z[i]) < 1e-13) z[i] = 1e-13;
  const double amin = inradius();
  auto f = [&](double t) {
    double s = 0;
    for (int i = 0; i < dim_; ++i) {
      const double q = axes_[i] * z[i] / (axes_[i] * axes_[i] + t);
      s += q * q;
    }
    return s - 1.0;
  };
  double hi = 0.0;
  if (f(hi) > 0) return 0.0;  // on the boundary to rounding
  double lo = -amin * amin;
  double step = amin * amin * 1e-9;
  while (f(lo + step) < 0 && step < amin * amin) step *= 2;
  lo += step / 2;
  if (f(lo) < 0) lo = -amin * amin * (1 - 1e-15);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-16 * amin * amin) break;
  }
  const double t = 0.5 * (lo + hi);
  Vec foot(dim_);
  for (int i = 0; i < dim_; ++i)
    foot[i] = center_[i] + axes_[i] * axes_[i] * z[i] / (axes_[i] * axes_[i] + t);
  return (x - foot).norm();
}

double ConvexDomain::volume() const {
  double unit = 0;
  switch (dim_) {
    case 2: unit = kPi; break;
    case 3: unit = 4.0 * kPi / 3.0; break;
    case 4: unit = kPi * kPi / 2.0; break;
  }
  double prod = 1;
  for (double a : axes_) prod *= a;
  return unit * prod;
}

namespace {

// Unit-sphere parametrization and analytic partials, shared by quadrature
// construction. angles: d=2 (t), d=3 (u=cos theta, phi), d=4 (theta1, u2, phi).
void unit_param(int d, const std::array<double, 3>& ang, Vec& y,
                std::array<Vec, 3>& partials) {
  if (d == 2) {
    const double c = std::cos(ang[0]), s = std::sin(ang[0]);
    y = Vec{c, s};
    partials[0] = Vec{-s, c};
  } else if (d == 3) {
    const double u = ang[0], sp = std::sin(ang[1]), cp = std::cos(ang[1]);
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    y = Vec{s * cp, s * sp, u};
    partials[0] = Vec{-u * cp / s, -u * sp / s, 1.0};
    partials[1] = Vec{-s * sp, s * cp, 0.0};
  } else {
    const double c1 = std::cos(ang[0]), s1 = std::sin(ang[0]);
    const double u2 = ang[1], s2 = std::sqrt(std::max(0.0, 1.0 - u2 * u2));
    const double cp = std::cos(ang[2]), sp = std::sin(ang[2]);
    y = Vec{c1, s1 * u2, s1 * s2 * cp, s1 * s2 * sp};
    partials[0] = Vec{-s1, c1 * u2, c1 * s2 * cp, c1 * s2 * sp};
    partials[1] = Vec{0.0, s1, -s1 * u2 * cp / s2, -s1 * u2 * sp / s2};
    partials[2] = Vec{0.0, 0.0, -s1 * s2 * sp, s1 * s2 * cp};
  }
}

double gram_det_sqrt(int k, const std::array<Vec, 3>& cols) {
  double g[3][3];
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) g[i][j] = cols[i].dot(cols[j]);
  double det = 0;
  if (k == 1)
    det = g[0][0];
  else if (k == 2)
    det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  else
    det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
          g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
          g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
  return std::sqrt(std::max(0.0, det));
}

}  // namespace

Vec ConvexDomain::boundary_point(const std::array<double, 3>& angles) const {
  Vec y(dim_);
  std::array<Vec, 3> partials;
  unit_param(dim_, angles, y, partials);
  Vec out(dim_);
  for (int i = 0; i < dim_; ++i) out[i] = center_[i] + axes_[i] * y[i];
  return out;
}

double SurfaceQuadrature::weight_sum() const {
  double s = 0;
  for (double w : weights) s += w;
  return s;
}

SurfaceQuadrature build_quadrature_counts(const ConvexDomain& domain,
                                          const std::array<int, 3>& counts,
                                          const RotMat* align) {
  const int d = domain.dim();
  if (d < 2 || d > 4)
    throw UnsupportedDimension("geometry/quadrature: dim must be 2, 3 or 4");
  if (align && !domain.is_ball())
    throw UnsupportedDomain("geometry/quadrature: pole alignment needs a ball");

  // Per-direction angle rules: trapezoid midpoints for periodic directions,
  // Gauss-Legendre otherwise.
  const int n_angles = d - 1;
  std::array<std::vector<double>, 3> ang_nodes, ang_weights;
  auto midpoints = [](int n, double a, double b, std::vector<double>& x,
                      std::vector<double>& w) {
    x.resize(n);
    w.assign(n, (b - a) / n);
    for (int i = 0; i < n; ++i) x[i] = a + (b - a) * (i + 0.5) / n;
  };
  if (d == 2) {
    midpoints(counts[0], 0.0, kTwoPi, ang_nodes[0], ang_weights[0]);
  } else if (d == 3) {
    GaussRule gu = gauss_legendre(counts[0], -1.0, 1.0);
    ang_nodes[0] = gu.nodes;
    ang_weights[0] = gu.weights;
    midpoints(counts[1], 0.0, kTwoPi, ang_nodes[1], ang_weights[1]);
  } else {
    GaussRule g1 = gauss_legendre(counts[0], 0.0, kPi);
    ang_nodes[0] = g1.nodes;
    ang_weights[0] = g1.weights;
    GaussRule g2 = gauss_legendre(counts[1], -1.0, 1.0);
    ang_nodes[1] = g2.nodes;
    ang_weights[1] = g2.weights;
    midpoints(counts[2], 0.0, kTwoPi, ang_nodes[2], ang_weights[2]);
  }

  SurfaceQuadrature q;
  q.angular_counts = counts;
  std::size_t total = 1;
  for (int k = 0; k < n_angles; ++k) total *= ang_nodes[k].size();
  q.nodes.reserve(total);
  q.weights.reserve(total);
  q.normals.reserve(total);

  const auto& axes = domain.semi_axes();
  std::array<int, 3> idx{};
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int k = n_angles - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(rem % ang_nodes[k].size());
      rem /= ang_nodes[k].size();
    }
    std::array<double, 3> ang{};
    double wa = 1.0;
    for (int k = 0; k < n_angles; ++k) {
      ang[k] = ang_nodes[k][idx[k]];
      wa *= ang_weights[k][idx[k]];
    }
    Vec yh(d);
    std::array<Vec, 3> partials;
    unit_param(d, ang, yh, partials);
    std::array<Vec, 3> cols;
    for (int k = 0; k < n_angles; ++k) {
      Vec col(d);
      for (int i = 0; i < d; ++i) col[i] = axes[i] * partials[k][i];
      cols[k] = col;
    }
    const double jac = gram_det_sqrt(n_angles, cols);
    Vec rel(d);
    for (int i = 0; i < d; ++i) rel[i] = axes[i] * yh[i];
    if (align) rel = align->apply_transposed(rel);
    Vec node = domain.center() + rel;
    q.nodes.push_back(node);
    q.weights.push_back(wa * jac);
    // outward normal: normalized implicit gradient (rotation-equivariant)
    Vec g(d);
    for (int i = 0; i < d; ++i)
      g[i] = (node[i] - domain.center()[i]) / (axes[i] * axes[i]);
    q.normals.push_back(g.normalized());
  }
  q.order = 2 * counts[0] - 1;
  // nodes per unit arclength (d=2) / per unit area (d>=3)
  q.resolution = total / q.weight_sum();
  return q;
}

SurfaceQuadrature build_quadrature(const ConvexDomain& domain, double resolution) {
  if (resolution < 4)
    throw ConfigError("geometry/quadrature: resolution >= 4 required");
  const int d = domain.dim();
  const double amax = *std::max_element(domain.semi_axes().begin(),
                                        domain.semi_axes().end());
  std::array<int, 3> counts{};
  if (d == 2) {
    counts[0] = std::max(8, static_cast<int>(std::ceil(resolution * kTwoPi * amax)));
  } else if (d == 3) {
    const double lin = std::sqrt(resolution);
    counts[0] = std::max(8, static_cast<int>(std::ceil(lin * kPi * amax)));
    counts[1] = std::max(16, static_cast<int>(std::ceil(lin * kTwoPi * amax)));
  } else {
    const double lin = std::cbrt(resolution);
    counts[0] = std::max(12, static_cast<int>(std::ceil(lin * kPi * amax)));
    counts[1] = std::max(12, static_cast<int>(std::ceil(lin * kPi * amax)));
    counts[2] = std::max(16, static_cast<int>(std::ceil(lin * kTwoPi * amax)));
  }
  return build_quadrature_counts(domain, counts);
}

double ConvexDomain::surface_measure() const {
  if (kind_ == DomainKind::ball) {
    const double r = axes_[0];
    switch (dim_) {
      case 2: return kTwoPi * r;
      case 3: return 4.0 * kPi * r * r;
      default: return 2.0 * kPi * kPi * r * r * r;
    }
  }
  std::array<int, 3> counts{};
  if (dim_ == 2)
    counts = {4096, 0, 0};
  else if (dim_ == 3)
    counts = {256, 512, 0};
  else
    counts = {96, 96, 192};
  return build_quadrature_counts(*this, counts).weight_sum();
}

double TorusBall::measure() const {
  const int d = center.dim();
  const double r = radius;
  switch (d) {
    case 2: return kPi * r * r;
    case 3: return 4.0 * kPi * r * r * r / 3.0;
    default: return kPi * kPi * r * r * r * r / 2.0;
  }
}

EquidistributionResult equidistribution_fraction(const ConvexDomain& domain,
                                                 double lambda, const TorusBall& A,
                                                 double resolution) {
  if (lambda <= 0) throw ConfigError("geometry/equidistribution: lambda > 0 required");
  const int d = domain.dim();
  if (A.center.dim() != d) throw ConfigError("geometry/equidistribution: dim mismatch");
  // A ball of radius >= sqrt(d)/2 covers the whole torus; radii in between
  // would overlap themselves and have no clean measure.
  const double half_diag = 0.5 * std::sqrt(static_cast<double>(d));
  const bool full_cover = A.radius >= half_diag - 1e-12;
  if (A.radius > 0.5 + 1e-12 && !full_cover)
    throw ConfigError(
        "geometry/equidistribution: torus ball radius must be <= 1/2 or cover T^d");

  if (full_cover) {
    EquidistributionResult res;
    res.smoothed = res.hard = res.target = 1.0;
    res.smoothing_width = 0.0;
    res.node_count = 0;
    return res;
  }

  SurfaceQuadrature q = build_quadrature(domain, resolution);
  const double delta = 1.0 / std::sqrt(resolution);
  double smooth_sum = 0, hard_sum = 0, total = 0;
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    // torus distance of lambda*y mod 1 to the center of A
    double dist2 = 0;
    for (int i = 0; i < d; ++i) {
      double t = lambda * q.nodes[k][i] - A.center[i];
      t -= std::round(t);
      dist2 += t * t;
    }
    const double dist = std::sqrt(dist2);
    const double w = q.weights[k];
    total += w;
    if (dist <= A.radius) hard_sum += w;
    double t = (A.radius + 0.5 * delta - dist) / delta;
    t = std::clamp(t, 0.0, 1.0);
    smooth_sum += w * (t * t * (3.0 - 2.0 * t));
  }
  EquidistributionResult res;
  res.smoothed = smooth_sum / total;
  res.hard = hard_sum / total;
  res.target = full_cover ? 1.0 : (A.radius == 0 ? 0.0 : A.measure());
  res.smoothing_width = delta;
  res.node_count = q.nodes.size();
  return res;
}

}  // namespace homog
