#include "homog/torus.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "homog/errors.hpp"

namespace homog {

TorusFunction::TorusFunction(int dim, bool real_valued)
    : dim_(dim), real_valued_(real_valued) {
  if (dim < 1 || dim > 4) throw UnsupportedDimension("torus: dim must be in [1,4]");
}

void TorusFunction::add_coeff(const Mode& m, Complex c) {
  if (m.dim != dim_) throw ConfigError("torus: mode dimension mismatch");
  coeffs_[m] += c;
}

void TorusFunction::set_coeff(const Mode& m, Complex c) {
  if (m.dim != dim_) throw ConfigError("torus: mode dimension mismatch");
  coeffs_[m] = c;
}

Complex TorusFunction::coeff(const Mode& m) const {
  auto it = coeffs_.find(m);
  return it == coeffs_.end() ? Complex{0, 0} : it->second;
}

Complex TorusFunction::evaluate(const Vec& y) const {
  Complex s{0, 0};
  for (const auto& [m, c] : coeffs_) s += c * unit_character(m.dot(y));
  return s;
}

Complex TorusFunction::mean() const { return coeff(Mode(dim_, {})); }

double TorusFunction::decay_sum(double tau) const {
  double s = 0;
  for (const auto& [m, c] : coeffs_) {
    if (m.is_zero()) continue;
    s += std::abs(c) / std::pow(m.norm(), tau);
  }
  return s;
}

double TorusFunction::lipschitz_bound() const {
  double s = 0;
  for (const auto& [m, c] : coeffs_) s += kTwoPi * m.norm() * std::abs(c);
  return s;
}

double TorusFunction::band_limit() const {
  double b = 0;
  for (const auto& [m, c] : coeffs_) {
    if (std::abs(c) == 0.0) continue;
    b = std::max(b, m.norm());
  }
  return b;
}

double TorusFunction::coeff_abs_sum() const {
  double s = 0;
  for (const auto& [m, c] : coeffs_) s += std::abs(c);
  return s;
}

namespace {

double sup_on_grid(const TorusFunction& f, bool subtract_mean) {
  const int d = f.dim();
  if (d > 3) throw UnsupportedDimension("torus: sup sampling supports d <= 3");
  int n = std::max(64, static_cast<int>(std::ceil(8 * f.band_limit())) + 1);
  if (d == 3) n = std::min(n, 128);
  const Complex m0 = subtract_mean ? f.mean() : Complex{0, 0};
  double sup = 0;
  Vec y(d);
  const int n1 = d >= 2 ? n : 1;
  const int n2 = d >= 3 ? n : 1;
  for (int i = 0; i < n; ++i) {
    y[0] = (i + 0.381966) / n;  // offset dodges exact lattice alignments
    for (int j = 0; j < n1; ++j) {
      if (d >= 2) y[1] = (j + 0.381966) / n;
      for (int k = 0; k < n2; ++k) {
        if (d >= 3) y[2] = (k + 0.381966) / n;
        sup = std::max(sup, std::abs(f.evaluate(y) - m0));
      }
    }
  }
  return sup;
}

}  // namespace

double TorusFunction::sup_norm() const { return sup_on_grid(*this, false); }

double TorusFunction::sup_minus_mean() const { return sup_on_grid(*this, true); }

void TorusFunction::validate() const {
  if (!real_valued_) return;
  double scale = coeff_abs_sum();
  if (scale == 0) return;
  for (const auto& [m, c] : coeffs_) {
    const Complex cneg = coeff(m.negated());
    if (std::abs(cneg - std::conj(c)) > 1e-12 * scale)
      throw ConfigError("torus: real-valued function violates c_{-m} = conj(c_m)");
  }
}

TorusFunction TorusFunction::from_json(const nlohmann::json& j) {
  if (!j.contains("dim") || !j.contains("coeffs"))
    throw ConfigError("torus: JSON needs 'dim' and 'coeffs'");
  const int dim = j.at("dim").get<int>();
  const bool real_valued = j.value("real_valued", false);
  TorusFunction f(dim, real_valued);
  for (const auto& e : j.at("coeffs")) {
    const auto mv = e.at("m").get<std::vector<int>>();
    if (static_cast<int>(mv.size()) != dim)
      throw ConfigError("torus: coefficient mode length != dim");
    Mode m;
    m.dim = dim;
    for (int i = 0; i < dim; ++i) m[i] = mv[i];
    if (f.coeffs_.count(m)) throw ConfigError("torus: duplicate mode in JSON");
    f.set_coeff(m, Complex(e.value("re", 0.0), e.value("im", 0.0)));
  }
  f.validate();
  return f;
}

nlohmann::json TorusFunction::to_json() const {
  nlohmann::json j;
  j["dim"] = dim_;
  if (real_valued_) j["real_valued"] = true;
  auto arr = nlohmann::json::array();
  for (const auto& [m, c] : coeffs_) {
    nlohmann::json e;
    std::vector<int> mv(m.m.begin(), m.m.begin() + dim_);
    e["m"] = mv;
    e["re"] = c.real();
    e["im"] = c.imag();
    arr.push_back(e);
  }
  j["coeffs"] = arr;
  return j;
}

BoundaryData BoundaryData::from_torus(const TorusFunction& g) {
  BoundaryData b(g.dim());
  for (const auto& [m, c] : g.coeffs()) b.add_mode(m, c);
  b.pure_ = g;
  return b;
}

void BoundaryData::add_mode(const Mode& m, Complex constant_coeff) {
  const Complex c = constant_coeff;
  entries_.push_back(Entry{m, [c](const Vec&) { return c; }, 0});
}

void BoundaryData::add_mode(const Mode& m, SlowCoeff coeff, int slow_band) {
  entries_.push_back(Entry{m, std::move(coeff), slow_band});
}

Complex BoundaryData::evaluate(const Vec& x, double eps) const {
  Complex s{0, 0};
  for (const auto& e : entries_) s += e.coeff(x) * unit_character(e.mode.dot(x) / eps);
  return s;
}

Complex BoundaryData::mean_part(const Vec& x) const {
  Complex s{0, 0};
  for (const auto& e : entries_)
    if (e.mode.is_zero()) s += e.coeff(x);
  return s;
}

TorusFunction BoundaryData::torus_at(const Vec& x) const {
  TorusFunction f(dim_);
  for (const auto& e : entries_) f.add_coeff(e.mode, e.coeff(x));
  return f;
}

double BoundaryData::max_band() const {
  double b = 0;
  for (const auto& e : entries_) b = std::max(b, e.mode.norm());
  return b;
}

int BoundaryData::max_slow_band() const {
  int b = 0;
  for (const auto& e : entries_) b = std::max(b, e.slow_band);
  return b;
}

std::optional<Vec> BoundaryData::common_axis() const {
  Mode axis;
  bool found = false;
  for (const auto& e : entries_) {
    if (e.mode.is_zero()) continue;
    if (!found) {
      axis = e.mode;
      found = true;
      continue;
    }
    // parallel iff all 2x2 minors vanish
    for (int i = 0; i < dim_; ++i)
      for (int j = i + 1; j < dim_; ++j)
        if (axis[i] * e.mode[j] - axis[j] * e.mode[i] != 0) return std::nullopt;
  }
  if (!found) return std::nullopt;
  Vec a(dim_);
  for (int i = 0; i < dim_; ++i) a[i] = axis[i];
  return a.normalized();
}

}  // namespace homog
