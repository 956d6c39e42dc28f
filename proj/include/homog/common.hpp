#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace homog {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// e^{2*pi*i*t}, the character used for all Fourier modes.
inline Complex unit_character(double t) {
  const double a = kTwoPi * t;
  return {std::cos(a), std::sin(a)};
}

// Small fixed-capacity point/vector in R^d, d <= 4. Value type, no allocation.
class Vec {
 public:
  Vec() = default;
  explicit Vec(int dim) : dim_(dim) { check_dim(dim); }
  Vec(std::initializer_list<double> xs) : dim_(static_cast<int>(xs.size())) {
    check_dim(dim_);
    int i = 0;
    for (double x : xs) v_[i++] = x;
  }

  int dim() const { return dim_; }
  double operator[](int i) const { return v_[i]; }
  double& operator[](int i) { return v_[i]; }

  double dot(const Vec& o) const {
    double s = 0;
    for (int i = 0; i < dim_; ++i) s += v_[i] * o.v_[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }

  Vec operator+(const Vec& o) const {
    Vec r(dim_);
    for (int i = 0; i < dim_; ++i) r.v_[i] = v_[i] + o.v_[i];
    return r;
  }
  Vec operator-(const Vec& o) const {
    Vec r(dim_);
    for (int i = 0; i < dim_; ++i) r.v_[i] = v_[i] - o.v_[i];
    return r;
  }
  Vec operator*(double a) const {
    Vec r(dim_);
    for (int i = 0; i < dim_; ++i) r.v_[i] = v_[i] * a;
    return r;
  }
  Vec normalized() const {
    const double n = norm();
    return *this * (1.0 / n);
  }

  static Vec zero(int dim) { return Vec(dim); }
  static Vec unit(int dim, int axis) {
    Vec r(dim);
    r[axis] = 1.0;
    return r;
  }

 private:
  static void check_dim(int d) {
    if (d < 1 || d > 4) throw std::invalid_argument("Vec: dim must be in [1,4]");
  }
  int dim_{0};
  std::array<double, 4> v_{};
};

inline Vec operator*(double a, const Vec& v) { return v * a; }

// Integer lattice vector m in Z^d, d <= 4. Unused trailing entries stay zero so
// the lexicographic array order gives a deterministic total order.
struct Mode {
  int dim{0};
  std::array<int, 4> m{};

  Mode() = default;
  Mode(int d, std::array<int, 4> mm) : dim(d), m(mm) {}
  Mode(std::initializer_list<int> xs) : dim(static_cast<int>(xs.size())) {
    int i = 0;
    for (int x : xs) m[i++] = x;
  }

  int operator[](int i) const { return m[i]; }
  int& operator[](int i) { return m[i]; }

  bool is_zero() const {
    for (int i = 0; i < dim; ++i)
      if (m[i] != 0) return false;
    return true;
  }
  double norm() const {
    double s = 0;
    for (int i = 0; i < dim; ++i) s += double(m[i]) * m[i];
    return std::sqrt(s);
  }
  double dot(const Vec& y) const {
    double s = 0;
    for (int i = 0; i < dim; ++i) s += m[i] * y[i];
    return s;
  }
  Mode negated() const {
    Mode r = *this;
    for (int i = 0; i < dim; ++i) r.m[i] = -m[i];
    return r;
  }
  Mode operator+(const Mode& o) const {
    Mode r = *this;
    for (int i = 0; i < dim; ++i) r.m[i] = m[i] + o.m[i];
    return r;
  }

  friend bool operator<(const Mode& a, const Mode& b) { return a.m < b.m; }
  friend bool operator==(const Mode& a, const Mode& b) {
    return a.dim == b.dim && a.m == b.m;
  }
};

}  // namespace homog
