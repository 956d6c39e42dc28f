#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "homog/common.hpp"

namespace homog {

// Finite Fourier series on the d-torus:
//   f(y) = sum_m c_m e^{2 pi i m.y},  m in Z^d, finitely many c_m != 0.
// Coefficients are stored sparsely in a sorted (lexicographic) map, so every
// sum over modes has a fixed, reproducible order.
class TorusFunction {
 public:
  explicit TorusFunction(int dim, bool real_valued = false);

  int dim() const { return dim_; }
  bool real_valued() const { return real_valued_; }

  // Adds into the coefficient at m (coefficients accumulate).
  void add_coeff(const Mode& m, Complex c);
  void set_coeff(const Mode& m, Complex c);
  Complex coeff(const Mode& m) const;
  const std::map<Mode, Complex>& coeffs() const { return coeffs_; }

  Complex evaluate(const Vec& y) const;
  Complex mean() const;                 // = c_0
  double decay_sum(double tau) const;   // sum_{m!=0} |c_m| / |m|^tau
  double lipschitz_bound() const;       // sum_m 2 pi |m| |c_m|

  // max_m |m| (Euclidean) over stored nonzero modes; 0 for constants.
  double band_limit() const;
  double coeff_abs_sum() const;  // sum |c_m|
  // sup_{T^d} |f| and sup |f - mean| by dense grid sampling (d <= 3).
  double sup_norm() const;
  double sup_minus_mean() const;

  // Checks the real-valued symmetry c_{-m} = conj(c_m) when declared real;
  // throws ConfigError on violation.
  void validate() const;

  // JSON: { "dim": d, "coeffs": [ { "m": [...], "re": r, "im": i }, ... ] }.
  // Rejects duplicate m entries.
  static TorusFunction from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  int dim_;
  bool real_valued_;
  std::map<Mode, Complex> coeffs_;
};

// Boundary data g(x, y), 1-periodic in y, represented as a finite list of
// oscillating modes with slowly varying coefficients:
//   g(x, y) = sum_k c_k(x) e^{2 pi i m_k . y}.
// Evaluation of the trace g_eps(x) = g(x, x/eps) and of the averaged data
// gbar(x) = sum over zero modes needs only this list.
class BoundaryData {
 public:
  using SlowCoeff = std::function<Complex(const Vec& x)>;

  struct Entry {
    Mode mode;
    SlowCoeff coeff;
    // Nominal angular band of coeff along the boundary (0 for constants);
    // used by spectral analysis to size azimuthal grids.
    int slow_band{0};
  };

  explicit BoundaryData(int dim) : dim_(dim) {}

  // Constant-in-x coefficients taken from a plain torus function.
  static BoundaryData from_torus(const TorusFunction& g);

  void add_mode(const Mode& m, Complex constant_coeff);
  void add_mode(const Mode& m, SlowCoeff coeff, int slow_band);

  int dim() const { return dim_; }
  const std::vector<Entry>& entries() const { return entries_; }

  // g(x, x/eps)
  Complex evaluate(const Vec& x, double eps) const;
  // gbar(x): contribution of the zero modes only
  Complex mean_part(const Vec& x) const;
  // the induced torus function at a fixed x (finite band by construction)
  TorusFunction torus_at(const Vec& x) const;

  // The torus function the data was built from, when constant-in-x.
  const std::optional<TorusFunction>& pure() const { return pure_; }

  double max_band() const;           // max |m| over entries
  int max_slow_band() const;
  // If every nonzero mode is parallel to one lattice direction, returns that
  // unit axis; otherwise nullopt. Ball solvers align the grid pole with it.
  std::optional<Vec> common_axis() const;

 private:
  int dim_;
  std::vector<Entry> entries_;
  std::optional<TorusFunction> pure_;
};

}  // namespace homog
