#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "skewspec/linalg.hpp"

namespace skewspec {

/// Reduces a real number into [0, 1).
double wrap_unit(double v) noexcept;

/// Distance on R/Z between two coordinates.
double circle_distance(double a, double b) noexcept;

/// A point of the torus T^d with every coordinate kept in [0, 1).
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> coords);

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

 private:
  std::vector<double> coords_;
};

/// Translation flow F_t(x) = x + t y (mod 1) on T^d.
///
/// `ergodic_declared` records the caller's claim that y_1, ..., y_d, 1 are
/// rationally independent. It is metadata; nothing in the library infers it.
class TranslationFlow {
 public:
  TranslationFlow(std::vector<double> velocity, bool ergodic_declared);

  std::size_t dim() const noexcept { return y_.size(); }
  std::span<const double> velocity() const noexcept { return y_; }
  bool ergodic_declared() const noexcept { return ergodic_declared_; }

 private:
  std::vector<double> y_;
  bool ergodic_declared_;
};

TorusPoint flow_advance(const TorusPoint& x, double t, const TranslationFlow& flow);

using Frequency = std::vector<int>;

/// Finite trigonometric polynomial f(x) = sum_k c_k exp(2 pi i k.x) on T^d.
class TrigPoly {
 public:
  explicit TrigPoly(std::size_t dim) : dim_(dim) {}

  static TrigPoly constant(std::size_t dim, Complex c);
  /// Single Fourier mode c exp(2 pi i k.x).
  static TrigPoly mode(Frequency k, Complex c = 1.0);
  /// Real polynomial amp * cos(2 pi k.x + phase).
  static TrigPoly cosine(Frequency k, double amp, double phase = 0.0);

  std::size_t dim() const noexcept { return dim_; }
  const std::map<Frequency, Complex>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Adds c to the coefficient at k; exact zeros are dropped.
  void add_term(const Frequency& k, Complex c);
  Complex coefficient(const Frequency& k) const;

  Complex operator()(const TorusPoint& x) const;
  /// Real part of the value; meaningful for real-valued polynomials.
  double real_value(const TorusPoint& x) const { return (*this)(x).real(); }

  /// True when c_{-k} = conj(c_k) within tol for every frequency.
  bool is_real(double tol = 1e-14) const;
  /// Largest |k_i| over the support (0 for the zero polynomial).
  int max_frequency() const noexcept;
  /// Sum of |c_k|^2, the squared L^2 norm on the torus.
  double l2_norm_squared() const noexcept;

  TrigPoly& operator+=(const TrigPoly& rhs);
  TrigPoly& operator*=(Complex s);
  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
  friend TrigPoly operator*(Complex s, TrigPoly a) { return a *= s; }

  bool operator==(const TrigPoly&) const = default;

 private:
  std::size_t dim_;
  std::map<Frequency, Complex> terms_;
};

/// L_Y f = y . grad f; coefficient 2 pi i (k.y) c_k at frequency k.
TrigPoly lie_derivative(const TrigPoly& f, const TranslationFlow& flow);

/// (L_Y f)(x) without materialising the derivative polynomial.
Complex lie_derivative_at(const TrigPoly& f, const TranslationFlow& flow, const TorusPoint& x);

/// (1/N) sum_{n<N} f(F_n(x)).
Complex birkhoff_average(const TrigPoly& f, const TranslationFlow& flow, std::size_t N,
                         const TorusPoint& x);

/// |(1/N) sum_{n<N} exp(2 pi i n k.y)|. Near 0 is consistent with ergodicity
/// at frequency k; near 1 flags a resonance. k = 0 is rejected.
double equidistribution_diagnostic(const TranslationFlow& flow, const Frequency& k,
                                   std::size_t N);

/// Uniform tensor grid on T^d: coordinate i takes the values r / sizes[i].
class TorusGrid {
 public:
  explicit TorusGrid(std::vector<std::size_t> sizes);
  static TorusGrid uniform(std::size_t dim, std::size_t per_dim);

  std::size_t dim() const noexcept { return sizes_.size(); }
  std::size_t count() const noexcept { return count_; }
  std::span<const std::size_t> sizes() const noexcept { return sizes_; }
  TorusPoint point(std::size_t index) const;

 private:
  std::vector<std::size_t> sizes_;
  std::size_t count_;
};

}  // namespace skewspec
