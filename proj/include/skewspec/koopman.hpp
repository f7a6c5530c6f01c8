#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "skewspec/cocycle.hpp"
#include "skewspec/group_rep.hpp"
#include "skewspec/torus_flow.hpp"

namespace skewspec {

/// psi = sum_k phi_k (x) pi_{jk} in the block H^(pi)_j, stored through its
/// component functions phi_k on the base torus.
class ObservableBlock {
 public:
  ObservableBlock(Cocycle cocycle, TranslationFlow flow, Irrep pi, std::size_t row,
                  std::vector<TrigPoly> components, Frame frame = Frame::Diagonal);

  /// Every component equal to exp(2 pi i x_1).
  static ObservableBlock first_mode(Cocycle cocycle, TranslationFlow flow, Irrep pi, std::size_t row,
                                    Frame frame = Frame::Diagonal);

  const Cocycle& cocycle() const noexcept { return cocycle_; }
  const TranslationFlow& flow() const noexcept { return flow_; }
  const Irrep& irrep() const noexcept { return pi_; }
  std::size_t row() const noexcept { return row_; }
  Frame frame() const noexcept { return frame_; }
  const std::vector<TrigPoly>& components() const noexcept { return components_; }

  /// ||psi||^2 = (1/d_pi) sum_k ||phi_k||^2, exact by Parseval.
  double norm_squared() const noexcept;

  /// Q_{k0} psi: every component multiplied by exp(2 pi i x_{k0}) (k0 is 0-based).
  ObservableBlock modulated(std::size_t k0) const;

 private:
  Cocycle cocycle_;
  TranslationFlow flow_;
  Irrep pi_;
  std::size_t row_;
  std::vector<TrigPoly> components_;
  Frame frame_;
};

/// Pointwise evaluator of a block's component vector.
using BlockEvaluator = std::function<std::vector<Complex>(const TorusPoint&)>;

/// Components of (U_{pi,j})^n psi: l-th entry sum_k phi_k(F_n x) pi(phi^(n)(x))_{lk}.
BlockEvaluator apply_koopman_power(const ObservableBlock& psi, long n);

struct QuadratureSpec {
  std::vector<std::size_t> sizes;
};

inline constexpr std::size_t kMaxDefaultQuadraturePoints = std::size_t{1} << 18;

/// Per-dimension size max(256, 4 f_max (n_max + 1)), with the total number of
/// points capped at kMaxDefaultQuadraturePoints.
QuadratureSpec default_quadrature(const ObservableBlock& psi, std::size_t n_max);

/// (1/d_pi) sum_l int |v_l|^2 by the rectangle rule.
double quadrature_norm_squared(const BlockEvaluator& v, std::size_t d, std::size_t base_dim,
                               const QuadratureSpec& quad);

/// c_n = <U^n psi, psi> for |n| <= n_max,
///   c_n = (1/d_pi) sum_{k,l} int phi_k(F_n x) pi(phi^(n)(x))_{lk} conj(phi_l(x)) dx.
struct CorrelationSeries {
  std::size_t n_max = 0;
  std::vector<Complex> values;  // index n + n_max
  QuadratureSpec quad;
  std::vector<std::string> warnings;

  Complex at(long n) const { return values.at(static_cast<std::size_t>(n + static_cast<long>(n_max))); }
};

/// Rectangle rule on the tensor grid with one group multiplication per step.
/// Partial sums over fixed 256-point chunks are combined by a pairwise tree,
/// so the result does not depend on how chunks are scheduled.
CorrelationSeries correlation_sequence(const ObservableBlock& psi, std::size_t n_max, const QuadratureSpec& quad);

/// max_n |c_n(Q_{k0} psi) - exp(2 pi i n y_{k0}) c_n(psi)|.
double modulation_check(const ObservableBlock& psi, std::size_t k0, std::size_t n_max, const QuadratureSpec& quad);

/// (1/(2 n_max + 1)) sum_{|n| <= n_max} |c_n|^2.
double wiener_average(const CorrelationSeries& c);

/// CSV with header "n,re,im" and one row per n, doubles printed round-trip exact.
std::string to_csv(const CorrelationSeries& c);

}  // namespace skewspec
