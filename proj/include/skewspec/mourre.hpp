#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "skewspec/cocycle.hpp"
#include "skewspec/group_rep.hpp"
#include "skewspec/linalg.hpp"
#include "skewspec/torus_flow.hpp"

namespace skewspec {

/// Weights a_k of the diagonal conjugate operator, one per basis index.
struct ConjugateWeights {
  std::vector<double> a;
};

inline constexpr double kCommutationTolerance = 1e-9;
inline constexpr double kDefaultPositivityTolerance = 1e-6;

/// max over grid points and index pairs of |(a_k - a_l) (pi o phi)(x)_{lk}|.
double commutation_check(const Cocycle& phi, const Irrep& pi, const ConjugateWeights& a,
                         const TorusGrid& grid, Frame frame = Frame::Diagonal);

/// M(x)_{kl} = -i a_k (L_Y(pi o phi)(x) (pi o phi)(x)*)_{kl}. Throws
/// CommutationViolation when the commutation residual at x exceeds 1e-9.
CMatrix matrix_M(const Cocycle& phi, const Irrep& pi, const ConjugateWeights& a,
                 const TranslationFlow& flow, const TorusPoint& x, Frame frame = Frame::Diagonal);

/// M_N(x) = (1/N) sum_{n<N} pi(phi^(n)(x)) M(F_n x) pi(phi^(n)(x))*, with
/// phi^(n) accumulated in the group.
CMatrix matrix_M_N_average(const Cocycle& phi, const Irrep& pi, const ConjugateWeights& a,
                           const TranslationFlow& flow, std::size_t N, const TorusPoint& x,
                           Frame frame = Frame::Diagonal);

/// M_N(x) = -i D_a (1/N) L_Y(P_N)(x) P_N(x)*, where P_N is the N-fold product
/// of the matrices pi o phi o F_n and L_Y(P_N) is expanded by the Leibniz rule.
CMatrix matrix_M_N_degree(const Cocycle& phi, const Irrep& pi, const ConjugateWeights& a,
                          const TranslationFlow& flow, std::size_t N, const TorusPoint& x,
                          Frame frame = Frame::Diagonal);

/// Weight choice that normalises M (orthonormal basis, so no factorials):
///   torus:  a_1 = 1 / (2 pi y.(B^T q))
///   SU(2):  a_j = (2j - n) / (2 pi y.b)
///   U(2):   a_j = ((2m-n)(b_+.y) + (2j-n)(b_-.y)) / pi
/// Throws DegenerateWeights naming the failed hypothesis.
ConjugateWeights canonical_weights(const Cocycle& phi, const Irrep& pi, const TranslationFlow& flow);

struct LambdaStar {
  std::size_t N = 1;
  double value = 0.0;
  TorusPoint argmin;
};

/// min over grid points of the smallest eigenvalue of M_N(x).
LambdaStar lambda_star_N(const Cocycle& phi, const Irrep& pi, const ConjugateWeights& a,
                         const TranslationFlow& flow, std::size_t N, const TorusGrid& grid,
                         Frame frame = Frame::Diagonal);

/// lambda_star_N for every N in `schedule` (ascending) from a single pass
/// over each orbit. The min-fold runs in grid order; ties keep the first point.
std::vector<LambdaStar> lambda_star_schedule(const Cocycle& phi, const Irrep& pi,
                                             const ConjugateWeights& a, const TranslationFlow& flow,
                                             const std::vector<std::size_t>& schedule,
                                             const TorusGrid& grid, Frame frame = Frame::Diagonal,
                                             double* hermiticity_residual_out = nullptr);

/// 1, 2, 4, ... up to N_max; N_max itself is appended when not a power of two.
std::vector<std::size_t> doubling_schedule(std::size_t N_max);

struct AdmissibleEntry {
  int m = 0;
  int n = 0;
  double infimum = 0.0;
  bool operator==(const AdmissibleEntry&) const = default;
};

/// inf_k ((2m-n)(b_+.y) + (2k-n)(b_-.y))^2.
double u2_infimum(std::span<const int> b1, std::span<const int> b2, std::span<const double> y, int m,
                  int n);

/// All (m, n) in [m_lo, m_hi] x [n_lo, n_hi] whose infimum is > 0.
std::vector<AdmissibleEntry> u2_admissible_set(std::span<const int> b1, std::span<const int> b2,
                                               std::span<const double> y, int m_lo, int m_hi,
                                               int n_lo, int n_hi);

enum class Verdict { PurelyAC, Inconclusive };

const char* to_string(Verdict v) noexcept;

struct VerdictOptions {
  std::size_t N_max = 256;
  double pos_tol = kDefaultPositivityTolerance;
  std::optional<ConjugateWeights> weights;
  Frame frame = Frame::Diagonal;
};

struct MourreReport {
  Irrep pi;
  std::optional<ConjugateWeights> weights;
  std::vector<std::size_t> grid;
  Frame frame = Frame::Diagonal;
  double pos_tol = kDefaultPositivityTolerance;
  std::vector<LambdaStar> table;
  /// max over the table of |M_N(average) - M_N(degree)| at each minimiser.
  double degree_residual = 0.0;
  double commutation_residual = 0.0;
  double hermiticity_residual = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<std::size_t> verdict_N;
  bool lebesgue = false;
  std::vector<std::string> notes;
};

/// Evaluates lambda_{*,N} on the doubling schedule and reports PurelyAC at
/// the first N with lambda_{*,N} > pos_tol. Never PurelyAC when the
/// commutation residual exceeds 1e-9. `lebesgue` is set for PurelyAC blocks
/// when the flow is declared ergodic.
MourreReport verdict(const Cocycle& phi, const Irrep& pi, const TranslationFlow& flow,
                     const TorusGrid& grid, const VerdictOptions& opts = {});

struct DiniSample {
  double t = 0.0;
  double value = 0.0;
};

/// Heuristic only: t -> (1/t) sup_x ||L_Y(pi o phi)(F_t x) - L_Y(pi o phi)(x)||_inf
/// over the grid. Bounded values are consistent with the Dini condition; they
/// do not prove it.
std::vector<DiniSample> dini_diagnostic(const Cocycle& phi, const Irrep& pi, const TranslationFlow& flow,
                                        const std::vector<double>& t_grid, const TorusGrid& grid,
                                        Frame frame = Frame::Diagonal);

/// `count` values log-spaced from 1 down to t_min.
std::vector<double> log_spaced_times(std::size_t count, double t_min);

}  // namespace skewspec
