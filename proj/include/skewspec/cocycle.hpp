#pragma once

#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

#include "skewspec/group_rep.hpp"
#include "skewspec/linalg.hpp"
#include "skewspec/torus_flow.hpp"

namespace skewspec {

/// phi(x) = B x + eta(x) (mod 1) with B a d' x d integer matrix (row-major
/// rows of length d) and eta a vector of d' real trigonometric polynomials.
struct AbelianAffine {
  std::vector<std::vector<int>> B;
  std::vector<TrigPoly> eta;
};

/// phi(x) = h diag(e^{2 pi i (b.x + eta(x))}, e^{-2 pi i (b.x + eta(x))}) h*.
struct Su2Diag {
  CMatrix h = CMatrix::identity(2);
  std::vector<int> b;
  TrigPoly eta{1};
};

/// phi(x) = h diag(e^{2 pi i (b1.x + eta1(x))}, e^{2 pi i (b2.x + eta2(x))}) h*.
struct U2Diag {
  CMatrix h = CMatrix::identity(2);
  std::vector<int> b1;
  std::vector<int> b2;
  TrigPoly eta1{1};
  TrigPoly eta2{1};
};

/// Frame in which representation matrices of phi are expressed. `Diagonal`
/// replaces pi by the equivalent representation pi(h)* pi(.) pi(h), which
/// makes pi o phi diagonal for the SU(2)/U(2) families; `Raw` keeps pi.
enum class Frame { Diagonal, Raw };

const char* to_string(Frame f) noexcept;

/// A parametric cocycle phi: T^d -> G with closed-form Lie derivatives.
class Cocycle {
 public:
  using Family = std::variant<AbelianAffine, Su2Diag, U2Diag>;

  explicit Cocycle(Family family);

  const Family& family() const noexcept { return family_; }
  GroupTag tag() const noexcept;
  std::size_t base_dim() const noexcept { return base_dim_; }
  /// d' for the abelian family, 1 otherwise.
  std::size_t group_torus_dim() const noexcept;

  GroupElement evaluate(const TorusPoint& x) const;

  /// The conjugator h (identity for the abelian family).
  GroupElement conjugator() const;

  /// Throws unless pi is a representation of this cocycle's group.
  void check_compatible(const Irrep& pi) const;

  /// Bound on |k|_inf of the Fourier modes of pi o phi coming from the
  /// linear part, plus the eta support width when eta is present.
  int frequency_bound(const Irrep& pi) const;

 private:
  Family family_;
  std::size_t base_dim_;
};

/// Pointwise cocycle evaluator; used for cohomologous cocycles, which leave
/// the parametric families.
using CocycleEvaluator = std::function<GroupElement(const TorusPoint&)>;

/// A transfer function zeta: T^d -> G, either a parametric family or a
/// constant element.
class TransferFunction {
 public:
  static TransferFunction from_cocycle(Cocycle c);
  static TransferFunction constant(GroupElement g);

  GroupElement operator()(const TorusPoint& x) const { return eval_(x); }
  GroupTag tag() const noexcept { return tag_; }

 private:
  TransferFunction(GroupTag tag, CocycleEvaluator eval) : tag_(tag), eval_(std::move(eval)) {}
  GroupTag tag_;
  CocycleEvaluator eval_;
};

inline GroupElement evaluate(const Cocycle& phi, const TorusPoint& x) { return phi.evaluate(x); }

/// phi^(n)(x): phi(x) phi(F_1 x) ... phi(F_{n-1} x) for n >= 1, e_G for n = 0,
/// and (phi(F_n x) ... phi(F_{-1} x))^{-1} for n <= -1.
GroupElement iterate(const Cocycle& phi, const TranslationFlow& flow, long n, const TorusPoint& x);
GroupElement iterate(const CocycleEvaluator& phi, GroupTag tag, std::size_t torus_dim,
                     const TranslationFlow& flow, long n, const TorusPoint& x);

/// Walks phi^(n)(x) for n = 0, 1, 2, ... (or 0, -1, -2, ... when
/// `backward`) with one group multiplication per step.
class CocycleWalk {
 public:
  CocycleWalk(const Cocycle& phi, const TranslationFlow& flow, TorusPoint x, bool backward = false);

  long index() const noexcept { return index_; }
  /// phi^(index)(x).
  GroupElement value() const;
  void advance();

 private:
  const Cocycle* phi_;
  const TranslationFlow* flow_;
  TorusPoint x_;
  bool backward_;
  long index_ = 0;
  GroupElement acc_;
};

/// Distance between phi^(m+n)(x) and phi^(m)(x) phi^(n)(F_m x).
double cocycle_identity_check(const Cocycle& phi, const TranslationFlow& flow, long m, long n,
                              const TorusPoint& x);

/// x -> zeta(x)^{-1} xi(x) zeta(F_1 x).
CocycleEvaluator conjugate_cohomologous(const Cocycle& xi, const TransferFunction& zeta,
                                        const TranslationFlow& flow);

/// pi(g) in the requested frame: pi(h* g h) for Frame::Diagonal.
CMatrix represent_in_frame(const Cocycle& phi, const Irrep& pi, const GroupElement& g, Frame frame);

/// (pi o phi)(x) in the requested frame.
CMatrix rep_of_cocycle(const Cocycle& phi, const Irrep& pi, const TorusPoint& x,
                       Frame frame = Frame::Diagonal);

/// L_Y(pi o phi)(x), analytic: every family is a constant conjugation of
/// diagonal phases whose exponents are linear plus a trigonometric polynomial.
CMatrix lie_derivative_of_rep(const Cocycle& phi, const Irrep& pi, const TranslationFlow& flow,
                              const TorusPoint& x, Frame frame = Frame::Diagonal);

/// (pi o phi)(x) and L_Y(pi o phi)(x) from a single evaluation.
struct RepJet {
  CMatrix value;
  CMatrix derivative;
};
RepJet rep_jet(const Cocycle& phi, const Irrep& pi, const TranslationFlow& flow, const TorusPoint& x,
               Frame frame = Frame::Diagonal);

}  // namespace skewspec
