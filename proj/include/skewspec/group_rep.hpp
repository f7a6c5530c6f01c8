#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "skewspec/linalg.hpp"
#include "skewspec/random.hpp"

namespace skewspec {

enum class GroupTag { Torus, Su2, U2 };

const char* to_string(GroupTag tag) noexcept;

/// Element of T^{d'} (phase vector in [0,1)^{d'}), SU(2) or U(2).
class GroupElement {
 public:
  static GroupElement torus(std::vector<double> phases);
  /// Validates unitarity and det = 1 within 1e-9.
  static GroupElement su2(CMatrix m);
  /// Validates unitarity within 1e-9.
  static GroupElement u2(CMatrix m);
  static GroupElement identity(GroupTag tag, std::size_t torus_dim = 1);

  /// Construction without validation; used for products of valid elements.
  static GroupElement unchecked(GroupTag tag, CMatrix m);

  GroupTag tag() const noexcept { return tag_; }
  std::span<const double> phases() const noexcept { return phases_; }
  std::size_t torus_dim() const noexcept { return phases_.size(); }
  const CMatrix& matrix() const noexcept { return matrix_; }

  GroupElement inverse() const;

 private:
  GroupElement(GroupTag tag, std::vector<double> phases, CMatrix m)
      : tag_(tag), phases_(std::move(phases)), matrix_(std::move(m)) {}

  GroupTag tag_;
  std::vector<double> phases_;
  CMatrix matrix_;
};

/// Group law. Matrix products are pulled back to the unitary group by one
/// Newton step whenever ||U*U - I|| exceeds 1e-13.
GroupElement group_multiply(const GroupElement& g, const GroupElement& h);

/// Max entrywise modulus of the difference for matrix groups; max mod-1
/// coordinate distance for the torus.
double group_distance(const GroupElement& g, const GroupElement& h);

struct AbelianChar {
  std::vector<int> q;
};
struct Su2Irrep {
  int n = 0;
};
struct U2Irrep {
  int m = 0;
  int n = 0;
};

/// Irreducible unitary representation: a character chi_q of T^{d'}, the
/// SU(2) family pi^(n), or rho_{2m-n} (x) pi^(n) of U(2).
class Irrep {
 public:
  using Kind = std::variant<AbelianChar, Su2Irrep, U2Irrep>;

  Irrep(Kind kind);  // NOLINT(google-explicit-constructor)

  const Kind& kind() const noexcept { return kind_; }
  GroupTag tag() const noexcept;
  std::size_t dim() const noexcept;
  /// Compact label such as "q=1,-2", "n=3" or "m=-1,n=2".
  std::string label() const;

  bool operator==(const Irrep&) const = default;

 private:
  Kind kind_;
};

inline constexpr int kMaxSu2Index = 20;

/// pi^(n)(g) in the orthonormal monomial basis e_k = z1^k z2^(n-k) / sqrt(k!(n-k)!),
/// where (pi^(n)(g) p)(z1, z2) = p(g11 z1 + g21 z2, g12 z1 + g22 z2).
/// For diagonal g = diag(a, conj a) this is diag(a^(2j-n)).
CMatrix su2_irrep(int n, const GroupElement& g);

/// (rho_{2m-n} (x) pi^(n))(g) with g = z g', z = principal sqrt(det g).
CMatrix u2_irrep(int m, int n, const GroupElement& g);

/// Same as u2_irrep with a caller-chosen square root z of det g. Both roots
/// give bit-identical matrices.
CMatrix u2_irrep_with_root(int m, int n, const GroupElement& g, Complex z);

/// chi_q(z) = exp(2 pi i q.z).
Complex char_abelian(std::span<const int> q, const GroupElement& z);

/// Generic evaluation pi(g) as a d_pi x d_pi matrix.
CMatrix represent(const Irrep& pi, const GroupElement& g);

/// Haar-distributed element. SU(2) samples come from four normalised
/// Gaussians; U(2) multiplies such a sample by an independent uniform phase.
GroupElement haar_sample(GroupTag tag, std::size_t torus_dim, Rng& rng);

/// Monte Carlo estimate of <pi_{jm}, pi_{jk}> = int pi_{jm} conj(pi_{jk}) dmu_G,
/// which equals delta_{mk} / d_pi.
Complex peter_weyl_inner(const Irrep& pi, std::size_t j, std::size_t m, std::size_t k,
                         std::size_t samples, Rng& rng);

}  // namespace skewspec
