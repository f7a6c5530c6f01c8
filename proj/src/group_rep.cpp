#include "skewspec/group_rep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "skewspec/error.hpp"
#include "skewspec/torus_flow.hpp"

namespace skewspec {

namespace {

constexpr double kElementTolerance = 1e-9;
constexpr double kRenormalizeThreshold = 1e-13;

void require_matrix_group(const GroupElement& g, GroupTag expected, const char* where) {
  if (g.tag() != expected) {
    throw Error(ErrorCode::TagMismatch, std::string(where) + ": expected " + to_string(expected) +
                                            " element, got " + to_string(g.tag()));
  }
}

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t b = 1;
  for (int i = 1; i <= k; ++i) b = b * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return b;
}

// powers[e] = v^e by repeated multiplication, so that negating v negates the
// odd powers exactly.
std::vector<Complex> power_table(Complex v, int max_exp) {
  std::vector<Complex> p(static_cast<std::size_t>(max_exp) + 1);
  p[0] = 1.0;
  for (int e = 1; e <= max_exp; ++e) p[e] = p[e - 1] * v;
  return p;
}

Complex integer_power(Complex z, int e) {
  const Complex base = e < 0 ? std::conj(z) / std::norm(z) : z;
  Complex r = 1.0;
  for (int i = 0; i < std::abs(e); ++i) r *= base;
  return r;
}

void check_su2_index(int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "su2_irrep: n must be >= 0");
  if (n > kMaxSu2Index) {
    throw Error(ErrorCode::InvalidArgument,
                "su2_irrep: n = " + std::to_string(n) + " exceeds the supported maximum " +
                    std::to_string(kMaxSu2Index));
  }
}

// Orthonormalised binomial-sum matrix elements; g is any 2x2 matrix.
CMatrix su2_matrix_elements(int n, const CMatrix& g) {
  const std::size_t dim = static_cast<std::size_t>(n) + 1;
  if (g(0, 1) == Complex(0.0) && g(1, 0) == Complex(0.0)) {
    // diagonal input: only the l = j = k terms survive
    CMatrix out(dim);
    Complex lead = 1.0;
    for (int j = 0; j <= n; ++j) {
      out(j, j) = lead * integer_power(g(1, 1), n - j);
      lead *= g(0, 0);
    }
    return out;
  }
  const auto p11 = power_table(g(0, 0), n);
  const auto p12 = power_table(g(0, 1), n);
  const auto p21 = power_table(g(1, 0), n);
  const auto p22 = power_table(g(1, 1), n);
  std::vector<double> weight(dim);
  for (int j = 0; j <= n; ++j)
    weight[j] = std::sqrt(static_cast<double>(factorial(j)) * static_cast<double>(factorial(n - j)));

  CMatrix out(dim);
  for (int j = 0; j <= n; ++j) {
    for (int k = 0; k <= n; ++k) {
      Complex sum = 0.0;
      const int lo = std::max(0, j + k - n);
      const int hi = std::min(j, k);
      for (int l = lo; l <= hi; ++l) {
        const double c = static_cast<double>(binomial(k, l) * binomial(n - k, j - l));
        sum += c * (p11[l] * p12[j - l] * p21[k - l] * p22[n + l - k - j]);
      }
      out(j, k) = sum * (weight[j] / weight[k]);
    }
  }
  return out;
}

// rho_{2m-n}(z) pi^(n)(g / z) for a square root z of det g.
CMatrix u2_matrix_elements(int m, int n, const CMatrix& g, Complex z) {
  const Complex zinv = std::conj(z) / std::norm(z);
  CMatrix out = su2_matrix_elements(n, g * zinv);
  out *= integer_power(z, 2 * m - n);
  return out;
}

}  // namespace

const char* to_string(GroupTag tag) noexcept {
  switch (tag) {
    case GroupTag::Torus: return "torus";
    case GroupTag::Su2: return "su2";
    case GroupTag::U2: return "u2";
  }
  return "?";
}

GroupElement GroupElement::torus(std::vector<double> phases) {
  if (phases.empty()) throw Error(ErrorCode::InvalidArgument, "GroupElement::torus: dimension must be >= 1");
  for (auto& p : phases) p = wrap_unit(p);
  return GroupElement(GroupTag::Torus, std::move(phases), CMatrix());
}

GroupElement GroupElement::su2(CMatrix m) {
  if (m.size() != 2) throw Error(ErrorCode::InvalidElement, "SU(2) element must be 2x2");
  const double ures = unitarity_residual(m);
  const double dres = std::abs(determinant(m) - 1.0);
  if (ures > kElementTolerance || dres > kElementTolerance) {
    std::ostringstream os;
    os << "SU(2) element violates unitarity/det: |U*U-I| = " << ures << ", |det-1| = " << dres;
    throw Error(ErrorCode::InvalidElement, os.str());
  }
  return GroupElement(GroupTag::Su2, {}, std::move(m));
}

GroupElement GroupElement::u2(CMatrix m) {
  if (m.size() != 2) throw Error(ErrorCode::InvalidElement, "U(2) element must be 2x2");
  const double ures = unitarity_residual(m);
  if (ures > kElementTolerance) {
    std::ostringstream os;
    os << "U(2) element violates unitarity: |U*U-I| = " << ures;
    throw Error(ErrorCode::InvalidElement, os.str());
  }
  return GroupElement(GroupTag::U2, {}, std::move(m));
}

GroupElement GroupElement::identity(GroupTag tag, std::size_t torus_dim) {
  if (tag == GroupTag::Torus) return torus(std::vector<double>(torus_dim, 0.0));
  return GroupElement(tag, {}, CMatrix::identity(2));
}

GroupElement GroupElement::unchecked(GroupTag tag, CMatrix m) {
  if (tag == GroupTag::Torus) throw Error(ErrorCode::TagMismatch, "GroupElement::unchecked: matrix tag required");
  return GroupElement(tag, {}, std::move(m));
}

GroupElement GroupElement::inverse() const {
  if (tag_ == GroupTag::Torus) {
    std::vector<double> neg(phases_.size());
    std::transform(phases_.begin(), phases_.end(), neg.begin(), [](double p) { return -p; });
    return torus(std::move(neg));
  }
  return GroupElement(tag_, {}, matrix_.adjoint());
}

GroupElement group_multiply(const GroupElement& g, const GroupElement& h) {
  if (g.tag() != h.tag()) {
    throw Error(ErrorCode::TagMismatch,
                std::string("group_multiply: ") + to_string(g.tag()) + " * " + to_string(h.tag()));
  }
  if (g.tag() == GroupTag::Torus) {
    if (g.torus_dim() != h.torus_dim()) throw Error(ErrorCode::DimensionMismatch, "group_multiply: torus dimensions differ");
    std::vector<double> sum(g.torus_dim());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = g.phases()[i] + h.phases()[i];
    return GroupElement::torus(std::move(sum));
  }
  CMatrix p = g.matrix() * h.matrix();
  if (unitarity_residual(p) > kRenormalizeThreshold) p = newton_reunitarize(p);
  return GroupElement::unchecked(g.tag(), std::move(p));
}

double group_distance(const GroupElement& g, const GroupElement& h) {
  if (g.tag() != h.tag()) throw Error(ErrorCode::TagMismatch, "group_distance: tags differ");
  if (g.tag() == GroupTag::Torus) {
    if (g.torus_dim() != h.torus_dim()) throw Error(ErrorCode::DimensionMismatch, "group_distance: torus dimensions differ");
    double d = 0.0;
    for (std::size_t i = 0; i < g.torus_dim(); ++i)
      d = std::max(d, circle_distance(g.phases()[i], h.phases()[i]));
    return d;
  }
  return max_abs_diff(g.matrix(), h.matrix());
}

Irrep::Irrep(Kind kind) : kind_(std::move(kind)) {
  if (const auto* s = std::get_if<Su2Irrep>(&kind_)) check_su2_index(s->n);
  if (const auto* u = std::get_if<U2Irrep>(&kind_)) check_su2_index(u->n);
  if (const auto* a = std::get_if<AbelianChar>(&kind_)) {
    if (a->q.empty()) throw Error(ErrorCode::InvalidArgument, "AbelianChar: q must be nonempty");
  }
}

GroupTag Irrep::tag() const noexcept {
  switch (kind_.index()) {
    case 0: return GroupTag::Torus;
    case 1: return GroupTag::Su2;
    default: return GroupTag::U2;
  }
}

std::size_t Irrep::dim() const noexcept {
  if (const auto* s = std::get_if<Su2Irrep>(&kind_)) return static_cast<std::size_t>(s->n) + 1;
  if (const auto* u = std::get_if<U2Irrep>(&kind_)) return static_cast<std::size_t>(u->n) + 1;
  return 1;
}

std::string Irrep::label() const {
  std::ostringstream os;
  if (const auto* a = std::get_if<AbelianChar>(&kind_)) {
    os << "q=";
    for (std::size_t i = 0; i < a->q.size(); ++i) os << (i ? "," : "") << a->q[i];
  } else if (const auto* s = std::get_if<Su2Irrep>(&kind_)) {
    os << "n=" << s->n;
  } else {
    const auto& u = std::get<U2Irrep>(kind_);
    os << "m=" << u.m << ",n=" << u.n;
  }
  return os.str();
}

CMatrix su2_irrep(int n, const GroupElement& g) {
  require_matrix_group(g, GroupTag::Su2, "su2_irrep");
  check_su2_index(n);
  const double ures = unitarity_residual(g.matrix());
  const double dres = std::abs(determinant(g.matrix()) - 1.0);
  if (ures > kElementTolerance || dres > kElementTolerance) {
    throw Error(ErrorCode::InvalidElement, "su2_irrep: argument is not in SU(2)");
  }
  return su2_matrix_elements(n, g.matrix());
}

CMatrix u2_irrep_with_root(int m, int n, const GroupElement& g, Complex z) {
  require_matrix_group(g, GroupTag::U2, "u2_irrep");
  check_su2_index(n);
  if (unitarity_residual(g.matrix()) > kElementTolerance) {
    throw Error(ErrorCode::InvalidElement, "u2_irrep: argument is not unitary");
  }
  return u2_matrix_elements(m, n, g.matrix(), z);
}

CMatrix u2_irrep(int m, int n, const GroupElement& g) {
  require_matrix_group(g, GroupTag::U2, "u2_irrep");
  return u2_irrep_with_root(m, n, g, std::sqrt(determinant(g.matrix())));
}

Complex char_abelian(std::span<const int> q, const GroupElement& z) {
  if (z.tag() != GroupTag::Torus) throw Error(ErrorCode::TagMismatch, "char_abelian: torus element required");
  if (q.size() != z.torus_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "char_abelian: q has length " + std::to_string(q.size()) +
                                                  ", element has dimension " + std::to_string(z.torus_dim()));
  }
  double phase = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) phase += q[i] * z.phases()[i];
  return std::polar(1.0, kTwoPi * wrap_unit(phase));
}

CMatrix represent(const Irrep& pi, const GroupElement& g) {
  if (pi.tag() != g.tag()) {
    throw Error(ErrorCode::TagMismatch, std::string("represent: irrep of ") + to_string(pi.tag()) +
                                            " applied to " + to_string(g.tag()) + " element");
  }
  if (const auto* a = std::get_if<AbelianChar>(&pi.kind())) {
    CMatrix out(1);
    out(0, 0) = char_abelian(a->q, g);
    return out;
  }
  // Internal products are unitary to ~1e-13; skip the public validation.
  if (const auto* s = std::get_if<Su2Irrep>(&pi.kind())) return su2_matrix_elements(s->n, g.matrix());
  const auto& u = std::get<U2Irrep>(pi.kind());
  return u2_matrix_elements(u.m, u.n, g.matrix(), std::sqrt(determinant(g.matrix())));
}

GroupElement haar_sample(GroupTag tag, std::size_t torus_dim, Rng& rng) {
  if (tag == GroupTag::Torus) {
    std::vector<double> phases(torus_dim);
    for (auto& p : phases) p = rng.uniform();
    return GroupElement::torus(std::move(phases));
  }
  std::array<double, 4> v{};
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& c : v) {
      c = rng.normal();
      norm2 += c * c;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  const Complex alpha(v[0] * inv, v[1] * inv);
  const Complex beta(v[2] * inv, v[3] * inv);
  CMatrix m{{alpha, -std::conj(beta)}, {beta, std::conj(alpha)}};
  if (tag == GroupTag::U2) m *= std::polar(1.0, kTwoPi * rng.uniform());
  return GroupElement::unchecked(tag, std::move(m));
}

Complex peter_weyl_inner(const Irrep& pi, std::size_t j, std::size_t m, std::size_t k,
                         std::size_t samples, Rng& rng) {
  const std::size_t d = pi.dim();
  if (j >= d || m >= d || k >= d) throw Error(ErrorCode::InvalidArgument, "peter_weyl_inner: index out of range");
  if (samples == 0) throw Error(ErrorCode::InvalidArgument, "peter_weyl_inner: samples must be >= 1");
  std::size_t torus_dim = 1;
  if (const auto* a = std::get_if<AbelianChar>(&pi.kind())) torus_dim = a->q.size();
  Complex sum = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const CMatrix r = represent(pi, haar_sample(pi.tag(), torus_dim, rng));
    sum += r(j, m) * std::conj(r(j, k));
  }
  return sum / static_cast<double>(samples);
}

}  // namespace skewspec
