#include <doctest.h>

#include <cmath>
#include <map>

#include "helpers.hpp"
#include "skewspec/error.hpp"

using namespace testing;

namespace {

// Bivariate polynomials in (z1, z2) as exponent-of-z1 -> coefficient, for
// homogeneous degree n.
using Poly = std::map<int, Complex>;

Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [i, x] : a)
    for (const auto& [j, y] : b) out[i + j] += x * y;
  return out;
}

double fact(int n) { return std::tgamma(n + 1.0); }

// Matrix of p -> p(g11 z1 + g21 z2, g12 z1 + g22 z2) in the orthonormal
// basis z1^k z2^(n-k) / sqrt(k!(n-k)!), by direct substitution.
CMatrix substitution_oracle(int n, const CMatrix& g) {
  const Poly w1{{1, g(0, 0)}, {0, g(1, 0)}};
  const Poly w2{{1, g(0, 1)}, {0, g(1, 1)}};
  CMatrix out(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    Poly p{{0, 1.0}};
    for (int i = 0; i < k; ++i) p = multiply(p, w1);
    for (int i = 0; i < n - k; ++i) p = multiply(p, w2);
    for (int j = 0; j <= n; ++j) {
      const Complex c = p.count(j) ? p.at(j) : Complex(0.0);
      out(j, k) = c * std::sqrt(fact(j) * fact(n - j) / (fact(k) * fact(n - k)));
    }
  }
  return out;
}

CMatrix flip(std::size_t n) {
  CMatrix j(n);
  for (std::size_t i = 0; i < n; ++i) j(i, n - 1 - i) = 1.0;
  return j;
}

}  // namespace

TEST_CASE("group elements validate their input") {
  CHECK_NOTHROW(GroupElement::su2(sample_h()));
  CHECK_THROWS_AS(GroupElement::su2(CMatrix{{2.0, 0.0}, {0.0, 0.5}}), Error);
  CHECK_THROWS_AS(GroupElement::su2(CMatrix{{Complex(0, 1), 0.0}, {0.0, Complex(0, 1)}}), Error);
  CHECK_NOTHROW(GroupElement::u2(CMatrix{{Complex(0, 1), 0.0}, {0.0, Complex(0, 1)}}));
  const GroupElement t = GroupElement::torus({0.75, 1.5});
  CHECK(t.phases()[1] == 0.5);
  const GroupElement s = group_multiply(t, GroupElement::torus({0.5, 0.25}));
  CHECK(s.phases()[0] == 0.25);
  CHECK(s.phases()[1] == 0.75);
  CHECK_THROWS_AS(group_multiply(t, GroupElement::identity(GroupTag::Su2)), Error);
}

TEST_CASE("su2_irrep agrees with polynomial substitution") {
  Rng rng(21);
  for (int n = 0; n <= 6; ++n) {
    for (int t = 0; t < 10; ++t) {
      const GroupElement g = haar_sample(GroupTag::Su2, 1, rng);
      CHECK(max_abs_diff(su2_irrep(n, g), substitution_oracle(n, g.matrix())) < 1e-12);
    }
  }
}

TEST_CASE("su2_irrep on diagonal elements and at n = 1") {
  const Complex a = std::polar(1.0, 0.9);
  const GroupElement d = GroupElement::su2(CMatrix{{a, 0.0}, {0.0, std::conj(a)}});
  for (int n = 0; n <= 5; ++n) {
    const CMatrix m = su2_irrep(n, d);
    for (int j = 0; j <= n; ++j) CHECK(std::abs(m(j, j) - std::pow(a, 2 * j - n)) < 1e-14);
  }
  Rng rng(22);
  const GroupElement g = haar_sample(GroupTag::Su2, 1, rng);
  CHECK(max_abs_diff(su2_irrep(1, g), flip(2) * g.matrix() * flip(2)) < 1e-15);
  CHECK_THROWS_AS(su2_irrep(kMaxSu2Index + 1, g), Error);
  CHECK_THROWS_AS(su2_irrep(-1, g), Error);
}

TEST_CASE("su2 characters follow the Weyl formula") {
  Rng rng(23);
  for (int t = 0; t < 20; ++t) {
    const GroupElement g = haar_sample(GroupTag::Su2, 1, rng);
    const double theta = std::acos(std::clamp(0.5 * g.matrix().trace().real(), -1.0, 1.0));
    for (int n = 0; n <= 8; ++n) {
      const double chi = std::sin((n + 1) * theta) / std::sin(theta);
      CHECK(std::abs(su2_irrep(n, g).trace() - chi) < 1e-9);
    }
  }
}

TEST_CASE("unitarity and homomorphism for SU(2) and U(2)") {
  Rng rng(24);
  for (int t = 0; t < 30; ++t) {
    const GroupElement g = haar_sample(GroupTag::Su2, 1, rng), h = haar_sample(GroupTag::Su2, 1, rng);
    for (int n = 0; n <= 8; ++n) {
      CHECK(unitarity_residual(su2_irrep(n, g)) < 1e-12);
      CHECK(max_abs_diff(su2_irrep(n, group_multiply(g, h)), su2_irrep(n, g) * su2_irrep(n, h)) < 1e-12);
    }
    const GroupElement u = haar_sample(GroupTag::U2, 1, rng), v = haar_sample(GroupTag::U2, 1, rng);
    for (int m = -2; m <= 2; ++m)
      for (int n = 0; n <= 4; ++n) {
        CHECK(unitarity_residual(u2_irrep(m, n, u)) < 1e-12);
        CHECK(max_abs_diff(u2_irrep(m, n, group_multiply(u, v)), u2_irrep(m, n, u) * u2_irrep(m, n, v)) < 1e-12);
      }
  }
}

TEST_CASE("u2_irrep does not depend on the square root of det") {
  Rng rng(25);
  for (int t = 0; t < 20; ++t) {
    const GroupElement g = haar_sample(GroupTag::U2, 1, rng);
    const Complex z = std::sqrt(determinant(g.matrix()));
    for (int m = -3; m <= 3; ++m)
      for (int n = 0; n <= 5; ++n) CHECK(u2_irrep_with_root(m, n, g, z) == u2_irrep_with_root(m, n, g, -z));
  }
}

TEST_CASE("u2_irrep on the centre and on SU(2)") {
  const Complex z = std::polar(1.0, 1.1);
  const GroupElement c = GroupElement::u2(CMatrix{{z, 0.0}, {0.0, z}});
  for (int m = -2; m <= 2; ++m)
    for (int n = 0; n <= 3; ++n) {
      const CMatrix expected = CMatrix::identity(static_cast<std::size_t>(n) + 1) * std::pow(z, 2 * m - n);
      CHECK(max_abs_diff(u2_irrep(m, n, c), expected) < 1e-13);
    }
  Rng rng(26);
  const GroupElement g = haar_sample(GroupTag::Su2, 1, rng);
  const GroupElement gu = GroupElement::u2(g.matrix());
  for (int n = 0; n <= 4; n += 2) CHECK(max_abs_diff(u2_irrep(n / 2, n, gu), su2_irrep(n, g)) < 1e-13);
}

TEST_CASE("characters of the torus") {
  const GroupElement z = GroupElement::torus({0.25, 0.1});
  const std::vector<int> q{1, 0};
  CHECK(std::abs(char_abelian(q, z) - Complex(0.0, 1.0)) < 1e-15);
  CHECK_THROWS_AS(char_abelian(std::vector<int>{1}, z), Error);
  const Irrep pi(AbelianChar{{2, -1}});
  CHECK(pi.dim() == 1);
  CHECK(pi.label() == "q=2,-1");
  CHECK(std::abs(represent(pi, z)(0, 0) - std::polar(1.0, kTwoPi * 0.4)) < 1e-14);
}

TEST_CASE("irrep metadata") {
  CHECK(Irrep(Su2Irrep{3}).dim() == 4);
  CHECK(Irrep(Su2Irrep{3}).label() == "n=3");
  CHECK(Irrep(U2Irrep{-1, 2}).label() == "m=-1,n=2");
  CHECK(Irrep(U2Irrep{-1, 2}).tag() == GroupTag::U2);
  CHECK_THROWS_AS(represent(Irrep(Su2Irrep{1}), GroupElement::torus({0.1})), Error);
}

TEST_CASE("Haar samples") {
  Rng rng(27);
  double mean_trace = 0.0, mean_g11 = 0.0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    const GroupElement g = haar_sample(GroupTag::Su2, 1, rng);
    CHECK(std::abs(determinant(g.matrix()) - 1.0) < 1e-12);
    mean_trace += g.matrix().trace().real() / N;
    mean_g11 += std::norm(g.matrix()(0, 0)) / N;
  }
  CHECK(std::abs(mean_trace) < 0.03);
  CHECK(std::abs(mean_g11 - 0.5) < 0.01);
  Rng a(5), b(5);
  CHECK(haar_sample(GroupTag::U2, 1, a).matrix() == haar_sample(GroupTag::U2, 1, b).matrix());
}

TEST_CASE("Peter-Weyl inner products") {
  Rng rng(28);
  const Irrep pi(Su2Irrep{2});
  const std::size_t S = 20000;
  const double tol = 3.0 / std::sqrt(static_cast<double>(S));
  CHECK(std::abs(peter_weyl_inner(pi, 0, 1, 1, S, rng) - 1.0 / 3.0) < tol);
  CHECK(std::abs(peter_weyl_inner(pi, 2, 0, 1, S, rng)) < tol);
  const Irrep chi(AbelianChar{{3}});
  CHECK(std::abs(peter_weyl_inner(chi, 0, 0, 0, 10, rng) - 1.0) < 1e-14);
  CHECK_THROWS_AS(peter_weyl_inner(pi, 0, 0, 0, 0, rng), Error);
}
