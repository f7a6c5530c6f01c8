#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "skewspec/error.hpp"

using namespace testing;

namespace {

// Eigenvalues of a 3x3 Hermitian matrix from its characteristic polynomial
// (trigonometric form of the cubic), polished by bisection.
std::vector<double> cubic_oracle(const CMatrix& a) {
  const double tr = a.trace().real();
  double tr2 = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) tr2 += std::norm(a(i, j));
  const Complex det3 = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                       a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                       a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  // p(l) = l^3 - c2 l^2 + c1 l - c0
  const double c2 = tr, c1 = 0.5 * (tr * tr - tr2), c0 = det3.real();
  auto p = [&](double l) { return ((l - c2) * l + c1) * l - c0; };
  const double q = c2 / 3.0;
  const double pp = c1 - c2 * c2 / 3.0;
  const double qq = -2.0 * c2 * c2 * c2 / 27.0 + c2 * c1 / 3.0 - c0;
  const double r = std::sqrt(std::max(0.0, -pp / 3.0));
  std::vector<double> roots;
  if (r == 0.0) {
    roots.assign(3, q);
  } else {
    const double arg = std::clamp(-qq / (2.0 * r * r * r), -1.0, 1.0);
    const double phi = std::acos(arg);
    for (int k = 0; k < 3; ++k) roots.push_back(q + 2.0 * r * std::cos((phi + kTwoPi * k) / 3.0));
  }
  for (double& l : roots) {
    double lo = l - 1e-6, hi = l + 1e-6;
    if (p(lo) * p(hi) < 0.0) {
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (p(lo) * p(mid) <= 0.0 ? hi : lo) = mid;
      }
      l = 0.5 * (lo + hi);
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

TEST_CASE("matrix basics") {
  CMatrix a{{1.0, Complex(0, 2)}, {3.0, 4.0}};
  CHECK(a.adjoint()(0, 1) == Complex(3.0, 0.0));
  CHECK(a.adjoint()(1, 0) == Complex(0.0, -2.0));
  CHECK(a.trace() == Complex(5.0, 0.0));
  CHECK(a * CMatrix::identity(2) == a);
  CHECK(max_abs_diff(a - a, CMatrix(2)) == 0.0);
  CHECK(std::abs(determinant(a) - Complex(4.0, -6.0)) < 1e-14);
  CHECK_THROWS_AS(CMatrix(2) * CMatrix(3), Error);
}

TEST_CASE("2x2 eigenvalues against the closed form") {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const CMatrix a = random_hermitian(2, rng);
    const double p = a(0, 0).real(), q = a(1, 1).real();
    const double disc = std::sqrt(0.25 * (p - q) * (p - q) + std::norm(a(0, 1)));
    const auto ev = hermitian_eigenvalues(a);
    CHECK(ev[0] == doctest::Approx(0.5 * (p + q) - disc).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(0.5 * (p + q) + disc).epsilon(1e-12));
  }
}

TEST_CASE("3x3 eigenvalues against the characteristic polynomial") {
  Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    const CMatrix a = random_hermitian(3, rng);
    const auto ev = hermitian_eigenvalues(a);
    const auto oracle = cubic_oracle(a);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(ev[i] - oracle[i]) < 1e-10);
  }
}

TEST_CASE("trace and determinant identities up to dimension 21") {
  Rng rng(13);
  for (std::size_t n = 1; n <= 21; ++n) {
    const CMatrix a = random_hermitian(n, rng);
    const auto ev = hermitian_eigenvalues(a);
    REQUIRE(ev.size() == n);
    CHECK(std::is_sorted(ev.begin(), ev.end()));
    double sum = 0.0, sum2 = 0.0, frob = 0.0;
    for (double v : ev) {
      sum += v;
      sum2 += v * v;
    }
    for (const Complex& z : a.data()) frob += std::norm(z);
    CHECK(std::abs(sum - a.trace().real()) < 1e-10 * (1.0 + std::abs(sum)));
    CHECK(std::abs(sum2 - frob) < 1e-10 * frob);
    if (n <= 8) {
      double prod = 1.0;
      for (double v : ev) prod *= v;
      CHECK(std::abs(prod - determinant(a).real()) < 1e-9 * (1.0 + std::abs(prod)));
    }
  }
}

TEST_CASE("diagonal and degenerate spectra") {
  const std::vector<Complex> d{3.0, -1.0, 2.0, -1.0};
  const auto ev = hermitian_eigenvalues(CMatrix::diagonal(d));
  CHECK(ev == std::vector<double>{-1.0, -1.0, 2.0, 3.0});
  CHECK(min_eigenvalue(CMatrix::identity(5) * Complex(7.0)) == doctest::Approx(7.0));
  CMatrix one(1);
  one(0, 0) = -0.25;
  CHECK(min_eigenvalue(one) == -0.25);
}

TEST_CASE("unitary helpers") {
  const CMatrix h = sample_h();
  CHECK(unitarity_residual(h) < 1e-15);
  CMatrix noisy = h;
  noisy(0, 0) += 1e-7;
  CHECK(unitarity_residual(noisy) > 1e-8);
  CHECK(unitarity_residual(newton_reunitarize(noisy)) < 1e-13);
  CHECK(hermiticity_residual(CMatrix{{1.0, Complex(0, 1)}, {Complex(0, -1), 2.0}}) == 0.0);
}
