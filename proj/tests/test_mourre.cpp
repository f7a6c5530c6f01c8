#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "skewspec/error.hpp"
#include "skewspec/mourre.hpp"

using namespace testing;

namespace {

Cocycle su2_plain() {
  Su2Diag s;
  s.b = {1};
  return Cocycle(s);
}

}  // namespace

TEST_CASE("Anzai: M_N is identically one") {
  const auto flow = flow1();
  const Cocycle phi = anzai();
  const Irrep pi(AbelianChar{{1}});
  const ConjugateWeights a = canonical_weights(phi, pi, flow);
  CHECK(a.a[0] == doctest::Approx(1.0 / (kTwoPi * 2.0 * kSqrt2m1)));
  const auto table = lambda_star_schedule(phi, pi, a, flow, doubling_schedule(256), TorusGrid::uniform(1, 512));
  REQUIRE(table.size() == 9);
  for (const auto& row : table) CHECK(std::abs(row.value - 1.0) < 1e-12);
}

TEST_CASE("degree formula equals the conjugated average") {
  const auto flow = flow1();
  Rng rng(41);
  struct Case {
    Cocycle phi;
    Irrep pi;
  };
  const std::vector<Case> cases{{anzai(), Irrep(AbelianChar{{2}})},
                                {su2_perturbed(), Irrep(Su2Irrep{3})},
                                {u2_sample(), Irrep(U2Irrep{-1, 2})}};
  for (const auto& c : cases) {
    const ConjugateWeights a = canonical_weights(c.phi, c.pi, flow);
    for (int t = 0; t < 10; ++t) {
      const TorusPoint x = random_point(1, rng);
      for (std::size_t N : {1u, 2u, 7u, 20u}) {
        const CMatrix avg = matrix_M_N_average(c.phi, c.pi, a, flow, N, x);
        const CMatrix deg = matrix_M_N_degree(c.phi, c.pi, a, flow, N, x);
        CHECK(max_abs_diff(avg, deg) < 1e-9);
        CHECK(hermiticity_residual(avg) < 1e-12);
      }
    }
    const TorusPoint x({0.3});
    CHECK(max_abs_diff(matrix_M_N_average(c.phi, c.pi, a, flow, 1, x), matrix_M_N_degree(c.phi, c.pi, a, flow, 1, x)) == 0.0);
    CHECK(max_abs_diff(matrix_M_N_average(c.phi, c.pi, a, flow, 1, x), matrix_M(c.phi, c.pi, a, flow, x)) == 0.0);
  }
}

TEST_CASE("SU(2) parity law") {
  const auto flow = flow1();
  const Cocycle phi = su2_plain();
  const TorusGrid grid = TorusGrid::uniform(1, 64);
  for (int n = 1; n <= 6; ++n) {
    const MourreReport r = verdict(phi, Irrep(Su2Irrep{n}), flow, grid, {.N_max = 4});
    REQUIRE(!r.table.empty());
    const double expected = n % 2 == 1 ? 1.0 : 0.0;
    for (const auto& row : r.table) CHECK(std::abs(row.value - expected) < 1e-12);
    CHECK(r.verdict == (n % 2 == 1 ? Verdict::PurelyAC : Verdict::Inconclusive));
    CHECK(r.lebesgue == (n % 2 == 1));
  }
}

TEST_CASE("perturbed SU(2) M_N against the telescoped closed form") {
  // eta = 0.3 cos(2 pi x): L_Y eta / y = -0.6 pi sin(2 pi x), and
  // sum_{n<N} sin(2 pi (x + n y)) = sin(pi N y) sin(2 pi x + pi (N-1) y) / sin(pi y).
  const auto flow = flow1();
  const Cocycle phi = su2_perturbed();
  const Irrep pi(Su2Irrep{3});
  const ConjugateWeights a = canonical_weights(phi, pi, flow);
  const double y = kSqrt2m1;
  Rng rng(42);
  for (std::size_t N : {1u, 8u, 64u, 512u}) {
    const double Nd = static_cast<double>(N);
    for (int t = 0; t < 5; ++t) {
      const TorusPoint x = random_point(1, rng);
      const double s = std::sin(kPi * Nd * y) * std::sin(kTwoPi * x[0] + kPi * (Nd - 1.0) * y) / std::sin(kPi * y);
      const double factor = 1.0 - 0.6 * kPi * s / Nd;
      const std::vector<Complex> diag{9.0 * factor, factor, factor, 9.0 * factor};
      CHECK(max_abs_diff(matrix_M_N_average(phi, pi, a, flow, N, x), CMatrix::diagonal(diag)) < 1e-10);
    }
    // Uniform rate: |M_N - diag(9,1,1,9)| <= 9 * 0.6 pi / (N sin(pi y)).
    const double bound = 9.0 * 0.6 * kPi / (Nd * std::sin(kPi * y));
    const std::vector<Complex> lim{9.0, 1.0, 1.0, 9.0};
    CHECK(max_abs_diff(matrix_M_N_average(phi, pi, a, flow, N, TorusPoint({0.3})), CMatrix::diagonal(lim)) <= bound);
  }
}

TEST_CASE("weights are diagonal in the frame only") {
  const auto flow = flow1();
  Su2Diag s;
  s.b = {1};
  s.h = sample_h();
  const Cocycle phi(s);
  const Irrep pi(Su2Irrep{2});
  const ConjugateWeights a = canonical_weights(phi, pi, flow);
  const TorusGrid grid = TorusGrid::uniform(1, 32);
  CHECK(commutation_check(phi, pi, a, grid, Frame::Diagonal) < 1e-14);
  CHECK(commutation_check(phi, pi, a, grid, Frame::Raw) > 1e-3);
  CHECK_THROWS_AS(matrix_M(phi, pi, a, flow, TorusPoint({0.1}), Frame::Raw), Error);
  const MourreReport r = verdict(phi, Irrep(Su2Irrep{1}), flow, grid, {.frame = Frame::Raw});
  CHECK(r.verdict == Verdict::Inconclusive);
  CHECK(r.commutation_residual > kCommutationTolerance);
  CHECK(r.table.empty());
  CHECK(commutation_check(phi, pi, ConjugateWeights{{0.5, 0.5, 0.5}}, grid, Frame::Raw) == 0.0);
}

TEST_CASE("degenerate canonical weights") {
  const TranslationFlow flow = flow1();
  Su2Diag s;
  s.b = {0};
  const Cocycle flat(s);
  CHECK_THROWS_AS(canonical_weights(flat, Irrep(Su2Irrep{1}), flow), Error);
  const MourreReport r = verdict(flat, Irrep(Su2Irrep{1}), flow, TorusGrid::uniform(1, 8));
  CHECK(r.verdict == Verdict::Inconclusive);
  CHECK_FALSE(r.weights.has_value());
  REQUIRE(r.notes.size() == 1);
  CHECK(r.notes[0].find("canonical weights undefined") != std::string::npos);
  CHECK_THROWS_AS(canonical_weights(anzai(0), Irrep(AbelianChar{{1}}), flow), Error);
  U2Diag u;
  u.b1 = {1};
  u.b2 = {0};
  CHECK_THROWS_AS(canonical_weights(Cocycle(u), Irrep(U2Irrep{0, 0}), flow), Error);
}

TEST_CASE("U(2) infimum against brute force") {
  const std::vector<int> b1{1}, b2{0};
  const std::vector<double> y{kSqrt2m1};
  for (int m = -3; m <= 5; ++m)
    for (int n = 0; n <= 4; ++n) {
      double brute = INFINITY;
      for (int k = 0; k <= n; ++k) {
        const double w = (2 * m - n) * (b1[0] + b2[0]) * y[0] + (2 * k - n) * (b1[0] - b2[0]) * y[0];
        brute = std::min(brute, w * w);
      }
      CHECK(u2_infimum(b1, b2, y, m, n) == doctest::Approx(brute).epsilon(1e-14));
    }
  const auto set = u2_admissible_set(b1, b2, y, -2, 4, 0, 3);
  for (int m = -2; m <= 4; ++m)
    for (int n = 0; n <= 3; ++n) {
      const bool member = m < 0 || m > n;
      const bool listed = std::any_of(set.begin(), set.end(), [&](const AdmissibleEntry& e) { return e.m == m && e.n == n; });
      CHECK(member == listed);
    }
  // 4 y^2 dist(m, {0..n})^2 with 4 y^2 = 12 - 8 sqrt 2.
  for (const auto& e : set) {
    const int dist = e.m < 0 ? -e.m : e.m - e.n;
    CHECK(e.infimum == doctest::Approx((12.0 - 8.0 * std::sqrt(2.0)) * dist * dist).epsilon(1e-12));
  }
}

TEST_CASE("U(2) lambda_* equals the infimum") {
  const auto flow = flow1();
  U2Diag u;
  u.b1 = {1};
  u.b2 = {0};
  const Cocycle phi(u);
  const TorusGrid grid = TorusGrid::uniform(1, 32);
  for (int m = -1; m <= 3; ++m)
    for (int n = 0; n <= 2; ++n) {
      if (m == 0 && n == 0) continue;
      const Irrep pi(U2Irrep{m, n});
      const auto table = lambda_star_schedule(phi, pi, canonical_weights(phi, pi, flow), flow, {1, 8}, grid);
      for (const auto& row : table) CHECK(std::abs(row.value - u2_infimum(u.b1, u.b2, flow.velocity(), m, n)) < 1e-9);
    }
}

TEST_CASE("schedule evaluation matches single-N evaluation") {
  const auto flow = flow1();
  const Cocycle phi = su2_perturbed();
  const Irrep pi(Su2Irrep{1});
  const ConjugateWeights a = canonical_weights(phi, pi, flow);
  const TorusGrid grid = TorusGrid::uniform(1, 40);
  const std::vector<std::size_t> schedule{1, 3, 16};
  double herm = -1.0;
  const auto table = lambda_star_schedule(phi, pi, a, flow, schedule, grid, Frame::Diagonal, &herm);
  CHECK(herm >= 0.0);
  CHECK(herm < 1e-12);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const LambdaStar single = lambda_star_N(phi, pi, a, flow, schedule[i], grid);
    CHECK(std::abs(single.value - table[i].value) < 1e-14);
    CHECK(single.argmin[0] == table[i].argmin[0]);
  }
  CHECK_THROWS_AS(lambda_star_schedule(phi, pi, a, flow, {4, 2}, grid), Error);
}

TEST_CASE("doubling schedule") {
  CHECK(doubling_schedule(1) == std::vector<std::size_t>{1});
  CHECK(doubling_schedule(8) == std::vector<std::size_t>{1, 2, 4, 8});
  CHECK(doubling_schedule(100) == std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64, 100});
  CHECK_THROWS_AS(doubling_schedule(0), Error);
}

TEST_CASE("lebesgue requires a declared ergodic flow") {
  const TranslationFlow undeclared({kSqrt2m1}, false);
  const MourreReport r = verdict(anzai(), Irrep(AbelianChar{{1}}), undeclared, TorusGrid::uniform(1, 16));
  CHECK(r.verdict == Verdict::PurelyAC);
  CHECK(r.verdict_N == 1u);
  CHECK_FALSE(r.lebesgue);
}

TEST_CASE("Dini heuristic stays bounded for smooth cocycles") {
  const auto flow = flow1();
  const auto times = log_spaced_times(5, 1e-6);
  REQUIRE(times.size() == 5);
  CHECK(times.front() == 1.0);
  CHECK(times.back() == doctest::Approx(1e-6));
  const auto d = dini_diagnostic(su2_perturbed(), Irrep(Su2Irrep{3}), flow, times, TorusGrid::uniform(1, 64));
  for (const auto& s : d) CHECK(s.value < 1e4);
  CHECK(d.back().value == doctest::Approx(d[d.size() - 2].value).epsilon(0.05));
}
