#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "skewspec/error.hpp"

using namespace testing;

TEST_CASE("cocycle validation") {
  CHECK_THROWS_AS(Cocycle(AbelianAffine{{}, {}}), Error);
  CHECK_THROWS_AS(Cocycle(AbelianAffine{{{1, 0}, {1}}, {}}), Error);
  Su2Diag bad;
  bad.b = {1};
  bad.eta = TrigPoly::mode({1});
  CHECK_THROWS_AS(Cocycle(Cocycle::Family(bad)), Error);
  Su2Diag not_unitary;
  not_unitary.b = {1};
  not_unitary.h = CMatrix{{2.0, 0.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(Cocycle(Cocycle::Family(not_unitary)), Error);
  const Cocycle phi = su2_perturbed();
  CHECK(phi.tag() == GroupTag::Su2);
  CHECK(phi.base_dim() == 1);
  CHECK_THROWS_AS(phi.check_compatible(Irrep(U2Irrep{0, 1})), Error);
  CHECK_THROWS_AS(phi.evaluate(TorusPoint({0.1, 0.2})), Error);
}

TEST_CASE("iterates of the Anzai cocycle") {
  const auto flow = flow1();
  for (int m : {1, 2, -3}) {
    const Cocycle phi = anzai(m);
    Rng rng(31 + m);
    for (int t = 0; t < 5; ++t) {
      const double x = rng.uniform();
      for (long n = -50; n <= 50; ++n) {
        const double expected = m * (n * x + kSqrt2m1 * n * (n - 1) / 2.0);
        const GroupElement g = iterate(phi, flow, n, TorusPoint({x}));
        CHECK(circle_distance(g.phases()[0], wrap_unit(expected)) < 1e-10);
      }
    }
  }
}

TEST_CASE("iterate at n = 0 and n = 1") {
  const auto flow = flow1();
  const Cocycle phi = su2_perturbed(true);
  const TorusPoint x({0.3});
  CHECK(max_abs_diff(iterate(phi, flow, 0, x).matrix(), CMatrix::identity(2)) == 0.0);
  CHECK(max_abs_diff(iterate(phi, flow, 1, x).matrix(), phi.evaluate(x).matrix()) < 1e-15);
  const GroupElement back = iterate(phi, flow, -1, x);
  CHECK(max_abs_diff(back.matrix(), phi.evaluate(flow_advance(x, -1.0, flow)).inverse().matrix()) < 1e-14);
}

TEST_CASE("cocycle identity for all families") {
  const auto fl1 = flow1();
  const auto fl2 = flow2();
  const Cocycle abelian2(AbelianAffine{{{1, 0}, {1, 2}}, {TrigPoly::cosine({0, 1}, 0.1), TrigPoly(2)}});
  Rng rng(33);
  for (int t = 0; t < 100; ++t) {
    const long m = static_cast<long>(rng.next() % 81) - 40;
    const long n = static_cast<long>(rng.next() % 81) - 40;
    const TorusPoint x1 = random_point(1, rng);
    CHECK(cocycle_identity_check(su2_perturbed(true), fl1, m, n, x1) < 1e-9);
    CHECK(cocycle_identity_check(u2_sample(true), fl1, m, n, x1) < 1e-9);
    CHECK(cocycle_identity_check(anzai(), fl1, m, n, x1) < 1e-9);
    CHECK(cocycle_identity_check(abelian2, fl2, m, n, random_point(2, rng)) < 1e-9);
  }
}

TEST_CASE("walks reproduce iterate") {
  const auto flow = flow1();
  const Cocycle phi = u2_sample(true);
  const TorusPoint x({0.61});
  CocycleWalk fwd(phi, flow, x, false), bwd(phi, flow, x, true);
  for (long n = 0; n <= 40; ++n) {
    CHECK(fwd.index() == n);
    CHECK(bwd.index() == -n);
    CHECK(max_abs_diff(fwd.value().matrix(), iterate(phi, flow, n, x).matrix()) < 1e-12);
    CHECK(max_abs_diff(bwd.value().matrix(), iterate(phi, flow, -n, x).matrix()) < 1e-12);
    fwd.advance();
    bwd.advance();
  }
}

TEST_CASE("cohomologous cocycles conjugate the iterates") {
  const auto flow = flow1();
  const Cocycle xi = su2_perturbed();
  Su2Diag zs;
  zs.b = {1};
  zs.eta = TrigPoly::cosine({2}, 0.05);
  zs.h = sample_h();
  const TransferFunction zeta = TransferFunction::from_cocycle(Cocycle(zs));
  const CocycleEvaluator psi = conjugate_cohomologous(xi, zeta, flow);
  Rng rng(34);
  for (int t = 0; t < 10; ++t) {
    const TorusPoint x = random_point(1, rng);
    for (long n : {1L, 5L, 17L, -3L}) {
      const GroupElement lhs = iterate(psi, GroupTag::Su2, 1, flow, n, x);
      const GroupElement rhs = group_multiply(group_multiply(zeta(x).inverse(), iterate(xi, flow, n, x)),
                                              zeta(flow_advance(x, static_cast<double>(n), flow)));
      CHECK(group_distance(lhs, rhs) < 1e-12);
    }
  }
  const TransferFunction c = TransferFunction::constant(GroupElement::su2(sample_h()));
  const CocycleEvaluator conj = conjugate_cohomologous(xi, c, flow);
  const TorusPoint x({0.2});
  const CMatrix h = sample_h();
  CHECK(max_abs_diff(conj(x).matrix(), h.adjoint() * xi.evaluate(x).matrix() * h) < 1e-14);
}

TEST_CASE("Lie derivative of pi o phi matches a central difference") {
  const auto flow = flow1();
  const double step = 1e-6;
  Rng rng(35);
  struct Case {
    Cocycle phi;
    Irrep pi;
  };
  const std::vector<Case> cases{{su2_perturbed(true), Irrep(Su2Irrep{3})},
                                {u2_sample(true), Irrep(U2Irrep{-1, 2})},
                                {Cocycle(AbelianAffine{{{2}}, {TrigPoly::cosine({1}, 0.2)}}), Irrep(AbelianChar{{3}})}};
  for (const auto& c : cases) {
    for (Frame frame : {Frame::Diagonal, Frame::Raw}) {
      for (int t = 0; t < 5; ++t) {
        const TorusPoint x = random_point(1, rng);
        const CMatrix fd = (rep_of_cocycle(c.phi, c.pi, flow_advance(x, step, flow), frame) -
                            rep_of_cocycle(c.phi, c.pi, flow_advance(x, -step, flow), frame)) *
                           Complex(1.0 / (2.0 * step));
        CHECK(max_abs_diff(lie_derivative_of_rep(c.phi, c.pi, flow, x, frame), fd) < 1e-6);
      }
    }
  }
}

TEST_CASE("frames differ by conjugation with pi(h)") {
  const Cocycle phi = u2_sample(true);
  const Irrep pi(U2Irrep{1, 3});
  const CMatrix ph = represent(pi, phi.conjugator());
  const TorusPoint x({0.44});
  const CMatrix raw = rep_of_cocycle(phi, pi, x, Frame::Raw);
  const CMatrix diag = rep_of_cocycle(phi, pi, x, Frame::Diagonal);
  CHECK(max_abs_diff(raw, ph * diag * ph.adjoint()) < 1e-13);
  for (std::size_t i = 0; i < diag.size(); ++i)
    for (std::size_t j = 0; j < diag.size(); ++j)
      if (i != j) CHECK(std::abs(diag(i, j)) < 1e-14);
}

TEST_CASE("rep_jet agrees with the separate value and derivative") {
  const auto flow = flow1();
  Rng rng(36);
  struct Case {
    Cocycle phi;
    Irrep pi;
  };
  const std::vector<Case> cases{{su2_perturbed(true), Irrep(Su2Irrep{4})},
                                {u2_sample(true), Irrep(U2Irrep{2, 3})},
                                {anzai(), Irrep(AbelianChar{{2}})}};
  for (const auto& c : cases) {
    for (Frame frame : {Frame::Diagonal, Frame::Raw}) {
      for (int t = 0; t < 10; ++t) {
        const TorusPoint x = random_point(1, rng);
        const RepJet jet = rep_jet(c.phi, c.pi, flow, x, frame);
        CHECK(max_abs_diff(jet.value, rep_of_cocycle(c.phi, c.pi, x, frame)) < 1e-12);
        CHECK(max_abs_diff(jet.derivative, lie_derivative_of_rep(c.phi, c.pi, flow, x, frame)) < 1e-12);
      }
    }
  }
}
