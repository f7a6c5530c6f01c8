#pragma once

#include <cmath>
#include <vector>

#include "skewspec/cocycle.hpp"
#include "skewspec/group_rep.hpp"
#include "skewspec/linalg.hpp"
#include "skewspec/random.hpp"
#include "skewspec/torus_flow.hpp"

namespace testing {

using namespace skewspec;

inline const double kSqrt2m1 = std::sqrt(2.0) - 1.0;
inline const double kSqrt3m1 = std::sqrt(3.0) - 1.0;

inline TranslationFlow flow1() { return TranslationFlow({kSqrt2m1}, true); }
inline TranslationFlow flow2() { return TranslationFlow({kSqrt2m1, kSqrt3m1}, true); }

inline CMatrix random_hermitian(std::size_t n, Rng& rng) {
  CMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = rng.normal();
    for (std::size_t j = i + 1; j < n; ++j) {
      a(i, j) = {rng.normal(), rng.normal()};
      a(j, i) = std::conj(a(i, j));
    }
  }
  return a;
}

inline TorusPoint random_point(std::size_t d, Rng& rng) {
  std::vector<double> x(d);
  for (double& v : x) v = rng.uniform();
  return TorusPoint(x);
}

// A fixed non-diagonal SU(2) conjugator.
inline CMatrix sample_h() {
  const double c = std::cos(0.7), s = std::sin(0.7);
  const Complex e = std::polar(1.0, 0.4);
  return CMatrix{{c * e, -s}, {s, c * std::conj(e)}};
}

inline Cocycle anzai(int m = 2) { return Cocycle(AbelianAffine{{{m}}, {TrigPoly(1)}}); }

inline Cocycle su2_perturbed(bool with_h = false) {
  Su2Diag s;
  s.b = {1};
  s.eta = TrigPoly::cosine({1}, 0.3);
  if (with_h) s.h = sample_h();
  return Cocycle(s);
}

inline Cocycle u2_sample(bool with_h = false) {
  U2Diag u;
  u.b1 = {1};
  u.b2 = {0};
  u.eta1 = TrigPoly::cosine({1}, 0.2);
  u.eta2 = TrigPoly::cosine({2}, 0.1, 0.5);
  if (with_h) u.h = sample_h();
  return Cocycle(u);
}

}  // namespace testing
