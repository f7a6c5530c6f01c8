#include "skewspec/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "skewspec/error.hpp"

namespace skewspec {

namespace {

constexpr long kRenormalizeEvery = 64;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double dot(std::span<const int> b, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += b[i] * v[i];
  return s;
}

int inf_norm(std::span<const int> v) {
  int m = 0;
  for (int e : v) m = std::max(m, std::abs(e));
  return m;
}

void require_real(const TrigPoly& p, std::size_t d, const char* what) {
  if (p.dim() != d) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " lives on T^" + std::to_string(p.dim()) +
                                                  ", base is T^" + std::to_string(d));
  }
  if (!p.is_real(1e-12)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be real-valued");
}

GroupElement diag_element(GroupTag tag, double theta1, double theta2) {
  CMatrix m(2);
  m(0, 0) = std::polar(1.0, kTwoPi * wrap_unit(theta1));
  m(1, 1) = std::polar(1.0, kTwoPi * wrap_unit(theta2));
  return GroupElement::unchecked(tag, std::move(m));
}

bool exact_identity(const CMatrix& h) {
  for (std::size_t r = 0; r < h.size(); ++r)
    for (std::size_t c = 0; c < h.size(); ++c)
      if (h(r, c) != Complex(r == c ? 1.0 : 0.0)) return false;
  return true;
}

GroupElement conjugate_by(const CMatrix& h, const GroupElement& d) {
  if (exact_identity(h)) return d;
  return GroupElement::unchecked(d.tag(), h * d.matrix() * h.adjoint());
}

// Diagonal phases of pi o phi in the diagonal frame: entry j equals
// exp(2 pi i theta_j(x)) and its Lie derivative is 2 pi i rate_j(x) times it.
struct DiagonalPhases {
  std::vector<double> theta;
  std::vector<double> rate;
};

DiagonalPhases diagonal_phases(const Cocycle& phi, const Irrep& pi, const TranslationFlow& flow,
                               const TorusPoint& x) {
  const auto xs = x.coords();
  const auto y = flow.velocity();
  DiagonalPhases out;
  std::visit(
      Overloaded{
          [&](const AbelianAffine& a) {
            const auto& q = std::get<AbelianChar>(pi.kind()).q;
            double theta = 0.0;
            double rate = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) {
              theta += q[i] * (dot(a.B[i], xs) + a.eta[i].real_value(x));
              rate += q[i] * (dot(a.B[i], y) + lie_derivative_at(a.eta[i], flow, x).real());
            }
            out.theta = {theta};
            out.rate = {rate};
          },
          [&](const Su2Diag& s) {
            const int n = std::get<Su2Irrep>(pi.kind()).n;
            const double base = dot(s.b, xs) + s.eta.real_value(x);
            const double base_rate = dot(s.b, y) + lie_derivative_at(s.eta, flow, x).real();
            for (int j = 0; j <= n; ++j) {
              out.theta.push_back((2 * j - n) * base);
              out.rate.push_back((2 * j - n) * base_rate);
            }
          },
          [&](const U2Diag& u) {
            const auto [m, n] = std::get<U2Irrep>(pi.kind());
            const double t1 = dot(u.b1, xs) + u.eta1.real_value(x);
            const double t2 = dot(u.b2, xs) + u.eta2.real_value(x);
            const double r1 = dot(u.b1, y) + lie_derivative_at(u.eta1, flow, x).real();
            const double r2 = dot(u.b2, y) + lie_derivative_at(u.eta2, flow, x).real();
            for (int j = 0; j <= n; ++j) {
              out.theta.push_back(0.5 * ((2 * m - n) * (t1 + t2) + (2 * j - n) * (t1 - t2)));
              out.rate.push_back(0.5 * ((2 * m - n) * (r1 + r2) + (2 * j - n) * (r1 - r2)));
            }
          },
      },
      phi.family());
  return out;
}

}  // namespace

const char* to_string(Frame f) noexcept { return f == Frame::Diagonal ? "diagonal" : "raw"; }

Cocycle::Cocycle(Family family) : family_(std::move(family)), base_dim_(0) {
  std::visit(Overloaded{
                 [&](AbelianAffine& a) {
                   if (a.B.empty() || a.B.front().empty()) {
                     throw Error(ErrorCode::InvalidArgument, "AbelianAffine: B must be a nonempty d' x d matrix");
                   }
                   base_dim_ = a.B.front().size();
                   for (const auto& row : a.B) {
                     if (row.size() != base_dim_) throw Error(ErrorCode::DimensionMismatch, "AbelianAffine: ragged B");
                   }
                   if (a.eta.empty()) a.eta.assign(a.B.size(), TrigPoly(base_dim_));
                   if (a.eta.size() != a.B.size()) {
                     throw Error(ErrorCode::DimensionMismatch, "AbelianAffine: eta needs one polynomial per row of B");
                   }
                   for (const auto& e : a.eta) require_real(e, base_dim_, "AbelianAffine eta");
                 },
                 [&](Su2Diag& s) {
                   if (s.b.empty()) throw Error(ErrorCode::InvalidArgument, "Su2Diag: b must be nonempty");
                   base_dim_ = s.b.size();
                   if (s.eta.is_zero()) s.eta = TrigPoly(base_dim_);
                   require_real(s.eta, base_dim_, "Su2Diag eta");
                   GroupElement::su2(s.h);
                 },
                 [&](U2Diag& u) {
                   if (u.b1.empty() || u.b1.size() != u.b2.size()) {
                     throw Error(ErrorCode::DimensionMismatch, "U2Diag: b1 and b2 must be nonempty of equal length");
                   }
                   base_dim_ = u.b1.size();
                   if (u.eta1.is_zero()) u.eta1 = TrigPoly(base_dim_);
                   if (u.eta2.is_zero()) u.eta2 = TrigPoly(base_dim_);
                   require_real(u.eta1, base_dim_, "U2Diag eta1");
                   require_real(u.eta2, base_dim_, "U2Diag eta2");
                   GroupElement::u2(u.h);
                 },
             },
             family_);
}

GroupTag Cocycle::tag() const noexcept {
  switch (family_.index()) {
    case 0: return GroupTag::Torus;
    case 1: return GroupTag::Su2;
    default: return GroupTag::U2;
  }
}

std::size_t Cocycle::group_torus_dim() const noexcept {
  if (const auto* a = std::get_if<AbelianAffine>(&family_)) return a->B.size();
  return 1;
}

GroupElement Cocycle::evaluate(const TorusPoint& x) const {
  if (x.dim() != base_dim_) {
    throw Error(ErrorCode::DimensionMismatch, "Cocycle::evaluate: point on T^" + std::to_string(x.dim()) +
                                                  ", cocycle on T^" + std::to_string(base_dim_));
  }
  const auto xs = x.coords();
  return std::visit(Overloaded{
                        [&](const AbelianAffine& a) {
                          std::vector<double> phases(a.B.size());
                          for (std::size_t i = 0; i < phases.size(); ++i)
                            phases[i] = dot(a.B[i], xs) + a.eta[i].real_value(x);
                          return GroupElement::torus(std::move(phases));
                        },
                        [&](const Su2Diag& s) {
                          const double t = dot(s.b, xs) + s.eta.real_value(x);
                          return conjugate_by(s.h, diag_element(GroupTag::Su2, t, -t));
                        },
                        [&](const U2Diag& u) {
                          const double t1 = dot(u.b1, xs) + u.eta1.real_value(x);
                          const double t2 = dot(u.b2, xs) + u.eta2.real_value(x);
                          return conjugate_by(u.h, diag_element(GroupTag::U2, t1, t2));
                        },
                    },
                    family_);
}

GroupElement Cocycle::conjugator() const {
  if (const auto* s = std::get_if<Su2Diag>(&family_)) return GroupElement::unchecked(GroupTag::Su2, s->h);
  if (const auto* u = std::get_if<U2Diag>(&family_)) return GroupElement::unchecked(GroupTag::U2, u->h);
  return GroupElement::identity(GroupTag::Torus, group_torus_dim());
}

void Cocycle::check_compatible(const Irrep& pi) const {
  if (pi.tag() != tag()) {
    throw Error(ErrorCode::TagMismatch, std::string("irrep ") + pi.label() + " of " + to_string(pi.tag()) +
                                            " paired with a " + to_string(tag()) + " cocycle");
  }
  if (const auto* a = std::get_if<AbelianChar>(&pi.kind())) {
    if (a->q.size() != group_torus_dim()) {
      throw Error(ErrorCode::DimensionMismatch, "character q has length " + std::to_string(a->q.size()) +
                                                    ", group is T^" + std::to_string(group_torus_dim()));
    }
  }
}

int Cocycle::frequency_bound(const Irrep& pi) const {
  check_compatible(pi);
  return std::visit(Overloaded{
                        [&](const AbelianAffine& a) {
                          const auto& q = std::get<AbelianChar>(pi.kind()).q;
                          int bound = 0;
                          for (std::size_t c = 0; c < base_dim_; ++c) {
                            int col = 0;
                            for (std::size_t r = 0; r < q.size(); ++r) col += q[r] * a.B[r][c];
                            bound = std::max(bound, std::abs(col));
                          }
                          int eta = 0;
                          for (const auto& e : a.eta) eta = std::max(eta, e.max_frequency());
                          return bound + eta;
                        },
                        [&](const Su2Diag& s) {
                          const int n = std::get<Su2Irrep>(pi.kind()).n;
                          return n * (inf_norm(s.b) + s.eta.max_frequency());
                        },
                        [&](const U2Diag& u) {
                          const auto [m, n] = std::get<U2Irrep>(pi.kind());
                          int bound = 0;
                          for (int j = 0; j <= n; ++j) {
                            for (std::size_t c = 0; c < base_dim_; ++c) {
                              bound = std::max(bound, std::abs((m + j - n) * u.b1[c] + (m - j) * u.b2[c]));
                            }
                          }
                          const int eta = std::max(u.eta1.max_frequency(), u.eta2.max_frequency());
                          return bound + (eta > 0 ? (std::abs(m) + n) * eta : 0);
                        },
                    },
                    family_);
}

TransferFunction TransferFunction::from_cocycle(Cocycle c) {
  const GroupTag tag = c.tag();
  return TransferFunction(tag, [c = std::move(c)](const TorusPoint& x) { return c.evaluate(x); });
}

TransferFunction TransferFunction::constant(GroupElement g) {
  const GroupTag tag = g.tag();
  return TransferFunction(tag, [g = std::move(g)](const TorusPoint&) { return g; });
}

GroupElement iterate(const CocycleEvaluator& phi, GroupTag tag, std::size_t torus_dim,
                     const TranslationFlow& flow, long n, const TorusPoint& x) {
  GroupElement acc = GroupElement::identity(tag, torus_dim);
  if (n == 0) return acc;
  auto renormalize = [&](long step) {
    if (tag != GroupTag::Torus && step % kRenormalizeEvery == 0) {
      acc = GroupElement::unchecked(tag, newton_reunitarize(acc.matrix()));
    }
  };
  if (n > 0) {
    for (long k = 0; k < n; ++k) {
      acc = group_multiply(acc, phi(flow_advance(x, static_cast<double>(k), flow)));
      renormalize(k + 1);
    }
    return acc;
  }
  // (phi(F_n x) ... phi(F_{-1} x))^{-1}, built right to left
  for (long k = -1; k >= n; --k) {
    acc = group_multiply(phi(flow_advance(x, static_cast<double>(k), flow)), acc);
    renormalize(-k);
  }
  return acc.inverse();
}

GroupElement iterate(const Cocycle& phi, const TranslationFlow& flow, long n, const TorusPoint& x) {
  if (flow.dim() != phi.base_dim()) throw Error(ErrorCode::DimensionMismatch, "iterate: flow and cocycle dimensions differ");
  return iterate([&phi](const TorusPoint& p) { return phi.evaluate(p); }, phi.tag(), phi.group_torus_dim(),
                 flow, n, x);
}

CocycleWalk::CocycleWalk(const Cocycle& phi, const TranslationFlow& flow, TorusPoint x, bool backward)
    : phi_(&phi),
      flow_(&flow),
      x_(std::move(x)),
      backward_(backward),
      acc_(GroupElement::identity(phi.tag(), phi.group_torus_dim())) {
  if (flow.dim() != phi.base_dim()) throw Error(ErrorCode::DimensionMismatch, "CocycleWalk: flow and cocycle dimensions differ");
}

GroupElement CocycleWalk::value() const { return backward_ ? acc_.inverse() : acc_; }

void CocycleWalk::advance() {
  if (backward_) {
    --index_;
    acc_ = group_multiply(phi_->evaluate(flow_advance(x_, static_cast<double>(index_), *flow_)), acc_);
  } else {
    acc_ = group_multiply(acc_, phi_->evaluate(flow_advance(x_, static_cast<double>(index_), *flow_)));
    ++index_;
  }
  if (acc_.tag() != GroupTag::Torus && std::labs(index_) % kRenormalizeEvery == 0) {
    acc_ = GroupElement::unchecked(acc_.tag(), newton_reunitarize(acc_.matrix()));
  }
}

double cocycle_identity_check(const Cocycle& phi, const TranslationFlow& flow, long m, long n,
                              const TorusPoint& x) {
  const GroupElement lhs = iterate(phi, flow, m + n, x);
  const GroupElement rhs = group_multiply(iterate(phi, flow, m, x),
                                          iterate(phi, flow, n, flow_advance(x, static_cast<double>(m), flow)));
  return group_distance(lhs, rhs);
}

CocycleEvaluator conjugate_cohomologous(const Cocycle& xi, const TransferFunction& zeta,
                                        const TranslationFlow& flow) {
  if (xi.tag() != zeta.tag()) {
    throw Error(ErrorCode::TagMismatch, std::string("conjugate_cohomologous: cocycle in ") + to_string(xi.tag()) +
                                            ", transfer function in " + to_string(zeta.tag()));
  }
  if (xi.base_dim() != flow.dim()) throw Error(ErrorCode::DimensionMismatch, "conjugate_cohomologous: flow dimension");
  return [xi, zeta, flow](const TorusPoint& x) {
    return group_multiply(group_multiply(zeta(x).inverse(), xi.evaluate(x)), zeta(flow_advance(x, 1.0, flow)));
  };
}

CMatrix represent_in_frame(const Cocycle& phi, const Irrep& pi, const GroupElement& g, Frame frame) {
  phi.check_compatible(pi);
  if (frame == Frame::Raw || phi.tag() == GroupTag::Torus) return represent(pi, g);
  const GroupElement conj = phi.conjugator();
  const CMatrix& h = conj.matrix();
  if (exact_identity(h)) return represent(pi, g);
  return represent(pi, GroupElement::unchecked(g.tag(), h.adjoint() * g.matrix() * h));
}

CMatrix rep_of_cocycle(const Cocycle& phi, const Irrep& pi, const TorusPoint& x, Frame frame) {
  return represent_in_frame(phi, pi, phi.evaluate(x), frame);
}

CMatrix lie_derivative_of_rep(const Cocycle& phi, const Irrep& pi, const TranslationFlow& flow,
                              const TorusPoint& x, Frame frame) {
  phi.check_compatible(pi);
  if (flow.dim() != phi.base_dim() || x.dim() != phi.base_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "lie_derivative_of_rep: dimension mismatch");
  }
  const DiagonalPhases ph = diagonal_phases(phi, pi, flow, x);
  CMatrix d(ph.theta.size());
  for (std::size_t j = 0; j < ph.theta.size(); ++j) {
    d(j, j) = Complex(0.0, kTwoPi * ph.rate[j]) * std::polar(1.0, kTwoPi * wrap_unit(ph.theta[j]));
  }
  if (frame == Frame::Raw && phi.tag() != GroupTag::Torus) {
    const CMatrix ph_h = represent(pi, phi.conjugator());
    return ph_h * d * ph_h.adjoint();
  }
  return d;
}

RepJet rep_jet(const Cocycle& phi, const Irrep& pi, const TranslationFlow& flow, const TorusPoint& x,
               Frame frame) {
  if (frame == Frame::Raw && phi.tag() != GroupTag::Torus) {
    return {rep_of_cocycle(phi, pi, x, frame), lie_derivative_of_rep(phi, pi, flow, x, frame)};
  }
  phi.check_compatible(pi);
  if (flow.dim() != phi.base_dim() || x.dim() != phi.base_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "rep_jet: dimension mismatch");
  }
  const DiagonalPhases ph = diagonal_phases(phi, pi, flow, x);
  RepJet jet{CMatrix(ph.theta.size()), CMatrix(ph.theta.size())};
  for (std::size_t j = 0; j < ph.theta.size(); ++j) {
    jet.value(j, j) = std::polar(1.0, kTwoPi * wrap_unit(ph.theta[j]));
    jet.derivative(j, j) = Complex(0.0, kTwoPi * ph.rate[j]) * jet.value(j, j);
  }
  return jet;
}

}  // namespace skewspec
