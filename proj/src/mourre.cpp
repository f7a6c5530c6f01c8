#include "skewspec/mourre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "skewspec/error.hpp"

namespace skewspec {

namespace {

double int_dot(std::span<const int> b, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += b[i] * y[i];
  return s;
}

void check_weights(const Irrep& pi, const ConjugateWeights& a) {
  if (a.a.size() != pi.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "weights have " + std::to_string(a.a.size()) +
                                                  " entries, representation " + pi.label() + " has dimension " +
                                                  std::to_string(pi.dim()));
  }
  for (double v : a.a) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "weights must be finite");
  }
}

double pointwise_commutation(const CMatrix& rep, const ConjugateWeights& a) {
  double r = 0.0;
  for (std::size_t k = 0; k < rep.size(); ++k)
    for (std::size_t l = 0; l < rep.size(); ++l) r = std::max(r, std::abs((a.a[k] - a.a[l]) * rep(l, k)));
  return r;
}

// -i D_a L R*, written into m
void weighted_commutator_into(const CMatrix& lie, const CMatrix& rep, const ConjugateWeights& a, CMatrix& m) {
  const std::size_t d = rep.size();
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t l = 0; l < d; ++l) {
      Complex s = 0.0;
      for (std::size_t j = 0; j < d; ++j)
        if (lie(k, j) != Complex(0.0)) s += lie(k, j) * std::conj(rep(l, j));
      m(k, l) = s * Complex(0.0, -a.a[k]);
    }
}

CMatrix weighted_commutator(const CMatrix& lie, const CMatrix& rep, const ConjugateWeights& a) {
  CMatrix m(rep.size());
  weighted_commutator_into(lie, rep, a, m);
  return m;
}

// out = a b, out distinct from both
void multiply_into(const CMatrix& a, const CMatrix& b, CMatrix& out) {
  const std::size_t d = a.size();
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) out(r, c) = 0.0;
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t k = 0; k < d; ++k) {
      const Complex v = a(r, k);
      if (v == Complex(0.0)) continue;
      for (std::size_t c = 0; c < d; ++c) out(r, c) += v * b(k, c);
    }
}

// sum += t p*
void add_times_adjoint(CMatrix& sum, const CMatrix& t, const CMatrix& p) {
  const std::size_t d = p.size();
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        if (t(r, k) != Complex(0.0)) s += t(r, k) * std::conj(p(c, k));
      sum(r, c) += s;
    }
}

CMatrix M_unchecked(const Cocycle& phi, const Irrep& pi, const ConjugateWeights& a,
                    const TranslationFlow& flow, const TorusPoint& x, Frame frame) {
  const RepJet jet = rep_jet(phi, pi, flow, x, frame);
  return weighted_commutator(jet.derivative, jet.value, a);
}

// Running sum of pi(phi^(n)) M(F_n x) pi(phi^(n))* along one orbit. pi(phi^(n)) is
// carried as the product of the per-step matrices, with a Newton polar step now and then.
class AverageAccumulator {
 public:
  AverageAccumulator(const Cocycle& phi, const Irrep& pi, const ConjugateWeights& a,
                     const TranslationFlow& flow, const TorusPoint& x, Frame frame)
      : phi_(phi), pi_(pi), a_(a), flow_(flow), x_(x), frame_(frame),
        p_(CMatrix::identity(pi.dim())), m_(pi.dim()), t_(pi.dim()), sum_(pi.dim()) {}

  void step() {
    const TorusPoint xn = flow_advance(x_, static_cast<double>(count_), flow_);
    const RepJet jet = rep_jet(phi_, pi_, flow_, xn, frame_);
    weighted_commutator_into(jet.derivative, jet.value, a_, m_);
    multiply_into(p_, m_, t_);
    add_times_adjoint(sum_, t_, p_);
    multiply_into(p_, jet.value, t_);
    std::swap(p_, t_);
    if (++count_ % kPolarEvery == 0) p_ = newton_reunitarize(p_);
  }

  std::size_t count() const { return count_; }
  CMatrix mean() const { return sum_ * Complex(1.0 / static_cast<double>(count())); }

 private:
  static constexpr std::size_t kPolarEvery = 64;
  const Cocycle& phi_;
  const Irrep& pi_;
  const ConjugateWeights& a_;
  const TranslationFlow& flow_;
  TorusPoint x_;
  Frame frame_;
  std::size_t count_ = 0;
  CMatrix p_;
  CMatrix m_;
  CMatrix t_;
  CMatrix sum_;
};

void require_commuting(const Cocycle& phi, const Irrep& pi, const ConjugateWeights& a, const TorusPoint& x,
                       Frame frame) {
  const double r = pointwise_commutation(rep_of_cocycle(phi, pi, x, frame), a);
  if (r > kCommutationTolerance) {
    std::ostringstream os;
    os << "commutation (a_k - a_l)(pi o phi)_{lk} = 0 fails for " << pi.label() << " in the " << to_string(frame)
       << " frame: residual " << r << " > " << kCommutationTolerance;
    throw Error(ErrorCode::CommutationViolation, os.str());
  }
}

void check_inputs(const Cocycle& phi, const Irrep& pi, const ConjugateWeights& a, const TranslationFlow& flow) {
  phi.check_compatible(pi);
  check_weights(pi, a);
  if (flow.dim() != phi.base_dim()) throw Error(ErrorCode::DimensionMismatch, "flow and cocycle dimensions differ");
}

}  // namespace

double commutation_check(const Cocycle& phi, const Irrep& pi, const ConjugateWeights& a,
                         const TorusGrid& grid, Frame frame) {
  phi.check_compatible(pi);
  check_weights(pi, a);
  if (std::all_of(a.a.begin(), a.a.end(), [&](double v) { return v == a.a.front(); })) return 0.0;
  double r = 0.0;
  for (std::size_t i = 0; i < grid.count(); ++i)
    r = std::max(r, pointwise_commutation(rep_of_cocycle(phi, pi, grid.point(i), frame), a));
  return r;
}

CMatrix matrix_M(const Cocycle& phi, const Irrep& pi, const ConjugateWeights& a,
                 const TranslationFlow& flow, const TorusPoint& x, Frame frame) {
  check_inputs(phi, pi, a, flow);
  require_commuting(phi, pi, a, x, frame);
  return M_unchecked(phi, pi, a, flow, x, frame);
}

CMatrix matrix_M_N_average(const Cocycle& phi, const Irrep& pi, const ConjugateWeights& a,
                           const TranslationFlow& flow, std::size_t N, const TorusPoint& x, Frame frame) {
  check_inputs(phi, pi, a, flow);
  if (N == 0) throw Error(ErrorCode::InvalidArgument, "matrix_M_N_average: N must be >= 1");
  require_commuting(phi, pi, a, x, frame);
  AverageAccumulator acc(phi, pi, a, flow, x, frame);
  for (std::size_t n = 0; n < N; ++n) acc.step();
  return acc.mean();
}

CMatrix matrix_M_N_degree(const Cocycle& phi, const Irrep& pi, const ConjugateWeights& a,
                          const TranslationFlow& flow, std::size_t N, const TorusPoint& x, Frame frame) {
  check_inputs(phi, pi, a, flow);
  if (N == 0) throw Error(ErrorCode::InvalidArgument, "matrix_M_N_degree: N must be >= 1");
  require_commuting(phi, pi, a, x, frame);
  const std::size_t d = pi.dim();
  CMatrix product = CMatrix::identity(d);
  CMatrix derivative(d);
  for (std::size_t n = 0; n < N; ++n) {
    const TorusPoint xn = flow_advance(x, static_cast<double>(n), flow);
    const RepJet jet = rep_jet(phi, pi, flow, xn, frame);
    derivative = derivative * jet.value + product * jet.derivative;
    product = product * jet.value;
  }
  CMatrix m = derivative * product.adjoint();
  const double inv = 1.0 / static_cast<double>(N);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t l = 0; l < d; ++l) m(k, l) *= Complex(0.0, -a.a[k] * inv);
  return m;
}

ConjugateWeights canonical_weights(const Cocycle& phi, const Irrep& pi, const TranslationFlow& flow) {
  phi.check_compatible(pi);
  if (flow.dim() != phi.base_dim()) throw Error(ErrorCode::DimensionMismatch, "flow and cocycle dimensions differ");
  const auto y = flow.velocity();
  ConjugateWeights w;
  if (const auto* ab = std::get_if<AbelianAffine>(&phi.family())) {
    const auto& q = std::get<AbelianChar>(pi.kind()).q;
    std::vector<int> btq(phi.base_dim(), 0);
    for (std::size_t r = 0; r < q.size(); ++r)
      for (std::size_t c = 0; c < btq.size(); ++c) btq[c] += q[r] * ab->B[r][c];
    if (std::all_of(btq.begin(), btq.end(), [](int v) { return v == 0; })) {
      throw Error(ErrorCode::DegenerateWeights, "canonical weights undefined: B^T q = 0 for " + pi.label());
    }
    const double s = int_dot(btq, y);
    if (s == 0.0) throw Error(ErrorCode::DegenerateWeights, "canonical weights undefined: y.(B^T q) = 0 for " + pi.label());
    w.a = {1.0 / (kTwoPi * s)};
  } else if (const auto* su = std::get_if<Su2Diag>(&phi.family())) {
    const int n = std::get<Su2Irrep>(pi.kind()).n;
    const double s = int_dot(su->b, y);
    if (s == 0.0) throw Error(ErrorCode::DegenerateWeights, "canonical weights undefined: y.b = 0");
    for (int j = 0; j <= n; ++j) w.a.push_back((2 * j - n) / (kTwoPi * s));
  } else {
    const auto& u = std::get<U2Diag>(phi.family());
    const auto [m, n] = std::get<U2Irrep>(pi.kind());
    for (int j = 0; j <= n; ++j) {
      // (2m-n) b_+ + (2j-n) b_- = 2((m+j-n) b1 + (m-j) b2), kept integral
      std::vector<int> c(u.b1.size());
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = 2 * ((m + j - n) * u.b1[i] + (m - j) * u.b2[i]);
      w.a.push_back(int_dot(c, y) / kPi);
    }
    if (std::all_of(w.a.begin(), w.a.end(), [](double v) { return v == 0.0; })) {
      throw Error(ErrorCode::DegenerateWeights,
                  "canonical weights undefined: (2m-n)(b_+.y) + (2j-n)(b_-.y) vanishes for every j at " + pi.label());
    }
  }
  return w;
}

std::vector<std::size_t> doubling_schedule(std::size_t N_max) {
  if (N_max == 0) throw Error(ErrorCode::InvalidArgument, "N_max must be >= 1");
  std::vector<std::size_t> s;
  for (std::size_t N = 1; N <= N_max; N *= 2) s.push_back(N);
  if (s.back() != N_max) s.push_back(N_max);
  return s;
}

std::vector<LambdaStar> lambda_star_schedule(const Cocycle& phi, const Irrep& pi, const ConjugateWeights& a,
                                             const TranslationFlow& flow, const std::vector<std::size_t>& schedule,
                                             const TorusGrid& grid, Frame frame, double* herm_out) {
  check_inputs(phi, pi, a, flow);
  if (schedule.empty() || schedule.front() == 0 || !std::is_sorted(schedule.begin(), schedule.end())) {
    throw Error(ErrorCode::InvalidArgument, "lambda_star_schedule: schedule must be ascending and >= 1");
  }
  if (grid.dim() != phi.base_dim()) throw Error(ErrorCode::DimensionMismatch, "grid and cocycle dimensions differ");
  std::vector<LambdaStar> out;
  for (auto N : schedule) out.push_back({N, std::numeric_limits<double>::infinity(), grid.point(0)});
  double herm = 0.0;
  for (std::size_t i = 0; i < grid.count(); ++i) {
    const TorusPoint x = grid.point(i);
    require_commuting(phi, pi, a, x, frame);
    AverageAccumulator acc(phi, pi, a, flow, x, frame);
    std::size_t slot = 0;
    while (slot < schedule.size()) {
      acc.step();
      if (acc.count() == schedule[slot]) {
        const CMatrix mn = acc.mean();
        herm = std::max(herm, hermiticity_residual(mn));
        const double lam = min_eigenvalue(mn);
        if (lam < out[slot].value) {
          out[slot].value = lam;
          out[slot].argmin = x;
        }
        ++slot;
      }
    }
  }
  if (herm_out) *herm_out = herm;
  return out;
}

LambdaStar lambda_star_N(const Cocycle& phi, const Irrep& pi, const ConjugateWeights& a,
                         const TranslationFlow& flow, std::size_t N, const TorusGrid& grid, Frame frame) {
  return lambda_star_schedule(phi, pi, a, flow, {N}, grid, frame).front();
}

double u2_infimum(std::span<const int> b1, std::span<const int> b2, std::span<const double> y, int m, int n) {
  if (b1.size() != b2.size() || b1.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "u2_infimum: b1, b2, y lengths differ");
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "u2_infimum: n must be >= 0");
  double inf = std::numeric_limits<double>::infinity();
  std::vector<int> c(b1.size());
  for (int k = 0; k <= n; ++k) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 2 * ((m + k - n) * b1[i] + (m - k) * b2[i]);
    const double w = int_dot(c, y);
    inf = std::min(inf, w * w);
  }
  return inf;
}

std::vector<AdmissibleEntry> u2_admissible_set(std::span<const int> b1, std::span<const int> b2,
                                               std::span<const double> y, int m_lo, int m_hi, int n_lo, int n_hi) {
  if (m_lo > m_hi || n_lo > n_hi || n_lo < 0) throw Error(ErrorCode::InvalidArgument, "u2_admissible_set: bad ranges");
  std::vector<AdmissibleEntry> out;
  for (int m = m_lo; m <= m_hi; ++m)
    for (int n = n_lo; n <= n_hi; ++n) {
      const double inf = u2_infimum(b1, b2, y, m, n);
      if (inf > 0.0) out.push_back({m, n, inf});
    }
  return out;
}

const char* to_string(Verdict v) noexcept { return v == Verdict::PurelyAC ? "PurelyAC" : "Inconclusive"; }

MourreReport verdict(const Cocycle& phi, const Irrep& pi, const TranslationFlow& flow, const TorusGrid& grid,
                     const VerdictOptions& opts) {
  MourreReport rep{.pi = pi, .weights = std::nullopt, .grid = {}, .table = {}, .verdict_N = std::nullopt, .notes = {}};
  rep.grid.assign(grid.sizes().begin(), grid.sizes().end());
  rep.frame = opts.frame;
  rep.pos_tol = opts.pos_tol;
  phi.check_compatible(pi);

  if (opts.weights) {
    rep.weights = opts.weights;
  } else {
    try {
      rep.weights = canonical_weights(phi, pi, flow);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateWeights) throw;
      rep.notes.emplace_back(e.what());
      return rep;
    }
  }
  const ConjugateWeights& a = *rep.weights;

  rep.commutation_residual = commutation_check(phi, pi, a, grid, opts.frame);
  if (rep.commutation_residual > kCommutationTolerance) {
    std::ostringstream os;
    os << "commutation residual " << rep.commutation_residual << " exceeds " << kCommutationTolerance
       << "; M_N is not computed";
    rep.notes.push_back(os.str());
    return rep;
  }

  rep.table = lambda_star_schedule(phi, pi, a, flow, doubling_schedule(opts.N_max), grid, opts.frame,
                                   &rep.hermiticity_residual);
  for (const auto& row : rep.table) {
    const CMatrix avg = matrix_M_N_average(phi, pi, a, flow, row.N, row.argmin, opts.frame);
    const CMatrix deg = matrix_M_N_degree(phi, pi, a, flow, row.N, row.argmin, opts.frame);
    rep.degree_residual = std::max(rep.degree_residual, max_abs_diff(avg, deg));
    if (!rep.verdict_N && row.value > opts.pos_tol) rep.verdict_N = row.N;
  }
  if (rep.verdict_N) {
    rep.verdict = Verdict::PurelyAC;
    rep.lebesgue = flow.ergodic_declared();
  } else {
    rep.notes.emplace_back("lambda_{*,N} <= pos_tol for every probed N; no conclusion can be drawn");
  }
  return rep;
}

std::vector<DiniSample> dini_diagnostic(const Cocycle& phi, const Irrep& pi, const TranslationFlow& flow,
                                        const std::vector<double>& t_grid, const TorusGrid& grid, Frame frame) {
  std::vector<CMatrix> base;
  base.reserve(grid.count());
  for (std::size_t i = 0; i < grid.count(); ++i)
    base.push_back(lie_derivative_of_rep(phi, pi, flow, grid.point(i), frame));
  std::vector<DiniSample> out;
  for (double t : t_grid) {
    if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidArgument, "dini_diagnostic: t must lie in (0, 1]");
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.count(); ++i) {
      const CMatrix moved = lie_derivative_of_rep(phi, pi, flow, flow_advance(grid.point(i), t, flow), frame);
      sup = std::max(sup, max_abs_diff(moved, base[i]));
    }
    out.push_back({t, sup / t});
  }
  return out;
}

std::vector<double> log_spaced_times(std::size_t count, double t_min) {
  if (count == 0 || !(t_min > 0.0 && t_min <= 1.0)) throw Error(ErrorCode::InvalidArgument, "log_spaced_times: bad arguments");
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    t[i] = std::pow(t_min, f);
  }
  return t;
}

}  // namespace skewspec
