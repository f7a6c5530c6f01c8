#include "skewspec/torus_flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "skewspec/error.hpp"

namespace skewspec {

double wrap_unit(double v) noexcept {
  double r = v - std::floor(v);
  // floor can round v - floor(v) up to exactly 1 for tiny negative v
  if (r >= 1.0) r = 0.0;
  return r;
}

double circle_distance(double a, double b) noexcept {
  const double d = wrap_unit(a - b);
  return std::min(d, 1.0 - d);
}

TorusPoint::TorusPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw Error(ErrorCode::InvalidArgument, "TorusPoint: dimension must be >= 1");
  for (auto& c : coords_) c = wrap_unit(c);
}

TranslationFlow::TranslationFlow(std::vector<double> velocity, bool ergodic_declared)
    : y_(std::move(velocity)), ergodic_declared_(ergodic_declared) {
  if (y_.empty()) throw Error(ErrorCode::InvalidArgument, "TranslationFlow: dimension must be >= 1");
}

TorusPoint flow_advance(const TorusPoint& x, double t, const TranslationFlow& flow) {
  if (x.dim() != flow.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "flow_advance: point has dimension " + std::to_string(x.dim()) +
                    ", flow has dimension " + std::to_string(flow.dim()));
  }
  std::vector<double> out(x.dim());
  const auto y = flow.velocity();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + wrap_unit(t * y[i]);
  return TorusPoint(std::move(out));
}

TrigPoly TrigPoly::constant(std::size_t dim, Complex c) {
  TrigPoly p(dim);
  p.add_term(Frequency(dim, 0), c);
  return p;
}

TrigPoly TrigPoly::mode(Frequency k, Complex c) {
  TrigPoly p(k.size());
  p.add_term(k, c);
  return p;
}

TrigPoly TrigPoly::cosine(Frequency k, double amp, double phase) {
  TrigPoly p(k.size());
  Frequency neg(k.size());
  std::transform(k.begin(), k.end(), neg.begin(), [](int v) { return -v; });
  const Complex half = 0.5 * amp * std::polar(1.0, phase);
  p.add_term(k, half);
  p.add_term(neg, std::conj(half));
  return p;
}

void TrigPoly::add_term(const Frequency& k, Complex c) {
  if (k.size() != dim_) {
    throw Error(ErrorCode::DimensionMismatch, "TrigPoly: frequency of dimension " +
                                                  std::to_string(k.size()) + " in a polynomial on T^" +
                                                  std::to_string(dim_));
  }
  auto [it, inserted] = terms_.try_emplace(k, c);
  if (!inserted) it->second += c;
  if (it->second == Complex(0.0)) terms_.erase(it);
}

Complex TrigPoly::coefficient(const Frequency& k) const {
  auto it = terms_.find(k);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

Complex TrigPoly::operator()(const TorusPoint& x) const {
  if (x.dim() != dim_) throw Error(ErrorCode::DimensionMismatch, "TrigPoly: evaluation point dimension");
  Complex sum = 0.0;
  for (const auto& [k, c] : terms_) {
    double phase = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) phase += k[i] * x[i];
    sum += c * std::polar(1.0, kTwoPi * wrap_unit(phase));
  }
  return sum;
}

bool TrigPoly::is_real(double tol) const {
  for (const auto& [k, c] : terms_) {
    Frequency neg(k.size());
    std::transform(k.begin(), k.end(), neg.begin(), [](int v) { return -v; });
    if (std::abs(coefficient(neg) - std::conj(c)) > tol) return false;
  }
  return true;
}

int TrigPoly::max_frequency() const noexcept {
  int m = 0;
  for (const auto& [k, c] : terms_)
    for (int v : k) m = std::max(m, std::abs(v));
  return m;
}

double TrigPoly::l2_norm_squared() const noexcept {
  double s = 0.0;
  for (const auto& [k, c] : terms_) s += std::norm(c);
  return s;
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& rhs) {
  if (rhs.dim_ != dim_) throw Error(ErrorCode::DimensionMismatch, "TrigPoly +=: dimension mismatch");
  for (const auto& [k, c] : rhs.terms_) add_term(k, c);
  return *this;
}

TrigPoly& TrigPoly::operator*=(Complex s) {
  if (s == Complex(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, c] : terms_) c *= s;
  return *this;
}

TrigPoly lie_derivative(const TrigPoly& f, const TranslationFlow& flow) {
  if (f.dim() != flow.dim()) throw Error(ErrorCode::DimensionMismatch, "lie_derivative: dimension mismatch");
  const auto y = flow.velocity();
  TrigPoly out(f.dim());
  for (const auto& [k, c] : f.terms()) {
    double ky = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) ky += k[i] * y[i];
    out.add_term(k, Complex(0.0, kTwoPi * ky) * c);
  }
  return out;
}

Complex lie_derivative_at(const TrigPoly& f, const TranslationFlow& flow, const TorusPoint& x) {
  if (f.dim() != flow.dim() || x.dim() != flow.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "lie_derivative_at: dimension mismatch");
  }
  const auto y = flow.velocity();
  Complex sum = 0.0;
  for (const auto& [k, c] : f.terms()) {
    double ky = 0.0;
    double kx = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      ky += k[i] * y[i];
      kx += k[i] * x[i];
    }
    sum += Complex(0.0, kTwoPi * ky) * c * std::polar(1.0, kTwoPi * wrap_unit(kx));
  }
  return sum;
}

Complex birkhoff_average(const TrigPoly& f, const TranslationFlow& flow, std::size_t N,
                         const TorusPoint& x) {
  if (N == 0) throw Error(ErrorCode::InvalidArgument, "birkhoff_average: N must be >= 1");
  Complex sum = 0.0;
  for (std::size_t n = 0; n < N; ++n) sum += f(flow_advance(x, static_cast<double>(n), flow));
  return sum / static_cast<double>(N);
}

double equidistribution_diagnostic(const TranslationFlow& flow, const Frequency& k,
                                   std::size_t N) {
  if (k.size() != flow.dim()) throw Error(ErrorCode::DimensionMismatch, "equidistribution_diagnostic: frequency dimension");
  if (std::all_of(k.begin(), k.end(), [](int v) { return v == 0; })) {
    throw Error(ErrorCode::InvalidArgument, "equidistribution_diagnostic: k must be nonzero");
  }
  if (N == 0) throw Error(ErrorCode::InvalidArgument, "equidistribution_diagnostic: N must be >= 1");
  const auto y = flow.velocity();
  double ky = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) ky += k[i] * y[i];
  Complex sum = 0.0;
  for (std::size_t n = 0; n < N; ++n)
    sum += std::polar(1.0, kTwoPi * wrap_unit(static_cast<double>(n) * ky));
  return std::abs(sum) / static_cast<double>(N);
}

TorusGrid::TorusGrid(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)), count_(1) {
  if (sizes_.empty()) throw Error(ErrorCode::InvalidArgument, "TorusGrid: dimension must be >= 1");
  for (auto s : sizes_) {
    if (s == 0) throw Error(ErrorCode::InvalidArgument, "TorusGrid: every size must be >= 1");
    count_ *= s;
  }
}

TorusGrid TorusGrid::uniform(std::size_t dim, std::size_t per_dim) {
  return TorusGrid(std::vector<std::size_t>(dim, per_dim));
}

TorusPoint TorusGrid::point(std::size_t index) const {
  std::vector<double> c(sizes_.size());
  for (std::size_t i = sizes_.size(); i-- > 0;) {
    c[i] = static_cast<double>(index % sizes_[i]) / static_cast<double>(sizes_[i]);
    index /= sizes_[i];
  }
  return TorusPoint(std::move(c));
}

}  // namespace skewspec
