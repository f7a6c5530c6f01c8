#include "skewspec/koopman.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "skewspec/error.hpp"

namespace skewspec {

namespace {

constexpr std::size_t kChunk = 256;

Complex pairwise_sum(std::span<const Complex> v) {
  if (v.empty()) return 0.0;
  if (v.size() == 1) return v[0];
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

std::vector<Complex> eval_components(const std::vector<TrigPoly>& comps, const TorusPoint& x) {
  std::vector<Complex> out(comps.size());
  for (std::size_t k = 0; k < comps.size(); ++k) out[k] = comps[k](x);
  return out;
}

// (1/d) sum_{k,l} v_k R_{lk} conj(w_l)
Complex block_pairing(const std::vector<Complex>& v, const CMatrix& r, const std::vector<Complex>& w_conj) {
  Complex s = 0.0;
  for (std::size_t l = 0; l < r.size(); ++l) {
    Complex row = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) row += r(l, k) * v[k];
    s += row * w_conj[l];
  }
  return s / static_cast<double>(r.size());
}

}  // namespace

ObservableBlock::ObservableBlock(Cocycle cocycle, TranslationFlow flow, Irrep pi, std::size_t row,
                                 std::vector<TrigPoly> components, Frame frame)
    : cocycle_(std::move(cocycle)),
      flow_(std::move(flow)),
      pi_(std::move(pi)),
      row_(row),
      components_(std::move(components)),
      frame_(frame) {
  cocycle_.check_compatible(pi_);
  if (flow_.dim() != cocycle_.base_dim()) throw Error(ErrorCode::DimensionMismatch, "ObservableBlock: flow and cocycle dimensions differ");
  if (row_ >= pi_.dim()) throw Error(ErrorCode::InvalidArgument, "ObservableBlock: row index out of range");
  if (components_.size() != pi_.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "ObservableBlock: " + std::to_string(components_.size()) +
                                                  " components for a representation of dimension " +
                                                  std::to_string(pi_.dim()));
  }
  for (const auto& c : components_) {
    if (c.dim() != cocycle_.base_dim()) throw Error(ErrorCode::DimensionMismatch, "ObservableBlock: component dimension");
  }
}

ObservableBlock ObservableBlock::first_mode(Cocycle cocycle, TranslationFlow flow, Irrep pi, std::size_t row,
                                            Frame frame) {
  Frequency k(cocycle.base_dim(), 0);
  k[0] = 1;
  std::vector<TrigPoly> comps(pi.dim(), TrigPoly::mode(k));
  return ObservableBlock(std::move(cocycle), std::move(flow), std::move(pi), row, std::move(comps), frame);
}

double ObservableBlock::norm_squared() const noexcept {
  double s = 0.0;
  for (const auto& c : components_) s += c.l2_norm_squared();
  return s / static_cast<double>(components_.size());
}

ObservableBlock ObservableBlock::modulated(std::size_t k0) const {
  if (k0 >= cocycle_.base_dim()) throw Error(ErrorCode::InvalidArgument, "modulated: coordinate index out of range");
  std::vector<TrigPoly> comps;
  comps.reserve(components_.size());
  for (const auto& c : components_) {
    TrigPoly shifted(c.dim());
    for (const auto& [freq, coef] : c.terms()) {
      Frequency k = freq;
      k[k0] += 1;
      shifted.add_term(k, coef);
    }
    comps.push_back(std::move(shifted));
  }
  return ObservableBlock(cocycle_, flow_, pi_, row_, std::move(comps), frame_);
}

BlockEvaluator apply_koopman_power(const ObservableBlock& psi, long n) {
  return [psi, n](const TorusPoint& x) {
    const std::vector<Complex> v =
        eval_components(psi.components(), flow_advance(x, static_cast<double>(n), psi.flow()));
    const CMatrix r = represent_in_frame(psi.cocycle(), psi.irrep(), iterate(psi.cocycle(), psi.flow(), n, x),
                                         psi.frame());
    std::vector<Complex> out(v.size(), 0.0);
    for (std::size_t l = 0; l < out.size(); ++l)
      for (std::size_t k = 0; k < v.size(); ++k) out[l] += v[k] * r(l, k);
    return out;
  };
}

QuadratureSpec default_quadrature(const ObservableBlock& psi, std::size_t n_max) {
  int f_comp = 0;
  for (const auto& c : psi.components()) f_comp = std::max(f_comp, c.max_frequency());
  const int f_max = std::max({1, f_comp, psi.cocycle().frequency_bound(psi.irrep())});
  const std::size_t d = psi.cocycle().base_dim();
  std::size_t per_dim = std::max<std::size_t>(256, 4 * static_cast<std::size_t>(f_max) * (n_max + 1));
  const auto cap = static_cast<std::size_t>(
      std::floor(std::pow(static_cast<double>(kMaxDefaultQuadraturePoints), 1.0 / static_cast<double>(d)) + 1e-9));
  per_dim = std::min(per_dim, std::max<std::size_t>(cap, 1));
  return QuadratureSpec{std::vector<std::size_t>(d, per_dim)};
}

double quadrature_norm_squared(const BlockEvaluator& v, std::size_t d, std::size_t base_dim,
                               const QuadratureSpec& quad) {
  const TorusGrid grid(quad.sizes);
  if (grid.dim() != base_dim) throw Error(ErrorCode::DimensionMismatch, "quadrature_norm_squared: grid dimension");
  std::vector<Complex> terms(grid.count());
  for (std::size_t i = 0; i < grid.count(); ++i) {
    double s = 0.0;
    for (const auto& c : v(grid.point(i))) s += std::norm(c);
    terms[i] = s;
  }
  return pairwise_sum(terms).real() / static_cast<double>(grid.count() * d);
}

CorrelationSeries correlation_sequence(const ObservableBlock& psi, std::size_t n_max, const QuadratureSpec& quad) {
  const TorusGrid grid(quad.sizes);
  const Cocycle& phi = psi.cocycle();
  if (grid.dim() != phi.base_dim()) throw Error(ErrorCode::DimensionMismatch, "correlation_sequence: grid dimension");

  CorrelationSeries out;
  out.n_max = n_max;
  out.quad = quad;
  int f_comp = 0;
  for (const auto& c : psi.components()) f_comp = std::max(f_comp, c.max_frequency());
  const std::size_t needed =
      2 * static_cast<std::size_t>(f_comp) + n_max * static_cast<std::size_t>(phi.frequency_bound(psi.irrep()));
  for (std::size_t s : quad.sizes) {
    if (s <= needed) {
      std::ostringstream os;
      os << "grid size " << s << " does not resolve integrand frequencies up to " << needed
         << "; correlations carry aliasing error";
      out.warnings.push_back(os.str());
      break;
    }
  }

  const std::size_t width = 2 * n_max + 1;
  const std::size_t chunks = (grid.count() + kChunk - 1) / kChunk;
  std::vector<std::vector<Complex>> partial(chunks, std::vector<Complex>(width, 0.0));
  const double w = 1.0 / static_cast<double>(grid.count());

  for (std::size_t chunk = 0; chunk < chunks; ++chunk) {
    auto& acc = partial[chunk];
    const std::size_t end = std::min(grid.count(), (chunk + 1) * kChunk);
    for (std::size_t i = chunk * kChunk; i < end; ++i) {
      const TorusPoint x = grid.point(i);
      std::vector<Complex> base_conj = eval_components(psi.components(), x);
      for (auto& c : base_conj) c = std::conj(c);
      for (bool backward : {false, true}) {
        CocycleWalk walk(phi, psi.flow(), x, backward);
        for (std::size_t step = 0; step <= n_max; ++step) {
          if (step > 0) walk.advance();
          if (backward && step == 0) continue;
          const long n = walk.index();
          const TorusPoint xn = flow_advance(x, static_cast<double>(n), psi.flow());
          const CMatrix r = represent_in_frame(phi, psi.irrep(), walk.value(), psi.frame());
          acc[static_cast<std::size_t>(n + static_cast<long>(n_max))] +=
              w * block_pairing(eval_components(psi.components(), xn), r, base_conj);
        }
      }
    }
  }

  out.values.resize(width);
  std::vector<Complex> column(chunks);
  for (std::size_t idx = 0; idx < width; ++idx) {
    for (std::size_t chunk = 0; chunk < chunks; ++chunk) column[chunk] = partial[chunk][idx];
    out.values[idx] = pairwise_sum(column);
  }
  return out;
}

double modulation_check(const ObservableBlock& psi, std::size_t k0, std::size_t n_max, const QuadratureSpec& quad) {
  const CorrelationSeries plain = correlation_sequence(psi, n_max, quad);
  const CorrelationSeries shifted = correlation_sequence(psi.modulated(k0), n_max, quad);
  const double yk = psi.flow().velocity()[k0];
  double r = 0.0;
  for (long n = -static_cast<long>(n_max); n <= static_cast<long>(n_max); ++n) {
    const Complex factor = std::polar(1.0, kTwoPi * wrap_unit(static_cast<double>(n) * yk));
    r = std::max(r, std::abs(shifted.at(n) - factor * plain.at(n)));
  }
  return r;
}

double wiener_average(const CorrelationSeries& c) {
  double s = 0.0;
  for (const auto& v : c.values) s += std::norm(v);
  return s / static_cast<double>(c.values.size());
}

std::string to_csv(const CorrelationSeries& c) {
  std::string out = "n,re,im\n";
  char buf[96];
  for (long n = -static_cast<long>(c.n_max); n <= static_cast<long>(c.n_max); ++n) {
    const Complex v = c.at(n);
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", n, v.real(), v.imag());
    out += buf;
  }
  return out;
}

}  // namespace skewspec
