#include "skewspec/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "skewspec/error.hpp"

namespace skewspec {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::TagMismatch: return "group tag mismatch";
    case ErrorCode::InvalidElement: return "invalid group element";
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::CommutationViolation: return "commutation violation";
    case ErrorCode::DegenerateWeights: return "degenerate weights";
    case ErrorCode::ConfigError: return "configuration error";
    case ErrorCode::NotFound: return "not found";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown error";
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : n_(rows.size()), data_() {
  data_.reserve(n_ * n_);
  for (const auto& row : rows) {
    if (row.size() != n_) {
      throw Error(ErrorCode::DimensionMismatch, "CMatrix: rows must form a square");
    }
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> entries) {
  CMatrix m(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(n_);
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t c = 0; c < n_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

Complex CMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

CMatrix& CMatrix::operator+=(const CMatrix& rhs) {
  if (rhs.n_ != n_) throw Error(ErrorCode::DimensionMismatch, "CMatrix +=: size mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& rhs) {
  if (rhs.n_ != n_) throw Error(ErrorCode::DimensionMismatch, "CMatrix -=: size mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
  for (auto& v : data_) v *= s;
  return *this;
}

CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs) {
  const std::size_t n = lhs.size();
  if (rhs.size() != n) throw Error(ErrorCode::DimensionMismatch, "CMatrix *: size mismatch");
  CMatrix out(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex a = lhs(r, k);
      if (a == Complex(0.0)) continue;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += a * rhs(k, c);
    }
  }
  return out;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "max_abs_diff: size mismatch");
  double m = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) m = std::max(m, std::abs(da[i] - db[i]));
  return m;
}

double max_abs(const CMatrix& a) {
  double m = 0.0;
  for (const auto& v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double unitarity_residual(const CMatrix& u) {
  return max_abs_diff(u.adjoint() * u, CMatrix::identity(u.size()));
}

double hermiticity_residual(const CMatrix& a) { return max_abs_diff(a, a.adjoint()); }

CMatrix newton_reunitarize(const CMatrix& u) {
  CMatrix correction = CMatrix::identity(u.size()) * Complex(3.0) - u.adjoint() * u;
  return (u * correction) * Complex(0.5);
}

Complex determinant(const CMatrix& a) {
  const std::size_t n = a.size();
  CMatrix lu = a;
  Complex det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(pivot, col))) pivot = r;
    if (lu(pivot, col) == Complex(0.0)) return 0.0;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu(pivot, c), lu(col, c));
      det = -det;
    }
    det *= lu(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const Complex f = lu(r, col) / lu(col, col);
      for (std::size_t c = col; c < n; ++c) lu(r, c) -= f * lu(col, c);
    }
  }
  return det;
}

namespace {

// Cyclic Jacobi on a dense real symmetric matrix (row-major, size m).
std::vector<double> jacobi_symmetric(std::vector<double> s, std::size_t m,
                                     const EigenOptions& opts) {
  auto at = [&](std::size_t r, std::size_t c) -> double& { return s[r * m + c]; };
  double total = 0.0;
  for (double v : s) total += v * v;
  const double scale = std::max(1.0, std::sqrt(total));

  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = p + 1; q < m; ++q) off += 2.0 * at(p, q) * at(p, q);
    if (std::sqrt(off) < opts.off_tolerance * scale) break;

    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < m; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - sn * akq;
          at(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < m; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - sn * aqk;
          at(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> diag(m);
  for (std::size_t i = 0; i < m; ++i) diag[i] = at(i, i);
  std::sort(diag.begin(), diag.end());
  return diag;
}

}  // namespace

std::vector<double> hermitian_eigenvalues(const CMatrix& a, const EigenOptions& opts) {
  const std::size_t n = a.size();
  const std::size_t m = 2 * n;
  std::vector<double> s(m * m);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const Complex h = 0.5 * (a(r, c) + std::conj(a(c, r)));
      s[r * m + c] = h.real();
      s[r * m + (c + n)] = -h.imag();
      s[(r + n) * m + c] = h.imag();
      s[(r + n) * m + (c + n)] = h.real();
    }
  }
  std::vector<double> doubled = jacobi_symmetric(std::move(s), m, opts);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
  return out;
}

double min_eigenvalue(const CMatrix& a, const EigenOptions& opts) {
  if (a.size() == 0) throw Error(ErrorCode::InvalidArgument, "min_eigenvalue: empty matrix");
  if (a.size() == 1) return a(0, 0).real();
  return hermitian_eigenvalues(a, opts).front();
}

}  // namespace skewspec
