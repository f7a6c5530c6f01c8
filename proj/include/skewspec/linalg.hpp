#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace skewspec {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383280;

/// Dense square complex matrix, row-major. Sizes in this library stay small
/// (representation dimensions up to 21), so no blocking or expression tricks.
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(std::size_t n) : n_(n), data_(n * n) {}
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const Complex> entries);

  std::size_t size() const noexcept { return n_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return data_[r * n_ + c];
  }

  std::span<const Complex> data() const noexcept { return data_; }

  CMatrix adjoint() const;
  Complex trace() const;

  CMatrix& operator+=(const CMatrix& rhs);
  CMatrix& operator-=(const CMatrix& rhs);
  CMatrix& operator*=(Complex s);

  friend CMatrix operator+(CMatrix lhs, const CMatrix& rhs) { return lhs += rhs; }
  friend CMatrix operator-(CMatrix lhs, const CMatrix& rhs) { return lhs -= rhs; }
  friend CMatrix operator*(CMatrix lhs, Complex s) { return lhs *= s; }
  friend CMatrix operator*(Complex s, CMatrix rhs) { return rhs *= s; }
  friend CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs);

  bool operator==(const CMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<Complex> data_;
};

/// max_{ij} |a_ij - b_ij|; sizes must agree.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

/// max_{ij} |a_ij|.
double max_abs(const CMatrix& a);

/// ||U*U - I||_inf (entrywise max).
double unitarity_residual(const CMatrix& u);

/// ||A - A*||_inf (entrywise max).
double hermiticity_residual(const CMatrix& a);

/// One Newton step towards the nearest unitary: U <- U (3I - U*U) / 2.
CMatrix newton_reunitarize(const CMatrix& u);

/// Complex determinant by partial-pivot LU.
Complex determinant(const CMatrix& a);

struct EigenOptions {
  double off_tolerance = 1e-13;
  int max_sweeps = 100;
};

/// Eigenvalues (ascending) of a Hermitian matrix. The matrix is embedded in
/// the 2n x 2n real symmetric form [[Re, -Im], [Im, Re]] and diagonalised by
/// cyclic Jacobi; every eigenvalue of the input appears twice in the
/// embedding, so every second value is kept. Only the Hermitian part of the
/// input is used.
std::vector<double> hermitian_eigenvalues(const CMatrix& a,
                                          const EigenOptions& opts = {});

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMatrix& a, const EigenOptions& opts = {});

}  // namespace skewspec
