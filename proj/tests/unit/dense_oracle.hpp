#pragma once

// Dense-matrix reference implementations for 1D grids. Everything here is
// built from an explicit DFT matrix and Eigen factorizations, independently of
// the FFT-based library code.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "dslab/field.hpp"

namespace dslab::oracle {

inline Eigen::VectorXcd to_vector(const ComplexField& f) {
  Eigen::VectorXcd v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v(i) = f[i];
  return v;
}

inline ComplexField to_field(const Grid& g, const Eigen::VectorXcd& v) {
  ComplexField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = v(i);
  return f;
}

/// Signed integer mode of FFT slot q: 0..N/2 then -N/2+1..-1.
inline int mode_number(int q, int n) { return q <= n / 2 ? q : q - n; }

inline Eigen::VectorXd frequencies_1d(int n, double L) {
  Eigen::VectorXd xi(n);
  for (int q = 0; q < n; ++q) xi(q) = std::numbers::pi * mode_number(q, n) / L;
  return xi;
}

inline Eigen::VectorXd coordinates_1d(int n, double L) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = -L + 2.0 * L * i / n;
  return x;
}

/// Unnormalized forward DFT with the grid's coordinate origin at -L:
/// F(q, j) = exp(-i xi_q x_j) up to the constant phase common to the row.
inline Eigen::MatrixXcd dft_matrix(int n) {
  Eigen::MatrixXcd F(n, n);
  for (int q = 0; q < n; ++q) {
    for (int j = 0; j < n; ++j) {
      F(q, j) = std::polar(1.0, -2.0 * std::numbers::pi * q * j / n);
    }
  }
  return F;
}

/// The Fourier multiplier with values m (FFT order) as a dense matrix.
inline Eigen::MatrixXcd multiplier_matrix(const Eigen::VectorXcd& m) {
  const int n = static_cast<int>(m.size());
  const Eigen::MatrixXcd F = dft_matrix(n);
  return F.adjoint() * m.asDiagonal() * F / static_cast<double>(n);
}

inline Eigen::MatrixXcd derivative_matrix(int n, double L) {
  return multiplier_matrix(frequencies_1d(n, L).cast<Complex>());
}

inline Eigen::MatrixXcd bessel_matrix(int n, double L, double s) {
  const Eigen::VectorXd xi = frequencies_1d(n, L);
  Eigen::VectorXcd m(n);
  for (int q = 0; q < n; ++q) m(q) = std::pow(1.0 + xi(q) * xi(q), 0.5 * s);
  return multiplier_matrix(m);
}

/// D diag(c) D + diag(a) <D>^alpha diag(a), i.e. the 1D damped operator
/// with conformal coefficient c and damping a.
inline Eigen::MatrixXcd damped_operator_matrix(int n, double L, const Eigen::VectorXd& c,
                                               const Eigen::VectorXd& a, double alpha) {
  const Eigen::MatrixXcd D = derivative_matrix(n, L);
  const Eigen::MatrixXcd P = D * c.cast<Complex>().asDiagonal() * D;
  const Eigen::MatrixXcd B =
      a.cast<Complex>().asDiagonal() * bessel_matrix(n, L, alpha) * a.cast<Complex>().asDiagonal();
  return P - Complex(0.0, 1.0) * B;
}

/// Largest singular value of a matrix acting between L^2 spaces with the
/// same quadrature weight (the weight cancels).
inline double operator_norm(const Eigen::MatrixXcd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  return svd.singularValues()(0);
}

}  // namespace dslab::oracle
