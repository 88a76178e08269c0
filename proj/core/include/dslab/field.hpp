#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>

#include "dslab/grid.hpp"

namespace dslab {

/// Complex samples on a Grid, row-major with the last axis fastest.
class ComplexField {
 public:
  explicit ComplexField(Grid grid);
  ComplexField(Grid grid, Buffer values);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<Complex> values() noexcept { return values_; }
  std::span<const Complex> values() const noexcept { return values_; }
  Complex& operator[](std::size_t i) noexcept { return values_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return values_[i]; }

  ComplexField& operator+=(const ComplexField& other);
  ComplexField& operator-=(const ComplexField& other);
  ComplexField& operator*=(Complex s) noexcept;
  /// this += s * other
  ComplexField& axpy(Complex s, const ComplexField& other);

  friend ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
  friend ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
  friend ComplexField operator*(Complex s, ComplexField a) { return a *= s; }

  bool all_finite() const noexcept;

 private:
  Grid grid_;
  Buffer values_;
};

/// <f, g> = h^d sum f conj(g): linear in the first slot.
Complex inner(const ComplexField& f, const ComplexField& g);
/// Weighted product h^d sum w f conj(g).
Complex inner(const ComplexField& f, const ComplexField& g, std::span<const double> weight);
/// L^2 norm with the box quadrature weight.
double l2_norm(const ComplexField& f);
double l2_norm(const ComplexField& f, std::span<const double> weight);
/// Discrete L^p norm; p = +inf gives the max modulus.
double lp_norm(const ComplexField& f, double p);
/// L^2 norm computed from the unnormalized transform (Plancherel with h^d / N).
double spectral_l2_norm(std::span<const Complex> transform, const Grid& grid);

ComplexField sample(const Grid& grid, const std::function<Complex(std::span<const double>)>& fn);
/// Complex Gaussian white noise normalized to unit L^2 norm.
ComplexField random_field(const Grid& grid, std::mt19937_64& rng);
/// exp(i xi . x) for the integer per-axis mode numbers k (xi_a = pi k_a / L).
ComplexField plane_wave(const Grid& grid, std::span<const int> modes);
/// Gaussian packet exp(-|x - c|^2 / (2 w^2) + i k . x).
ComplexField gaussian_packet(const Grid& grid, std::span<const double> center, double width,
                             std::span<const double> momentum);

/// Fraction of |f|^2 mass lying within `layer` * L of the box faces.
double boundary_mass_fraction(const ComplexField& f, double layer = 0.1);

}  // namespace dslab
