#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dslab/field.hpp"

namespace dslab {

/// A Fourier multiplier m(xi). The evaluator must be pure.
struct FourierSymbol {
  std::function<Complex(std::span<const double>)> evaluator;
  std::string description;
};

/// (1 + |xi|^2)^{s/2}, i.e. <D>^s.
FourierSymbol bessel_symbol(double s);
/// |xi|^2, the symbol of -Laplacian.
FourierSymbol laplacian_symbol();
/// xi_axis, the symbol of D_axis = -i d/dx_axis.
FourierSymbol derivative_symbol(int axis);
FourierSymbol product(FourierSymbol a, FourierSymbol b);

/// A symbol evaluated once on every mode of a grid, in FFT order.
class MultiplierTable {
 public:
  MultiplierTable(const Grid& grid, const FourierSymbol& symbol);
  MultiplierTable(Grid grid, std::vector<Complex> values, std::string description);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Complex> values() const noexcept { return values_; }
  const std::string& description() const noexcept { return description_; }

 private:
  Grid grid_;
  std::vector<Complex> values_;
  std::string description_;
};

/// <D>^s tabulated through |xi|^2 (cheaper than the generic evaluator path).
MultiplierTable bessel_table(const Grid& grid, double s);

/// inverse-FFT(m(xi) * FFT(f)).
ComplexField apply_multiplier(const ComplexField& f, const FourierSymbol& m);
ComplexField apply_multiplier(const ComplexField& f, const MultiplierTable& m);
/// Multiplies a field that is already in Fourier space.
void multiply_in_place(std::span<Complex> spectrum, const MultiplierTable& m);

ComplexField forward_transform(const ComplexField& f);
ComplexField inverse_transform(const ComplexField& spectrum);

/// <x>^s = (1 + |x|^2)^{s/2} on every grid point.
std::vector<double> weight_table(const Grid& grid, double s);
/// Pointwise multiplication by <x>^s.
ComplexField weight_apply(const ComplexField& f, double s);
void scale_in_place(ComplexField& f, std::span<const double> weight);

/// Parameters of the dilation group generated by A = -(i/2)(x.grad + grad.x).
struct DilationParams {
  double theta = 0.0;
  int dim = 1;
};

/// x -> e^{d theta / 2} f(e^theta x); samples landing outside the box are 0.
/// Grid-exact scale factors are resolved by index lookup, all others by
/// tensor-product trigonometric interpolation. Emits a warning when more than
/// 1% of the requested sample points fall outside the box.
ComplexField dilate(const ComplexField& f, const DilationParams& p);
/// Fraction of grid points whose image e^theta x leaves the box.
double dilation_outside_fraction(const Grid& grid, double theta);
/// True when e^theta maps every in-box grid point onto a grid point.
bool dilation_is_grid_exact(const Grid& grid, double theta);

/// e^{theta (d/2 - d/p)}, the L^p operator norm of the dilation; p may be +inf.
double dilation_lp_factor(double theta, int dim, double p);

}  // namespace dslab
