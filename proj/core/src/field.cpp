#include "dslab/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dslab {

namespace {

void require_same_grid(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
}

}  // namespace

ComplexField::ComplexField(Grid grid) : grid_(std::move(grid)), values_(grid_.size()) {}

ComplexField::ComplexField(Grid grid, Buffer values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("field length does not match grid point count");
  }
}

ComplexField& ComplexField::operator+=(const ComplexField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ComplexField& ComplexField::operator*=(Complex s) noexcept {
  for (auto& v : values_) v *= s;
  return *this;
}

ComplexField& ComplexField::axpy(Complex s, const ComplexField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * other.values_[i];
  return *this;
}

bool ComplexField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](const Complex& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

Complex inner(const ComplexField& f, const ComplexField& g) {
  require_same_grid(f, g);
  Complex acc{};
  const auto a = f.values();
  const auto b = g.values();
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
  return acc * f.grid().cell_volume();
}

Complex inner(const ComplexField& f, const ComplexField& g, std::span<const double> weight) {
  require_same_grid(f, g);
  Complex acc{};
  const auto a = f.values();
  const auto b = g.values();
  for (std::size_t i = 0; i < a.size(); ++i) acc += weight[i] * a[i] * std::conj(b[i]);
  return acc * f.grid().cell_volume();
}

double l2_norm(const ComplexField& f) {
  double acc = 0.0;
  for (const auto& v : f.values()) acc += std::norm(v);
  return std::sqrt(acc * f.grid().cell_volume());
}

double l2_norm(const ComplexField& f, std::span<const double> weight) {
  double acc = 0.0;
  const auto a = f.values();
  for (std::size_t i = 0; i < a.size(); ++i) acc += weight[i] * std::norm(a[i]);
  return std::sqrt(acc * f.grid().cell_volume());
}

double lp_norm(const ComplexField& f, double p) {
  if (p < 1.0) throw std::invalid_argument("L^p norm requires p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  for (const auto& v : f.values()) acc += std::pow(std::abs(v), p);
  return std::pow(acc * f.grid().cell_volume(), 1.0 / p);
}

double spectral_l2_norm(std::span<const Complex> transform, const Grid& grid) {
  double acc = 0.0;
  for (const auto& v : transform) acc += std::norm(v);
  return std::sqrt(acc * grid.cell_volume() / static_cast<double>(grid.size()));
}

ComplexField sample(const Grid& grid, const std::function<Complex(std::span<const double>)>& fn) {
  ComplexField f(grid);
  std::vector<double> x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    f[i] = fn(x);
  }
  return f;
}

ComplexField random_field(const Grid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexField f(grid);
  for (auto& v : f.values()) {
    const double re = normal(rng);
    const double im = normal(rng);
    v = Complex(re, im);
  }
  f *= 1.0 / l2_norm(f);
  return f;
}

ComplexField plane_wave(const Grid& grid, std::span<const int> modes) {
  if (static_cast<int>(modes.size()) != grid.dim()) {
    throw std::invalid_argument("plane wave needs one mode number per axis");
  }
  const double dk = std::numbers::pi / grid.half_length();
  return sample(grid, [&](std::span<const double> x) {
    double phase = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) phase += dk * modes[a] * x[a];
    return std::polar(1.0, phase);
  });
}

ComplexField gaussian_packet(const Grid& grid, std::span<const double> center, double width,
                             std::span<const double> momentum) {
  if (!(width > 0.0)) throw std::invalid_argument("packet width must be positive");
  return sample(grid, [&](std::span<const double> x) {
    double r2 = 0.0;
    double phase = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
      const double c = center.empty() ? 0.0 : center[a];
      const double k = momentum.empty() ? 0.0 : momentum[a];
      r2 += (x[a] - c) * (x[a] - c);
      phase += k * x[a];
    }
    return std::polar(std::exp(-r2 / (2.0 * width * width)), phase);
  });
}

double boundary_mass_fraction(const ComplexField& f, double layer) {
  const Grid& g = f.grid();
  const double cutoff = (1.0 - layer) * g.half_length();
  const auto coords = g.axis_coordinates();
  double total = 0.0;
  double edge = 0.0;
  const auto v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double m = std::norm(v[i]);
    total += m;
    for (int a = 0; a < g.dim(); ++a) {
      if (std::abs(coords[g.axis_index(i, a)]) > cutoff) {
        edge += m;
        break;
      }
    }
  }
  return total > 0.0 ? edge / total : 0.0;
}

}  // namespace dslab
