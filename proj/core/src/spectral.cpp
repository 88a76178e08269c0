#include "dslab/spectral.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dslab/diagnostics.hpp"

namespace dslab {

FourierSymbol bessel_symbol(double s) {
  std::ostringstream name;
  name << "<D>^" << s;
  return {[s](std::span<const double> xi) {
            double k2 = 0.0;
            for (double v : xi) k2 += v * v;
            return Complex(std::pow(1.0 + k2, 0.5 * s), 0.0);
          },
          name.str()};
}

FourierSymbol laplacian_symbol() {
  return {[](std::span<const double> xi) {
            double k2 = 0.0;
            for (double v : xi) k2 += v * v;
            return Complex(k2, 0.0);
          },
          "|xi|^2"};
}

FourierSymbol derivative_symbol(int axis) {
  return {[axis](std::span<const double> xi) { return Complex(xi[axis], 0.0); },
          "D_" + std::to_string(axis)};
}

FourierSymbol product(FourierSymbol a, FourierSymbol b) {
  auto desc = a.description + " * " + b.description;
  return {[a = std::move(a.evaluator), b = std::move(b.evaluator)](std::span<const double> xi) {
            return a(xi) * b(xi);
          },
          std::move(desc)};
}

MultiplierTable::MultiplierTable(const Grid& grid, const FourierSymbol& symbol)
    : grid_(grid), values_(grid.size()), description_(symbol.description) {
  std::vector<double> xi(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.frequency(i, xi);
    values_[i] = symbol.evaluator(xi);
  }
}

MultiplierTable::MultiplierTable(Grid grid, std::vector<Complex> values, std::string description)
    : grid_(std::move(grid)), values_(std::move(values)), description_(std::move(description)) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("multiplier table size mismatch");
}

MultiplierTable bessel_table(const Grid& grid, double s) {
  const auto k2 = grid.frequency_squared();
  std::vector<Complex> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::pow(1.0 + k2[i], 0.5 * s);
  std::ostringstream name;
  name << "<D>^" << s;
  return MultiplierTable(grid, std::move(values), name.str());
}

void multiply_in_place(std::span<Complex> spectrum, const MultiplierTable& m) {
  const auto mv = m.values();
  for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= mv[i];
}

ComplexField forward_transform(const ComplexField& f) {
  ComplexField out = f;
  f.grid().forward_fft(out.values());
  return out;
}

ComplexField inverse_transform(const ComplexField& spectrum) {
  ComplexField out = spectrum;
  spectrum.grid().inverse_fft(out.values());
  return out;
}

ComplexField apply_multiplier(const ComplexField& f, const MultiplierTable& m) {
  if (!(f.grid() == m.grid())) throw std::invalid_argument("multiplier tabulated on another grid");
  ComplexField out = f;
  f.grid().forward_fft(out.values());
  multiply_in_place(out.values(), m);
  f.grid().inverse_fft(out.values());
  return out;
}

ComplexField apply_multiplier(const ComplexField& f, const FourierSymbol& m) {
  return apply_multiplier(f, MultiplierTable(f.grid(), m));
}

std::vector<double> weight_table(const Grid& grid, double s) {
  const auto r2 = grid.radius_squared();
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = s == 0.0 ? 1.0 : std::pow(1.0 + r2[i], 0.5 * s);
  return w;
}

void scale_in_place(ComplexField& f, std::span<const double> weight) {
  auto v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= weight[i];
}

ComplexField weight_apply(const ComplexField& f, double s) {
  ComplexField out = f;
  if (s != 0.0) scale_in_place(out, weight_table(f.grid(), s));
  return out;
}

namespace {

constexpr double kExactTol = 1e-9;

struct AxisMap {
  std::vector<double> targets;  // e^theta x_i
  std::vector<bool> inside;
  std::vector<int> exact_index;  // -1 if not on a grid point
  bool exact = true;
};

AxisMap axis_map(const Grid& grid, double theta) {
  const int n = grid.n_per_axis();
  const double h = grid.spacing();
  const double L = grid.half_length();
  const double scale = std::exp(theta);
  AxisMap m;
  m.targets.resize(n);
  m.inside.resize(n);
  m.exact_index.assign(n, -1);
  const auto x = grid.axis_coordinates();
  for (int i = 0; i < n; ++i) {
    const double s = scale * x[i];
    m.targets[i] = s;
    m.inside[i] = s >= -L - kExactTol * h && s < L - kExactTol * h;
    if (!m.inside[i]) continue;
    const double j = (s + L) / h;
    const double jr = std::round(j);
    if (std::abs(j - jr) < kExactTol && jr >= 0 && jr < n) {
      m.exact_index[i] = static_cast<int>(jr);
    } else {
      m.exact = false;
    }
  }
  return m;
}

// Band-limited interpolation weights: row i evaluates the trigonometric
// interpolant at targets[i]. The Nyquist mode enters as a cosine.
std::vector<Complex> interpolation_matrix(const Grid& grid, const AxisMap& m) {
  const int n = grid.n_per_axis();
  const auto x = grid.axis_coordinates();
  const auto k = grid.axis_frequencies();
  std::vector<Complex> mat(static_cast<std::size_t>(n) * n, Complex{});
  for (int i = 0; i < n; ++i) {
    if (!m.inside[i]) continue;
    if (m.exact_index[i] >= 0) {
      mat[static_cast<std::size_t>(i) * n + m.exact_index[i]] = 1.0;
      continue;
    }
    for (int j = 0; j < n; ++j) {
      const double dx = m.targets[i] - x[j];
      Complex acc{};
      for (int q = 0; q < n; ++q) {
        if (q == n / 2) {
          acc += std::cos(k[q] * dx);
        } else {
          acc += std::polar(1.0, k[q] * dx);
        }
      }
      mat[static_cast<std::size_t>(i) * n + j] = acc / static_cast<double>(n);
    }
  }
  return mat;
}

}  // namespace

double dilation_outside_fraction(const Grid& grid, double theta) {
  const auto m = axis_map(grid, theta);
  std::size_t inside = 0;
  for (bool b : m.inside) inside += b ? 1 : 0;
  const double frac = static_cast<double>(inside) / grid.n_per_axis();
  return 1.0 - std::pow(frac, grid.dim());
}

bool dilation_is_grid_exact(const Grid& grid, double theta) { return axis_map(grid, theta).exact; }

ComplexField dilate(const ComplexField& f, const DilationParams& p) {
  const Grid& grid = f.grid();
  if (p.dim != grid.dim()) throw std::invalid_argument("dilation dimension does not match grid");
  if (!std::isfinite(p.theta)) throw std::invalid_argument("dilation parameter must be finite");
  if (p.theta == 0.0) return f;

  const auto m = axis_map(grid, p.theta);
  const double outside = dilation_outside_fraction(grid, p.theta);
  if (outside > 0.01) {
    std::ostringstream msg;
    msg << "dilation with theta=" << p.theta << " samples " << outside * 100.0
        << "% of points outside the box (treated as 0)";
    warn(msg.str());
  }
  const auto mat = interpolation_matrix(grid, m);
  const int n = grid.n_per_axis();

  Buffer cur(f.values().begin(), f.values().end());
  Buffer next(cur.size());
  std::vector<Complex> line(n);
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const std::size_t stride = grid.stride(axis);
    const std::size_t block = stride * n;
    for (std::size_t base = 0; base < cur.size(); base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t start = base + off;
        for (int j = 0; j < n; ++j) line[j] = cur[start + j * stride];
        for (int i = 0; i < n; ++i) {
          Complex acc{};
          const Complex* row = &mat[static_cast<std::size_t>(i) * n];
          if (m.exact_index[i] >= 0) {
            acc = line[m.exact_index[i]];
          } else if (m.inside[i]) {
            for (int j = 0; j < n; ++j) acc += row[j] * line[j];
          }
          next[start + i * stride] = acc;
        }
      }
    }
    std::swap(cur, next);
  }
  ComplexField out(grid, std::move(cur));
  out *= std::exp(0.5 * grid.dim() * p.theta);
  return out;
}

double dilation_lp_factor(double theta, int dim, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("dilation L^p factor requires p >= 1");
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  return std::exp(theta * (0.5 * dim - dim * inv_p));
}

}  // namespace dslab
