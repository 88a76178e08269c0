#include "dslab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dslab {

namespace {

// The FFTW planner is not reentrant; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Grid::Impl {
  int dim = 0;
  int n = 0;
  double half_length = 0.0;
  double spacing = 0.0;
  std::size_t size = 0;
  std::vector<double> coords;
  std::vector<double> freqs;
  std::vector<double> r2;
  std::vector<double> xi2;
  std::vector<std::size_t> strides;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

Grid::Grid(int dim, int n_per_axis, double half_length) {
  if (dim < 1) throw std::invalid_argument("grid dimension must be >= 1");
  if (n_per_axis < 4 || n_per_axis % 2 != 0) {
    throw std::invalid_argument("points per axis must be even and >= 4, got " +
                                std::to_string(n_per_axis));
  }
  if (!(half_length > 0.0) || !std::isfinite(half_length)) {
    throw std::invalid_argument("half length must be positive");
  }

  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->n = n_per_axis;
  impl->half_length = half_length;
  impl->spacing = 2.0 * half_length / n_per_axis;
  impl->size = 1;
  for (int a = 0; a < dim; ++a) impl->size *= static_cast<std::size_t>(n_per_axis);

  impl->coords.resize(n_per_axis);
  impl->freqs.resize(n_per_axis);
  const double dk = std::numbers::pi / half_length;
  for (int i = 0; i < n_per_axis; ++i) {
    impl->coords[i] = -half_length + i * impl->spacing;
    const int k = (i <= n_per_axis / 2) ? i : i - n_per_axis;
    impl->freqs[i] = dk * k;
  }

  impl->strides.assign(dim, 1);
  for (int a = dim - 2; a >= 0; --a) impl->strides[a] = impl->strides[a + 1] * n_per_axis;

  impl->r2.assign(impl->size, 0.0);
  impl->xi2.assign(impl->size, 0.0);
  for (std::size_t flat = 0; flat < impl->size; ++flat) {
    double r2 = 0.0;
    double k2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const int i = static_cast<int>((flat / impl->strides[a]) % n_per_axis);
      r2 += impl->coords[i] * impl->coords[i];
      k2 += impl->freqs[i] * impl->freqs[i];
    }
    impl->r2[flat] = r2;
    impl->xi2[flat] = k2;
  }

  {
    std::lock_guard lock(planner_mutex());
    std::vector<int> dims(dim, n_per_axis);
    auto* scratch = fftw_alloc_complex(impl->size);
    impl->forward = fftw_plan_dft(dim, dims.data(), scratch, scratch, FFTW_FORWARD, FFTW_ESTIMATE);
    impl->backward = fftw_plan_dft(dim, dims.data(), scratch, scratch, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(scratch);
  }
  if (!impl->forward || !impl->backward) throw std::runtime_error("FFT planning failed");

  impl_ = std::move(impl);
}

int Grid::dim() const noexcept { return impl_->dim; }
int Grid::n_per_axis() const noexcept { return impl_->n; }
double Grid::half_length() const noexcept { return impl_->half_length; }
double Grid::spacing() const noexcept { return impl_->spacing; }
double Grid::cell_volume() const noexcept { return std::pow(impl_->spacing, impl_->dim); }
std::size_t Grid::size() const noexcept { return impl_->size; }

std::span<const double> Grid::axis_coordinates() const noexcept { return impl_->coords; }
std::span<const double> Grid::axis_frequencies() const noexcept { return impl_->freqs; }
std::span<const double> Grid::radius_squared() const noexcept { return impl_->r2; }
std::span<const double> Grid::frequency_squared() const noexcept { return impl_->xi2; }

std::size_t Grid::stride(int axis) const noexcept { return impl_->strides[axis]; }

int Grid::axis_index(std::size_t flat, int axis) const noexcept {
  return static_cast<int>((flat / impl_->strides[axis]) % impl_->n);
}

void Grid::point(std::size_t flat, std::span<double> x) const noexcept {
  for (int a = 0; a < impl_->dim; ++a) x[a] = impl_->coords[axis_index(flat, a)];
}

void Grid::frequency(std::size_t flat, std::span<double> xi) const noexcept {
  for (int a = 0; a < impl_->dim; ++a) xi[a] = impl_->freqs[axis_index(flat, a)];
}

void Grid::forward_fft(std::span<Complex> data) const {
  if (data.size() != impl_->size) throw std::invalid_argument("FFT buffer size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(impl_->forward, p, p);
}

void Grid::inverse_fft(std::span<Complex> data) const {
  if (data.size() != impl_->size) throw std::invalid_argument("FFT buffer size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(impl_->backward, p, p);
  const double scale = 1.0 / static_cast<double>(impl_->size);
  for (auto& v : data) v *= scale;
}

bool Grid::operator==(const Grid& other) const noexcept {
  if (impl_ == other.impl_) return true;
  return impl_->dim == other.impl_->dim && impl_->n == other.impl_->n &&
         impl_->half_length == other.impl_->half_length;
}

Grid make_grid(int dim, int n_per_axis, double half_length) {
  return Grid(dim, n_per_axis, half_length);
}

}  // namespace dslab
