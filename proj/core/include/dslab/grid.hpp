#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <new>
#include <span>
#include <vector>

namespace dslab {

using Complex = std::complex<double>;

/// Allocator returning 64-byte aligned storage so that every field buffer has
/// the alignment the cached FFT plans were created with.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() noexcept = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), alignment));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

using Buffer = std::vector<Complex, AlignedAllocator<Complex>>;

/// Periodic box [-L, L)^d sampled with n points per axis.
///
/// Flat indices are row-major with the last axis fastest. Per-axis frequencies
/// are stored in FFT order: xi_k = pi k / L for k = 0..n/2 followed by
/// k = -n/2+1..-1, so the unpaired Nyquist mode carries +pi/h.
///
/// Grid is a cheap handle to immutable shared state (coordinate tables and
/// FFT plans) and may be copied freely across threads.
class Grid {
 public:
  Grid(int dim, int n_per_axis, double half_length);

  int dim() const noexcept;
  int n_per_axis() const noexcept;
  double half_length() const noexcept;
  double spacing() const noexcept;
  /// spacing^d, the quadrature weight of one sample.
  double cell_volume() const noexcept;
  std::size_t size() const noexcept;

  std::span<const double> axis_coordinates() const noexcept;
  std::span<const double> axis_frequencies() const noexcept;

  /// |x|^2 at every grid point.
  std::span<const double> radius_squared() const noexcept;
  /// |xi|^2 at every Fourier mode.
  std::span<const double> frequency_squared() const noexcept;

  /// Per-axis index of a flat index.
  int axis_index(std::size_t flat, int axis) const noexcept;
  void point(std::size_t flat, std::span<double> x) const noexcept;
  void frequency(std::size_t flat, std::span<double> xi) const noexcept;
  std::size_t stride(int axis) const noexcept;

  /// In-place unnormalized forward transform.
  void forward_fft(std::span<Complex> data) const;
  /// In-place inverse transform, divided by the point count.
  void inverse_fft(std::span<Complex> data) const;

  bool operator==(const Grid& other) const noexcept;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

Grid make_grid(int dim, int n_per_axis, double half_length);

}  // namespace dslab
