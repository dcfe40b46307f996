#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gpe/error.hpp"

namespace gpe {

using complex = std::complex<double>;

/**
 * Periodic box [-l/2, l/2)^3 sampled at n points per axis.
 *
 * Grid point i on axis j sits at x = -l_j/2 + i * l_j/n_j. Frequencies are
 * kept in standard transform order: index m < n/2 maps to 2*pi*m/l, the rest
 * to 2*pi*(m - n)/l, so the Nyquist index n/2 carries the negative frequency
 * -pi*n/l.
 */
struct GridSpec {
  std::array<int, 3> n{};
  std::array<double, 3> l{};

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) *
           static_cast<std::size_t>(n[2]);
  }
  double volume() const noexcept { return l[0] * l[1] * l[2]; }
  /// Cell volume h = V / (n1 n2 n3).
  double cell_volume() const noexcept {
    return volume() / static_cast<double>(size());
  }
  double spacing(int axis) const noexcept { return l[axis] / n[axis]; }

  double coordinate(int axis, int i) const noexcept {
    return -0.5 * l[axis] + i * spacing(axis);
  }

  /// Signed integer frequency index of storage position i.
  int frequency_index(int axis, int i) const noexcept {
    return i < n[axis] / 2 ? i : i - n[axis];
  }
  double wavenumber(int axis, int i) const noexcept {
    return 2.0 * std::numbers::pi / l[axis] * frequency_index(axis, i);
  }
  bool is_nyquist(int axis, int i) const noexcept { return i == n[axis] / 2; }

  std::size_t index(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(i) * n[1] + j) * n[2] + k;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline GridSpec make_grid(std::array<int, 3> n, std::array<double, 3> l) {
  for (int a = 0; a < 3; ++a) {
    if (n[a] < 8 || n[a] % 2 != 0) {
      throw InvalidGrid("grid size on axis " + std::to_string(a + 1) +
                        " must be even and >= 8, got " + std::to_string(n[a]));
    }
    if (!(l[a] > 0.0) || !std::isfinite(l[a])) {
      throw InvalidGrid("box length on axis " + std::to_string(a + 1) +
                        " must be positive and finite");
    }
  }
  return GridSpec{n, l};
}

/// Per-axis table of wavenumbers in storage order. With `zero_nyquist` the
/// Nyquist entry is set to zero, which is the convention for derivative
/// multipliers.
inline std::vector<double> axis_wavenumbers(const GridSpec& g, int axis,
                                            bool zero_nyquist) {
  std::vector<double> k(g.n[axis]);
  for (int i = 0; i < g.n[axis]; ++i) {
    k[i] = (zero_nyquist && g.is_nyquist(axis, i)) ? 0.0 : g.wavenumber(axis, i);
  }
  return k;
}

inline std::vector<double> axis_coordinates(const GridSpec& g, int axis) {
  std::vector<double> x(g.n[axis]);
  for (int i = 0; i < g.n[axis]; ++i) x[i] = g.coordinate(axis, i);
  return x;
}

namespace detail {

template <class Tag>
class GridData {
 public:
  GridData() = default;
  explicit GridData(const GridSpec& grid)
      : grid_(grid), values_(grid.size(), complex{0.0, 0.0}) {}
  GridData(const GridSpec& grid, std::vector<complex> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw InvalidGrid("sample count " + std::to_string(values_.size()) +
                        " does not match grid size " +
                        std::to_string(grid_.size()));
    }
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<complex> values() noexcept { return values_; }
  std::span<const complex> values() const noexcept { return values_; }
  std::vector<complex>& storage() noexcept { return values_; }

  complex& operator[](std::size_t i) noexcept { return values_[i]; }
  const complex& operator[](std::size_t i) const noexcept { return values_[i]; }
  complex& at(int i, int j, int k) noexcept { return values_[grid_.index(i, j, k)]; }
  const complex& at(int i, int j, int k) const noexcept {
    return values_[grid_.index(i, j, k)];
  }

  bool all_finite() const noexcept {
    for (const auto& v : values_) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
  }

 private:
  GridSpec grid_{};
  std::vector<complex> values_;
};

}  // namespace detail

struct FieldTag {};
struct SpectralTag {};

/// Complex samples u(x) on the grid, x3 fastest.
using Field = detail::GridData<FieldTag>;
/// Coefficients approximating the continuum transform at the grid frequencies.
using SpectralField = detail::GridData<SpectralTag>;

inline void require_same_grid(const GridSpec& a, const GridSpec& b,
                              const char* where) {
  if (!(a == b)) throw GridMismatch(std::string(where) + ": grids differ");
}

/// Builds a field by evaluating fn(x1, x2, x3) at every grid point.
template <class Fn>
Field sample_field(const GridSpec& g, Fn&& fn) {
  Field f(g);
  for (int i = 0; i < g.n[0]; ++i) {
    const double x = g.coordinate(0, i);
    for (int j = 0; j < g.n[1]; ++j) {
      const double y = g.coordinate(1, j);
      for (int k = 0; k < g.n[2]; ++k) {
        f.at(i, j, k) = complex(fn(x, y, g.coordinate(2, k)));
      }
    }
  }
  return f;
}

/// Weighted inner product Re<a, b>_h = h * sum Re(conj(a) b).
inline double real_inner(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid(), "real_inner");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  }
  return s * a.grid().cell_volume();
}

/// D(u) = h * sum |u|^2.
inline double mass(const Field& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::norm(v);
  return s * f.grid().cell_volume();
}

inline double l2_norm(const Field& f) { return std::sqrt(mass(f)); }

/// Multiplies f in place so that its mass equals c. Throws ZeroMass on u = 0.
inline void project_mass(Field& f, double c) {
  const double d = mass(f);
  if (!(d > 0.0)) throw ZeroMass("cannot rescale a zero field to positive mass");
  const double s = std::sqrt(c / d);
  for (auto& v : f.values()) v *= s;
}

}  // namespace gpe
