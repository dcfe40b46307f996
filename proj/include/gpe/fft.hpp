#pragma once

#include <fftw3.h>

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>

#include "gpe/grid.hpp"

namespace gpe {

namespace detail {

// FFTW planning is not thread-safe, execution is. Plans are created once per
// (shape, direction) under a lock and reused through the new-array execute
// interface. FFTW_ESTIMATE keeps planning deterministic, so repeated runs
// perform the same floating-point operations in the same order.
class FftPlanCache {
 public:
  static FftPlanCache& instance() {
    static FftPlanCache cache;
    return cache;
  }

  fftw_plan get(const std::array<int, 3>& n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(n[0], n[1], n[2], sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t count = static_cast<std::size_t>(n[0]) * n[1] * n[2];
    auto* scratch = fftw_alloc_complex(count);
    fftw_plan plan = fftw_plan_dft_3d(n[0], n[1], n[2], scratch, scratch, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(key, plan);
    return plan;
  }

  FftPlanCache(const FftPlanCache&) = delete;
  FftPlanCache& operator=(const FftPlanCache&) = delete;

 private:
  FftPlanCache() = default;
  ~FftPlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, int, int, int>, fftw_plan> plans_;
};

/// Unnormalized in-place DFT over the whole grid; sign = FFTW_FORWARD or
/// FFTW_BACKWARD.
inline void dft_in_place(const GridSpec& g, std::span<complex> data, int sign) {
  fftw_plan plan = FftPlanCache::instance().get(g.n, sign);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

// (-1)^(i+j+k): the phase e^{i xi . l/2} that shifts the transform origin from
// the box corner to the box centre (n even, so (-1)^m = (-1)^i).
inline void apply_checkerboard(const GridSpec& g, std::span<complex> data) {
  for (int i = 0; i < g.n[0]; ++i) {
    for (int j = 0; j < g.n[1]; ++j) {
      const std::size_t row = g.index(i, j, 0);
      const int start = 1 - ((i + j) & 1);
      for (int k = start; k < g.n[2]; k += 2) data[row + k] = -data[row + k];
    }
  }
}

}  // namespace detail

/**
 * Forward transform calibrated to the continuum convention
 * f^(xi) = integral f(x) e^{-i x.xi} dx, approximated by the sum
 * h * sum_x f(x) e^{-i xi_k . x} over the centred grid points.
 *
 * With this scaling, Plancherel reads h sum |f|^2 = (1/V) sum |f^|^2.
 */
inline SpectralField forward_transform(const Field& f) {
  const GridSpec& g = f.grid();
  SpectralField out(g, std::vector<complex>(f.values().begin(), f.values().end()));
  detail::dft_in_place(g, out.values(), FFTW_FORWARD);
  detail::apply_checkerboard(g, out.values());
  const double h = g.cell_volume();
  for (auto& v : out.values()) v *= h;
  return out;
}

/// Exact inverse of forward_transform: f(x) = (1/V) sum_k f^(xi_k) e^{i xi_k . x}.
inline Field inverse_transform(const SpectralField& s) {
  const GridSpec& g = s.grid();
  Field out(g, std::vector<complex>(s.values().begin(), s.values().end()));
  detail::apply_checkerboard(g, out.values());
  detail::dft_in_place(g, out.values(), FFTW_BACKWARD);
  const double inv_v = 1.0 / g.volume();
  for (auto& v : out.values()) v *= inv_v;
  return out;
}

}  // namespace gpe
