#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <utility>

#include <fftw3.h>

#include "dnls/error.hpp"

namespace dnls::fft {

enum class Direction { forward, backward };

namespace detail {

// FFTW's planner is not thread-safe, but executing an existing plan on new
// arrays is. Plans are created once per (size, direction) under a lock and
// reused for every transform of that shape. Plans are unaligned and
// out-of-place so any pair of distinct std::complex buffers is acceptable.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, Direction dir) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, dir);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::pair<std::size_t, Direction>, fftw_plan> plans_;
};

}  // namespace detail

/// Unnormalized DFT: out_j = sum_k in_k exp(∓2πi jk/n), minus sign for forward.
/// `in` and `out` must not alias.
inline void transform(std::span<const std::complex<double>> in,
                      std::span<std::complex<double>> out, Direction dir) {
  if (in.size() != out.size() || in.empty())
    throw InvalidInput("fft::transform: size mismatch");
  fftw_plan plan = detail::PlanCache::instance().get(in.size(), dir);
  // new-array execute never writes to the input for out-of-place complex plans
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plan, src, dst);
}

}  // namespace dnls::fft
