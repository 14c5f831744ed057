#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>

#include <fftw3.h>

namespace swnehari::detail {

/// FFTW's planner is not reentrant; execution on distinct buffers is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

struct PlanDestroy {
  void operator()(fftw_plan p) const {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};

using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

template <class T>
using FftwArray = std::unique_ptr<T[], FftwFree>;

inline FftwArray<double> alloc_real(std::size_t n) {
  return FftwArray<double>(fftw_alloc_real(n));
}

inline FftwArray<fftw_complex> alloc_complex(std::size_t n) {
  return FftwArray<fftw_complex>(fftw_alloc_complex(n));
}

}  // namespace swnehari::detail
