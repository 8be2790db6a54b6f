#pragma once

#include <fftw3.h>

#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "mhd/grid.hpp"

namespace mhd {

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Worker count for FFTW, from MHD_NUM_THREADS (default 1). FFTW's threaded
// transforms use a fixed decomposition, so results do not depend on timing.
inline int fft_thread_count() {
  static const int count = [] {
    const char* env = std::getenv("MHD_NUM_THREADS");
    int t = env ? std::atoi(env) : 1;
    return t > 0 ? t : 1;
  }();
  return count;
}

} // namespace detail

/// r2c / c2r plan pair for one cubic grid size.
/// Plans are created with FFTW_UNALIGNED so they can run on any std::vector.
class FftPlan {
public:
  explicit FftPlan(int n) : n_(n) {
    std::vector<double> r(static_cast<std::size_t>(n) * n * n);
    std::vector<cplx> c(static_cast<std::size_t>(n) * n * (n / 2 + 1));
    auto* cc = reinterpret_cast<fftw_complex*>(c.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(detail::planner_mutex());
    static const bool threads_ready = [] {
      if (detail::fft_thread_count() > 1) fftw_init_threads();
      return true;
    }();
    (void)threads_ready;
    if (detail::fft_thread_count() > 1)
      fftw_plan_with_nthreads(detail::fft_thread_count());
    fwd_ = fftw_plan_dft_r2c_3d(n, n, n, r.data(), cc, flags);
    bwd_ = fftw_plan_dft_c2r_3d(n, n, n, cc, r.data(), flags);
  }

  ~FftPlan() {
    std::lock_guard lock(detail::planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  // out = normalized coefficients of in.
  void forward(const double* in, cplx* out) const {
    fftw_execute_dft_r2c(fwd_, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
    const double norm = 1.0 / (static_cast<double>(n_) * n_ * n_);
    const std::size_t m = static_cast<std::size_t>(n_) * n_ * (n_ / 2 + 1);
    for (std::size_t i = 0; i < m; ++i) out[i] *= norm;
  }

  // out = sum_k in(k) exp(ik.x). `in` is left untouched.
  void inverse(const cplx* in, double* out) const {
    thread_local std::vector<cplx> scratch;
    const std::size_t m = static_cast<std::size_t>(n_) * n_ * (n_ / 2 + 1);
    scratch.assign(in, in + m);
    fftw_execute_dft_c2r(bwd_, reinterpret_cast<fftw_complex*>(scratch.data()),
                         out);
  }

private:
  int n_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

inline const FftPlan& plan_for(int n) {
  static std::map<int, std::unique_ptr<FftPlan>> cache;
  static std::mutex cache_mutex;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

inline SpectralField to_spectral(const RealField& f) {
  SpectralField out(f.grid);
  plan_for(f.grid.n).forward(f.v.data(), out.v.data());
  return out;
}

inline RealField to_real(const SpectralField& f) {
  RealField out(f.grid);
  plan_for(f.grid.n).inverse(f.v.data(), out.v.data());
  return out;
}

inline SpectralVectorField to_spectral(const RealVectorField& f) {
  SpectralVectorField out(f.grid);
  const auto& plan = plan_for(f.grid.n);
  for (int j = 0; j < 3; ++j) plan.forward(f.c[j].data(), out.c[j].data());
  return out;
}

inline RealVectorField to_real(const SpectralVectorField& f) {
  RealVectorField out(f.grid);
  const auto& plan = plan_for(f.grid.n);
  for (int j = 0; j < 3; ++j) plan.inverse(f.c[j].data(), out.c[j].data());
  return out;
}

inline std::vector<cplx> to_spectral(const Grid& g, const std::vector<double>& v) {
  std::vector<cplx> out(g.spectral_size());
  plan_for(g.n).forward(v.data(), out.data());
  return out;
}

inline std::vector<double> to_real(const Grid& g, const std::vector<cplx>& v) {
  std::vector<double> out(g.real_size());
  plan_for(g.n).inverse(v.data(), out.data());
  return out;
}

} // namespace mhd
