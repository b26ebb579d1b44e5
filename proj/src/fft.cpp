#include "fdmq/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "fdmq/errors.hpp"

namespace fdmq {
namespace {
// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct FftPlan::Impl {
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(in);
    fftw_free(out);
  }
};

FftPlan::FftPlan(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n == 0) throw InvalidParameter("FFT length must be positive");
  std::lock_guard lock(planner_mutex());
  impl_->in = fftw_alloc_complex(n);
  impl_->out = fftw_alloc_complex(n);
  const int len = static_cast<int>(n);
  impl_->fwd = fftw_plan_dft_1d(len, impl_->in, impl_->out, FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_1d(len, impl_->in, impl_->out, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

namespace {
void run(fftw_plan plan, fftw_complex* buf_in, fftw_complex* buf_out, std::size_t n,
         std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  if (in.size() != n || out.size() != n) throw LengthMismatch("FFT buffer length mismatch");
  std::copy(in.begin(), in.end(), reinterpret_cast<std::complex<double>*>(buf_in));
  fftw_execute(plan);
  auto* res = reinterpret_cast<std::complex<double>*>(buf_out);
  std::copy(res, res + n, out.begin());
}
}  // namespace

void FftPlan::forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  run(impl_->fwd, impl_->in, impl_->out, n_, in, out);
}

void FftPlan::inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  run(impl_->inv, impl_->in, impl_->out, n_, in, out);
}

}  // namespace fdmq
