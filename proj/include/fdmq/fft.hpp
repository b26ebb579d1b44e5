#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace fdmq {

/// Complex DFT of fixed length backed by FFTW. Forward uses exp(-i...),
/// inverse exp(+i...); neither is normalized. Instances own their buffers
/// and are not safe to share between threads; construction is.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;

  std::size_t size() const { return n_; }
  void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);
  void inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

 private:
  struct Impl;
  std::size_t n_ = 0;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fdmq
