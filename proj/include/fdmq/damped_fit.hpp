#pragma once

#include <span>
#include <string>

namespace fdmq {

/// offset + amplitude * exp(-decay_rate t) * cos(2 pi frequency t + phase)
struct RabiFit {
  double frequency_hz = 0.0;
  double decay_rate = 0.0;  // 1/s
  double amplitude = 0.0;
  double offset = 0.0;
  double phase_rad = 0.0;
  double residual_rms = 0.0;
  bool valid = false;
  std::string diagnostic;

  double evaluate(double t) const;
};

/// Least-squares damped-sinusoid fit. The initial frequency is the dominant
/// DFT bin of the mean-removed trace (ties go to the lower bin), phase and
/// amplitude come from a linear fit at that frequency, then all five
/// parameters are refined with Levenberg-Marquardt. Failures (too few
/// points, constant trace, under one period, no convergence) return a fit
/// with valid = false and a diagnostic; residual_rms is always filled.
/// Times must be increasing and are assumed close to uniformly spaced.
RabiFit fit_damped_sinusoid(std::span<const double> t, std::span<const double> y);

}  // namespace fdmq
