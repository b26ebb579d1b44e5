#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace fdmq {

using Complex = std::complex<double>;

struct ToneSpec {
  double frequency_hz = 0.0;  // signed baseband offset; sign picks the sideband
  double amplitude = 0.0;     // fraction of full scale
  double phase_rad = 0.0;
};

/// Uniformly sampled complex envelope. I is the real part, Q the imaginary
/// part. `carrier_hz` is zero at baseband and the LO frequency after
/// upconversion; RF-rate samples are never materialized.
struct IQTrace {
  std::vector<Complex> samples;
  double sample_rate_hz = 1.0;
  double start_time_s = 0.0;
  double carrier_hz = 0.0;

  std::size_t size() const { return samples.size(); }
  double time_at(std::size_t n) const;
  double energy() const;
  void validate() const;
};

enum class EnvelopeShape { rectangular, raised_cosine };

struct PulseEnvelope {
  EnvelopeShape shape = EnvelopeShape::raised_cosine;
  double duration_s = 4e-6;
  double edge_time_s = 20e-9;
  double repetition_period_s = 10e-6;

  /// Always-on rectangular envelope.
  static PulseEnvelope continuous();

  void validate() const;
  /// Envelope value at absolute time t; pulses start at t = 0 and repeat.
  double value_at(double t) const;
};

/// Phase 2 pi f t reduced to [0, 2 pi) with extended precision, so long
/// traces keep sub-1e-12 phase error.
double tone_phase(double frequency_hz, double start_time_s, std::size_t n, double sample_rate_hz);

/// sample[n] = env(t_n) * sum_k a_k exp(i (2 pi f_k t_n + phi_k)).
/// Throws NyquistViolation naming the first tone with |f| > fs/2.
IQTrace synthesize_multitone(std::span<const ToneSpec> tones, const PulseEnvelope& envelope,
                             double sample_rate_hz, std::size_t n_samples,
                             double start_time_s = 0.0);

/// Ideal single-sideband upconversion: the envelope is re-tagged at the LO,
/// so +f lands at lo + f and -f at lo - f with no image.
IQTrace upconvert_ssb(const IQTrace& baseband, double lo_hz);

/// Pointwise sum with per-input gains (directional coupler / combiner).
/// An empty `gains` means unit gain everywhere.
IQTrace combine(std::span<const IQTrace> traces, std::span<const double> gains = {});

}  // namespace fdmq
