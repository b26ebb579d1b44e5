#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fdmq/dsp_tx.hpp"

namespace fdmq {

struct AdcSpec {
  double sample_rate_hz = 1e9;
  int bits = 12;
  double full_scale = 1.0;
  double analog_bandwidth_hz = 480e6;

  void validate() const;
  /// Quantization step 2 FS / 2^bits.
  double lsb() const;
};

struct ToneMeasurement {
  double channel_frequency_hz = 0.0;
  double amplitude = 0.0;
  double phase_rad = 0.0;  // (-pi, pi]
  double noise_std = 0.0;  // estimated std of the complex estimate per quadrature

  Complex value() const { return std::polar(amplitude, phase_rad); }
};

struct AdcResult {
  IQTrace trace;
  std::size_t clipped_samples = 0;  // samples with I or Q beyond full scale

  double clip_fraction() const {
    return trace.samples.empty() ? 0.0
                                 : static_cast<double>(clipped_samples) / trace.samples.size();
  }
};

enum class Window { rectangular, hann };

/// Homodyne down-conversion with a fixed phase offset. The LO must match the
/// trace carrier (relative tolerance 1e-9), otherwise HeterodyneUnsupported.
IQTrace downconvert(const IQTrace& rf, double lo_hz, double phase_offset_rad);

/// Add seeded white Gaussian noise (std per quadrature), clip to +-FS and
/// round each quadrature to the mid-tread grid k * lsb.
AdcResult adc_quantize(const IQTrace& x, const AdcSpec& adc, double noise_std, std::uint64_t seed);

/// Windowed DFT evaluated at each channel offset (Hz, relative to the trace
/// carrier), normalized by the window sum so a bin-centered unit tone reads
/// amplitude 1 and its synthesis phase. noise_std comes from off-channel
/// bins near each channel.
std::vector<ToneMeasurement> channelize(const IQTrace& x, std::span<const double> channels_hz,
                                        Window window);

std::vector<double> window_coefficients(Window window, std::size_t n);

/// CSV with header `channel_hz,amplitude,phase_rad,noise_std`.
void write_measurements_csv(std::ostream& out, std::span<const ToneMeasurement> measurements);

}  // namespace fdmq
