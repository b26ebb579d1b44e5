#include "fdmq/dsp_tx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "fdmq/errors.hpp"
#include "fdmq/units.hpp"

namespace fdmq {

double IQTrace::time_at(std::size_t n) const {
  return start_time_s + static_cast<double>(n) / sample_rate_hz;
}

double IQTrace::energy() const {
  return std::accumulate(samples.begin(), samples.end(), 0.0,
                         [](double acc, const Complex& s) { return acc + std::norm(s); });
}

void IQTrace::validate() const {
  if (!(sample_rate_hz > 0.0)) throw InvalidParameter("trace sample rate must be positive");
  if (samples.empty()) throw InvalidParameter("trace must not be empty");
}

PulseEnvelope PulseEnvelope::continuous() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {EnvelopeShape::rectangular, inf, 0.0, inf};
}

void PulseEnvelope::validate() const {
  if (!(duration_s > 0.0)) throw InvalidParameter("pulse duration must be positive");
  if (edge_time_s < 0.0 || edge_time_s > 0.5 * duration_s)
    throw InvalidParameter("pulse edge time must lie in [0, duration/2]");
  if (!(repetition_period_s >= duration_s))
    throw InvalidParameter("repetition period must be >= pulse duration");
}

double PulseEnvelope::value_at(double t) const {
  if (t < 0.0) return 0.0;
  const double local = std::isfinite(repetition_period_s) ? std::fmod(t, repetition_period_s) : t;
  if (local >= duration_s) return 0.0;
  if (shape == EnvelopeShape::rectangular || edge_time_s == 0.0) return 1.0;
  const double from_end = duration_s - local;
  const double edge = std::min(local, from_end);
  if (edge >= edge_time_s) return 1.0;
  return 0.5 * (1.0 - std::cos(std::numbers::pi * edge / edge_time_s));
}

double tone_phase(double frequency_hz, double start_time_s, std::size_t n, double sample_rate_hz) {
  // f*n is exact in long double for integer f; fmod keeps the fraction exact
  const long double f = frequency_hz, fs = sample_rate_hz;
  long double c0 = f * static_cast<long double>(start_time_s);
  c0 -= std::floor(c0);
  long double cycles = c0 + std::fmod(f * static_cast<long double>(n), fs) / fs;
  cycles -= std::floor(cycles);
  return static_cast<double>(static_cast<long double>(kTwoPi) * cycles);
}

IQTrace synthesize_multitone(std::span<const ToneSpec> tones, const PulseEnvelope& envelope,
                             double sample_rate_hz, std::size_t n_samples, double start_time_s) {
  if (!(sample_rate_hz > 0.0)) throw InvalidParameter("sample rate must be positive");
  if (n_samples == 0) throw InvalidParameter("n_samples must be positive");
  envelope.validate();
  for (std::size_t k = 0; k < tones.size(); ++k) {
    if (std::abs(tones[k].frequency_hz) > 0.5 * sample_rate_hz) {
      throw NyquistViolation("tone " + std::to_string(k) + " at " +
                             std::to_string(tones[k].frequency_hz) + " Hz exceeds Nyquist (" +
                             std::to_string(0.5 * sample_rate_hz) + " Hz)");
    }
    if (tones[k].amplitude < 0.0)
      throw InvalidParameter("tone " + std::to_string(k) + " has negative amplitude");
  }

  IQTrace out;
  out.sample_rate_hz = sample_rate_hz;
  out.start_time_s = start_time_s;
  out.samples.assign(n_samples, Complex{});
  for (const auto& tone : tones) {
    for (std::size_t n = 0; n < n_samples; ++n) {
      const double phase = tone_phase(tone.frequency_hz, start_time_s, n, sample_rate_hz);
      out.samples[n] += std::polar(tone.amplitude, phase + tone.phase_rad);
    }
  }
  for (std::size_t n = 0; n < n_samples; ++n) out.samples[n] *= envelope.value_at(out.time_at(n));
  return out;
}

IQTrace upconvert_ssb(const IQTrace& baseband, double lo_hz) {
  baseband.validate();
  if (baseband.carrier_hz != 0.0) throw InvalidParameter("upconvert_ssb expects a baseband trace");
  if (!(lo_hz > 0.5 * baseband.sample_rate_hz)) {
    throw InvalidParameter("LO must exceed the baseband span (fs/2 = " +
                           std::to_string(0.5 * baseband.sample_rate_hz) + " Hz)");
  }
  IQTrace rf = baseband;
  rf.carrier_hz = lo_hz;
  return rf;
}

IQTrace combine(std::span<const IQTrace> traces, std::span<const double> gains) {
  if (traces.empty()) throw InvalidParameter("combine needs at least one trace");
  if (!gains.empty() && gains.size() != traces.size())
    throw LengthMismatch("combine: gain count differs from trace count");
  const IQTrace& ref = traces.front();
  IQTrace out = ref;
  for (auto& s : out.samples) s = {};
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    if (t.size() != ref.size() || t.sample_rate_hz != ref.sample_rate_hz ||
        t.carrier_hz != ref.carrier_hz || t.start_time_s != ref.start_time_s) {
      throw LengthMismatch("combine: trace " + std::to_string(i) +
                           " differs in length, rate, carrier or start time");
    }
    const double g = gains.empty() ? 1.0 : gains[i];
    for (std::size_t n = 0; n < t.size(); ++n) out.samples[n] += g * t.samples[n];
  }
  return out;
}

}  // namespace fdmq
