#include "fdmq/dsp_rx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <map>
#include <ostream>
#include <random>
#include <string>

#include "fdmq/errors.hpp"
#include "fdmq/fft.hpp"
#include "fdmq/format.hpp"
#include "fdmq/units.hpp"

namespace fdmq {

void AdcSpec::validate() const {
  if (bits < 1 || bits > 52) throw InvalidParameter("ADC bits must lie in [1, 52]");
  if (!(sample_rate_hz > 0.0)) throw InvalidParameter("ADC sample rate must be positive");
  if (!(full_scale > 0.0)) throw InvalidParameter("ADC full scale must be positive");
  if (!(analog_bandwidth_hz > 0.0) || analog_bandwidth_hz > 0.5 * sample_rate_hz)
    throw InvalidParameter("ADC analog bandwidth must lie in (0, fs/2]");
}

double AdcSpec::lsb() const { return std::ldexp(2.0 * full_scale, -bits); }

IQTrace downconvert(const IQTrace& rf, double lo_hz, double phase_offset_rad) {
  rf.validate();
  const double tol = 1e-9 * std::max(1.0, std::abs(lo_hz));
  if (std::abs(rf.carrier_hz - lo_hz) > tol) {
    throw HeterodyneUnsupported("LO " + std::to_string(lo_hz) + " Hz differs from carrier " +
                                std::to_string(rf.carrier_hz) + " Hz; only homodyne is supported");
  }
  IQTrace out = rf;
  out.carrier_hz = 0.0;
  const Complex rot = std::polar(1.0, -phase_offset_rad);
  for (auto& s : out.samples) s *= rot;
  return out;
}

namespace {
double quantize_one(double v, double lsb, double fs, bool& clipped) {
  if (v > fs) {
    clipped = true;
    v = fs;
  } else if (v < -fs) {
    clipped = true;
    v = -fs;
  }
  return std::nearbyint(v / lsb) * lsb;
}
}  // namespace

AdcResult adc_quantize(const IQTrace& x, const AdcSpec& adc, double noise_std, std::uint64_t seed) {
  x.validate();
  adc.validate();
  if (x.sample_rate_hz != adc.sample_rate_hz)
    throw InvalidParameter("trace sample rate differs from ADC rate; resampling is not supported");
  if (noise_std < 0.0) throw InvalidParameter("noise std must be >= 0");

  AdcResult result{x, 0};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double lsb = adc.lsb();
  for (auto& s : result.trace.samples) {
    double i = s.real();
    double q = s.imag();
    if (noise_std > 0.0) {
      i += noise_std * normal(rng);
      q += noise_std * normal(rng);
    }
    bool clipped = false;
    i = quantize_one(i, lsb, adc.full_scale, clipped);
    q = quantize_one(q, lsb, adc.full_scale, clipped);
    if (clipped) ++result.clipped_samples;
    s = {i, q};
  }
  return result;
}

std::vector<double> window_coefficients(Window window, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (window == Window::hann) {
    // periodic Hann, exact nulls at +-1 bin
    for (std::size_t k = 0; k < n; ++k)
      w[k] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n)));
  }
  return w;
}

namespace {

// exp(-2 pi i m / n), m in [0, n)
const std::vector<Complex>& twiddles(std::size_t n) {
  thread_local std::map<std::size_t, std::vector<Complex>> cache;
  auto [it, fresh] = cache.try_emplace(n);
  if (fresh) {
    it->second.resize(n);
    for (std::size_t m = 0; m < n; ++m)
      it->second[m] = std::polar(1.0, -kTwoPi * static_cast<double>(m) / static_cast<double>(n));
  }
  return it->second;
}

Complex windowed_dft(const IQTrace& x, std::span<const double> w, double w_sum, double f_hz) {
  const std::size_t n_samples = x.size();
  const double bins = f_hz * static_cast<double>(n_samples) / x.sample_rate_hz;
  const double k = std::round(bins);
  Complex acc{};
  if (std::abs(bins - k) < 1e-9) {
    // bin-centred: exact integer phase index, start time folded into one factor
    const auto& tw = twiddles(n_samples);
    const auto kk = static_cast<std::size_t>(
        (static_cast<long long>(k) % static_cast<long long>(n_samples) + static_cast<long long>(n_samples)) %
        static_cast<long long>(n_samples));
    std::size_t m = 0;
    for (std::size_t n = 0; n < n_samples; ++n) {
      acc += w[n] * x.samples[n] * tw[m];
      m += kk;
      if (m >= n_samples) m -= n_samples;
    }
    acc *= std::polar(1.0, -tone_phase(f_hz, x.start_time_s, 0, x.sample_rate_hz));
    return acc / w_sum;
  }
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double phase = tone_phase(f_hz, x.start_time_s, n, x.sample_rate_hz);
    acc += w[n] * x.samples[n] * std::polar(1.0, -phase);
  }
  return acc / w_sum;
}

constexpr int kNoiseGuardBins = 4;
constexpr std::size_t kNoiseBinsPerChannel = 16;

double wrap_phase(double p) { return p <= -std::numbers::pi ? p + kTwoPi : p; }

}  // namespace

std::vector<ToneMeasurement> channelize(const IQTrace& x, std::span<const double> channels_hz,
                                        Window window) {
  x.validate();
  const double nyquist = 0.5 * x.sample_rate_hz;
  for (std::size_t c = 0; c < channels_hz.size(); ++c) {
    if (std::abs(channels_hz[c]) > nyquist)
      throw NyquistViolation("channel " + std::to_string(c) + " at " +
                             std::to_string(channels_hz[c]) + " Hz is outside Nyquist");
    for (std::size_t d = 0; d < c; ++d)
      if (channels_hz[c] == channels_hz[d])
        throw InvalidParameter("channel frequencies must be distinct");
  }

  const auto w = window_coefficients(window, x.size());
  double w_sum = 0.0;
  for (double v : w) w_sum += v;
  const double bin_hz = x.sample_rate_hz / static_cast<double>(x.size());

  // Noise floor from the nearest grid bins clear of every channel's main
  // lobe; one FFT of the windowed trace serves all channels.
  thread_local std::map<std::size_t, FftPlan> plans;
  auto plan_it = plans.try_emplace(x.size(), x.size()).first;
  std::vector<Complex> windowed(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) windowed[n] = w[n] * x.samples[n];
  std::vector<Complex> spectrum(x.size());
  plan_it->second.forward(windowed, spectrum);
  const auto n_bins = static_cast<long>(x.size());
  auto bin_power = [&](long k) {
    const long idx = ((k % n_bins) + n_bins) % n_bins;
    return std::norm(spectrum[static_cast<std::size_t>(idx)] / w_sum);
  };

  std::vector<ToneMeasurement> out;
  out.reserve(channels_hz.size());
  for (double f : channels_hz) {
    const Complex v = windowed_dft(x, w, w_sum, f);

    const long center = std::lround(f / bin_hz);
    double power = 0.0;
    std::size_t used = 0;
    for (long m = 1; used < kNoiseBinsPerChannel && m <= n_bins / 2; ++m) {
      for (long k : {center + m, center - m}) {
        if (used == kNoiseBinsPerChannel) break;
        const double probe = static_cast<double>(k) * bin_hz;
        if (std::abs(probe) > nyquist) continue;
        const bool clear = std::none_of(channels_hz.begin(), channels_hz.end(), [&](double other) {
          return std::abs(probe - other) < (kNoiseGuardBins + 0.5) * bin_hz;
        });
        if (!clear) continue;
        power += bin_power(k);
        ++used;
      }
    }
    const double noise = used > 0 ? std::sqrt(power / (2.0 * static_cast<double>(used))) : 0.0;
    out.push_back({f, std::abs(v), wrap_phase(std::arg(v)), noise});
  }
  return out;
}

void write_measurements_csv(std::ostream& out, std::span<const ToneMeasurement> measurements) {
  out << "channel_hz,amplitude,phase_rad,noise_std\n";
  for (const auto& m : measurements) {
    out << format_double(m.channel_frequency_hz) << ',' << format_double(m.amplitude) << ','
        << format_double(m.phase_rad) << ',' << format_double(m.noise_std) << '\n';
  }
}

}  // namespace fdmq
