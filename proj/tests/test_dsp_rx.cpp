#include <doctest.h>

#include <random>
#include <sstream>

#include "fdmq/dsp_rx.hpp"
#include "fdmq/dsp_tx.hpp"
#include "fdmq/errors.hpp"
#include "oracles.hpp"

using namespace fdmq;

namespace {

constexpr double kFs = 1e9;

IQTrace tones_trace(const std::vector<ToneSpec>& tones, std::size_t n) {
  return synthesize_multitone(tones, PulseEnvelope::continuous(), kFs, n);
}

// SNR of a full-scale complex tone after quantization, from the DFT.
double quantized_snr_db(int bits) {
  const std::size_t n = 65536;
  const double f = 4099.0 * kFs / n;  // odd bin, coprime with n
  const std::vector<ToneSpec> t{{f, 1.0, 0.1}};
  AdcSpec adc;
  adc.bits = bits;
  const auto q = adc_quantize(tones_trace(t, n), adc, 0.0, 1);
  const auto m = channelize(q.trace, std::vector<double>{f}, Window::rectangular);
  const Complex signal = m[0].value();
  // noise energy = total minus the coherent tone (Parseval)
  double total = 0.0;
  for (auto s : q.trace.samples) total += std::norm(s);
  const double noise = total / static_cast<double>(n) - std::norm(signal);
  return 10.0 * std::log10(std::norm(signal) / noise);
}

}  // namespace

TEST_SUITE("dsp_rx") {
  TEST_CASE("bin-centred unit tone is recovered to 1e-12") {
    const std::size_t n = 4000;
    const double f = 375 * kFs / n;
    const std::vector<ToneSpec> t{{f, 1.0, 0.7}};
    const auto m = channelize(tones_trace(t, n), std::vector<double>{f}, Window::rectangular);
    CHECK(std::abs(m[0].amplitude - 1.0) < 1e-12);
    CHECK(std::abs(m[0].phase_rad - 0.7) < 1e-12);
    CHECK(m[0].channel_frequency_hz == f);
    CHECK(m[0].noise_std < 1e-12);
  }

  TEST_CASE("six tones are independent; removing one leaves the others") {
    const std::size_t n = 4000;
    std::vector<ToneSpec> six;
    std::vector<double> freqs;
    for (int k = 0; k < 6; ++k) {
      const double f = (-375.0 + 150.0 * k) * 1e6;
      six.push_back({f, 0.15, 0.3 * k});
      freqs.push_back(f);
    }
    const auto all = channelize(tones_trace(six, n), freqs, Window::rectangular);
    auto five = six;
    five.erase(five.begin() + 2);
    const auto without = channelize(tones_trace(five, n), freqs, Window::rectangular);
    for (int k = 0; k < 6; ++k) {
      if (k == 2) {
        CHECK(without[k].amplitude < 1e-12);
        continue;
      }
      CHECK(std::abs(all[k].amplitude - 0.15) < 1e-12);
      CHECK(std::abs(all[k].value() - without[k].value()) < 1e-12);
    }
  }

  TEST_CASE("off-grid tone leakage follows the Hann kernel") {
    const std::size_t n = 1024;
    const double bin = kFs / n;
    const std::vector<ToneSpec> t{{100.5 * bin, 1.0, 0.0}};
    const auto x = tones_trace(t, n);
    const std::vector<double> channels{100 * bin, 101 * bin, 102 * bin, 98 * bin};
    const auto m = channelize(x, channels, Window::hann);
    for (std::size_t c = 0; c < channels.size(); ++c) {
      const double offset = 100.5 - channels[c] / bin;
      const double want = std::abs(oracle::hann_kernel(offset, n));
      CHECK(m[c].amplitude == doctest::Approx(want).epsilon(0.01));
    }
  }

  TEST_CASE("channelize rejects channels outside Nyquist and duplicates") {
    const std::vector<ToneSpec> t{{1e6, 1.0, 0.0}};
    const auto x = tones_trace(t, 64);
    CHECK_THROWS_AS(channelize(x, std::vector<double>{600e6}, Window::rectangular), NyquistViolation);
    CHECK_THROWS(channelize(x, std::vector<double>{1e6, 1e6}, Window::rectangular));
  }

  TEST_CASE("linearity of the channelizer") {
    const std::size_t n = 2000;
    const std::vector<ToneSpec> ta{{10e6, 0.3, 0.2}, {-123.4e6, 0.1, 1.0}};
    const std::vector<ToneSpec> tb{{10e6, 0.2, -1.0}, {77e6, 0.4, 0.0}};
    const auto a = tones_trace(ta, n);
    const auto b = tones_trace(tb, n);
    const std::vector<IQTrace> ab{a, b};
    const std::vector<double> g{2.0, -0.5};
    const std::vector<double> ch{10e6, -123.4e6, 77e6, 300e6};
    for (auto w : {Window::rectangular, Window::hann}) {
      const auto ma = channelize(a, ch, w);
      const auto mb = channelize(b, ch, w);
      const auto mab = channelize(combine(ab, g), ch, w);
      for (std::size_t k = 0; k < ch.size(); ++k)
        CHECK(std::abs(mab[k].value() - (2.0 * ma[k].value() - 0.5 * mb[k].value())) < 1e-12);
    }
  }

  TEST_CASE("integer-sample time shift only rotates the phase") {
    const std::size_t n = 2000;
    const double f = 123 * kFs / n;
    const std::vector<ToneSpec> t{{f, 0.5, 0.0}};
    const auto a = synthesize_multitone(t, PulseEnvelope::continuous(), kFs, n, 0.0);
    auto shifted = synthesize_multitone(t, PulseEnvelope::continuous(), kFs, n, 37.0 / kFs);
    shifted.start_time_s = 0.0;  // same samples viewed from t = 0
    const auto ma = channelize(a, std::vector<double>{f}, Window::rectangular);
    const auto mb = channelize(shifted, std::vector<double>{f}, Window::rectangular);
    CHECK(mb[0].amplitude == doctest::Approx(ma[0].amplitude).epsilon(1e-12));
    const double ramp = std::remainder(2 * oracle::pi * f * 37.0 / kFs, 2 * oracle::pi);
    CHECK(std::remainder(mb[0].phase_rad - ma[0].phase_rad - ramp, 2 * oracle::pi) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("downconvert: phase offset rotates, composes, rejects heterodyne") {
    const std::size_t n = 1000;
    const double f = 50 * kFs / n;
    const std::vector<ToneSpec> t{{f, 0.5, 0.3}};
    const auto rf = upconvert_ssb(tones_trace(t, n), 9.9e9);
    const auto base = channelize(downconvert(rf, 9.9e9, 0.0), std::vector<double>{f}, Window::rectangular);
    const auto rot = channelize(downconvert(rf, 9.9e9, oracle::pi / 2), std::vector<double>{f}, Window::rectangular);
    CHECK(rot[0].amplitude == doctest::Approx(base[0].amplitude).epsilon(1e-14));
    CHECK(rot[0].phase_rad == doctest::Approx(base[0].phase_rad - oracle::pi / 2).epsilon(1e-12));

    auto once = downconvert(rf, 9.9e9, 0.3 + 0.9);
    auto twice = downconvert(rf, 9.9e9, 0.3);
    twice.carrier_hz = 9.9e9;
    twice = downconvert(twice, 9.9e9, 0.9);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(once.samples[i] - twice.samples[i]) < 1e-15);

    CHECK_THROWS_AS(downconvert(rf, 9.91e9, 0.0), HeterodyneUnsupported);
  }

  TEST_CASE("ADC: half-LSB bound at 24 bits, saturation, idempotence, determinism") {
    const std::vector<ToneSpec> t{{13e6, 0.01, 0.0}};
    const auto x = tones_trace(t, 500);
    AdcSpec adc;
    adc.bits = 24;
    const auto q = adc_quantize(x, adc, 0.0, 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(std::abs(q.trace.samples[i].real() - x.samples[i].real()) <= std::ldexp(1.0, -24));
      CHECK(std::abs(q.trace.samples[i].imag() - x.samples[i].imag()) <= std::ldexp(1.0, -24));
    }
    const auto again = adc_quantize(q.trace, adc, 0.0, 0);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(again.trace.samples[i] == q.trace.samples[i]);

    IQTrace hot;
    hot.sample_rate_hz = kFs;
    hot.samples.assign(100, Complex(1.7, 1.2));
    const auto sat = adc_quantize(hot, AdcSpec{}, 0.0, 0);
    CHECK(sat.clipped_samples == 100);
    CHECK(sat.clip_fraction() == 1.0);
    for (auto s : sat.trace.samples) CHECK(s == Complex(1.0, 1.0));

    const auto n1 = adc_quantize(x, AdcSpec{}, 0.01, 42);
    const auto n2 = adc_quantize(x, AdcSpec{}, 0.01, 42);
    const auto n3 = adc_quantize(x, AdcSpec{}, 0.01, 43);
    CHECK(n1.trace.samples == n2.trace.samples);
    CHECK(n1.trace.samples != n3.trace.samples);
  }

  TEST_CASE("ADC SNR follows 6.02 b + 1.76 dB") {
    for (int bits : {8, 12, 16}) {
      const double want = 6.02 * bits + 1.76;
      CHECK(quantized_snr_db(bits) == doctest::Approx(want).epsilon(0.5 / want));
    }
  }

  TEST_CASE("noise estimate and estimator spread scale as sigma / sqrt(N)") {
    const double sigma = 0.05;
    for (std::size_t n : {1000u, 10000u}) {
      const double f = 10 * kFs / static_cast<double>(n);
      const std::vector<ToneSpec> t{{f, 0.5, 0.0}};
      const auto x = tones_trace(t, n);
      AdcSpec adc;
      adc.bits = 16;
      std::vector<double> re;
      double reported = 0.0;
      const int trials = 300;
      for (int s = 0; s < trials; ++s) {
        const auto q = adc_quantize(x, adc, sigma, 1000 + static_cast<std::uint64_t>(s));
        const auto m = channelize(q.trace, std::vector<double>{f}, Window::rectangular);
        re.push_back(m[0].value().real());
        reported += m[0].noise_std / trials;
      }
      double mean = 0.0, var = 0.0;
      for (double v : re) mean += v / trials;
      for (double v : re) var += (v - mean) * (v - mean) / (trials - 1);
      const double want = sigma / std::sqrt(static_cast<double>(n));
      CHECK(std::sqrt(var) == doctest::Approx(want).epsilon(0.2));
      CHECK(reported == doctest::Approx(want).epsilon(0.2));
    }
  }

  TEST_CASE("windows and measurement CSV") {
    const auto w = window_coefficients(Window::hann, 8);
    CHECK(w[0] == 0.0);
    CHECK(w[4] == doctest::Approx(1.0));
    for (double v : window_coefficients(Window::rectangular, 8)) CHECK(v == 1.0);
    std::ostringstream out;
    const std::vector<ToneMeasurement> m{{75e6, 0.5, -1.25, 0.001}};
    write_measurements_csv(out, m);
    CHECK(out.str() == "channel_hz,amplitude,phase_rad,noise_std\n75000000,0.5,-1.25,0.001\n");
  }
}
