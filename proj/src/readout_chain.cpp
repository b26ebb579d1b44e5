#include "fdmq/readout_chain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fdmq/errors.hpp"
#include "fdmq/units.hpp"

namespace fdmq {

void ChainConfig::validate() const {
  if (!(sample_rate_hz > 0.0)) throw InvalidParameter("chain sample rate must be positive");
  if (n_samples < 16) throw InvalidParameter("integration window needs at least 16 samples");
  if (probe_amplitude < 0.0) throw InvalidParameter("probe amplitude must be >= 0");
  if (noise_std < 0.0) throw InvalidParameter("noise std must be >= 0");
  if (!ideal_adc) {
    adc.validate();
    if (adc.sample_rate_hz != sample_rate_hz)
      throw InvalidParameter("ADC sample rate must equal the chain sample rate");
  }
}

ReadoutChain::ReadoutChain(std::vector<DeviceRecord> chip, const FrequencyPlan& plan,
                           ChainConfig config)
    : chip_(std::move(chip)), config_(std::move(config)), fft_(config_.n_samples) {
  config_.validate();
  plan.validate();
  if (plan.channels.empty()) throw InfeasiblePlan("plan has no channels");

  const std::size_t n = config_.n_samples;
  const double fs = config_.sample_rate_hz;
  const double bin_hz = fs / static_cast<double>(n);

  lo_hz_ = config_.lo_hz;
  if (lo_hz_ == 0.0) {
    const double mid =
        0.5 * (plan.channels.front().frequency_hz + plan.channels.back().frequency_hz);
    lo_hz_ = std::round(mid / bin_hz) * bin_hz;
  }

  const double amp = config_.probe_amplitude > 0.0
                         ? config_.probe_amplitude
                         : 0.9 * config_.adc.full_scale / static_cast<double>(plan.channels.size());
  const double limit = config_.ideal_adc ? 0.5 * fs : config_.adc.analog_bandwidth_hz;

  std::vector<ToneSpec> tones;
  for (std::size_t k = 0; k < plan.channels.size(); ++k) {
    const auto& pc = plan.channels[k];
    auto it = std::find_if(chip_.begin(), chip_.end(),
                           [&](const auto& d) { return d.id == pc.device_id; });
    if (it == chip_.end())
      throw InfeasiblePlan("plan channel for device " + std::to_string(pc.device_id) +
                           " has no matching chip device");
    ChainChannel ch;
    ch.device_id = pc.device_id;
    ch.device_index = static_cast<std::size_t>(it - chip_.begin());
    ch.baseband_hz = std::round((pc.frequency_hz - lo_hz_) / bin_hz) * bin_hz;
    ch.rf_hz = lo_hz_ + ch.baseband_hz;
    if (std::abs(ch.baseband_hz) > limit) {
      throw InfeasiblePlan("device " + std::to_string(pc.device_id) + " probe sits " +
                           std::to_string(ch.baseband_hz) + " Hz from the LO, beyond the " +
                           std::to_string(limit) + " Hz acquisition band");
    }
    for (const auto& other : channels_)
      if (other.baseband_hz == ch.baseband_hz)
        throw InfeasiblePlan("two plan channels share one DFT bin");
    // spread tone phases so the composite peak stays below full scale
    const double phase = std::numbers::pi * static_cast<double>(k * k) /
                         static_cast<double>(plan.channels.size());
    ch.probe = std::polar(amp, phase);
    tones.push_back({ch.baseband_hz, amp, phase});
    channels_.push_back(ch);
  }

  const IQTrace probe = synthesize_multitone(tones, config_.envelope, fs, n);
  tx_spectrum_.resize(n);
  fft_.forward(probe.samples, tx_spectrum_);
  bin_rf_rad_s_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const long signed_k = k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
    bin_rf_rad_s_[k] = to_angular(lo_hz_ + static_cast<double>(signed_k) * bin_hz);
  }
  double peak = 0.0;
  for (const auto& x : tx_spectrum_) peak = std::max(peak, std::abs(x));
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(tx_spectrum_[k]) > 1e-14 * peak) active_bins_.push_back(k);
    else tx_spectrum_[k] = Complex{};
  }
  scratch_.assign(n, Complex{});
}

std::vector<double> ReadoutChain::symmetry_fluxes() const {
  std::vector<double> f;
  f.reserve(chip_.size());
  for (const auto& d : chip_) f.push_back(d.qubit.symmetry_flux);
  return f;
}

std::vector<ToneMeasurement> ReadoutChain::measure(std::span<const double> z,
                                                   std::span<const double> fluxes,
                                                   std::uint64_t seed) {
  const auto dressed = dress(chip_, z, fluxes);
  // Feedline as an LTI filter on the periodic integration window.
  for (std::size_t k : active_bins_)
    scratch_[k] = tx_spectrum_[k] * (config_.gain * s21_dressed(dressed, bin_rf_rad_s_[k]));
  return receive(seed);
}

std::vector<ToneMeasurement> ReadoutChain::measure_populations(std::span<const double> p_excited,
                                                               std::span<const double> fluxes,
                                                               std::uint64_t seed) {
  if (p_excited.size() != chip_.size())
    throw LengthMismatch("need one population per chip device");
  std::vector<std::size_t> mixed;
  std::vector<double> z(chip_.size());
  for (std::size_t i = 0; i < chip_.size(); ++i) {
    const double p = p_excited[i];
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("population outside [0, 1]");
    z[i] = p >= 1.0 ? 1.0 : -1.0;
    if (p > 0.0 && p < 1.0) mixed.push_back(i);
  }
  if (mixed.size() > 16) throw InvalidParameter("too many qubits in mixed states");

  std::vector<Complex> s21(active_bins_.size(), Complex{});
  for (std::size_t mask = 0; mask < (std::size_t{1} << mixed.size()); ++mask) {
    double w = 1.0;
    for (std::size_t b = 0; b < mixed.size(); ++b) {
      const bool up = (mask >> b) & 1u;
      const double p = p_excited[mixed[b]];
      z[mixed[b]] = up ? 1.0 : -1.0;
      w *= up ? p : 1.0 - p;
    }
    const auto dressed = dress(chip_, z, fluxes);
    for (std::size_t j = 0; j < active_bins_.size(); ++j)
      s21[j] += w * s21_dressed(dressed, bin_rf_rad_s_[active_bins_[j]]);
  }
  for (std::size_t j = 0; j < active_bins_.size(); ++j) {
    const std::size_t k = active_bins_[j];
    scratch_[k] = tx_spectrum_[k] * (config_.gain * s21[j]);
  }
  return receive(seed);
}

std::vector<ToneMeasurement> ReadoutChain::receive(std::uint64_t seed) {
  const std::size_t n = config_.n_samples;
  IQTrace rf;
  rf.sample_rate_hz = config_.sample_rate_hz;
  rf.carrier_hz = lo_hz_;
  rf.samples.resize(n);
  fft_.inverse(scratch_, rf.samples);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (auto& s : rf.samples) s *= inv_n;

  IQTrace bb = downconvert(rf, lo_hz_, config_.phase_offset_rad);
  last_clipped_ = 0;
  if (!config_.ideal_adc) {
    auto adc = adc_quantize(bb, config_.adc, config_.noise_std, seed);
    last_clipped_ = adc.clipped_samples;
    bb = std::move(adc.trace);
  }

  std::vector<double> bb_freqs;
  bb_freqs.reserve(channels_.size());
  for (const auto& ch : channels_) bb_freqs.push_back(ch.baseband_hz);
  auto raw = channelize(bb, bb_freqs, config_.window);

  std::vector<ToneMeasurement> out;
  out.reserve(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const double ref = std::abs(channels_[k].probe);
    const Complex v = raw[k].value() / channels_[k].probe;
    double phase = std::arg(v);
    if (phase <= -std::numbers::pi) phase += kTwoPi;
    out.push_back({channels_[k].rf_hz, std::abs(v), phase, raw[k].noise_std / ref});
  }
  return out;
}

FrequencyPlan plan_from_chip(std::span<const DeviceRecord> chip, std::span<const int> device_ids) {
  FrequencyPlan plan;
  for (int id : device_ids) {
    const auto& d = find_device(chip, id);
    const double omega_q = to_angular(qubit_frequency(d.qubit, d.qubit.symmetry_flux));
    const double shift = resonator_shift(d.resonator, omega_q, -1.0);
    plan.channels.push_back({id, d.resonator.frequency_hz + to_hz(shift)});
  }
  std::sort(plan.channels.begin(), plan.channels.end(),
            [](const auto& a, const auto& b) { return a.frequency_hz < b.frequency_hz; });
  if (!plan.channels.empty()) {
    plan.band_start_hz = plan.channels.front().frequency_hz;
    plan.band_stop_hz = plan.channels.back().frequency_hz;
  }
  plan.validate();
  return plan;
}

std::vector<CrosstalkEntry> measure_crosstalk(std::span<const DeviceRecord> chip,
                                              const FrequencyPlan& plan, int toggled_device,
                                              const ChainConfig& config) {
  find_device(chip, toggled_device);
  ReadoutChain chain({chip.begin(), chip.end()}, plan, config);
  const auto& channels = chain.channels();
  auto toggled = std::find_if(channels.begin(), channels.end(),
                              [&](const auto& c) { return c.device_id == toggled_device; });
  if (toggled == channels.end())
    throw UnknownDevice("device " + std::to_string(toggled_device) + " has no plan channel");

  const auto fluxes = chain.symmetry_fluxes();
  std::vector<double> z(chip.size(), -1.0);
  const auto before = chain.measure(z, fluxes, 0);
  z[toggled->device_index] = +1.0;
  const auto after = chain.measure(z, fluxes, 0);

  const auto t = static_cast<std::size_t>(toggled - channels.begin());
  const double own = std::abs(after[t].value() - before[t].value());
  std::vector<CrosstalkEntry> out;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    if (k == t) continue;
    const double change = std::abs(after[k].value() - before[k].value());
    CrosstalkEntry e{channels[k].device_id, channels[k].rf_hz, kCrosstalkFloorDb, kCrosstalkFloorDb};
    if (own > 0.0 && change > 0.0) {
      const double ratio = change / own;
      e.crosstalk_db = std::max(kCrosstalkFloorDb, 10.0 * std::log10(ratio));
      e.change_ratio_db = std::max(kCrosstalkFloorDb, 20.0 * std::log10(ratio));
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace fdmq
