#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fdmq/capacity.hpp"
#include "fdmq/device_model.hpp"
#include "fdmq/dsp_rx.hpp"
#include "fdmq/dsp_tx.hpp"
#include "fdmq/fft.hpp"

namespace fdmq {

struct ChainConfig {
  double sample_rate_hz = 1e9;
  std::size_t n_samples = 4000;  // integration window; 4 us at 1 GS/s
  double probe_amplitude = 0.0;  // per tone; 0 selects 0.9 FS / n_tones
  double lo_hz = 0.0;            // 0 centers the LO on the probed channels
  double phase_offset_rad = 0.0;
  double gain = 1.0;             // amplifier chain as a pure gain
  double noise_std = 0.0;        // lumped noise per quadrature at the ADC
  bool ideal_adc = false;        // skip noise and quantization entirely
  AdcSpec adc;
  Window window = Window::rectangular;
  PulseEnvelope envelope = PulseEnvelope::continuous();

  void validate() const;
};

struct ChainChannel {
  int device_id = 0;
  std::size_t device_index = 0;  // position in the chip list
  double rf_hz = 0.0;            // probe frequency after snapping to a DFT bin
  double baseband_hz = 0.0;
  Complex probe{};               // transmitted complex tone amplitude
};

/// tx -> feedline -> rx for a fixed chip, plan and configuration. Each plan
/// channel is probed with one tone snapped to the nearest DFT bin of the
/// integration window. Measurements are referenced to the transmitted tone,
/// so a noise-free ideal chain reports S21 at each probe (times the gain and
/// the homodyne phase offset).
class ReadoutChain {
 public:
  ReadoutChain(std::vector<DeviceRecord> chip, const FrequencyPlan& plan, ChainConfig config);

  /// `z`: sigma_z expectation per chip device, `fluxes`: applied flux per
  /// chip device. `seed` drives the ADC noise.
  std::vector<ToneMeasurement> measure(std::span<const double> z, std::span<const double> fluxes,
                                       std::uint64_t seed);
  /// Shot-averaged readout of qubits in mixed states: every qubit is
  /// projected to ground or excited on each shot, so the received signal is
  /// the population-weighted sum over all joint outcomes. `p_excited` is per
  /// chip device; at most 16 may lie strictly between 0 and 1.
  std::vector<ToneMeasurement> measure_populations(std::span<const double> p_excited,
                                                   std::span<const double> fluxes,
                                                   std::uint64_t seed);

  const std::vector<ChainChannel>& channels() const { return channels_; }
  const std::vector<DeviceRecord>& chip() const { return chip_; }
  const ChainConfig& config() const { return config_; }
  double lo_hz() const { return lo_hz_; }
  std::size_t clipped_samples() const { return last_clipped_; }

  /// Symmetry flux of every chip device, i.e. all qubits at their operating point.
  std::vector<double> symmetry_fluxes() const;

 private:
  std::vector<ToneMeasurement> receive(std::uint64_t seed);

  std::vector<DeviceRecord> chip_;
  ChainConfig config_;
  std::vector<ChainChannel> channels_;
  double lo_hz_ = 0.0;
  std::vector<Complex> tx_spectrum_;
  std::vector<double> bin_rf_rad_s_;
  std::vector<std::size_t> active_bins_;  // bins carrying probe power
  std::vector<Complex> scratch_;
  FftPlan fft_;
  std::size_t last_clipped_ = 0;
};

/// Plan with one channel per listed device at its dressed ground-state
/// resonance with the qubit at its symmetry point.
FrequencyPlan plan_from_chip(std::span<const DeviceRecord> chip, std::span<const int> device_ids);

struct CrosstalkEntry {
  int device_id = 0;
  double channel_hz = 0.0;
  double crosstalk_db = 0.0;     // 10 log10 |dM_neighbor| / |dM_toggled|
  double change_ratio_db = 0.0;  // 20 log10 of the same ratio
};

inline constexpr double kCrosstalkFloorDb = -200.0;

/// Flip the toggled device's qubit and compare every other channel's complex
/// change with the toggled channel's own. The change at a neighbour scales
/// as the square of the resonator's Lorentzian amplitude tail, so
/// crosstalk_db (half the power-ratio dB) is the amplitude tail itself.
/// Qubits sit at their symmetry points in the ground state. Returns the
/// floor value for channels with no change.
std::vector<CrosstalkEntry> measure_crosstalk(std::span<const DeviceRecord> chip,
                                              const FrequencyPlan& plan, int toggled_device,
                                              const ChainConfig& config);

}  // namespace fdmq
