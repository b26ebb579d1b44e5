#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fdmq/capacity.hpp"
#include "fdmq/chip_config.hpp"
#include "fdmq/damped_fit.hpp"
#include "fdmq/sweep_result.hpp"

namespace fdmq {

struct Range {
  double start = 0.0;
  double stop = 0.0;
  std::size_t points = 1;
  double at(std::size_t i) const;
  double step() const;
  void validate(const char* what) const;
};

// ---- flux sweep ------------------------------------------------------------

struct FluxSweepSpec {
  Range flux;                       // global applied flux, in flux quanta
  std::vector<double> flux_offsets; // extra per chip device (field non-uniformity); empty = none
};

/// Columns: flux, device, channel_hz, amplitude, phase_rad, noise_std.
/// One composite multi-tone probe per flux point, all qubits in the ground
/// state. Device i sees flux + flux_offsets[i].
SweepResult run_flux_sweep(const ChipConfig& chip, const FrequencyPlan& plan,
                           const FluxSweepSpec& spec, std::uint64_t seed);

struct FluxFeature {
  std::size_t index = 0;  // sample index of the extremum
  double flux = 0.0;
  double deviation = 0.0;  // |amplitude - baseline| at the extremum
};

/// Baseline = median amplitude. Contiguous runs deviating by more than half
/// the largest deviation are features; each reports its extremum.
std::vector<FluxFeature> find_flux_features(std::span<const double> flux,
                                            std::span<const double> amplitude);

/// Fluxes where the qubit transition crosses `target_hz`, sorted.
std::vector<double> crossing_fluxes(const QubitParams& q, double target_hz);

// ---- spectroscopy ----------------------------------------------------------

struct SpectroscopySpec {
  Range drive_hz;
  Range flux;  // detuning from each probed qubit's symmetry point
  double drive_amplitude = 0.0;
};

/// Columns: flux, drive_hz, device, qubit_hz, p_excited, amplitude,
/// phase_rad, response. Plan devices are biased at their symmetry points
/// plus the flux axis value; other qubits stay at their symmetry points.
/// Steady-state populations under the continuous drive are read out
/// through the chain; response is |M - M_ground| with M_ground the
/// noise-free all-ground measurement at the same bias. Throws
/// InvalidParameter when the drive band leaves (0, lowest probe frequency).
SweepResult run_spectroscopy(const ChipConfig& chip, const FrequencyPlan& plan,
                             const SpectroscopySpec& spec, std::uint64_t seed);

struct RidgePoint {
  double flux = 0.0;
  double drive_hz = 0.0;
  double response = 0.0;
};

/// For one device: per flux value, the drive frequency of maximal response.
std::vector<RidgePoint> extract_ridge(const SweepResult& spectroscopy, int device_id);

// ---- Rabi ------------------------------------------------------------------

struct RabiSpec {
  std::vector<int> device_ids;                  // driven qubits
  std::vector<std::vector<double>> amplitudes;  // per run, one amplitude per driven qubit
  std::vector<double> durations_s;              // increasing pulse lengths
  std::size_t averages = 1000;
};

struct RabiTraceFit {
  std::size_t set = 0;
  int device_id = 0;
  double drive_amplitude = 0.0;
  double expected_frequency_hz = 0.0;
  RabiFit fit;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct RabiRun {
  SweepResult trace;  // set, device, drive_amplitude, duration_s, p_excited, amplitude, phase_rad, signal
  std::vector<RabiTraceFit> fits;
  /// Fitted frequency vs drive amplitude, one line per driven device, over
  /// the valid fits.
  std::vector<std::pair<int, LinearFit>> linearity;
};

/// Resonant pulses on the driven qubits at their symmetry points, then one
/// FDM readout of every plan channel per pulse length (manipulate, then
/// read). Averaging lowers the per-point noise std by sqrt(averages).
/// signal is the measurement projected onto the ground-to-excited axis of
/// the device's own channel, so it tracks the excited population.
RabiRun run_rabi(const ChipConfig& chip, const FrequencyPlan& plan, const RabiSpec& spec,
                 std::uint64_t seed);

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// ---- scaling study / plot scripts ------------------------------------------

/// Columns: spacing_kappa, crosstalk_db, channels_per_ghz.
SweepResult run_capacity_scan(double kappa_rad_s, double bandwidth_hz, double carson_rad_s);

/// Gnuplot script that plots `csv_name` (written next to it).
void write_gnuplot(std::ostream& out, const SweepResult& result, const std::string& csv_name);

}  // namespace fdmq
