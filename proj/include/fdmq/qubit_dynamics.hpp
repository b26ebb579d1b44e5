#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fdmq {

/// Bloch vector in the frame rotating with the drive; z = -1 is the ground
/// state, z = +1 the excited state.
struct BlochState {
  double x = 0.0;
  double y = 0.0;
  double z = -1.0;

  static constexpr BlochState ground() { return {0.0, 0.0, -1.0}; }
  static constexpr BlochState excited() { return {0.0, 0.0, 1.0}; }

  double norm() const;
  double excited_population() const { return 0.5 * (1.0 + z); }
};

struct DriveSpec {
  double rabi_rate_per_amplitude_hz = 0.0;
  double amplitude = 0.0;
  double detuning_hz = 0.0;  // drive minus qubit frequency
  double duration_s = 0.0;

  void validate() const;
};

/// Generalized Rabi frequency sqrt(W^2 + (2 pi detuning)^2) / 2 pi, Hz, with
/// W / 2 pi = rate_per_amplitude * amplitude.
double rabi_frequency(const DriveSpec& d);

// Accuracy guard: a step must satisfy dt * (W_generalized + gamma) <= this.
inline constexpr double kMaxStepPhase = 0.1;

/// One classical RK4 step (4th order) of the rotating-wave Bloch equations
///   dr/dt = w x r - relaxation,  w = (W, 0, -2 pi detuning),
/// with longitudinal rate gamma toward z = -1 and transverse rate
/// gamma/2 + gamma_phi. `drive.duration_s` is ignored here.
/// Throws StepSizeRejected when the guard is violated.
BlochState evolve(const BlochState& state, const DriveSpec& drive, double gamma_rad_s,
                  double gamma_phi_rad_s, double dt);

/// Integrate for `duration` with equal steps no longer than `max_step`
/// (0 picks the largest step allowed by a 0.02 rad-per-step budget).
BlochState evolve_for(BlochState state, const DriveSpec& drive, double gamma_rad_s,
                      double gamma_phi_rad_s, double duration, double max_step = 0.0);

/// Steady-state z under continuous drive (Bloch saturation formula).
/// Requires gamma > 0.
double steady_state_z(const DriveSpec& drive, double gamma_rad_s, double gamma_phi_rad_s);

struct TelegraphSpectrum {
  std::vector<double> frequency_hz;  // one-sided offset from the carrier
  std::vector<double> power;         // folded (+f and -f), normalized to unit sum
  double sample_rate_hz = 0.0;
  double carson_half_width_hz = 0.0; // in-band means |offset| <= this
  double in_band_fraction = 1.0;
  double out_of_band_fraction() const { return 1.0 - in_band_fraction; }
};

/// Monte-Carlo spectrum of a carrier whose frequency hops between +shift and
/// -shift. The telegraph is stationary and symmetric with jump rate gamma/2
/// out of each state, so sigma_z correlations decay at the energy relaxation
/// rate gamma. Each trajectory is sampled at 16x the Carson bandwidth,
/// Hann-windowed and FFT'd; spectra are averaged. in_band_fraction is the
/// share of power within +-(shift + 2 gamma), half the Carson bandwidth.
TelegraphSpectrum relaxation_telegraph_spectrum(double gamma_rad_s, double shift_rad_s,
                                                double duration_s, std::size_t n_trajectories,
                                                std::uint64_t seed);

}  // namespace fdmq
