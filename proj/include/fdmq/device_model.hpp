#pragma once

#include <complex>
#include <span>
#include <vector>

namespace fdmq {

struct QubitParams {
  double gap_hz = 5e9;                 // splitting at the symmetry point
  double flux_sensitivity_hz = 1.8e12; // d(epsilon)/d(flux), Hz per flux quantum
  double symmetry_flux = 0.0;          // flux quanta
  double gamma_rad_s = 0.0;            // energy relaxation rate

  void validate() const;
};

struct ResonatorParams {
  double frequency_hz = 10e9;
  double kappa_rad_s = 0.0;      // total linewidth
  double kappa_ext_rad_s = 0.0;  // feedline coupling part, <= kappa
  double coupling_hz = 0.0;      // effective qubit coupling g/2pi

  void validate() const;
};

struct DeviceRecord {
  int id = 0;
  QubitParams qubit;
  ResonatorParams resonator;

  void validate() const;
};

// sigma_z eigenvalue; +1 is the excited state.
enum class QubitState : int { ground = -1, excited = +1 };

constexpr double sigma_z(QubitState s) { return static_cast<double>(static_cast<int>(s)); }
constexpr QubitState flipped(QubitState s) {
  return s == QubitState::ground ? QubitState::excited : QubitState::ground;
}

// Detuning below which the feedline model swaps the perturbative shift for
// the exact two-mode result, in units of the coupling.
inline constexpr double kAnticrossingWindow = 5.0;

// Relative tolerance (of the resonator frequency) for exact degeneracy.
inline constexpr double kDegenerateTolerance = 1e-6;

/// Transition frequency sqrt(gap^2 + eps^2), eps linear in flux offset.
double qubit_frequency(const QubitParams& q, double applied_flux);

/// Perturbative shift g^2 / (omega_q - omega_r) * sigma_z, rad/s.
/// Throws DegenerateDetuning when |omega_q - omega_r| < 1e-6 omega_r.
double dispersive_shift(const ResonatorParams& r, double qubit_omega, QubitState state);

/// Resonator-like normal-mode shift of the two-level Jaynes-Cummings block,
/// sign(d) (sqrt(d^2/4 + g^2) - |d|/2) scaled by the sigma_z expectation.
/// Finite at d = 0 where it takes the +g branch.
double exact_resonator_shift(const ResonatorParams& r, double qubit_omega, double z);

/// Shift used by the feedline model: perturbative outside the anticrossing
/// window, exact inside it. `z` is the sigma_z expectation in [-1, 1].
double resonator_shift(const ResonatorParams& r, double qubit_omega, double z);

/// Notch transmission 1 - (kext/2) / (i (w - w_r - shift) + k/2).
std::complex<double> s21_single(const ResonatorParams& r, double probe_omega, double shift);

/// A resonator with its state-dependent center already resolved.
struct DressedResonator {
  double center_rad_s;
  double kappa_rad_s;
  double kappa_ext_rad_s;
};

std::vector<DressedResonator> dress(std::span<const DeviceRecord> chip,
                                    std::span<const double> z,
                                    std::span<const double> fluxes);

std::complex<double> s21_dressed(std::span<const DressedResonator> resonators, double probe_omega);

/// Composite transmission of every resonator on the line.
std::complex<double> s21_feedline(std::span<const DeviceRecord> chip, double probe_omega,
                                  std::span<const QubitState> states,
                                  std::span<const double> fluxes);

/// Same with continuous sigma_z expectations (ensemble readout).
std::complex<double> s21_feedline(std::span<const DeviceRecord> chip, double probe_omega,
                                  std::span<const double> z, std::span<const double> fluxes);

const DeviceRecord& find_device(std::span<const DeviceRecord> chip, int id);

}  // namespace fdmq
