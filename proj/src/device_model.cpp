#include "fdmq/device_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdmq/errors.hpp"
#include "fdmq/units.hpp"

namespace fdmq {

void QubitParams::validate() const {
  if (!(gap_hz > 0.0)) throw InvalidParameter("qubit gap must be positive");
  if (!(gamma_rad_s >= 0.0)) throw InvalidParameter("qubit relaxation rate must be >= 0");
  if (!std::isfinite(symmetry_flux) || !std::isfinite(flux_sensitivity_hz))
    throw InvalidParameter("qubit flux parameters must be finite");
}

void ResonatorParams::validate() const {
  if (!(frequency_hz > 0.0)) throw InvalidParameter("resonator frequency must be positive");
  if (!(kappa_ext_rad_s > 0.0) || kappa_ext_rad_s > kappa_rad_s)
    throw InvalidParameter("resonator linewidths must satisfy 0 < kappa_ext <= kappa");
  if (!(coupling_hz >= 0.0)) throw InvalidParameter("coupling must be >= 0");
}

void DeviceRecord::validate() const {
  qubit.validate();
  resonator.validate();
}

double qubit_frequency(const QubitParams& q, double applied_flux) {
  const double eps = q.flux_sensitivity_hz * (applied_flux - q.symmetry_flux);
  return std::hypot(q.gap_hz, eps);
}

double dispersive_shift(const ResonatorParams& r, double qubit_omega, QubitState state) {
  const double omega_r = to_angular(r.frequency_hz);
  const double detuning = qubit_omega - omega_r;
  if (std::abs(detuning) < kDegenerateTolerance * omega_r) {
    throw DegenerateDetuning("qubit degenerate with resonator at " + std::to_string(r.frequency_hz) +
                             " Hz; dispersive formula undefined");
  }
  const double g = to_angular(r.coupling_hz);
  return g * g / detuning * sigma_z(state);
}

double exact_resonator_shift(const ResonatorParams& r, double qubit_omega, double z) {
  const double detuning = qubit_omega - to_angular(r.frequency_hz);
  const double g = to_angular(r.coupling_hz);
  const double half = 0.5 * std::abs(detuning);
  const double magnitude = std::sqrt(half * half + g * g) - half;
  return (detuning >= 0.0 ? magnitude : -magnitude) * z;
}

double resonator_shift(const ResonatorParams& r, double qubit_omega, double z) {
  if (r.coupling_hz == 0.0) return 0.0;
  const double detuning = qubit_omega - to_angular(r.frequency_hz);
  const double g = to_angular(r.coupling_hz);
  if (std::abs(detuning) < kAnticrossingWindow * g) return exact_resonator_shift(r, qubit_omega, z);
  return g * g / detuning * z;
}

std::complex<double> s21_single(const ResonatorParams& r, double probe_omega, double shift) {
  const double delta = probe_omega - to_angular(r.frequency_hz) - shift;
  return 1.0 - (0.5 * r.kappa_ext_rad_s) / std::complex<double>(0.5 * r.kappa_rad_s, delta);
}

std::vector<DressedResonator> dress(std::span<const DeviceRecord> chip, std::span<const double> z,
                                    std::span<const double> fluxes) {
  if (z.size() != chip.size() || fluxes.size() != chip.size()) {
    throw LengthMismatch("feedline: " + std::to_string(chip.size()) + " devices but " +
                         std::to_string(z.size()) + " states and " + std::to_string(fluxes.size()) +
                         " fluxes");
  }
  std::vector<DressedResonator> out;
  out.reserve(chip.size());
  for (std::size_t i = 0; i < chip.size(); ++i) {
    const auto& d = chip[i];
    const double omega_q = to_angular(qubit_frequency(d.qubit, fluxes[i]));
    const double shift = resonator_shift(d.resonator, omega_q, z[i]);
    out.push_back({to_angular(d.resonator.frequency_hz) + shift, d.resonator.kappa_rad_s,
                   d.resonator.kappa_ext_rad_s});
  }
  return out;
}

std::complex<double> s21_dressed(std::span<const DressedResonator> resonators, double probe_omega) {
  std::complex<double> s{1.0, 0.0};
  for (const auto& r : resonators) {
    s *= 1.0 - (0.5 * r.kappa_ext_rad_s) /
                   std::complex<double>(0.5 * r.kappa_rad_s, probe_omega - r.center_rad_s);
  }
  return s;
}

std::complex<double> s21_feedline(std::span<const DeviceRecord> chip, double probe_omega,
                                  std::span<const double> z, std::span<const double> fluxes) {
  const auto dressed = dress(chip, z, fluxes);
  return s21_dressed(dressed, probe_omega);
}

std::complex<double> s21_feedline(std::span<const DeviceRecord> chip, double probe_omega,
                                  std::span<const QubitState> states,
                                  std::span<const double> fluxes) {
  std::vector<double> z(states.size());
  std::transform(states.begin(), states.end(), z.begin(), sigma_z);
  return s21_feedline(chip, probe_omega, std::span<const double>(z), fluxes);
}

const DeviceRecord& find_device(std::span<const DeviceRecord> chip, int id) {
  auto it = std::find_if(chip.begin(), chip.end(), [id](const auto& d) { return d.id == id; });
  if (it == chip.end()) throw UnknownDevice("no device with id " + std::to_string(id));
  return *it;
}

}  // namespace fdmq
