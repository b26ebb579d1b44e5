#include "fdmq/qubit_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <string>

#include "fdmq/capacity.hpp"
#include "fdmq/errors.hpp"
#include "fdmq/fft.hpp"
#include "fdmq/seeds.hpp"
#include "fdmq/units.hpp"

namespace fdmq {

double BlochState::norm() const { return std::sqrt(x * x + y * y + z * z); }

void DriveSpec::validate() const {
  if (amplitude < 0.0) throw InvalidParameter("drive amplitude must be >= 0");
  if (duration_s < 0.0) throw InvalidParameter("drive duration must be >= 0");
}

double rabi_frequency(const DriveSpec& d) {
  return std::hypot(d.rabi_rate_per_amplitude_hz * d.amplitude, d.detuning_hz);
}

namespace {

struct Rates {
  double omega;     // drive, rad/s
  double delta_q;   // qubit minus drive, rad/s
  double gamma;
  double gamma2;
};

BlochState derivative(const BlochState& r, const Rates& k) {
  return {-k.delta_q * r.y - k.gamma2 * r.x,
          k.delta_q * r.x - k.omega * r.z - k.gamma2 * r.y,
          k.omega * r.y - k.gamma * (r.z + 1.0)};
}

BlochState axpy(const BlochState& a, double h, const BlochState& d) {
  return {a.x + h * d.x, a.y + h * d.y, a.z + h * d.z};
}

Rates rates_for(const DriveSpec& d, double gamma, double gamma_phi) {
  return {to_angular(d.rabi_rate_per_amplitude_hz * d.amplitude), -to_angular(d.detuning_hz), gamma,
          0.5 * gamma + gamma_phi};
}

BlochState rk4(const BlochState& s, const Rates& k, double dt) {
  const auto k1 = derivative(s, k);
  const auto k2 = derivative(axpy(s, 0.5 * dt, k1), k);
  const auto k3 = derivative(axpy(s, 0.5 * dt, k2), k);
  const auto k4 = derivative(axpy(s, dt, k3), k);
  return {s.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.y + dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
          s.z + dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z)};
}

void check_rates(double gamma, double gamma_phi) {
  if (gamma < 0.0 || gamma_phi < 0.0) throw InvalidParameter("relaxation rates must be >= 0");
}

}  // namespace

BlochState evolve(const BlochState& state, const DriveSpec& drive, double gamma_rad_s,
                  double gamma_phi_rad_s, double dt) {
  drive.validate();
  check_rates(gamma_rad_s, gamma_phi_rad_s);
  if (!(dt > 0.0)) throw InvalidParameter("time step must be positive");
  const double omega_gen = to_angular(rabi_frequency(drive));
  if (dt * (omega_gen + gamma_rad_s) > kMaxStepPhase) {
    throw StepSizeRejected("step " + std::to_string(dt) + " s too long for rates " +
                           std::to_string(omega_gen + gamma_rad_s) + " rad/s");
  }
  return rk4(state, rates_for(drive, gamma_rad_s, gamma_phi_rad_s), dt);
}

BlochState evolve_for(BlochState state, const DriveSpec& drive, double gamma_rad_s,
                      double gamma_phi_rad_s, double duration, double max_step) {
  if (duration < 0.0) throw InvalidParameter("duration must be >= 0");
  if (duration == 0.0) return state;
  const double rate = to_angular(rabi_frequency(drive)) + gamma_rad_s + gamma_phi_rad_s;
  if (max_step <= 0.0) max_step = rate > 0.0 ? 0.02 / rate : duration;
  const auto steps = static_cast<std::size_t>(std::ceil(duration / max_step));
  const double dt = duration / static_cast<double>(steps);
  for (std::size_t i = 0; i < steps; ++i)
    state = evolve(state, drive, gamma_rad_s, gamma_phi_rad_s, dt);
  return state;
}

double steady_state_z(const DriveSpec& drive, double gamma_rad_s, double gamma_phi_rad_s) {
  if (!(gamma_rad_s > 0.0)) throw InvalidParameter("steady state needs gamma > 0");
  check_rates(gamma_rad_s, gamma_phi_rad_s);
  const auto k = rates_for(drive, gamma_rad_s, gamma_phi_rad_s);
  const double detune = k.delta_q * k.delta_q / (k.gamma2 * k.gamma2);
  const double sat = k.omega * k.omega / (gamma_rad_s * k.gamma2);
  return -(1.0 + detune) / (1.0 + detune + sat);
}

TelegraphSpectrum relaxation_telegraph_spectrum(double gamma_rad_s, double shift_rad_s,
                                                double duration_s, std::size_t n_trajectories,
                                                std::uint64_t seed) {
  if (gamma_rad_s < 0.0 || shift_rad_s < 0.0) throw InvalidParameter("rates must be >= 0");
  if (!(duration_s > 0.0) || n_trajectories == 0)
    throw InvalidParameter("telegraph spectrum needs a positive duration and trajectories");

  TelegraphSpectrum out;
  out.carson_half_width_hz = to_hz(0.5 * carson_bandwidth(shift_rad_s, gamma_rad_s));
  const double carson_hz = 2.0 * out.carson_half_width_hz;
  const double min_resolution = 256.0 / duration_s;
  out.sample_rate_hz = std::max(16.0 * carson_hz, min_resolution);
  const auto n = static_cast<std::size_t>(std::ceil(duration_s * out.sample_rate_hz));
  const double dt = 1.0 / out.sample_rate_hz;
  const double jump_rate = 0.5 * gamma_rad_s;

  FftPlan fft(n);
  std::vector<double> window(n);
  for (std::size_t k = 0; k < n; ++k)
    window[k] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n)));
  std::vector<std::complex<double>> x(n), spec(n);
  std::vector<double> accum(n, 0.0);

  for (std::size_t traj = 0; traj < n_trajectories; ++traj) {
    std::mt19937_64 rng(derive_seed(seed, traj));
    std::exponential_distribution<double> wait(jump_rate > 0.0 ? jump_rate : 1.0);
    double sigma = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
    double next_jump = jump_rate > 0.0 ? wait(rng) : std::numeric_limits<double>::infinity();
    double t = 0.0;
    double phase = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double target = static_cast<double>(k) * dt;
      // exact phase integral across any jumps inside the sample interval
      while (next_jump < target) {
        phase += shift_rad_s * sigma * (next_jump - t);
        t = next_jump;
        sigma = -sigma;
        next_jump += wait(rng);
      }
      phase += shift_rad_s * sigma * (target - t);
      t = target;
      x[k] = window[k] * std::polar(1.0, phase);
    }
    fft.forward(x, spec);
    for (std::size_t k = 0; k < n; ++k) accum[k] += std::norm(spec[k]);
  }

  const double bin_hz = out.sample_rate_hz / static_cast<double>(n);
  const std::size_t half = n / 2;
  out.frequency_hz.resize(half + 1);
  out.power.assign(half + 1, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) total += accum[k];
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t folded = k <= half ? k : n - k;
    out.power[folded] += accum[k] / total;
  }
  double in_band = 0.0;
  for (std::size_t k = 0; k <= half; ++k) {
    out.frequency_hz[k] = static_cast<double>(k) * bin_hz;
    if (out.frequency_hz[k] <= out.carson_half_width_hz * (1.0 + 1e-12)) in_band += out.power[k];
  }
  out.in_band_fraction = std::min(1.0, in_band);
  return out;
}

}  // namespace fdmq
