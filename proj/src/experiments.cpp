#include "fdmq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "fdmq/errors.hpp"
#include "fdmq/format.hpp"
#include "fdmq/qubit_dynamics.hpp"
#include "fdmq/seeds.hpp"
#include "fdmq/units.hpp"

namespace fdmq {

double Range::at(std::size_t i) const {
  if (points <= 1) return start;
  return start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
}

double Range::step() const {
  return points <= 1 ? 0.0 : (stop - start) / static_cast<double>(points - 1);
}

void Range::validate(const char* what) const {
  if (points == 0) throw InvalidParameter(std::string(what) + ": need at least one point");
  if (!std::isfinite(start) || !std::isfinite(stop))
    throw InvalidParameter(std::string(what) + ": non-finite range");
  if (points > 1 && !(stop > start))
    throw InvalidParameter(std::string(what) + ": stop must exceed start");
}

namespace {

SweepResult make_result(const ChipConfig& chip, const char* experiment, std::uint64_t seed,
                        std::vector<std::string> columns) {
  SweepResult r;
  r.meta.experiment = experiment;
  r.meta.seed = seed;
  r.meta.config_hash = chip.config_hash;
  r.meta.timestamp = utc_timestamp();
  r.columns = std::move(columns);
  return r;
}

std::size_t channel_of(const ReadoutChain& chain, int device_id) {
  const auto& chs = chain.channels();
  for (std::size_t k = 0; k < chs.size(); ++k)
    if (chs[k].device_id == device_id) return k;
  throw UnknownDevice("device " + std::to_string(device_id) + " has no plan channel");
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace

SweepResult run_flux_sweep(const ChipConfig& chip, const FrequencyPlan& plan,
                           const FluxSweepSpec& spec, std::uint64_t seed) {
  spec.flux.validate("flux range");
  if (!spec.flux_offsets.empty() && spec.flux_offsets.size() != chip.devices.size())
    throw LengthMismatch("need one flux offset per chip device");
  ReadoutChain chain(chip.devices, plan, chip.chain);

  auto result = make_result(chip, "flux_sweep", seed,
                            {"flux", "device", "channel_hz", "amplitude", "phase_rad", "noise_std"});
  const std::vector<double> z(chip.devices.size(), -1.0);
  std::vector<double> fluxes(chip.devices.size());
  for (std::size_t i = 0; i < spec.flux.points; ++i) {
    const double flux = spec.flux.at(i);
    for (std::size_t d = 0; d < fluxes.size(); ++d)
      fluxes[d] = flux + (spec.flux_offsets.empty() ? 0.0 : spec.flux_offsets[d]);
    const auto m = chain.measure(z, fluxes, derive_seed(seed, i));
    for (std::size_t k = 0; k < m.size(); ++k) {
      result.add_row({flux, static_cast<double>(chain.channels()[k].device_id),
                      m[k].channel_frequency_hz, m[k].amplitude, m[k].phase_rad, m[k].noise_std});
    }
  }
  return result;
}

std::vector<FluxFeature> find_flux_features(std::span<const double> flux,
                                            std::span<const double> amplitude) {
  if (flux.size() != amplitude.size()) throw LengthMismatch("flux and amplitude lengths differ");
  std::vector<FluxFeature> out;
  if (amplitude.empty()) return out;
  const double base = median({amplitude.begin(), amplitude.end()});
  double peak = 0.0;
  for (double a : amplitude) peak = std::max(peak, std::abs(a - base));
  if (peak == 0.0) return out;

  const double threshold = 0.5 * peak;
  std::size_t i = 0;
  while (i < amplitude.size()) {
    if (std::abs(amplitude[i] - base) <= threshold) {
      ++i;
      continue;
    }
    FluxFeature f{i, flux[i], std::abs(amplitude[i] - base)};
    for (; i < amplitude.size() && std::abs(amplitude[i] - base) > threshold; ++i) {
      const double dev = std::abs(amplitude[i] - base);
      if (dev > f.deviation) f = {i, flux[i], dev};
    }
    out.push_back(f);
  }
  return out;
}

std::vector<double> crossing_fluxes(const QubitParams& q, double target_hz) {
  // sqrt(gap^2 + eps^2) = target  =>  eps = +-sqrt(target^2 - gap^2)
  if (target_hz < q.gap_hz) return {};
  const double eps = std::sqrt(target_hz * target_hz - q.gap_hz * q.gap_hz);
  const double d = eps / std::abs(q.flux_sensitivity_hz);
  if (d == 0.0) return {q.symmetry_flux};
  return {q.symmetry_flux - d, q.symmetry_flux + d};
}

SweepResult run_spectroscopy(const ChipConfig& chip, const FrequencyPlan& plan,
                             const SpectroscopySpec& spec, std::uint64_t seed) {
  spec.drive_hz.validate("drive range");
  spec.flux.validate("flux range");
  if (spec.drive_amplitude < 0.0) throw InvalidParameter("drive amplitude must be >= 0");

  ReadoutChain chain(chip.devices, plan, chip.chain);
  ChainConfig ideal_cfg = chip.chain;
  ideal_cfg.ideal_adc = true;
  ideal_cfg.noise_std = 0.0;
  ideal_cfg.lo_hz = chain.lo_hz();
  ReadoutChain ideal(chip.devices, plan, ideal_cfg);

  double lowest = chain.channels().front().rf_hz;
  for (const auto& ch : chain.channels()) lowest = std::min(lowest, ch.rf_hz);
  if (!(spec.drive_hz.start > 0.0) || !(spec.drive_hz.stop < lowest)) {
    throw InvalidParameter("drive band [" + format_double(spec.drive_hz.start) + ", " +
                           format_double(spec.drive_hz.stop) +
                           "] Hz leaves the simulated qubit band (0, " + format_double(lowest) +
                           ")");
  }

  auto result = make_result(chip, "spectroscopy", seed,
                            {"flux", "drive_hz", "device", "qubit_hz", "p_excited", "amplitude",
                             "phase_rad", "response"});
  const std::size_t n_dev = chip.devices.size();
  const auto& chs = chain.channels();
  const std::vector<double> sym = chain.symmetry_fluxes();
  std::vector<double> fluxes(n_dev), p(n_dev), qubit_hz(n_dev);
  std::size_t cell = 0;
  for (std::size_t fi = 0; fi < spec.flux.points; ++fi) {
    const double detune = spec.flux.at(fi);
    fluxes = sym;
    for (const auto& ch : chs) fluxes[ch.device_index] += detune;
    for (std::size_t d = 0; d < n_dev; ++d)
      qubit_hz[d] = qubit_frequency(chip.devices[d].qubit, fluxes[d]);
    std::fill(p.begin(), p.end(), 0.0);
    const auto ground = ideal.measure_populations(p, fluxes, 0);

    for (std::size_t di = 0; di < spec.drive_hz.points; ++di, ++cell) {
      const double drive = spec.drive_hz.at(di);
      std::fill(p.begin(), p.end(), 0.0);
      for (const auto& ch : chs) {
        const auto& dev = chip.devices[ch.device_index];
        if (dev.qubit.gamma_rad_s <= 0.0) continue;  // no steady state without relaxation
        DriveSpec ds{chip.rabi_rate_per_amplitude_hz, spec.drive_amplitude,
                     drive - qubit_hz[ch.device_index], 0.0};
        p[ch.device_index] =
            0.5 * (1.0 + steady_state_z(ds, dev.qubit.gamma_rad_s, chip.gamma_phi_rad_s));
      }
      const auto m = chain.measure_populations(p, fluxes, derive_seed(seed, cell));
      for (std::size_t k = 0; k < m.size(); ++k) {
        const auto idx = chs[k].device_index;
        result.add_row({detune, drive, static_cast<double>(chs[k].device_id), qubit_hz[idx], p[idx],
                        m[k].amplitude, m[k].phase_rad,
                        std::abs(m[k].value() - ground[k].value())});
      }
    }
  }
  return result;
}

std::vector<RidgePoint> extract_ridge(const SweepResult& spectroscopy, int device_id) {
  const auto fi = spectroscopy.column_index("flux");
  const auto di = spectroscopy.column_index("drive_hz");
  const auto ri = spectroscopy.column_index("response");
  const auto dev = spectroscopy.column_index("device");
  std::vector<RidgePoint> ridge;
  for (const auto& row : spectroscopy.rows) {
    if (row[dev] != static_cast<double>(device_id)) continue;
    if (ridge.empty() || ridge.back().flux != row[fi]) {
      ridge.push_back({row[fi], row[di], row[ri]});
    } else if (row[ri] > ridge.back().response) {
      ridge.back().drive_hz = row[di];
      ridge.back().response = row[ri];
    }
  }
  return ridge;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch("x and y lengths differ");
  if (x.size() < 2) throw InvalidParameter("need at least two points for a line");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidParameter("x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

RabiRun run_rabi(const ChipConfig& chip, const FrequencyPlan& plan, const RabiSpec& spec,
                 std::uint64_t seed) {
  if (spec.device_ids.empty()) throw InvalidParameter("no driven devices");
  if (spec.durations_s.empty()) throw InvalidParameter("empty duration grid");
  if (spec.averages == 0) throw InvalidParameter("averages must be >= 1");
  for (std::size_t i = 0; i < spec.durations_s.size(); ++i) {
    if (spec.durations_s[i] < 0.0 || (i && !(spec.durations_s[i] > spec.durations_s[i - 1])))
      throw InvalidParameter("durations must be non-negative and increasing");
  }
  for (const auto& set : spec.amplitudes)
    if (set.size() != spec.device_ids.size())
      throw LengthMismatch("each amplitude set needs one value per driven device");

  ChainConfig cfg = chip.chain;
  cfg.noise_std /= std::sqrt(static_cast<double>(spec.averages));
  ReadoutChain chain(chip.devices, plan, cfg);
  ChainConfig ideal_cfg = chip.chain;
  ideal_cfg.ideal_adc = true;
  ideal_cfg.noise_std = 0.0;
  ideal_cfg.lo_hz = chain.lo_hz();
  ReadoutChain ideal(chip.devices, plan, ideal_cfg);

  const std::size_t n_dev = chip.devices.size();
  const auto fluxes = chain.symmetry_fluxes();
  std::vector<std::size_t> dev_index, chan;
  for (int id : spec.device_ids) {
    const auto& d = find_device(chip.devices, id);
    dev_index.push_back(static_cast<std::size_t>(&d - chip.devices.data()));
    chan.push_back(channel_of(chain, id));
  }

  // ground/excited calibration points of each driven device's own channel
  std::vector<Complex> cal_g, cal_e;
  for (std::size_t j = 0; j < spec.device_ids.size(); ++j) {
    std::vector<double> p(n_dev, 0.0);
    cal_g.push_back(ideal.measure_populations(p, fluxes, 0)[chan[j]].value());
    p[dev_index[j]] = 1.0;
    cal_e.push_back(ideal.measure_populations(p, fluxes, 0)[chan[j]].value());
  }
  std::vector<int> is_driven(n_dev, -1);
  for (std::size_t j = 0; j < dev_index.size(); ++j) is_driven[dev_index[j]] = static_cast<int>(j);

  RabiRun run;
  run.trace = make_result(chip, "rabi", seed,
                          {"set", "device", "drive_amplitude", "duration_s", "p_excited",
                           "amplitude", "phase_rad", "signal"});
  run.trace.meta.notes.push_back({"averages", std::to_string(spec.averages)});

  const std::size_t n_t = spec.durations_s.size();
  for (std::size_t s = 0; s < spec.amplitudes.size(); ++s) {
    const auto& amps = spec.amplitudes[s];
    std::vector<BlochState> state(spec.device_ids.size(), BlochState::ground());
    std::vector<std::vector<double>> signal(spec.device_ids.size());
    double t_prev = 0.0;
    for (std::size_t ti = 0; ti < n_t; ++ti) {
      const double t = spec.durations_s[ti];
      std::vector<double> p(n_dev, 0.0);
      for (std::size_t j = 0; j < spec.device_ids.size(); ++j) {
        const auto& q = chip.devices[dev_index[j]].qubit;
        const DriveSpec ds{chip.rabi_rate_per_amplitude_hz, amps[j], 0.0, t - t_prev};
        if (t > t_prev) state[j] = evolve_for(state[j], ds, q.gamma_rad_s, chip.gamma_phi_rad_s, t - t_prev);
        p[dev_index[j]] = std::clamp(state[j].excited_population(), 0.0, 1.0);
      }
      t_prev = t;
      const auto m = chain.measure_populations(p, fluxes, derive_seed(seed, s, ti));
      for (std::size_t k = 0; k < m.size(); ++k) {
        const auto& ch = chain.channels()[k];
        const int j = is_driven[ch.device_index];
        double sig = 0.0;
        double amp = 0.0;
        if (j >= 0) {
          const Complex axis = cal_e[j] - cal_g[j];
          sig = std::real((m[k].value() - cal_g[j]) * std::conj(axis)) / std::norm(axis);
          signal[j].push_back(sig);
          amp = amps[j];
        }
        run.trace.add_row({static_cast<double>(s), static_cast<double>(ch.device_id), amp, t,
                           p[ch.device_index], m[k].amplitude, m[k].phase_rad, sig});
      }
    }
    for (std::size_t j = 0; j < spec.device_ids.size(); ++j) {
      RabiTraceFit f;
      f.set = s;
      f.device_id = spec.device_ids[j];
      f.drive_amplitude = amps[j];
      f.expected_frequency_hz =
          rabi_frequency({chip.rabi_rate_per_amplitude_hz, amps[j], 0.0, 0.0});
      f.fit = fit_damped_sinusoid(spec.durations_s, signal[j]);
      run.fits.push_back(std::move(f));
    }
  }

  for (int id : spec.device_ids) {
    std::vector<double> x, y;
    for (const auto& f : run.fits) {
      if (f.device_id != id || !f.fit.valid) continue;
      x.push_back(f.drive_amplitude);
      y.push_back(f.fit.frequency_hz);
    }
    const bool spread = std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) != x.end();
    if (x.size() >= 2 && spread) run.linearity.push_back({id, fit_line(x, y)});
  }
  return run;
}

SweepResult run_capacity_scan(double kappa_rad_s, double bandwidth_hz, double carson_rad_s) {
  if (!(kappa_rad_s > 0.0) || !(bandwidth_hz > 0.0))
    throw InvalidParameter("kappa and bandwidth must be positive");
  SweepResult r;
  r.meta.experiment = "capacity_scan";
  r.meta.timestamp = utc_timestamp();
  r.columns = {"spacing_kappa", "crosstalk_db", "channels_per_ghz", "carson_ok"};
  for (int i = 10; i <= 100; ++i) {
    const double mult = 0.1 * i;
    const double spacing = mult * kappa_rad_s;
    const double count = std::floor(bandwidth_hz / to_hz(spacing) + 1e-9);
    r.add_row({mult, adjacent_crosstalk_db(spacing, kappa_rad_s), count * 1e9 / bandwidth_hz,
               spacing >= carson_rad_s ? 1.0 : 0.0});
  }
  return r;
}

void write_gnuplot(std::ostream& out, const SweepResult& result, const std::string& csv_name) {
  const auto& kind = result.meta.experiment;
  out << "# " << kind << " plot for " << csv_name << "\n";
  out << "set datafile separator ','\nset datafile commentschars '#'\nset datafile columnheaders\nset key outside\n";
  auto col = [&](const std::string& c) { return std::to_string(result.column_index(c) + 1); };

  std::vector<double> devices;
  if (std::find(result.columns.begin(), result.columns.end(), "device") != result.columns.end()) {
    for (double d : result.column("device"))
      if (std::find(devices.begin(), devices.end(), d) == devices.end()) devices.push_back(d);
  }
  auto per_device = [&](const std::string& x, const std::string& y, const std::string& extra) {
    out << "plot ";
    for (std::size_t i = 0; i < devices.size(); ++i) {
      const auto id = format_double(devices[i]);
      out << (i ? ", \\\n     " : "") << "'" << csv_name << "' using ($" << col("device")
          << "==" << id << extra << " ? $" << col(x) << " : 1/0):" << col(y)
          << " with lines title 'device " << id << "'";
    }
    out << "\n";
  };

  if (kind == "flux_sweep") {
    out << "set xlabel 'flux (flux quanta)'\nset ylabel '|S21| at probe'\n";
    per_device("flux", "amplitude", "");
  } else if (kind == "spectroscopy") {
    out << "set xlabel 'flux detuning (flux quanta)'\nset ylabel 'drive (Hz)'\nset view map\n";
    out << "splot '" << csv_name << "' using " << col("flux") << ":" << col("drive_hz")
        << ":" << col("response") << " with points palette pt 5 ps 0.5 notitle\n";
  } else if (kind == "rabi") {
    out << "set xlabel 'pulse length (s)'\nset ylabel 'signal'\n";
    per_device("duration_s", "signal", " && $" + col("drive_amplitude") + "!=0");
  } else if (kind == "capacity_scan") {
    out << "set xlabel 'spacing / kappa'\nset ylabel 'adjacent crosstalk (dB)'\n";
    out << "plot '" << csv_name << "' using " << col("spacing_kappa") << ":"
        << col("crosstalk_db") << " with lines notitle\n";
  } else {
    out << "plot '" << csv_name << "' using 1:2 with lines notitle\n";
  }
}

}  // namespace fdmq
