#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fdmq/capacity.hpp"
#include "fdmq/chip_config.hpp"
#include "fdmq/dsp_rx.hpp"
#include "fdmq/dsp_tx.hpp"
#include "fdmq/errors.hpp"
#include "fdmq/experiments.hpp"
#include "fdmq/format.hpp"
#include "fdmq/trace_io.hpp"
#include "fdmq/units.hpp"

namespace fs = std::filesystem;
using namespace fdmq;

namespace {

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct Common {
  std::string config = "configs/chip7.cfg";
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string format = "csv";
  bool gnuplot = false;
  bool append = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config = true) {
  if (needs_config) cmd->add_option("--config", c.config, "chip description (INI)");
  cmd->add_option("--seed", c.seed, "root seed");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--emit-gnuplot", c.gnuplot, "write a gnuplot script next to each CSV");
  cmd->add_flag("--append", c.append, "append rows to an existing CSV from the same config");
}

fs::path emit(const SweepResult& r, const std::string& name, const Common& c) {
  fs::create_directories(c.out);
  const fs::path path = fs::path(c.out) / (name + "." + c.format);
  if (c.format == "json") {
    std::ofstream out(path);
    write_json(out, r);
  } else if (c.append) {
    append_csv(path, r);
  } else {
    std::ofstream out(path);
    write_csv(out, r);
  }
  if (c.gnuplot && c.format == "csv") {
    std::ofstream gp(fs::path(c.out) / (name + ".gp"));
    write_gnuplot(gp, r, path.filename().string());
  }
  std::cout << "wrote " << path.string() << "\n";
  return path;
}

std::vector<int> or_all(std::vector<int> ids, const ChipConfig& chip) {
  return ids.empty() ? chip.device_ids() : ids;
}

FrequencyPlan chip_plan(const ChipConfig& chip, const std::vector<int>& ids) {
  return plan_from_chip(chip.devices, ids);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("not a number list: '" + text + "'");
    }
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-multiplexed qubit readout simulator"};
  app.require_subcommand(1);
  Common common;

  // sweep
  auto* sweep = app.add_subcommand("sweep", "flux sweep read out through one multi-tone probe");
  add_common(sweep, common);
  std::vector<int> sweep_devices;
  Range sweep_flux{-0.008, 0.008, 500};
  sweep->add_option("--devices", sweep_devices, "probed devices (default: all)")->delimiter(',');
  sweep->add_option("--flux-start", sweep_flux.start);
  sweep->add_option("--flux-stop", sweep_flux.stop);
  sweep->add_option("--points", sweep_flux.points);

  // spectroscopy
  auto* spec_cmd = app.add_subcommand("spectroscopy", "multiplexed two-tone spectroscopy map");
  add_common(spec_cmd, common);
  std::vector<int> spec_devices{2, 3, 5};
  SpectroscopySpec spec{{4.4e9, 5.5e9, 551}, {-5e-4, 5e-4, 21}, 0.1};
  spec_cmd->add_option("--devices", spec_devices)->delimiter(',');
  spec_cmd->add_option("--drive-start", spec.drive_hz.start);
  spec_cmd->add_option("--drive-stop", spec.drive_hz.stop);
  spec_cmd->add_option("--drive-points", spec.drive_hz.points);
  spec_cmd->add_option("--flux-start", spec.flux.start, "flux detuning from the symmetry points");
  spec_cmd->add_option("--flux-stop", spec.flux.stop);
  spec_cmd->add_option("--flux-points", spec.flux.points);
  spec_cmd->add_option("--drive-amplitude", spec.drive_amplitude);

  // rabi
  auto* rabi = app.add_subcommand("rabi", "simultaneous Rabi oscillations with FDM readout");
  add_common(rabi, common);
  std::vector<int> rabi_devices{2, 3, 5};
  std::vector<std::string> rabi_sets;
  double t_stop = 3e-6;
  std::size_t t_points = 201;
  std::size_t averages = 1000;
  rabi->add_option("--devices", rabi_devices)->delimiter(',');
  rabi->add_option("--amplitudes", rabi_sets,
                   "one comma list per run, one amplitude per device (repeatable)");
  rabi->add_option("--t-stop", t_stop, "longest pulse (s)");
  rabi->add_option("--t-points", t_points);
  rabi->add_option("--averages", averages);

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "frequency plan, audit and capacity");
  add_common(plan_cmd, common, false);
  PlanRequest req{6, 9.3e9, 10.05e9, SpacingRule::fixed_spacing, 0.0, -10.0, 0.0};
  std::string rule = "fixed_spacing";
  double kappa_hz = 10e6, gamma_hz = 0.1e6, shift_hz = 2.5e6, bandwidth = 1e9;
  plan_cmd->add_option("--n", req.n);
  plan_cmd->add_option("--band-start", req.band_start_hz);
  plan_cmd->add_option("--band-stop", req.band_stop_hz);
  plan_cmd->add_option("--rule", rule)->check(CLI::IsMember({"fixed_spacing", "kappa_multiple"}));
  plan_cmd->add_option("--kappa-hz", kappa_hz, "resonator linewidth / 2 pi");
  plan_cmd->add_option("--gamma-hz", gamma_hz, "qubit relaxation rate / 2 pi");
  plan_cmd->add_option("--shift-hz", shift_hz, "dispersive shift / 2 pi");
  plan_cmd->add_option("--limit-db", req.crosstalk_limit_db);
  plan_cmd->add_option("--bandwidth", bandwidth, "band for the capacity figure (Hz)");

  // channelize
  auto* chan = app.add_subcommand("channelize", "demodulate a recorded IQ trace");
  add_common(chan, common, false);
  std::string trace_path;
  std::string chan_list;
  std::string window = "rectangular";
  chan->add_option("--trace", trace_path)->required();
  chan->add_option("--channels", chan_list, "baseband offsets, Hz, comma separated")->required();
  chan->add_option("--window", window)->check(CLI::IsMember({"rectangular", "hann"}));

  // synth
  auto* synth = app.add_subcommand("synth", "synthesize a multi-tone IQ trace");
  add_common(synth, common, false);
  std::string synth_tones;
  double synth_amp = 0.1, synth_rate = 1e9, synth_lo = 0.0;
  std::size_t synth_n = 4000;
  std::string synth_file = "probe.iq";
  synth->add_option("--tones", synth_tones, "baseband offsets, Hz, comma separated")->required();
  synth->add_option("--amplitude", synth_amp, "per tone, fraction of full scale");
  synth->add_option("--rate", synth_rate);
  synth->add_option("--samples", synth_n);
  synth->add_option("--lo", synth_lo, "upconvert to this LO (0 keeps baseband)");
  synth->add_option("--file", synth_file);

  // crosstalk
  auto* xt = app.add_subcommand("crosstalk", "toggle one qubit and measure the other channels");
  add_common(xt, common);
  std::vector<int> xt_devices;
  int toggled = 0;
  xt->add_option("--devices", xt_devices, "probed devices (default: all)")->delimiter(',');
  xt->add_option("--toggle", toggled, "device whose qubit is flipped")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sweep) {
      const auto chip = load_chip_config(common.config);
      const auto plan = chip_plan(chip, or_all(sweep_devices, chip));
      const auto r = run_flux_sweep(chip, plan, {sweep_flux, {}}, common.seed);
      emit(r, "flux_sweep", common);
      for (const auto& ch : plan.channels) {
        const auto trace = r.filter("device", ch.device_id);
        const auto f = find_flux_features(trace.column("flux"), trace.column("amplitude"));
        std::cout << "device " << ch.device_id << ": " << f.size() << " features";
        for (const auto& x : f) std::cout << " " << format_double(x.flux);
        std::cout << "\n";
      }
    } else if (*spec_cmd) {
      const auto chip = load_chip_config(common.config);
      const auto plan = chip_plan(chip, spec_devices);
      const auto r = run_spectroscopy(chip, plan, spec, common.seed);
      emit(r, "spectroscopy", common);
      for (int id : spec_devices) {
        const auto ridge = extract_ridge(r, id);
        const auto& mid = ridge[ridge.size() / 2];
        std::cout << "device " << id << ": ridge at " << format_double(mid.drive_hz)
                  << " Hz for flux detuning " << format_double(mid.flux) << "\n";
      }
    } else if (*rabi) {
      const auto chip = load_chip_config(common.config);
      const auto plan = chip_plan(chip, rabi_devices);
      RabiSpec rs;
      rs.device_ids = rabi_devices;
      rs.averages = averages;
      for (std::size_t i = 0; i < t_points; ++i)
        rs.durations_s.push_back(t_points > 1 ? t_stop * static_cast<double>(i) /
                                                    static_cast<double>(t_points - 1)
                                              : t_stop);
      if (rabi_sets.empty()) {
        for (int k = 1; k <= 5; ++k) {
          std::vector<double> set;
          for (std::size_t j = 0; j < rabi_devices.size(); ++j)
            set.push_back(0.025 * k * (1.0 + 0.5 * static_cast<double>(j)));
          rs.amplitudes.push_back(set);
        }
      } else {
        for (const auto& s : rabi_sets) rs.amplitudes.push_back(parse_list(s));
      }
      const auto run = run_rabi(chip, plan, rs, common.seed);
      emit(run.trace, "rabi", common);

      SweepResult fits;
      fits.meta = run.trace.meta;
      fits.meta.experiment = "rabi_fits";
      fits.columns = {"set", "device", "drive_amplitude", "expected_hz", "frequency_hz",
                      "decay_rate", "amplitude", "offset", "residual_rms", "valid"};
      for (const auto& f : run.fits) {
        fits.add_row({static_cast<double>(f.set), static_cast<double>(f.device_id),
                      f.drive_amplitude, f.expected_frequency_hz, f.fit.frequency_hz,
                      f.fit.decay_rate, f.fit.amplitude, f.fit.offset, f.fit.residual_rms,
                      f.fit.valid ? 1.0 : 0.0});
        if (!f.fit.valid)
          std::cerr << "set " << f.set << " device " << f.device_id << ": " << f.fit.diagnostic
                    << "\n";
      }
      Common fit_common = common;
      fit_common.gnuplot = false;
      emit(fits, "rabi_fits", fit_common);
      for (const auto& [id, line] : run.linearity)
        std::cout << "device " << id << ": f = " << format_double(line.slope) << " Hz * amplitude + "
                  << format_double(line.intercept) << " Hz, R^2 = " << format_double(line.r_squared)
                  << "\n";
    } else if (*plan_cmd) {
      req.rule = parse_spacing_rule(rule);
      req.kappa_rad_s = to_angular(kappa_hz);
      req.carson_rad_s = carson_bandwidth(to_angular(shift_hz), to_angular(gamma_hz));
      const auto plan = generate_plan(req);
      const auto audit = audit_plan(plan, req.kappa_rad_s, req.crosstalk_limit_db, req.carson_rad_s);
      fs::create_directories(common.out);
      const auto path = fs::path(common.out) / "plan.txt";
      std::ofstream out(path);
      write_plan_document(out, plan, audit);
      write_plan_document(std::cout, plan, audit);
      const auto cap = max_channels({bandwidth, req.kappa_rad_s, to_angular(gamma_hz),
                                     to_angular(shift_hz), req.crosstalk_limit_db});
      std::cout << "capacity: " << cap.count << " channels in " << format_double(bandwidth)
                << " Hz at spacing " << format_double(to_hz(cap.spacing_rad_s)) << " Hz"
                << (cap.carson_limited ? " (Carson limited)" : "") << "\n";
      emit(run_capacity_scan(req.kappa_rad_s, bandwidth, req.carson_rad_s), "capacity_scan",
           common);
      std::cout << "wrote " << path.string() << "\n";
    } else if (*chan) {
      const auto trace = read_trace_file(trace_path);
      const auto chans = parse_list(chan_list);
      const auto m = channelize(trace, chans, window == "hann" ? Window::hann : Window::rectangular);
      write_measurements_csv(std::cout, m);
    } else if (*synth) {
      std::vector<ToneSpec> tones;
      for (double f : parse_list(synth_tones)) tones.push_back({f, synth_amp, 0.0});
      auto trace = synthesize_multitone(tones, PulseEnvelope::continuous(), synth_rate, synth_n);
      if (synth_lo > 0.0) trace = upconvert_ssb(trace, synth_lo);
      fs::create_directories(common.out);
      const auto path = fs::path(common.out) / synth_file;
      write_trace_file(path, trace);
      std::cout << "wrote " << path.string() << "\n";
    } else if (*xt) {
      const auto chip = load_chip_config(common.config);
      const auto plan = chip_plan(chip, or_all(xt_devices, chip));
      const auto entries = measure_crosstalk(chip.devices, plan, toggled, chip.chain);
      const double kappa = find_device(chip.devices, toggled).resonator.kappa_rad_s;
      double toggled_hz = 0.0;
      for (const auto& ch : plan.channels)
        if (ch.device_id == toggled) toggled_hz = ch.frequency_hz;
      SweepResult r;
      r.meta = {"crosstalk", common.seed, chip.config_hash, utc_timestamp(), {}};
      r.meta.notes.push_back({"toggled_device", std::to_string(toggled)});
      r.columns = {"device", "channel_hz", "crosstalk_db", "change_ratio_db", "analytic_db"};
      for (const auto& e : entries) {
        const double spacing = to_angular(std::abs(e.channel_hz - toggled_hz));
        r.add_row({static_cast<double>(e.device_id), e.channel_hz, e.crosstalk_db,
                   e.change_ratio_db, adjacent_crosstalk_db(spacing, kappa)});
      }
      emit(r, "crosstalk", common);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasiblePlan& e) {
    std::cerr << "infeasible plan: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
