// Acceptance suite: prints one PASS/FAIL line per criterion, exits non-zero on any failure.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "fdmq/capacity.hpp"
#include "fdmq/chip_config.hpp"
#include "fdmq/dsp_rx.hpp"
#include "fdmq/dsp_tx.hpp"
#include "fdmq/experiments.hpp"
#include "fdmq/format.hpp"
#include "fdmq/qubit_dynamics.hpp"
#include "fdmq/units.hpp"

using namespace fdmq;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Check = std::function<void(Outcome&)>;

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

ChipConfig chip7() { return load_chip_config(FDMQ_SOURCE_DIR "/configs/chip7.cfg"); }

DeviceRecord weak_device(int id, double fr, double gap) {
  DeviceRecord d;
  d.id = id;
  d.qubit = {gap, 1.8e12, 0.0, to_angular(0.1e6)};
  d.resonator = {fr, to_angular(10e6), to_angular(0.5e6), 31.6227766e6};
  return d;
}

void ac1(Outcome& o) {
  const double k = to_angular(10e6);
  const double a15 = adjacent_crosstalk_db(1.5 * k, k);
  const double a5 = adjacent_crosstalk_db(5.0 * k, k);
  o.require(std::abs(a15 + 10.0) <= 0.1, "1.5 kappa anchor");
  o.require(std::abs(a5 + 20.0) <= 0.1, "5 kappa anchor");
  o.detail << "analytic " << fmt(a15) << " dB @1.5k, " << fmt(a5) << " dB @5k;";

  ChainConfig cfg;
  cfg.ideal_adc = true;
  double worst = 0.0;
  for (double mult : {1.5, 5.0}) {
    const std::vector<DeviceRecord> chip{weak_device(1, 10e9, 8e9),
                                         weak_device(2, 10e9 + mult * 10e6, 8e9 + mult * 10e6)};
    const std::vector<int> ids{1, 2};
    const auto xt = measure_crosstalk(chip, plan_from_chip(chip, ids), 1, cfg);
    const double want = adjacent_crosstalk_db(mult * k, k);
    worst = std::max(worst, std::abs(xt[0].crosstalk_db - want));
    o.detail << " end-to-end " << fmt(xt[0].crosstalk_db) << " dB @" << mult << "k;";
  }
  o.require(worst <= 1.5, "end-to-end within 1.5 dB");
}

void ac2(Outcome& o) {
  const double k = to_angular(10e6);
  const auto strict = max_channels({1e9, k, 0.0, 0.0, -20.0});
  const auto loose = max_channels({1e9, k, 0.0, 0.0, -10.0});
  o.require(strict.count == 20, "20 channels at -20 dB");
  o.require(loose.count >= 54 && loose.count <= 66, "-10 dB count in [54, 66]");
  o.detail << strict.count << " channels/GHz at -20 dB, " << loose.count
           << " at -10 dB (spacing " << fmt(to_hz(loose.spacing_rad_s) / 1e6) << " MHz)"
           << "; floor(1 GHz / 1.5 kappa) + 1 = 66, a round 60 per GHz corresponds to about"
              " 1.7 kappa spacing";
}

void ac3(Outcome& o) {
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const double s = to_angular(0.37e6 * i), g = to_angular(0.013e6 * j);
      const double want = 2.0 * (s + 2.0 * g);
      const double got = carson_bandwidth(s, g);
      if (want != 0.0) worst = std::max(worst, std::abs(got - want) / want);
      else worst = std::max(worst, std::abs(got));
    }
  }
  o.require(worst <= 4 * std::numeric_limits<double>::epsilon(), "Carson formula to machine precision");
  const auto spec = relaxation_telegraph_spectrum(to_angular(0.1e6), to_angular(2.5e6), 20e-6, 10000, 2024);
  o.require(spec.in_band_fraction >= 0.90, "in-band power >= 90%");
  o.detail << "Carson max rel err " << fmt(worst, 3) << "; in-band power "
           << fmt(100 * spec.in_band_fraction) << "% over 10^4 trajectories";
}

void ac4(Outcome& o) {
  const auto chip = chip7();
  const auto z = std::vector<double>(chip.devices.size(), -1.0);
  std::vector<double> flux;
  for (const auto& d : chip.devices) flux.push_back(d.qubit.symmetry_flux);
  std::vector<double> f, mag;
  for (double x = 9.25e9; x <= 10.35e9; x += 10e3) {
    f.push_back(x);
    mag.push_back(std::abs(s21_feedline(chip.devices, to_angular(x), z, flux)));
  }
  std::vector<double> minima;
  for (std::size_t i = 1; i + 1 < mag.size(); ++i)
    if (mag[i] < mag[i - 1] && mag[i] <= mag[i + 1]) minima.push_back(f[i]);
  o.require(minima.size() == 7, "exactly seven minima");
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(7, minima.size()); ++i)
    worst = std::max(worst, std::abs(minima[i] - chip.devices[i].resonator.frequency_hz));
  o.require(minima.size() == 7 && worst <= 0.5e6, "minima within 0.5 MHz of configured");
  o.detail << minima.size() << " minima, worst offset " << fmt(worst / 1e3) << " kHz";
}

void ac5(Outcome& o) {
  const auto chip = chip7();
  const std::vector<int> ids{1, 2, 3, 4, 5, 6};
  const auto plan = plan_from_chip(chip.devices, ids);
  const FluxSweepSpec spec{{-0.008, 0.008, 500}, {}};
  const auto r = run_flux_sweep(chip, plan, spec, 11);
  int good = 0;
  for (int id : ids) {
    const auto t = r.filter("device", id);
    const auto feats = find_flux_features(t.column("flux"), t.column("amplitude"));
    const auto want = crossing_fluxes(find_device(chip.devices, id).qubit,
                                      find_device(chip.devices, id).resonator.frequency_hz);
    bool ok = feats.size() == 2 && want.size() == 2;
    if (ok)
      for (int k = 0; k < 2; ++k) ok = ok && std::abs(feats[k].flux - want[k]) <= spec.flux.step();
    good += ok;
  }
  o.require(good == 6, "two features per device at the crossings");

  // multiplex equivalence, noise-free
  auto ideal = chip;
  ideal.chain.ideal_adc = true;
  ideal.chain.noise_std = 0.0;
  const auto composite = run_flux_sweep(ideal, plan, spec, 11);
  ReadoutChain ref(ideal.devices, plan, ideal.chain);
  ideal.chain.lo_hz = ref.lo_hz();
  double worst = 0.0;
  for (int id : ids) {
    const std::vector<int> one{id};
    const auto single = run_flux_sweep(ideal, plan_from_chip(ideal.devices, one), spec, 11);
    const auto c = composite.filter("device", id);
    const auto ca = c.column("amplitude"), cp = c.column("phase_rad");
    const auto sa = single.column("amplitude"), sp = single.column("phase_rad");
    for (std::size_t i = 0; i < ca.size(); ++i) {
      const auto a = std::polar(ca[i], cp[i]), b = std::polar(sa[i], sp[i]);
      worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
  }
  o.require(worst <= 1e-9, "multiplex equivalence 1e-9");
  o.detail << good << "/6 devices with two features within one flux step; multiplex max rel diff "
           << fmt(worst, 3);
}

void ac6(Outcome& o) {
  const auto chip = chip7();
  const std::vector<int> ids{2, 3, 5};
  RabiSpec spec;
  spec.device_ids = ids;
  for (int i = 0; i < 201; ++i) spec.durations_s.push_back(i * 15e-9);
  for (int k = 1; k <= 5; ++k) spec.amplitudes.push_back({0.025 * k, 0.04 * k, 0.055 * k});
  const auto run = run_rabi(chip, plan_from_chip(chip.devices, ids), spec, 8);
  int valid = 0;
  for (const auto& f : run.fits) valid += f.fit.valid;
  o.require(run.fits.size() == 15 && valid == 15, "three valid traces per amplitude set");
  double worst_r2 = 1.0;
  for (const auto& [id, line] : run.linearity) worst_r2 = std::min(worst_r2, line.r_squared);
  o.require(run.linearity.size() == 3 && worst_r2 > 0.999, "R^2 > 0.999");

  // noise-free resonant population vs sin^2(pi f t)
  const DriveSpec d{chip.rabi_rate_per_amplitude_hz, 0.1, 0.0, 0.0};
  const double f = rabi_frequency(d);
  BlochState s = BlochState::ground();
  double worst = 0.0;
  const double dt = 0.5e-9;
  for (int k = 1; k <= 4000; ++k) {
    s = evolve(s, d, 0.0, 0.0, dt);
    worst = std::max(worst, std::abs(s.excited_population() - std::pow(std::sin(M_PI * f * k * dt), 2)));
  }
  o.require(worst < 1e-6, "sin^2 match 1e-6");
  o.detail << valid << "/15 fits valid; min R^2 " << fmt(worst_r2, 8) << "; sin^2 max err " << fmt(worst, 3);
}

void ac7(Outcome& o) {
  const double fs = 1e9;
  // orthogonality
  const std::size_t n = 4000;
  std::vector<ToneSpec> tones;
  std::vector<double> ch;
  for (int k = 0; k < 6; ++k) {
    tones.push_back({(-375 + 150.0 * k) * 1e6, 0.15, 0.4 * k});
    ch.push_back(tones.back().frequency_hz);
  }
  const auto x = synthesize_multitone(tones, PulseEnvelope::continuous(), fs, n);
  const auto m = channelize(x, ch, Window::rectangular);
  double orth = 0.0;
  for (int k = 0; k < 6; ++k)
    orth = std::max(orth, std::abs(m[k].value() - std::polar(0.15, std::remainder(0.4 * k, 2 * M_PI))));
  o.require(orth < 1e-12, "orthogonality");

  // SSB round trip
  const auto back = downconvert(upconvert_ssb(x, 9.75e9), 9.75e9, 0.0);
  double rt = 0.0;
  for (std::size_t i = 0; i < n; ++i) rt = std::max(rt, std::abs(back.samples[i] - x.samples[i]));
  o.require(rt == 0.0, "SSB round trip");

  // Parseval via the channelizer on every bin
  const std::size_t np = 512;
  const std::vector<ToneSpec> odd{{12.3456e6, 0.4, 0.1}, {-200.1e6, 0.3, 2.0}};
  const auto y = synthesize_multitone(odd, PulseEnvelope{}, fs, np);
  std::vector<double> bins;
  for (std::size_t k = 0; k < np; ++k) bins.push_back((static_cast<double>(k) - np / 2.0) * fs / np);
  bins.front() = -0.5 * fs;
  double spec_energy = 0.0;
  for (const auto& b : channelize(y, bins, Window::rectangular)) spec_energy += b.amplitude * b.amplitude;
  const double pars = std::abs(spec_energy * np - y.energy()) / y.energy();
  o.require(pars < 1e-12, "Parseval");

  // ADC SNR
  double worst_snr = 0.0;
  for (int bits : {8, 12, 16}) {
    const std::size_t na = 65536;
    const double f = 4099.0 * fs / na;
    const std::vector<ToneSpec> t{{f, 1.0, 0.1}};
    AdcSpec adc;
    adc.bits = bits;
    const auto q = adc_quantize(synthesize_multitone(t, PulseEnvelope::continuous(), fs, na), adc, 0.0, 1);
    const auto mm = channelize(q.trace, std::vector<double>{f}, Window::rectangular);
    double total = 0.0;
    for (auto s : q.trace.samples) total += std::norm(s);
    const double noise = total / na - std::norm(mm[0].value());
    const double snr = 10 * std::log10(std::norm(mm[0].value()) / noise);
    worst_snr = std::max(worst_snr, std::abs(snr - (6.02 * bits + 1.76)));
  }
  o.require(worst_snr <= 0.5, "ADC SNR within 0.5 dB");
  o.detail << "orthogonality err " << fmt(orth, 3) << "; SSB round trip err " << rt << "; Parseval rel err "
           << fmt(pars, 3) << "; worst ADC SNR deviation " << fmt(worst_snr, 3) << " dB";
}

void ac8(Outcome& o) {
  const auto chip = chip7();
  const std::vector<int> ids{2, 3, 5};
  const auto plan = plan_from_chip(chip.devices, ids);
  auto twice = [&](const std::function<SweepResult()>& run) { return csv_body(run()) == csv_body(run()); };
  const bool sweep = twice([&] { return run_flux_sweep(chip, plan, {{-0.006, 0.006, 41}, {}}, 77); });
  const bool spec = twice([&] {
    return run_spectroscopy(chip, plan, {{4.4e9, 5.4e9, 101}, {-3e-4, 3e-4, 3}, 0.1}, 77);
  });
  RabiSpec rs;
  rs.device_ids = ids;
  for (int i = 0; i < 61; ++i) rs.durations_s.push_back(i * 25e-9);
  rs.amplitudes = {{0.05, 0.08, 0.11}};
  const bool rabi = twice([&] { return run_rabi(chip, plan, rs, 77).trace; });
  o.require(sweep && spec && rabi, "byte-identical bodies");
  o.detail << "flux sweep " << (sweep ? "identical" : "differs") << ", spectroscopy "
           << (spec ? "identical" : "differs") << ", rabi " << (rabi ? "identical" : "differs");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    Check run;
  };
  const Criterion criteria[] = {
      {1, "crosstalk anchors", 10.0, ac1},
      {2, "capacity anchors", 1.0, ac2},
      {3, "Carson bandwidth", 60.0, ac3},
      {4, "seven-resonator spectrum", 5.0, ac4},
      {5, "six-channel FDM sweep", 120.0, ac5},
      {6, "Rabi physics", 120.0, ac6},
      {7, "DSP properties", 30.0, ac7},
      {8, "determinism", 120.0, ac8},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail << " [over time budget " << c.budget_s << " s]";
    }
    failures += !o.pass;
    std::cout << "AC" << c.id << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << c.name << " ("
              << fmt(secs, 3) << " s): " << o.detail.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
