#include <doctest.h>

#include <random>

#include "fdmq/device_model.hpp"
#include "fdmq/errors.hpp"
#include "fdmq/units.hpp"
#include "oracles.hpp"

using namespace fdmq;

namespace {

DeviceRecord device(int id, double fr, double gap, double sym, double g_hz) {
  DeviceRecord d;
  d.id = id;
  d.qubit = {gap, 1.8e12, sym, to_angular(0.1e6)};
  d.resonator = {fr, to_angular(10e6), to_angular(8e6), g_hz};
  return d;
}

}  // namespace

TEST_SUITE("device_model") {
  TEST_CASE("qubit frequency: symmetry point, 3-4-5 and evenness") {
    QubitParams q{4e9, 1e12, 0.01, 0.0};
    CHECK(qubit_frequency(q, 0.01) == doctest::Approx(4e9).epsilon(1e-15));
    CHECK(qubit_frequency(q, 0.01 + 3e9 / 1e12) == doctest::Approx(5e9).epsilon(1e-12));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (int i = 0; i < 200; ++i) {
      const double d = u(rng);
      const double f = qubit_frequency(q, 0.01 + d);
      CHECK(f == doctest::Approx(qubit_frequency(q, 0.01 - d)).epsilon(1e-14));
      CHECK(f >= q.gap_hz);
    }
  }

  TEST_CASE("dispersive shift arithmetic and antisymmetry") {
    ResonatorParams r{10e9, to_angular(10e6), to_angular(10e6), 50e6};
    const double wq = to_angular(11e9);
    const double up = dispersive_shift(r, wq, QubitState::excited);
    CHECK(up == doctest::Approx(to_angular(2.5e6)).epsilon(1e-12));
    CHECK(dispersive_shift(r, wq, QubitState::ground) == -up);
    // detuning sign flips the shift
    CHECK(dispersive_shift(r, to_angular(9e9), QubitState::excited) < 0.0);
  }

  TEST_CASE("degenerate detuning is rejected by the raw dispersive formula") {
    ResonatorParams r{10e9, to_angular(10e6), to_angular(10e6), 50e6};
    CHECK_THROWS_AS(dispersive_shift(r, to_angular(10e9 + 1e3), QubitState::ground),
                    DegenerateDetuning);
    CHECK_NOTHROW(resonator_shift(r, to_angular(10e9), -1.0));
  }

  TEST_CASE("exact shift matches the 2x2 eigenvalue oracle") {
    ResonatorParams r{10e9, to_angular(10e6), to_angular(10e6), 40e6};
    for (double det_hz : {-2e9, -300e6, -60e6, -1e6, 1e6, 80e6, 500e6, 3e9}) {
      const double wq = to_angular(10e9 + det_hz);
      const double want = oracle::jc_ground_shift(to_angular(10e9), wq, to_angular(40e6));
      CHECK(exact_resonator_shift(r, wq, -1.0) == doctest::Approx(want).epsilon(1e-9));
    }
  }

  TEST_CASE("dispersive vs exact: 1% at g/detuning = 0.05, perturbation bound on a grid") {
    const double g_hz = 50e6;
    ResonatorParams r{10e9, to_angular(10e6), to_angular(10e6), g_hz};
    const double wq = to_angular(10e9 + g_hz / 0.05);
    const double exact = oracle::jc_ground_shift(to_angular(10e9), wq, to_angular(g_hz));
    const double disp = dispersive_shift(r, wq, QubitState::ground);
    CHECK(std::abs(disp - exact) / std::abs(exact) < 0.01);

    for (double ratio = 0.005; ratio < 0.1; ratio += 0.005) {
      for (double sign : {-1.0, 1.0}) {
        const double wq2 = to_angular(10e9 + sign * g_hz / ratio);
        const double ex = oracle::jc_ground_shift(to_angular(10e9), wq2, to_angular(g_hz));
        const double ds = dispersive_shift(r, wq2, QubitState::ground);
        CHECK(std::abs(ds - ex) / std::abs(ex) < 3.0 * ratio * ratio);
      }
    }
  }

  TEST_CASE("zero coupling gives zero shift everywhere") {
    ResonatorParams r{10e9, to_angular(10e6), to_angular(10e6), 0.0};
    CHECK(resonator_shift(r, to_angular(10e9), 1.0) == 0.0);
    CHECK(resonator_shift(r, to_angular(7e9), -1.0) == 0.0);
  }

  TEST_CASE("notch transmission: full dip, half-width point, asymptote") {
    ResonatorParams r{10e9, to_angular(10e6), to_angular(10e6), 0.0};
    const double wr = to_angular(10e9);
    CHECK(std::abs(s21_single(r, wr, 0.0)) < 1e-15);
    CHECK(std::abs(s21_single(r, wr + r.kappa_rad_s / 2, 0.0)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(s21_single(r, wr + 101 * r.kappa_rad_s, 0.0)) > 0.999);
  }

  TEST_CASE("passivity of single and composite transmission") {
    std::vector<DeviceRecord> chip;
    for (int i = 0; i < 7; ++i) chip.push_back(device(i + 1, 9.3e9 + 150e6 * i, 5e9, 0.0, 30e6));
    const std::vector<double> z(7, -1.0), flux(7, 0.0);
    for (double f = 9.2e9; f < 10.4e9; f += 0.37e6) {
      CHECK(std::abs(s21_single(chip[0].resonator, to_angular(f), 0.0)) <= 1.0 + 1e-15);
      CHECK(std::abs(s21_feedline(chip, to_angular(f), z, flux)) <= 1.0 + 1e-15);
    }
  }

  TEST_CASE("feedline composition") {
    const std::vector<DeviceRecord> none;
    CHECK(s21_feedline(none, to_angular(9.9e9), std::vector<double>{}, std::vector<double>{}) ==
          std::complex<double>(1.0, 0.0));

    const auto d = device(3, 9.6e9, 4.5e9, 0.0, 30e6);
    const std::vector<DeviceRecord> one{d};
    const double wq = to_angular(qubit_frequency(d.qubit, 0.0));
    const double shift = dispersive_shift(d.resonator, wq, QubitState::ground);
    const std::vector<QubitState> st{QubitState::ground};
    const std::vector<double> flux{0.0};
    for (double f : {9.59e9, 9.6e9, 9.605e9}) {
      const auto a = s21_feedline(one, to_angular(f), st, flux);
      const auto b = s21_single(d.resonator, to_angular(f), shift);
      CHECK(std::abs(a - b) < 1e-12);
    }
  }

  TEST_CASE("feedline length mismatch") {
    const std::vector<DeviceRecord> one{device(1, 9.3e9, 5e9, 0.0, 30e6)};
    CHECK_THROWS_AS(s21_feedline(one, 1.0, std::vector<double>{-1.0, -1.0}, std::vector<double>{0.0}),
                    LengthMismatch);
  }

  TEST_CASE("zero coupling makes the feedline flux independent") {
    std::vector<DeviceRecord> chip;
    for (int i = 0; i < 3; ++i) chip.push_back(device(i + 1, 9.3e9 + 150e6 * i, 5e9, 0.0, 0.0));
    const std::vector<double> z(3, -1.0);
    for (double f = 9.25e9; f < 9.7e9; f += 3.3e6) {
      const auto a = s21_feedline(chip, to_angular(f), z, std::vector<double>{0.0, 0.0, 0.0});
      const auto b = s21_feedline(chip, to_angular(f), z, std::vector<double>{0.004, -0.01, 0.02});
      CHECK(a == b);
    }
  }

  TEST_CASE("seven resonators give seven dips") {
    std::vector<DeviceRecord> chip;
    for (int i = 0; i < 7; ++i) chip.push_back(device(i + 1, 9.3e9 + 150e6 * i, 5e9, 0.0, 30e6));
    const std::vector<double> z(7, -1.0), flux(7, 0.0);
    std::vector<double> mag;
    for (double f = 9.25e9; f <= 10.35e9; f += 50e3) mag.push_back(std::abs(s21_feedline(chip, to_angular(f), z, flux)));
    int minima = 0;
    for (std::size_t i = 1; i + 1 < mag.size(); ++i) minima += mag[i] < mag[i - 1] && mag[i] < mag[i + 1];
    CHECK(minima == 7);
  }

  TEST_CASE("validation and lookup") {
    auto d = device(1, 9.3e9, 5e9, 0.0, 30e6);
    CHECK_NOTHROW(d.validate());
    d.resonator.kappa_ext_rad_s = 2 * d.resonator.kappa_rad_s;
    CHECK_THROWS_AS(d.validate(), InvalidParameter);
    const std::vector<DeviceRecord> chip{device(4, 9.3e9, 5e9, 0.0, 30e6)};
    CHECK(find_device(chip, 4).id == 4);
    CHECK_THROWS_AS(find_device(chip, 5), UnknownDevice);
    CHECK(flipped(QubitState::ground) == QubitState::excited);
    CHECK(sigma_z(QubitState::ground) == -1.0);
  }
}
