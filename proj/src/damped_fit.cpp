#include "fdmq/damped_fit.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fdmq/errors.hpp"
#include "fdmq/units.hpp"

namespace fdmq {

double RabiFit::evaluate(double t) const {
  return offset + amplitude * std::exp(-decay_rate * t) * std::cos(kTwoPi * frequency_hz * t + phase_rad);
}

namespace {

constexpr int kMinPoints = 8;
constexpr int kMaxEvaluations = 2000;

// parameters: offset, amplitude, decay, frequency, phase
struct DampedCosine : Eigen::DenseFunctor<double> {
  std::span<const double> t;
  std::span<const double> y;
  double t0;

  DampedCosine(std::span<const double> t_, std::span<const double> y_, double t0_)
      : Eigen::DenseFunctor<double>(5, static_cast<int>(t_.size())), t(t_), y(y_), t0(t0_) {}

  int operator()(const InputType& p, ValueType& r) const {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double s = t[i] - t0;
      r[static_cast<Eigen::Index>(i)] =
          p[0] + p[1] * std::exp(-p[2] * s) * std::cos(kTwoPi * p[3] * s + p[4]) - y[i];
    }
    return 0;
  }

  int df(const InputType& p, JacobianType& j) const {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const double s = t[i] - t0;
      const double e = std::exp(-p[2] * s);
      const double arg = kTwoPi * p[3] * s + p[4];
      const double c = std::cos(arg);
      const double sn = std::sin(arg);
      j(row, 0) = 1.0;
      j(row, 1) = e * c;
      j(row, 2) = -s * p[1] * e * c;
      j(row, 3) = -kTwoPi * s * p[1] * e * sn;
      j(row, 4) = -p[1] * e * sn;
    }
    return 0;
  }
};

double rms_about(std::span<const double> y, double center) {
  double acc = 0.0;
  for (double v : y) acc += (v - center) * (v - center);
  return std::sqrt(acc / static_cast<double>(y.size()));
}

}  // namespace

constexpr double kMinAmplitudeSnr = 6.0;

RabiFit fit_damped_sinusoid(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw LengthMismatch("fit: time and value lengths differ");
  RabiFit fit;
  const auto n = y.size();
  double mean = 0.0;
  for (double v : y) mean += v;
  mean = n ? mean / static_cast<double>(n) : 0.0;
  fit.offset = mean;
  if (n < static_cast<std::size_t>(kMinPoints)) {
    fit.residual_rms = n ? rms_about(y, mean) : 0.0;
    fit.diagnostic = "fewer than 8 points";
    return fit;
  }
  fit.residual_rms = rms_about(y, mean);
  if (fit.residual_rms <= 1e-12 * (1.0 + std::abs(mean))) {
    fit.diagnostic = "constant trace (zero oscillation amplitude)";
    return fit;
  }

  const double t0 = t.front();
  const double span = t.back() - t0;
  const double dt = span / static_cast<double>(n - 1);

  // dominant DFT bin of the mean-removed trace; strict '>' keeps the lower bin on ties
  std::size_t best_bin = 0;
  double best_power = -1.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    std::complex<double> acc{};
    for (std::size_t i = 0; i < n; ++i) {
      const double a = -kTwoPi * static_cast<double>(k) * static_cast<double>(i) / static_cast<double>(n);
      acc += (y[i] - mean) * std::polar(1.0, a);
    }
    if (std::norm(acc) > best_power * (1.0 + 1e-12)) {
      best_power = std::norm(acc);
      best_bin = k;
    }
  }
  const double f0 = static_cast<double>(best_bin) / (static_cast<double>(n) * dt);

  // linear fit offset + a cos + b sin at f0
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), 3);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double arg = kTwoPi * f0 * (t[i] - t0);
    design(row, 0) = 1.0;
    design(row, 1) = std::cos(arg);
    design(row, 2) = std::sin(arg);
    rhs(row) = y[i];
  }
  const Eigen::Vector3d lin = design.colPivHouseholderQr().solve(rhs);

  Eigen::VectorXd p(5);
  p << lin(0), std::hypot(lin(1), lin(2)), 0.0, f0, std::atan2(-lin(2), lin(1));

  DampedCosine functor(t, y, t0);
  Eigen::LevenbergMarquardt<DampedCosine> lm(functor);
  lm.setMaxfev(kMaxEvaluations);
  lm.setXtol(1e-12);
  lm.setFtol(1e-14);
  const auto status = lm.minimize(p);

  // canonical form: f >= 0, amplitude >= 0
  if (p[3] < 0.0) {
    p[3] = -p[3];
    p[4] = -p[4];
  }
  if (p[1] < 0.0) {
    p[1] = -p[1];
    p[4] += std::numbers::pi;
  }
  const double phase_t0 = p[4] - kTwoPi * p[3] * t0;
  fit.offset = p[0];
  fit.amplitude = p[1] * std::exp(p[2] * t0);
  fit.decay_rate = p[2];
  fit.frequency_hz = p[3];
  fit.phase_rad = std::remainder(phase_t0, kTwoPi);

  Eigen::VectorXd r(static_cast<Eigen::Index>(n));
  functor(p, r);
  fit.residual_rms = std::sqrt(r.squaredNorm() / static_cast<double>(n));

  const bool converged = status == Eigen::LevenbergMarquardtSpace::RelativeReductionTooSmall ||
                         status == Eigen::LevenbergMarquardtSpace::RelativeErrorTooSmall ||
                         status == Eigen::LevenbergMarquardtSpace::RelativeErrorAndReductionTooSmall ||
                         status == Eigen::LevenbergMarquardtSpace::CosinusTooSmall ||
                         status == Eigen::LevenbergMarquardtSpace::FtolTooSmall ||
                         status == Eigen::LevenbergMarquardtSpace::XtolTooSmall ||
                         status == Eigen::LevenbergMarquardtSpace::GtolTooSmall;
  if (!converged || !std::isfinite(fit.frequency_hz)) {
    fit.diagnostic = "no convergence (status " + std::to_string(static_cast<int>(status)) + ")";
    return fit;
  }
  // a pure-noise trace still yields a best sinusoid of amplitude ~ rms * sqrt(4 ln n / n)
  if (fit.amplitude * std::sqrt(0.5 * static_cast<double>(n)) < kMinAmplitudeSnr * fit.residual_rms) {
    fit.diagnostic = "oscillation not resolved above the noise (zero oscillation amplitude)";
    return fit;
  }
  if (fit.frequency_hz * span < 1.0) {
    fit.diagnostic = "trace spans less than one oscillation period";
    return fit;
  }
  fit.valid = true;
  return fit;
}

}  // namespace fdmq
