#include "fdmq/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "fdmq/errors.hpp"
#include "fdmq/format.hpp"
#include "fdmq/units.hpp"

namespace fdmq {

std::string to_string(SpacingRule rule) {
  return rule == SpacingRule::fixed_spacing ? "fixed_spacing" : "kappa_multiple";
}

SpacingRule parse_spacing_rule(const std::string& text) {
  if (text == "fixed_spacing") return SpacingRule::fixed_spacing;
  if (text == "kappa_multiple") return SpacingRule::kappa_multiple;
  throw ConfigError("unknown spacing rule '" + text + "'");
}

void FrequencyPlan::validate() const {
  if (!(band_stop_hz >= band_start_hz)) throw InvalidParameter("plan band is inverted");
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const double f = channels[i].frequency_hz;
    if (f < band_start_hz || f > band_stop_hz)
      throw InvalidParameter("plan channel " + std::to_string(i) + " lies outside the band");
    if (i > 0 && !(f > channels[i - 1].frequency_hz))
      throw InvalidParameter("plan channels must be strictly increasing");
  }
}

std::vector<double> FrequencyPlan::frequencies_hz() const {
  std::vector<double> f;
  f.reserve(channels.size());
  for (const auto& c : channels) f.push_back(c.frequency_hz);
  return f;
}

void CapacityQuery::validate() const {
  if (!(bandwidth_hz > 0.0)) throw InvalidParameter("bandwidth must be positive");
  if (!(kappa_rad_s > 0.0)) throw InvalidParameter("kappa must be positive");
  if (gamma_rad_s < 0.0 || dispersive_shift_rad_s < 0.0)
    throw InvalidParameter("gamma and dispersive shift must be >= 0");
  if (!(crosstalk_limit_db < 0.0)) throw InvalidParameter("crosstalk limit must be negative");
}

double carson_bandwidth(double shift_rad_s, double gamma_rad_s) {
  return 2.0 * (shift_rad_s + 2.0 * gamma_rad_s);
}

double adjacent_crosstalk_db(double spacing_rad_s, double kappa_rad_s) {
  const double half = 0.5 * kappa_rad_s;
  return 20.0 * std::log10(half / std::hypot(spacing_rad_s, half));
}

double crosstalk_limited_spacing(double kappa_rad_s, double limit_db) {
  if (!(limit_db < 0.0)) throw InvalidParameter("crosstalk limit must be negative");
  // invert the tail: s = (k/2) sqrt(10^(-L/10) - 1)
  const double exact = 0.5 * kappa_rad_s * std::sqrt(std::pow(10.0, -limit_db / 10.0) - 1.0);
  const double step = kKappaStepFraction * kappa_rad_s;
  const double steps = std::ceil(exact / step - 1e-9);
  return std::max(steps, 1.0) * step;
}

CapacityResult max_channels(const CapacityQuery& q) {
  q.validate();
  CapacityResult r;
  r.crosstalk_spacing_rad_s = crosstalk_limited_spacing(q.kappa_rad_s, q.crosstalk_limit_db);
  r.carson_spacing_rad_s = carson_bandwidth(q.dispersive_shift_rad_s, q.gamma_rad_s);
  r.carson_limited = r.carson_spacing_rad_s > r.crosstalk_spacing_rad_s;
  r.spacing_rad_s = std::max(r.crosstalk_spacing_rad_s, r.carson_spacing_rad_s);
  const double band_rad_s = to_angular(q.bandwidth_hz);
  if (r.spacing_rad_s > band_rad_s * (1.0 + 1e-12)) {
    throw InfeasiblePlan("required spacing " + format_double(to_hz(r.spacing_rad_s)) +
                         " Hz exceeds bandwidth " + format_double(q.bandwidth_hz) + " Hz");
  }
  r.count = static_cast<std::size_t>(std::floor(band_rad_s / r.spacing_rad_s + 1e-9));
  return r;
}

double snr_proxy(double kappa_ext_rad_s, double kappa_rad_s, double integration_time_s) {
  return kappa_ext_rad_s / kappa_rad_s * std::sqrt(integration_time_s * kappa_rad_s);
}

FrequencyPlan generate_plan(const PlanRequest& req) {
  if (req.n == 0) throw InvalidParameter("plan needs at least one channel");
  if (!(req.band_stop_hz > req.band_start_hz)) throw InvalidParameter("band_stop must exceed band_start");

  FrequencyPlan plan;
  plan.band_start_hz = req.band_start_hz;
  plan.band_stop_hz = req.band_stop_hz;
  plan.spacing_rule = req.rule;
  const double span = req.band_stop_hz - req.band_start_hz;
  const double center = 0.5 * (req.band_start_hz + req.band_stop_hz);

  if (req.n == 1) {
    plan.channels.push_back({1, center});
    plan.guard_hz = 0.5 * span;
    return plan;
  }

  double pitch = span / static_cast<double>(req.n - 1);
  if (req.rule == SpacingRule::kappa_multiple) {
    if (!(req.kappa_rad_s > 0.0)) throw InvalidParameter("kappa_multiple plans need kappa");
    const double step_hz = to_hz(kKappaStepFraction * req.kappa_rad_s);
    pitch = std::floor(pitch / step_hz + 1e-9) * step_hz;
  }

  double required_hz = to_hz(req.carson_rad_s);
  if (req.kappa_rad_s > 0.0)
    required_hz = std::max(required_hz,
                           to_hz(crosstalk_limited_spacing(req.kappa_rad_s, req.crosstalk_limit_db)));
  if (!(pitch > 0.0) || pitch < required_hz * (1.0 - 1e-12)) {
    throw InfeasiblePlan(std::to_string(req.n) + " channels need pitch " + format_double(required_hz) +
                         " Hz but the band allows " + format_double(pitch) + " Hz");
  }

  const double first = req.rule == SpacingRule::fixed_spacing
                           ? req.band_start_hz
                           : center - 0.5 * pitch * static_cast<double>(req.n - 1);
  for (std::size_t i = 0; i < req.n; ++i)
    plan.channels.push_back({static_cast<int>(i + 1), first + pitch * static_cast<double>(i)});
  // fixed_spacing lands exactly on the band edges
  if (req.rule == SpacingRule::fixed_spacing) plan.channels.back().frequency_hz = req.band_stop_hz;
  plan.guard_hz = std::min(plan.channels.front().frequency_hz - req.band_start_hz,
                           req.band_stop_hz - plan.channels.back().frequency_hz);
  plan.validate();
  return plan;
}

PlanAudit audit_plan(const FrequencyPlan& plan, double kappa_rad_s, double crosstalk_limit_db,
                     double carson_rad_s) {
  PlanAudit audit;
  const auto& ch = plan.channels;
  for (std::size_t i = 0; i + 1 < ch.size(); ++i) {
    AdjacentAudit a;
    a.lower_device = ch[i].device_id;
    a.upper_device = ch[i + 1].device_id;
    a.spacing_hz = ch[i + 1].frequency_hz - ch[i].frequency_hz;
    a.crosstalk_db = adjacent_crosstalk_db(to_angular(a.spacing_hz), kappa_rad_s);
    a.passes = a.crosstalk_db <= crosstalk_limit_db + 1e-9;
    audit.passes = audit.passes && a.passes;
    audit.pairs.push_back(a);
  }
  const double carson_hz = to_hz(carson_rad_s);
  for (std::size_t i = 0; i < ch.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    if (i > 0) nearest = std::min(nearest, ch[i].frequency_hz - ch[i - 1].frequency_hz);
    if (i + 1 < ch.size()) nearest = std::min(nearest, ch[i + 1].frequency_hz - ch[i].frequency_hz);
    ChannelAudit c{ch[i].device_id, ch[i].frequency_hz, nearest - carson_hz};
    if (std::isfinite(c.carson_margin_hz) && c.carson_margin_hz < 0.0) audit.passes = false;
    audit.channels.push_back(c);
  }
  return audit;
}

bool fits_acquisition(const FrequencyPlan& plan, double analog_bandwidth_hz, bool both_sidebands) {
  if (plan.channels.empty()) return true;
  const double span = plan.channels.back().frequency_hz - plan.channels.front().frequency_hz;
  return span <= (both_sidebands ? 2.0 : 1.0) * analog_bandwidth_hz;
}

void write_plan_document(std::ostream& out, const FrequencyPlan& plan, const PlanAudit& audit) {
  out << "# fdmq frequency plan\n";
  out << "band_start_hz " << format_double(plan.band_start_hz) << '\n';
  out << "band_stop_hz " << format_double(plan.band_stop_hz) << '\n';
  out << "spacing_rule " << to_string(plan.spacing_rule) << '\n';
  out << "guard_hz " << format_double(plan.guard_hz) << '\n';
  out << "channels " << plan.channels.size() << '\n';
  out << "\n[channels]\n# device frequency_hz carson_margin_hz\n";
  for (const auto& c : audit.channels) {
    out << c.device_id << ' ' << format_double(c.frequency_hz) << ' '
        << (std::isfinite(c.carson_margin_hz) ? format_double(c.carson_margin_hz) : "inf") << '\n';
  }
  out << "\n[adjacent]\n# lower upper spacing_hz crosstalk_db pass\n";
  for (const auto& a : audit.pairs) {
    out << a.lower_device << ' ' << a.upper_device << ' ' << format_double(a.spacing_hz) << ' '
        << format_double(a.crosstalk_db) << ' ' << (a.passes ? "yes" : "no") << '\n';
  }
  out << "\naudit " << (audit.passes ? "pass" : "fail") << '\n';
}

}  // namespace fdmq
