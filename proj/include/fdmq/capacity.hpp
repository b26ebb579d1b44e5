#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace fdmq {

enum class SpacingRule { fixed_spacing, kappa_multiple };

std::string to_string(SpacingRule rule);
SpacingRule parse_spacing_rule(const std::string& text);

struct PlanChannel {
  int device_id = 0;
  double frequency_hz = 0.0;
};

struct FrequencyPlan {
  double band_start_hz = 0.0;
  double band_stop_hz = 0.0;
  std::vector<PlanChannel> channels;  // strictly increasing in frequency
  SpacingRule spacing_rule = SpacingRule::fixed_spacing;
  double guard_hz = 0.0;              // smallest channel-to-band-edge margin

  void validate() const;
  std::vector<double> frequencies_hz() const;
};

struct CapacityQuery {
  double bandwidth_hz = 1e9;
  double kappa_rad_s = 0.0;
  double gamma_rad_s = 0.0;
  double dispersive_shift_rad_s = 0.0;
  double crosstalk_limit_db = -20.0;

  void validate() const;
};

struct CapacityResult {
  std::size_t count = 0;
  double spacing_rad_s = 0.0;
  double crosstalk_spacing_rad_s = 0.0;
  double carson_spacing_rad_s = 0.0;
  bool carson_limited = false;
};

// Crosstalk-derived spacings are rounded up to this fraction of kappa.
inline constexpr double kKappaStepFraction = 0.1;

/// Carson estimate of the relaxation-modulation bandwidth, 2 (shift + 2 gamma).
double carson_bandwidth(double shift_rad_s, double gamma_rad_s);

/// Lorentzian amplitude tail of one channel at its neighbour,
/// 20 log10[(k/2) / sqrt(s^2 + (k/2)^2)].
double adjacent_crosstalk_db(double spacing_rad_s, double kappa_rad_s);

/// Smallest multiple of kKappaStepFraction * kappa meeting `limit_db`.
double crosstalk_limited_spacing(double kappa_rad_s, double limit_db);

/// Channel count and spacing for a readout band. Throws InfeasiblePlan when a
/// single spacing exceeds the bandwidth.
CapacityResult max_channels(const CapacityQuery& q);

/// Heuristic per-channel SNR figure for the kappa tradeoff:
/// (kappa_ext / kappa) * sqrt(integration_time * kappa).
double snr_proxy(double kappa_ext_rad_s, double kappa_rad_s, double integration_time_s);

struct PlanRequest {
  std::size_t n = 1;
  double band_start_hz = 0.0;
  double band_stop_hz = 0.0;
  SpacingRule rule = SpacingRule::fixed_spacing;
  double kappa_rad_s = 0.0;          // 0 disables the crosstalk requirement
  double crosstalk_limit_db = -10.0;
  double carson_rad_s = 0.0;
};

/// Uniform plan: fixed_spacing spreads channels edge to edge; kappa_multiple
/// rounds the pitch down to a multiple of 0.1 kappa and centers the block.
FrequencyPlan generate_plan(const PlanRequest& request);

struct AdjacentAudit {
  int lower_device = 0;
  int upper_device = 0;
  double spacing_hz = 0.0;
  double crosstalk_db = 0.0;
  bool passes = true;
};

struct ChannelAudit {
  int device_id = 0;
  double frequency_hz = 0.0;
  double carson_margin_hz = 0.0;  // nearest-neighbour distance minus Carson bandwidth
};

struct PlanAudit {
  std::vector<AdjacentAudit> pairs;
  std::vector<ChannelAudit> channels;
  bool passes = true;
};

PlanAudit audit_plan(const FrequencyPlan& plan, double kappa_rad_s, double crosstalk_limit_db,
                     double carson_rad_s);

/// Whether every channel fits the acquisition band around some LO: one
/// sideband needs span <= bandwidth, both sidebands span <= 2 bandwidth.
bool fits_acquisition(const FrequencyPlan& plan, double analog_bandwidth_hz, bool both_sidebands);

/// Structured text listing of channels, pair audits and Carson margins.
void write_plan_document(std::ostream& out, const FrequencyPlan& plan, const PlanAudit& audit);

}  // namespace fdmq
