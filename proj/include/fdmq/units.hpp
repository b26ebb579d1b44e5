#pragma once

#include <numbers>

namespace fdmq {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Frequencies are stored in Hz, rates and linewidths in rad/s; field names
// carry the unit suffix (_hz, _rad_s).
constexpr double to_angular(double hz) { return kTwoPi * hz; }
constexpr double to_hz(double rad_s) { return rad_s / kTwoPi; }

}  // namespace fdmq
