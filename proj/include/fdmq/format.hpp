#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace fdmq {

/// Shortest round-trip decimal representation; locale independent, so
/// outputs are byte-identical across runs.
inline std::string format_double(double v) {
  char buf[32];
  // integral values (frequencies, counts) stay in fixed notation
  const bool integral = std::abs(v) < 1e15 && v == std::trunc(v);
  auto res = integral ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed)
                      : std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace fdmq
