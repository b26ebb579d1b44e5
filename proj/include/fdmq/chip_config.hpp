#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fdmq/device_model.hpp"
#include "fdmq/readout_chain.hpp"

namespace fdmq {

/// Parsed chip description (INI text, see configs/chip7.cfg for the schema).
struct ChipConfig {
  std::string name;
  std::vector<DeviceRecord> devices;
  ChainConfig chain;
  double rabi_rate_per_amplitude_hz = 20e6;
  double gamma_phi_rad_s = 0.0;
  double repetition_period_s = 10e-6;
  std::string config_hash;  // FNV-1a 64 of the file bytes, 16 hex digits

  std::vector<int> device_ids() const;
};

/// 64-bit FNV-1a over raw bytes, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

ChipConfig parse_chip_config(const std::string& text);
ChipConfig load_chip_config(const std::filesystem::path& path);

}  // namespace fdmq
