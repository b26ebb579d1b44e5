#include "fdmq/chip_config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fdmq/errors.hpp"
#include "fdmq/units.hpp"

namespace fdmq {
namespace pt = boost::property_tree;

std::vector<int> ChipConfig::device_ids() const {
  std::vector<int> ids;
  for (const auto& d : devices) ids.push_back(d.id);
  return ids;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

template <typename T>
T required(const pt::ptree& section, const std::string& section_name, const std::string& key) {
  try {
    return section.get<T>(key);
  } catch (const pt::ptree_error&) {
    throw ConfigError("[" + section_name + "] missing or malformed key '" + key + "'");
  }
}

template <typename T>
T optional(const pt::ptree& section, const std::string& section_name, const std::string& key,
           T fallback) {
  try {
    // get(key, fallback) swallows bad values, so only fall back when absent
    if (!section.get_child_optional(key)) return fallback;
    return section.get<T>(key);
  } catch (const pt::ptree_error&) {
    throw ConfigError("[" + section_name + "] malformed value for '" + key + "'");
  }
}

Window parse_window(const std::string& w) {
  if (w == "rectangular") return Window::rectangular;
  if (w == "hann") return Window::hann;
  throw ConfigError("unknown window '" + w + "'");
}

DeviceRecord parse_device(const std::string& name, const pt::ptree& s) {
  DeviceRecord d;
  const std::string digits = name.substr(6);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit))
    throw ConfigError("device section '" + name + "' must be named device<N>");
  d.id = std::stoi(digits);
  d.resonator.frequency_hz = required<double>(s, name, "resonator_frequency_hz");
  d.resonator.kappa_rad_s = to_angular(required<double>(s, name, "kappa_hz"));
  d.resonator.kappa_ext_rad_s = to_angular(required<double>(s, name, "kappa_ext_hz"));
  d.resonator.coupling_hz = required<double>(s, name, "coupling_hz");
  d.qubit.gap_hz = required<double>(s, name, "qubit_gap_hz");
  d.qubit.flux_sensitivity_hz = required<double>(s, name, "flux_sensitivity_hz");
  d.qubit.symmetry_flux = optional<double>(s, name, "symmetry_flux", 0.0);
  d.qubit.gamma_rad_s = to_angular(optional<double>(s, name, "gamma_hz", 0.0));
  try {
    d.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError("[" + name + "] " + e.what());
  }
  return d;
}

}  // namespace

ChipConfig parse_chip_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("chip config: ") + e.what());
  }

  ChipConfig cfg;
  cfg.config_hash = fnv1a_hex(text);
  const pt::ptree empty;
  const auto& chip = tree.get_child("chip", empty);
  cfg.name = optional<std::string>(chip, "chip", "name", "chip");
  cfg.rabi_rate_per_amplitude_hz =
      optional<double>(chip, "chip", "rabi_rate_per_amplitude_hz", cfg.rabi_rate_per_amplitude_hz);
  cfg.gamma_phi_rad_s = to_angular(optional<double>(chip, "chip", "gamma_phi_hz", 0.0));

  const auto& r = tree.get_child("readout", empty);
  auto& c = cfg.chain;
  c.sample_rate_hz = optional<double>(r, "readout", "sample_rate_hz", c.sample_rate_hz);
  c.n_samples = optional<std::size_t>(r, "readout", "n_samples", c.n_samples);
  c.probe_amplitude = optional<double>(r, "readout", "probe_amplitude", c.probe_amplitude);
  c.lo_hz = optional<double>(r, "readout", "lo_hz", c.lo_hz);
  c.phase_offset_rad = optional<double>(r, "readout", "phase_offset_rad", c.phase_offset_rad);
  c.gain = optional<double>(r, "readout", "gain", c.gain);
  c.noise_std = optional<double>(r, "readout", "noise_std", c.noise_std);
  c.ideal_adc = optional<bool>(r, "readout", "ideal_adc", c.ideal_adc);
  c.window = parse_window(optional<std::string>(r, "readout", "window", "rectangular"));
  c.adc.sample_rate_hz = c.sample_rate_hz;
  c.adc.bits = optional<int>(r, "readout", "adc_bits", c.adc.bits);
  c.adc.full_scale = optional<double>(r, "readout", "adc_full_scale", c.adc.full_scale);
  c.adc.analog_bandwidth_hz =
      optional<double>(r, "readout", "adc_analog_bandwidth_hz", c.adc.analog_bandwidth_hz);
  cfg.repetition_period_s =
      optional<double>(r, "readout", "repetition_period_s", cfg.repetition_period_s);
  try {
    c.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("[readout] ") + e.what());
  }

  std::set<int> seen;
  for (const auto& [name, section] : tree) {
    if (name.rfind("device", 0) != 0) {
      if (name != "chip" && name != "readout") throw ConfigError("unknown section [" + name + "]");
      continue;
    }
    auto d = parse_device(name, section);
    if (!seen.insert(d.id).second) throw ConfigError("duplicate device id " + std::to_string(d.id));
    cfg.devices.push_back(d);
  }
  if (cfg.devices.empty()) throw ConfigError("chip config lists no devices");
  std::sort(cfg.devices.begin(), cfg.devices.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  return cfg;
}

ChipConfig load_chip_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read chip config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_chip_config(buf.str());
}

}  // namespace fdmq
