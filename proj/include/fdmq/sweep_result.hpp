#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace fdmq {

struct SweepMetadata {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string timestamp;  // UTC, ISO 8601; header only, never in the body
  std::vector<std::pair<std::string, std::string>> notes;
};

/// Rectangular long-format table: one row per (axis point, device).
struct SweepResult {
  SweepMetadata meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  /// Rows whose `key` column equals `value`.
  SweepResult filter(const std::string& key, double value) const;
};

std::string utc_timestamp();

/// CSV: a '#' header block (experiment, config hash, seed, timestamp,
/// notes), the column line, then rows with shortest round-trip numbers.
void write_csv(std::ostream& out, const SweepResult& result);
/// Column line plus rows, no header block.
std::string csv_body(const SweepResult& result);
void write_json(std::ostream& out, const SweepResult& result);

/// Read the '# config_hash:' line of an existing CSV; empty if absent.
std::string read_csv_config_hash(const std::filesystem::path& path);

/// Append rows to an existing CSV of the same experiment (or create it).
/// Throws ConfigHashMismatch if the file was produced from another config,
/// or Error if its columns differ.
void append_csv(const std::filesystem::path& path, const SweepResult& result);

}  // namespace fdmq
