#include "fdmq/sweep_result.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fdmq/errors.hpp"
#include "fdmq/format.hpp"

namespace fdmq {

void SweepResult::add_row(std::vector<double> row) {
  if (row.size() != columns.size())
    throw LengthMismatch("row has " + std::to_string(row.size()) + " values for " +
                         std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
}

std::size_t SweepResult::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InvalidParameter("no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> SweepResult::column(const std::string& name) const {
  const auto idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[idx]);
  return out;
}

SweepResult SweepResult::filter(const std::string& key, double value) const {
  const auto idx = column_index(key);
  SweepResult out{meta, columns, {}};
  for (const auto& r : rows)
    if (r[idx] == value) out.rows.push_back(r);
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_body(const SweepResult& result) {
  std::ostringstream out;
  for (std::size_t i = 0; i < result.columns.size(); ++i)
    out << (i ? "," : "") << result.columns[i];
  out << '\n';
  for (const auto& row : result.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
  return out.str();
}

void write_csv(std::ostream& out, const SweepResult& result) {
  out << "# experiment: " << result.meta.experiment << '\n';
  out << "# config_hash: " << result.meta.config_hash << '\n';
  out << "# seed: " << result.meta.seed << '\n';
  out << "# timestamp: " << result.meta.timestamp << '\n';
  for (const auto& [k, v] : result.meta.notes) out << "# " << k << ": " << v << '\n';
  out << csv_body(result);
}

void write_json(std::ostream& out, const SweepResult& result) {
  nlohmann::ordered_json j;
  j["experiment"] = result.meta.experiment;
  j["config_hash"] = result.meta.config_hash;
  j["seed"] = result.meta.seed;
  j["timestamp"] = result.meta.timestamp;
  auto notes = nlohmann::ordered_json::object();
  for (const auto& [k, v] : result.meta.notes) notes[k] = v;
  j["notes"] = notes;
  j["columns"] = result.columns;
  j["rows"] = result.rows;
  out << j.dump(1) << '\n';
}

std::string read_csv_config_hash(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  const std::string key = "# config_hash: ";
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    if (line.rfind(key, 0) == 0) return line.substr(key.size());
  }
  return {};
}

void append_csv(const std::filesystem::path& path, const SweepResult& result) {
  if (!std::filesystem::exists(path)) {
    std::ofstream out(path);
    if (!out) throw Error("cannot create " + path.string());
    write_csv(out, result);
    return;
  }
  const auto existing = read_csv_config_hash(path);
  if (existing != result.meta.config_hash) {
    throw ConfigHashMismatch("refusing to append: " + path.string() + " has config hash '" +
                             existing + "', this run has '" + result.meta.config_hash + "'");
  }
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
  }
  std::string expected;
  for (std::size_t i = 0; i < result.columns.size(); ++i)
    expected += (i ? "," : "") + result.columns[i];
  if (line != expected) throw Error("refusing to append: column layout differs in " + path.string());
  in.close();

  std::ofstream out(path, std::ios::app);
  const auto body = csv_body(result);
  out << body.substr(body.find('\n') + 1);
}

}  // namespace fdmq
