#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

namespace loclim {

struct EpsilonRow {
  double eps = 0.0;
  std::vector<double> values;  // one entry per replicate
};

struct ExperimentRecord {
  std::string kind;  // "rate" or "clt"
  std::string config;
  std::string config_hash;
  std::string regime;
  bool boundary_exact = false;
  std::map<std::string, bool> gates;
  std::vector<EpsilonRow> rows;
  double slope = 0.0;
  double slope_se = 0.0;
  std::map<std::string, double> metrics;
  std::map<std::string, std::vector<double>> series;  // per-eps summaries
  std::string version;
  std::string started_at;
  std::string finished_at;
  std::string payload_hash;

  // Everything except timestamps and the hash itself.
  nlohmann::json payload() const;
  nlohmann::json to_json() const;
  static ExperimentRecord from_json(const nlohmann::json& j);

  std::string compute_payload_hash() const;
  void seal();  // sets payload_hash
};

// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

// Shortest decimal that reads back to the same double.
std::string format_double(double v);

std::string utc_timestamp();

// Append-only JSON-lines store; one record per line.
class RecordStore {
 public:
  explicit RecordStore(std::string path);
  void append(const ExperimentRecord& rec);
  std::vector<ExperimentRecord> read_all() const;
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
  mutable std::mutex mutex_;
};

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace loclim
