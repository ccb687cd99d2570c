#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "loclim/local_time.hpp"
#include "loclim/process.hpp"

namespace loclim {

// Key-value text with [section] headers. Keys are addressed as
// "section.key".
class ConfigDocument {
 public:
  static ConfigDocument parse(const std::string& text);
  static ConfigDocument load(const std::string& path);

  // "section.key=value"; throws ConfigError when malformed.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

struct ExperimentConfig {
  ProcessSpec spec;
  EstimatorConfig estimator;  // epsilon unused; grid below
  IntegrationRule proxy_rule = IntegrationRule::Conditional;

  // geometric grid eps_0 * ratio^j, j < count
  double eps0 = 1.0 / 16.0;
  double eps_ratio = 0.5;
  int eps_count = 6;
  // proxy for L: fixed eps_ref, or eps * proxy_ratio when proxy_ratio > 0
  double eps_ref = 1.0 / 32768.0;
  double proxy_ratio = 0.0;

  std::size_t replicates = 200;
  int order_n = 2;
  std::string test_function = "p1";
  std::uint64_t seed = 20240601;
  unsigned workers = 0;  // not part of the record payload
  std::size_t bootstrap = 200;

  // tightness: second moment of F(t0 + g) - F(t0)
  double tightness_start = 0.0;
  std::vector<double> tightness_gaps{0.25, 0.5, 1.0};

  std::string records_path;
  std::string csv_path;

  std::vector<double> eps_grid() const;
  // Throws ConfigError for a bad grid, M < 2, unsupported f, etc.
  void validate() const;
  // Canonical text of every field that affects results (workers and output
  // paths excluded).
  std::string canonical() const;
};

// Recognised keys, "section.key".
const std::vector<std::string>& config_keys();

// Builds a configuration; unknown keys raise ConfigError naming the key.
ExperimentConfig experiment_config(const ConfigDocument& doc);

std::vector<double> parse_list(const std::string& text);

}  // namespace loclim
