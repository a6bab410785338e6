#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "synthaudit/attacks.hpp"
#include "synthaudit/distance.hpp"
#include "synthaudit/generators.hpp"

namespace synthaudit {

inline constexpr const char* kToolName = "synthaudit";
inline constexpr const char* kToolVersion = "0.1.0";

struct GeneratorConfig {
  GeneratorParams params;
  uint64_t fit_seed = 1;
  uint64_t sample_seed = 2;
  std::optional<size_t> n_sample;  // default: training-set size
};

struct TcapConfig {
  std::vector<std::string> keys;
  std::string target;
};

struct IndicatorConfig {
  bool enabled = true;
  double q_percentile = 5.0;
  double ks_alpha = 0.05;
  bool mmd = true;
  std::optional<TcapConfig> tcap;
  bool seed_based = true;  // seed-paired indicators, when the sample allows it
};

struct PdConfig {
  size_t k = 2;
  double gamma = 2.0;
  size_t n_candidates = 20;
  uint64_t seed = 1;
};

struct AnonymityConfig {
  bool enabled = true;
  std::vector<std::string> quasi_identifiers;
  std::optional<std::string> sensitive;
  std::optional<PdConfig> pd;
};

struct SinglingOutConfig {
  bool multivariate = false;
  size_t width = 2;
  size_t n_attacks = 100;
};

struct LinkageConfig {
  std::vector<std::string> aux_a;
  std::vector<std::string> aux_b;
  size_t k = 1;
};

struct InferenceConfig {
  std::vector<std::string> aux;
  std::string secret;
  size_t k = 5;
  std::optional<double> tolerance;
};

struct MiaDistanceConfig {};

struct ShadowMiaConfig {
  size_t m = 8;
  std::optional<size_t> n_train;  // default: training-set size capped by the population
};

using AttackConfig =
    std::variant<SinglingOutConfig, LinkageConfig, InferenceConfig, MiaDistanceConfig, ShadowMiaConfig>;

struct AttackSuiteConfig {
  bool enabled = true;
  uint64_t master_seed = 1;
  size_t n_targets = 100;
  std::vector<AttackConfig> suite;
};

struct CanaryConfig {
  bool enabled = true;
  size_t n_canaries = 5;
  uint64_t seed = 1;
  double epsilon = 0.0;
};

struct AuditConfig {
  std::string real_path;
  std::optional<std::string> synthetic_path;  // generated via `generator` when absent
  std::optional<std::string> schema_path;
  double holdout_fraction = 0.3;
  uint64_t holdout_seed = 1;
  double control_fraction = 0.0;
  uint64_t control_seed = 2;
  Metric metric = Metric::euclidean;
  EvaluationStrategy strategy = EmbedStrategy{};
  std::optional<GeneratorConfig> generator;
  IndicatorConfig indicators;
  std::optional<AnonymityConfig> anonymity;
  AttackSuiteConfig attacks;
  std::optional<CanaryConfig> canary;
  nlohmann::ordered_json raw;  // echoed verbatim into the report
};

// Parses the JSON grammar documented in the README. Relative paths resolve
// against base_dir. ConfigError on malformed or unknown content.
AuditConfig parse_config(const nlohmann::ordered_json& j, const std::string& base_dir);
AuditConfig load_config(const std::string& path);

enum AuditSection : unsigned {
  kSectionProfiles = 1u << 0,
  kSectionIndicators = 1u << 1,
  kSectionAnonymity = 1u << 2,
  kSectionAttacks = 1u << 3,
  kSectionCanary = 1u << 4,
  kSectionAll = 0x1f,
};

struct ItemError {
  std::string item;
  std::string code;
  std::string message;
};

struct PrivacyReport {
  nlohmann::ordered_json body;     // deterministic function of (config, inputs)
  nlohmann::ordered_json timings;  // wall-clock, written to a separate file
  // full per-record profile vectors, column name -> values
  std::vector<std::pair<std::string, std::vector<double>>> profile_columns;
  // attacks and their baselines in run order, keyed "<entry>:<attack_name>"
  std::vector<std::pair<std::string, AttackOutcome>> attack_log;
  std::vector<ItemError> item_errors;
};

// Runs splits, preprocessing, profiles, indicators, anonymity, attacks and
// the canary workflow per the config. Setup failures (unreadable files, bad
// config) throw; failures inside a section are recorded as item errors and
// the run continues.
PrivacyReport run_audit(const AuditConfig& config, unsigned sections = kSectionAll, int threads = 1);

// Writes report.json, profiles.csv, attacks.csv and timings.json into
// out_dir (created if needed). Everything except timings.json is
// byte-identical across reruns of the same config and inputs.
void emit(const PrivacyReport& report, const std::string& out_dir);

}  // namespace synthaudit
