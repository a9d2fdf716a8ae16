// Experiment runner: named experiments over the library, JSON configs with
// schema validation, and deterministic JSON/CSV reports. Every acceptance
// check of the test suite is runnable as a named experiment.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace wmlab {

inline constexpr const char* kVersion = "wmlab 0.1.0";

struct ExperimentConfig {
  std::string name;
  nlohmann::json params;  // validated, defaults filled
  std::uint64_t seed = 1;
};

// Validates a raw params object against the experiment's schema: unknown
// keys are rejected by name, defaults are filled in.
ExperimentConfig validate_config(const std::string& name,
                                 const nlohmann::json& params);

// Reads {"experiment": ..., other keys...} from a JSON file.
ExperimentConfig parse_config(const std::string& path);

struct Criterion {
  std::string id;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct Report {
  std::string experiment;
  nlohmann::json config_echo;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::vector<Criterion> criteria;
  nlohmann::json scalars;

  bool all_pass() const;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

Report run(const ExperimentConfig& cfg);

enum class ReportFormat { Json, Csv };
void emit_report(const Report& rep, ReportFormat format,
                 const std::string& path);

const std::vector<std::string>& experiment_names();
nlohmann::json config_schema();  // versioned schema document

}  // namespace wmlab
