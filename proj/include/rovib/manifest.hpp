#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rovib/qsci.hpp"

namespace rovib {

inline constexpr const char* kToolVersion = "rovib 1.0.0";

std::uint64_t fnv1a_hash_file(const std::string& path);

// Reproducibility record: every knob needed to regenerate a run's outputs
// byte-identically in exact mode (the timestamp is informational only).
struct RunManifest {
  std::string command;
  std::string model_path;
  std::uint64_t model_hash = 0;
  std::map<std::string, std::string> params;
  std::string version = kToolVersion;

  void write(const std::string& path) const;
};

std::string format_cm1(double e);  // fixed 4-decimal energy formatting

void write_pipeline_csv(const std::vector<PipelineRow>& rows, const std::string& path);

struct BaselineRow {
  std::string method;
  std::string reference;
  int omega_size = 0;
  double energy_cm1 = 0;
  double std_cm1 = -1;  // negative = not applicable
  std::string label;
};
void write_baseline_csv(const std::vector<BaselineRow>& rows, const std::string& path);

}  // namespace rovib
