#pragma once

#include <map>
#include <string>
#include <vector>

#include "ratlab/context.hpp"

namespace ratlab {

// Named, fully resolved experiment configuration. Runs are deterministic
// functions of the canonical form.
struct ExperimentConfig {
  std::string name;
  std::map<std::string, std::string> params;
  long precision_bits = 0;  // 0: the experiment's default policy

  std::string canonical() const;  // sorted key=value form, includes version
  std::string hash() const;

  long paramInt(const std::string& key, long fallback) const;
  double paramDouble(const std::string& key, double fallback) const;
};

struct ExperimentResult {
  std::string name;
  std::string summary;  // JSON text
  std::vector<std::pair<std::string, std::string>> tables;  // (filename, CSV)
};

std::vector<std::string> experimentList();
bool experimentExists(const std::string& name);

// Validates parameter keys against the experiment's schema; unknown keys are
// a config error.
ExperimentResult runExperiment(const ExperimentConfig& cfg);

}  // namespace ratlab
