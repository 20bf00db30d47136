#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sockaudit/annotation/labels.hpp"
#include "sockaudit/core/types.hpp"
#include "sockaudit/platform/catalog.hpp"
#include "sockaudit/platform/simulator.hpp"
#include "sockaudit/scenario/adapter.hpp"
#include "sockaudit/stats/hypotheses.hpp"

namespace sockaudit::report {

struct EvaluationSettings {
  stats::HypothesisConfig hypotheses;
  annotation::ResolutionPolicy resolution;
  // evaluate refuses to score when more of the scored items lack a label.
  double max_unlabeled_fraction = 0.05;
};

struct StudyConfig {
  std::string study_id = "study";
  std::uint64_t master_seed = 1;
  std::size_t workers = 1;
  scenario::TimeMode time_mode = scenario::TimeMode::kSimulated;
  ProcessParameters parameters;
  platform::CatalogConfig catalog;
  std::string preset = "contextual";
  platform::PersonalizationConfig personalization = platform::preset("contextual");
  // Topic ids to audit; empty means every catalog topic.
  std::vector<std::string> topics;
  EvaluationSettings evaluation;
};

// JSON with // and /* */ comments allowed. Every key is optional; unknown keys
// and bad values raise ConfigError naming the field, e.g. "platform.noise_scale".
StudyConfig parse_study_config(const std::string& text);
StudyConfig load_study_config(const std::filesystem::path& path);

// Canonical JSON (sorted keys, no comments, every field explicit).
std::string canonical_json(const StudyConfig& config);

// 16 hex digits of FNV-1a over the canonical JSON.
std::string config_digest(const StudyConfig& config);

}  // namespace sockaudit::report
