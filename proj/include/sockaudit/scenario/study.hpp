#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sockaudit/platform/catalog.hpp"
#include "sockaudit/scenario/scenario.hpp"

namespace sockaudit::scenario {

// splitmix64 over the parent seed mixed with the FNV-1a hash of the label.
std::uint64_t derive_seed(std::uint64_t parent, const std::string& label);

struct StudyTopic {
  Topic topic;
  std::vector<VideoId> seed_promoting;
  std::vector<VideoId> seed_debunking;
};

// n videos of the given stance drawn without replacement from a topic, in a
// seeded order. Throws InvalidArgument when the topic has fewer.
std::vector<VideoId> pick_seed_videos(const platform::Catalog& catalog, const std::string& topic_id,
                                      Stance stance, std::size_t n, std::uint64_t seed);

// Seed sets for every catalog topic, derived from the master seed.
std::vector<StudyTopic> simulator_study_topics(const platform::Catalog& catalog,
                                               const ProcessParameters& parameters,
                                               std::uint64_t master_seed);

struct PlannedRun {
  std::string run_id;
  AgentConfig config;
  std::uint64_t session_seed = 0;
};

// runs_per_topic runs for every topic, topic-major. Seeds come from
// master seed -> run label -> {agent, session}.
std::vector<PlannedRun> plan_study(const std::vector<StudyTopic>& topics,
                                   const ProcessParameters& parameters, std::uint64_t master_seed,
                                   TimeMode time_mode = TimeMode::kSimulated);

using AdapterFactory =
    std::function<std::unique_ptr<PlatformAdapter>(const PlannedRun& run)>;

AdapterFactory simulator_factory(std::shared_ptr<const platform::SimulatedPlatform> platform);

struct StudyOptions {
  std::size_t workers = 1;
  // When set, each run is logged to <dir>/<run_id>.jsonl as it executes; the
  // directory is created if needed.
  std::optional<std::filesystem::path> record_dir;
};

// Runs execute concurrently up to the worker limit. A run that throws is
// returned as a failed record carrying the message; other runs are unaffected.
// Records come back in plan order.
std::vector<RunRecord> run_study(const std::vector<PlannedRun>& plan, const AdapterFactory& factory,
                                 const StudyOptions& options = {});

}  // namespace sockaudit::scenario
