#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sockaudit/core/run_log.hpp"
#include "sockaudit/core/types.hpp"
#include "sockaudit/scenario/adapter.hpp"

namespace sockaudit::scenario {

struct AgentConfig {
  Topic topic;
  std::vector<VideoId> seed_promoting;
  std::vector<VideoId> seed_debunking;
  std::vector<std::string> queries;
  ProcessParameters parameters;
  std::uint64_t agent_seed = 0;
  TimeMode time_mode = TimeMode::kSimulated;
};

// Checks the seed list and query counts against the parameters.
void validate_agent_config(const AgentConfig& config);

struct RunOptions {
  std::string run_id;
  std::size_t max_retries = 3;
  Seconds retry_backoff{5};  // doubled after every failed attempt
  // Optional incremental sink; every event is flushed as it happens.
  RunLogWriter* sink = nullptr;
  // Overrides the clock built from the config's time mode (tests).
  Clock* clock = nullptr;
};

// One audit run:
//   phase 0  home page, then a search phase over all queries
//   phase 1  promoting seeds in random order; after each watch the watch-page
//            recommendations and the home page, after every f_q-th watch a
//            search phase
//   phase 2  the same with the debunking seeds
//   phase 3  history reset
// Queries are shuffled anew for every search phase, with t_wait after each.
//
// A seed video the platform does not know raises NotFound before anything is
// recorded. An adapter call that still fails after max_retries retries ends
// the run with status kFailed; the record holds everything up to that point.
RunRecord run_scenario(const AgentConfig& config, PlatformAdapter& adapter,
                       const RunOptions& options);

}  // namespace sockaudit::scenario
