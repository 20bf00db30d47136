#include "sockaudit/scenario/study.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <random>
#include <thread>

#include "sockaudit/core/errors.hpp"

namespace sockaudit::scenario {
namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string run_label(const std::string& topic_id, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "r%02zu", index + 1);
  return topic_id + "-" + buf;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t parent, const std::string& label) {
  return splitmix64(parent ^ fnv1a(label));
}

std::vector<VideoId> pick_seed_videos(const platform::Catalog& catalog, const std::string& topic_id,
                                      Stance stance, std::size_t n, std::uint64_t seed) {
  std::vector<VideoId> pool;
  for (const auto& e : catalog.entries()) {
    if (e.video.topic == topic_id && e.video.true_stance == stance) pool.push_back(e.video.video_id);
  }
  if (pool.size() < n) {
    throw InvalidArgument("topic '" + topic_id + "' has " + std::to_string(pool.size()) + " " +
                          std::string(to_string(stance)) + " videos, " + std::to_string(n) +
                          " seeds requested");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(n);
  return pool;
}

std::vector<StudyTopic> simulator_study_topics(const platform::Catalog& catalog,
                                               const ProcessParameters& parameters,
                                               std::uint64_t master_seed) {
  std::vector<StudyTopic> out;
  for (const auto& t : catalog.topics()) {
    const auto base = derive_seed(master_seed, "seeds/" + t.topic_id);
    StudyTopic st;
    st.topic = t;
    st.seed_promoting = pick_seed_videos(catalog, t.topic_id, Stance::kPromoting,
                                         parameters.n_prom, derive_seed(base, "promoting"));
    st.seed_debunking = pick_seed_videos(catalog, t.topic_id, Stance::kDebunking,
                                         parameters.n_deb, derive_seed(base, "debunking"));
    out.push_back(std::move(st));
  }
  return out;
}

std::vector<PlannedRun> plan_study(const std::vector<StudyTopic>& topics,
                                   const ProcessParameters& parameters, std::uint64_t master_seed,
                                   TimeMode time_mode) {
  validate_parameters(parameters);
  std::vector<PlannedRun> plan;
  for (const auto& t : topics) {
    validate_topic(t.topic);
    std::vector<std::string> queries = t.topic.queries;
    if (queries.size() < parameters.n_q) {
      throw InvalidArgument("topic '" + t.topic.topic_id + "' has " +
                            std::to_string(queries.size()) + " queries, n_q is " +
                            std::to_string(parameters.n_q));
    }
    queries.resize(parameters.n_q);
    for (std::size_t r = 0; r < parameters.runs_per_topic; ++r) {
      PlannedRun run;
      run.run_id = run_label(t.topic.topic_id, r);
      const auto run_seed = derive_seed(master_seed, "run/" + run.run_id);
      run.session_seed = derive_seed(run_seed, "session");
      run.config.topic = t.topic;
      run.config.seed_promoting = t.seed_promoting;
      run.config.seed_debunking = t.seed_debunking;
      run.config.queries = queries;
      run.config.parameters = parameters;
      run.config.agent_seed = derive_seed(run_seed, "agent");
      run.config.time_mode = time_mode;
      validate_agent_config(run.config);
      plan.push_back(std::move(run));
    }
  }
  return plan;
}

AdapterFactory simulator_factory(std::shared_ptr<const platform::SimulatedPlatform> platform) {
  return [platform](const PlannedRun& run) -> std::unique_ptr<PlatformAdapter> {
    return std::make_unique<SimulatedPlatformAdapter>(platform, run.run_id, run.session_seed);
  };
}

std::vector<RunRecord> run_study(const std::vector<PlannedRun>& plan, const AdapterFactory& factory,
                                 const StudyOptions& options) {
  if (options.record_dir) std::filesystem::create_directories(*options.record_dir);
  std::vector<RunRecord> records(plan.size());
  std::atomic<std::size_t> next{0};

  auto execute = [&](const PlannedRun& run) {
    RunRecord failed;
    failed.run_id = run.run_id;
    failed.topic_id = run.config.topic.topic_id;
    failed.agent_seed = run.config.agent_seed;
    failed.parameters = run.config.parameters;
    failed.status = RunStatus::kFailed;
    std::unique_ptr<RunLogWriter> sink;
    try {
      if (options.record_dir) {
        sink = std::make_unique<RunLogWriter>(*options.record_dir / (run.run_id + ".jsonl"), failed);
      }
      auto adapter = factory(run);
      RunOptions ro;
      ro.run_id = run.run_id;
      ro.sink = sink.get();
      return run_scenario(run.config, *adapter, ro);
    } catch (const std::exception& e) {
      failed.failure_reason = e.what();
      if (sink) {
        try {
          sink->finish(RunStatus::kFailed, 0, failed.failure_reason);
        } catch (const std::exception&) {
        }
      }
      return failed;
    }
  };

  auto worker = [&] {
    for (std::size_t i = next++; i < plan.size(); i = next++) records[i] = execute(plan[i]);
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(options.workers, plan.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  return records;
}

}  // namespace sockaudit::scenario
