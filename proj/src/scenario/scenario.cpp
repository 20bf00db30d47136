#include "sockaudit/scenario/scenario.hpp"

#include <algorithm>
#include <random>
#include <thread>

#include "sockaudit/core/errors.hpp"

namespace sockaudit::scenario {

SimulatedPlatformAdapter::SimulatedPlatformAdapter(
    std::shared_ptr<const platform::SimulatedPlatform> platform, std::string session_id,
    std::uint64_t session_seed)
    : platform_(std::move(platform)), session_(std::move(session_id), session_seed) {
  if (!platform_) throw InvalidArgument("adapter needs a platform");
}

ExposureSnapshot SimulatedPlatformAdapter::search(const std::string& query) {
  return platform_->search(session_, query);
}

WatchPage SimulatedPlatformAdapter::watch(const VideoId& video_id, Seconds watched) {
  auto r = platform_->watch(session_, video_id, watched);
  return {std::move(r.recommendations), std::move(r.home)};
}

ExposureSnapshot SimulatedPlatformAdapter::home() { return platform_->home(session_); }

void SimulatedPlatformAdapter::reset_history() { platform_->reset_history(session_); }

Seconds SimulatedPlatformAdapter::video_duration(const VideoId& video_id) {
  return platform_->catalog().at(video_id).video.duration;
}

std::string_view to_string(TimeMode mode) {
  return mode == TimeMode::kReal ? "real" : "simulated";
}

TimeMode time_mode_from_string(std::string_view text) {
  if (text == "simulated") return TimeMode::kSimulated;
  if (text == "real") return TimeMode::kReal;
  throw ParseError("unknown time mode '" + std::string(text) + "'");
}

void RealClock::wait(Seconds duration) {
  std::this_thread::sleep_for(duration);
  elapsed_ += duration;
}

std::unique_ptr<Clock> make_clock(TimeMode mode) {
  if (mode == TimeMode::kReal) return std::make_unique<RealClock>();
  return std::make_unique<VirtualClock>();
}

void validate_agent_config(const AgentConfig& c) {
  validate_parameters(c.parameters);
  const auto& p = c.parameters;
  if (c.seed_promoting.size() != p.n_prom) {
    throw InvalidArgument("expected " + std::to_string(p.n_prom) + " promoting seed videos, got " +
                          std::to_string(c.seed_promoting.size()));
  }
  if (c.seed_debunking.size() != p.n_deb) {
    throw InvalidArgument("expected " + std::to_string(p.n_deb) + " debunking seed videos, got " +
                          std::to_string(c.seed_debunking.size()));
  }
  if (c.queries.size() != p.n_q) {
    throw InvalidArgument("expected " + std::to_string(p.n_q) + " queries, got " +
                          std::to_string(c.queries.size()));
  }
}

namespace {

// Raised when an adapter call keeps failing; ends the run.
struct RunAborted {
  std::string reason;
};

class Run {
 public:
  Run(const AgentConfig& config, PlatformAdapter& adapter, const RunOptions& options, Clock& clock)
      : config_(config), adapter_(adapter), options_(options), clock_(clock),
        rng_(config.agent_seed) {
    record_.run_id = options.run_id;
    record_.topic_id = config.topic.topic_id;
    record_.agent_seed = config.agent_seed;
    record_.parameters = config.parameters;
  }

  RunRecord& record() { return record_; }

  template <typename F>
  auto attempt(const char* what, F&& call) {
    Seconds backoff = options_.retry_backoff;
    for (std::size_t tries = 0;; ++tries) {
      try {
        return call();
      } catch (const AdapterError& e) {
        if (tries >= options_.max_retries) {
          throw RunAborted{std::string(what) + " failed after " + std::to_string(tries + 1) +
                           " attempts: " + e.what()};
        }
        clock_.wait(backoff);
        backoff *= 2;
      }
    }
  }

  void save(ExposureSnapshot snap, Phase phase) {
    snap.run_id = record_.run_id;
    snap.phase = phase;
    snap.watch_index = record_.watch_sequence.size();
    validate_snapshot(snap);
    if (options_.sink) options_.sink->append_snapshot(snap);
    record_.snapshots.push_back(std::move(snap));
  }

  void search_phase(Phase phase) {
    auto queries = config_.queries;
    std::shuffle(queries.begin(), queries.end(), rng_);
    for (const auto& q : queries) {
      save(attempt("search", [&] { return adapter_.search(q); }), phase);
      clock_.wait(config_.parameters.t_wait);
    }
  }

  void watch_phase(Phase phase, std::vector<VideoId> seeds, const std::vector<Seconds>& durations) {
    std::vector<std::size_t> order(seeds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng_);
    std::size_t in_phase = 0;
    for (auto i : order) {
      const Seconds watched =
          std::min<Seconds>(config_.parameters.t_watch, durations[i]);
      auto page = attempt("watch", [&] { return adapter_.watch(seeds[i], watched); });
      clock_.wait(watched);
      WatchEvent ev{phase, seeds[i], watched};
      if (options_.sink) options_.sink->append_watch(ev);
      record_.watch_sequence.push_back(std::move(ev));
      save(std::move(page.recommendations), phase);
      save(std::move(page.home), phase);
      if (++in_phase % config_.parameters.f_q == 0) search_phase(phase);
    }
  }

 private:
  const AgentConfig& config_;
  PlatformAdapter& adapter_;
  const RunOptions& options_;
  Clock& clock_;
  std::mt19937_64 rng_;
  RunRecord record_;
};

}  // namespace

RunRecord run_scenario(const AgentConfig& config, PlatformAdapter& adapter,
                       const RunOptions& options) {
  validate_agent_config(config);
  std::unique_ptr<Clock> owned;
  Clock* clock = options.clock;
  if (!clock) {
    owned = make_clock(config.time_mode);
    clock = owned.get();
  }
  Run run(config, adapter, options, *clock);

  std::vector<Seconds> prom_durations, deb_durations;
  try {
    run.attempt("login", [&] { adapter.login(); });
    run.attempt("accept cookies", [&] { adapter.accept_cookies(); });
    for (const auto& id : config.seed_promoting) {
      prom_durations.push_back(run.attempt("duration lookup", [&] { return adapter.video_duration(id); }));
    }
    for (const auto& id : config.seed_debunking) {
      deb_durations.push_back(run.attempt("duration lookup", [&] { return adapter.video_duration(id); }));
    }
  } catch (const RunAborted& a) {
    auto& r = run.record();
    r.status = RunStatus::kFailed;
    r.failure_reason = a.reason;
    if (options.sink) options.sink->finish(r.status, 0, r.failure_reason);
    return r;
  } catch (const NotFound& e) {
    throw NotFound("seed video missing: " + std::string(e.what()));
  }

  auto& record = run.record();
  try {
    record.snapshots.reserve(1 + config.parameters.total_watches() * 2 +
                             (1 + config.parameters.total_watches() / config.parameters.f_q) *
                                 config.parameters.n_q);
    run.save(run.attempt("home", [&] { return adapter.home(); }), Phase::kBaseline);
    run.search_phase(Phase::kBaseline);
    run.watch_phase(Phase::kPromoting, config.seed_promoting, prom_durations);
    run.watch_phase(Phase::kDebunking, config.seed_debunking, deb_durations);
    run.attempt("reset history", [&] { adapter.reset_history(); });
    record.status = RunStatus::kCompleted;
    record.resume_cursor = record.watch_sequence.size();
  } catch (const RunAborted& a) {
    record.status = RunStatus::kFailed;
    record.resume_cursor = record.watch_sequence.size();
    record.failure_reason = a.reason;
  }
  if (options.sink) options.sink->finish(record.status, record.resume_cursor, record.failure_reason);
  return record;
}

}  // namespace sockaudit::scenario
