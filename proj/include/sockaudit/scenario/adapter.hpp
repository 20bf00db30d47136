#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "sockaudit/core/types.hpp"
#include "sockaudit/platform/simulator.hpp"

namespace sockaudit::scenario {

struct WatchPage {
  ExposureSnapshot recommendations;
  ExposureSnapshot home;
};

// Everything a run does to the platform goes through this interface.
// Transient failures are reported as AdapterError and retried by the engine;
// NotFound is permanent.
class PlatformAdapter {
 public:
  virtual ~PlatformAdapter() = default;

  virtual void login() {}
  virtual void accept_cookies() {}

  virtual ExposureSnapshot search(const std::string& query) = 0;
  virtual WatchPage watch(const VideoId& video_id, Seconds watched) = 0;
  virtual ExposureSnapshot home() = 0;
  virtual void reset_history() = 0;
  virtual Seconds video_duration(const VideoId& video_id) = 0;
};

class SimulatedPlatformAdapter : public PlatformAdapter {
 public:
  SimulatedPlatformAdapter(std::shared_ptr<const platform::SimulatedPlatform> platform,
                           std::string session_id, std::uint64_t session_seed);

  ExposureSnapshot search(const std::string& query) override;
  WatchPage watch(const VideoId& video_id, Seconds watched) override;
  ExposureSnapshot home() override;
  void reset_history() override;
  Seconds video_duration(const VideoId& video_id) override;

  const platform::UserSession& session() const { return session_; }

 private:
  std::shared_ptr<const platform::SimulatedPlatform> platform_;
  platform::UserSession session_;
};

enum class TimeMode { kSimulated, kReal };

std::string_view to_string(TimeMode mode);
TimeMode time_mode_from_string(std::string_view text);

class Clock {
 public:
  virtual ~Clock() = default;
  virtual void wait(Seconds duration) = 0;
  virtual Seconds elapsed() const = 0;
};

// Advances a counter; never sleeps.
class VirtualClock : public Clock {
 public:
  void wait(Seconds duration) override { elapsed_ += duration; }
  Seconds elapsed() const override { return elapsed_; }

 private:
  Seconds elapsed_{0};
};

class RealClock : public Clock {
 public:
  void wait(Seconds duration) override;
  Seconds elapsed() const override { return elapsed_; }

 private:
  Seconds elapsed_{0};
};

std::unique_ptr<Clock> make_clock(TimeMode mode);

}  // namespace sockaudit::scenario
