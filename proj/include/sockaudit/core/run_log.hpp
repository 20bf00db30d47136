#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "sockaudit/core/types.hpp"

namespace sockaudit {

inline constexpr const char* kRunLogSchema = "sockaudit.run";
inline constexpr int kRunLogVersion = 1;

// Append-only JSON-lines log for a single run.
//
//   line 1   {"schema":"sockaudit.run","version":1,"run_id":..,"parameters":{..}}
//   then     one {"type":"watch",..} or {"type":"snapshot",..} per event,
//            in the order they happened
//   last     {"type":"end","status":..,"resume_cursor":..}
//
// A file without the end line is a run that was interrupted; it reads back
// with status kIncomplete.
class RunLogWriter {
 public:
  RunLogWriter(const std::filesystem::path& path, const RunRecord& header);

  void append_watch(const WatchEvent& event);
  void append_snapshot(const ExposureSnapshot& snapshot);
  void finish(RunStatus status, std::size_t resume_cursor, const std::string& reason);

  const std::filesystem::path& path() const { return path_; }

 private:
  void write_line(const std::string& line);

  std::filesystem::path path_;
  std::string run_id_;
  std::ofstream out_;
  bool finished_ = false;
};

// Serializes a whole record in chronological order: snapshots taken after k
// watches follow the k-th watch line.
std::string run_record_to_jsonl(const RunRecord& record);
void write_run_record(const std::filesystem::path& path, const RunRecord& record);

RunRecord parse_run_record(const std::string& jsonl);
RunRecord read_run_record(const std::filesystem::path& path);

// All *.jsonl run logs in a directory, sorted by file name.
std::vector<RunRecord> read_run_directory(const std::filesystem::path& dir);

}  // namespace sockaudit
