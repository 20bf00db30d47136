#include "sockaudit/core/run_log.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "sockaudit/core/errors.hpp"

namespace sockaudit {
namespace {

using nlohmann::json;

json parameters_to_json(const ProcessParameters& p) {
  return json{{"n_prom", p.n_prom},
              {"n_deb", p.n_deb},
              {"t_watch_min", p.t_watch.count()},
              {"n_q", p.n_q},
              {"t_wait_min", p.t_wait.count()},
              {"f_q", p.f_q},
              {"runs_per_topic", p.runs_per_topic},
              {"top_n_metric", p.top_n_metric}};
}

ProcessParameters parameters_from_json(const json& j) {
  ProcessParameters p;
  p.n_prom = j.at("n_prom").get<std::size_t>();
  p.n_deb = j.at("n_deb").get<std::size_t>();
  p.t_watch = std::chrono::minutes(j.at("t_watch_min").get<long>());
  p.n_q = j.at("n_q").get<std::size_t>();
  p.t_wait = std::chrono::minutes(j.at("t_wait_min").get<long>());
  p.f_q = j.at("f_q").get<std::size_t>();
  p.runs_per_topic = j.at("runs_per_topic").get<std::size_t>();
  p.top_n_metric = j.at("top_n_metric").get<std::size_t>();
  return p;
}

std::string header_line(const RunRecord& r) {
  json j{{"schema", kRunLogSchema},
         {"version", kRunLogVersion},
         {"run_id", r.run_id},
         {"topic_id", r.topic_id},
         {"agent_seed", r.agent_seed},
         {"parameters", parameters_to_json(r.parameters)}};
  return j.dump();
}

std::string watch_line(const WatchEvent& e) {
  json j{{"type", "watch"},
         {"phase", to_string(e.phase)},
         {"video_id", e.video_id},
         {"watched_s", e.watched.count()}};
  return j.dump();
}

std::string snapshot_line(const ExposureSnapshot& s) {
  json j{{"type", "snapshot"},
         {"kind", to_string(s.kind)},
         {"phase", to_string(s.phase)},
         {"watch_index", s.watch_index}};
  if (s.query) j["query"] = *s.query;
  json ids = json::array();
  for (const auto& item : s.items) ids.push_back(item.video_id);
  j["items"] = std::move(ids);
  return j.dump();
}

std::string end_line(RunStatus status, std::size_t cursor, const std::string& reason) {
  json j{{"type", "end"}, {"status", to_string(status)}, {"resume_cursor", cursor}};
  if (!reason.empty()) j["reason"] = reason;
  return j.dump();
}

}  // namespace

RunLogWriter::RunLogWriter(const std::filesystem::path& path, const RunRecord& header)
    : path_(path), run_id_(header.run_id), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw Error("cannot open run log '" + path.string() + "' for writing");
  write_line(header_line(header));
}

void RunLogWriter::write_line(const std::string& line) {
  if (finished_) throw Error("run log '" + path_.string() + "' already finished");
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw Error("failed writing run log '" + path_.string() + "'");
}

void RunLogWriter::append_watch(const WatchEvent& event) { write_line(watch_line(event)); }

void RunLogWriter::append_snapshot(const ExposureSnapshot& snapshot) {
  if (snapshot.run_id != run_id_) {
    throw InvalidArgument("snapshot for run '" + snapshot.run_id + "' appended to log of '" +
                          run_id_ + "'");
  }
  validate_snapshot(snapshot);
  write_line(snapshot_line(snapshot));
}

void RunLogWriter::finish(RunStatus status, std::size_t resume_cursor,
                          const std::string& reason) {
  write_line(end_line(status, resume_cursor, reason));
  finished_ = true;
  out_.close();
}

std::string run_record_to_jsonl(const RunRecord& record) {
  for (const auto& s : record.snapshots) {
    if (s.run_id != record.run_id) {
      throw InvalidArgument("snapshot run_id '" + s.run_id + "' differs from record '" +
                            record.run_id + "'");
    }
  }
  std::ostringstream out;
  out << header_line(record) << '\n';

  // Snapshots are grouped by watch_index while keeping their relative order.
  std::size_t next = 0;
  auto emit_snapshots_up_to = [&](std::size_t watch_index) {
    while (next < record.snapshots.size() && record.snapshots[next].watch_index <= watch_index) {
      out << snapshot_line(record.snapshots[next]) << '\n';
      ++next;
    }
  };
  emit_snapshots_up_to(0);
  for (std::size_t i = 0; i < record.watch_sequence.size(); ++i) {
    out << watch_line(record.watch_sequence[i]) << '\n';
    emit_snapshots_up_to(i + 1);
  }
  if (next != record.snapshots.size()) {
    throw InvalidArgument("run " + record.run_id +
                          ": snapshots are not ordered by watch_index or exceed total watches");
  }
  if (record.status != RunStatus::kIncomplete) {
    out << end_line(record.status, record.resume_cursor, record.failure_reason) << '\n';
  }
  return out.str();
}

void write_run_record(const std::filesystem::path& path, const RunRecord& record) {
  const std::string text = run_record_to_jsonl(record);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open run log '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error("failed writing run log '" + path.string() + "'");
}

RunRecord parse_run_record(const std::string& jsonl) {
  std::istringstream in(jsonl);
  std::string line;
  RunRecord record;
  bool have_header = false;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (!have_header) {
        if (j.value("schema", "") != kRunLogSchema) {
          throw ParseError("missing run log schema header");
        }
        if (j.at("version").get<int>() != kRunLogVersion) {
          throw ParseError("unsupported run log version " + j.at("version").dump());
        }
        record.run_id = j.at("run_id").get<std::string>();
        record.topic_id = j.at("topic_id").get<std::string>();
        record.agent_seed = j.at("agent_seed").get<std::uint64_t>();
        record.parameters = parameters_from_json(j.at("parameters"));
        have_header = true;
        continue;
      }
      const std::string type = j.at("type").get<std::string>();
      if (type == "watch") {
        record.watch_sequence.push_back(
            {phase_from_string(j.at("phase").get<std::string>()),
             j.at("video_id").get<std::string>(), Seconds(j.at("watched_s").get<long>())});
      } else if (type == "snapshot") {
        ExposureSnapshot s;
        s.kind = snapshot_kind_from_string(j.at("kind").get<std::string>());
        s.phase = phase_from_string(j.at("phase").get<std::string>());
        s.watch_index = j.at("watch_index").get<std::size_t>();
        if (j.contains("query")) s.query = j.at("query").get<std::string>();
        s.items = rank_items(j.at("items").get<std::vector<std::string>>());
        s.run_id = record.run_id;
        record.snapshots.push_back(std::move(s));
      } else if (type == "end") {
        record.status = run_status_from_string(j.at("status").get<std::string>());
        record.resume_cursor = j.at("resume_cursor").get<std::size_t>();
        record.failure_reason = j.value("reason", "");
      } else {
        throw ParseError("unknown record type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ParseError("run log line " + std::to_string(line_no) + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError("run log line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!have_header) throw ParseError("empty run log");
  if (record.status == RunStatus::kIncomplete) record.resume_cursor = record.watch_sequence.size();
  return record;
}

RunRecord read_run_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot read run log '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_run_record(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<RunRecord> read_run_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw NotFound("records directory '" + dir.string() + "' does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RunRecord> records;
  records.reserve(files.size());
  for (const auto& f : files) records.push_back(read_run_record(f));
  return records;
}

}  // namespace sockaudit
