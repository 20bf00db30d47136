#include "sockaudit/annotation/labels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "sockaudit/core/errors.hpp"

namespace sockaudit::annotation {
namespace {

constexpr const char* kHeader =
    "video_id\tcode\tannotator_id\tsource\tconfidence\ttimestamp\tsecond_opinion";

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, '\t')) fields.push_back(field);
  if (!line.empty() && line.back() == '\t') fields.emplace_back();
  return fields;
}

std::string format_confidence(double c) {
  std::ostringstream out;
  out.precision(17);
  out << c;
  return out.str();
}

std::string to_line(const LabelRecord& r) {
  std::ostringstream out;
  out << r.video_id << '\t' << r.code.value() << '\t' << r.annotator_id << '\t'
      << (r.source == LabelSource::kManual ? "manual" : "predicted") << '\t'
      << (r.confidence ? format_confidence(*r.confidence) : "") << '\t' << r.timestamp << '\t'
      << (r.second_opinion ? 1 : 0);
  return out.str();
}

LabelRecord parse_line(const std::string& line, std::size_t line_no) {
  auto fields = split_tabs(line);
  auto fail = [&](const std::string& what) {
    return ParseError("label table line " + std::to_string(line_no) + ": " + what);
  };
  if (fields.size() != 7) throw fail("expected 7 fields, got " + std::to_string(fields.size()));
  LabelRecord r;
  r.video_id = fields[0];
  try {
    r.code = AnnotationCode(std::stoi(fields[1]));
    if (fields[3] == "manual") {
      r.source = LabelSource::kManual;
    } else if (fields[3] == "predicted") {
      r.source = LabelSource::kPredicted;
    } else {
      throw fail("unknown source '" + fields[3] + "'");
    }
    if (!fields[4].empty()) r.confidence = std::stod(fields[4]);
    r.timestamp = std::stoull(fields[5]);
    r.second_opinion = fields[6] == "1";
  } catch (const std::logic_error& e) {
    throw fail(std::string("bad number: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw fail(e.what());
  }
  r.annotator_id = fields[2];
  try {
    validate_label(r);
  } catch (const InvalidArgument& e) {
    throw fail(e.what());
  }
  return r;
}

std::optional<Stance> stance_of_prediction(const LabelRecord& r, const ResolutionPolicy& policy) {
  auto stance = map_code_to_stance(r.code);
  if (stance == Stance::kPromoting && r.confidence.value_or(0.0) < policy.decision_threshold) {
    if (policy.fallback == BelowThresholdFallback::kNeutral) return Stance::kNeutral;
    return std::nullopt;
  }
  return stance;
}

// Later of two records by (timestamp, position).
bool later(const LabelRecord* a, std::size_t pos_a, const LabelRecord* b, std::size_t pos_b) {
  if (a->timestamp != b->timestamp) return a->timestamp > b->timestamp;
  return pos_a > pos_b;
}

std::optional<Stance> resolve_matching(const std::vector<const LabelRecord*>& matching,
                                       const ResolutionPolicy& policy) {
  const LabelRecord* best_manual = nullptr;
  std::size_t best_manual_pos = 0;
  const LabelRecord* best_predicted = nullptr;
  std::size_t best_predicted_pos = 0;
  for (std::size_t i = 0; i < matching.size(); ++i) {
    const LabelRecord* r = matching[i];
    if (r->source == LabelSource::kManual) {
      bool take = best_manual == nullptr;
      if (!take) {
        if (r->second_opinion != best_manual->second_opinion) {
          take = r->second_opinion;
        } else {
          take = later(r, i, best_manual, best_manual_pos);
        }
      }
      if (take) {
        best_manual = r;
        best_manual_pos = i;
      }
    } else if (best_predicted == nullptr || later(r, i, best_predicted, best_predicted_pos)) {
      best_predicted = r;
      best_predicted_pos = i;
    }
  }
  if (best_manual) return map_code_to_stance(best_manual->code);
  return stance_of_prediction(*best_predicted, policy);
}

}  // namespace

void validate_label(const LabelRecord& r) {
  if (r.video_id.empty()) throw InvalidArgument("label record without video_id");
  if (r.source == LabelSource::kManual && r.confidence) {
    throw InvalidArgument("manual label for " + r.video_id + " carries a confidence");
  }
  if (r.source == LabelSource::kPredicted) {
    if (!r.confidence) {
      throw InvalidArgument("predicted label for " + r.video_id + " has no confidence");
    }
    if (!(*r.confidence >= 0.0 && *r.confidence <= 1.0)) {
      throw InvalidArgument("predicted label for " + r.video_id + " has confidence outside [0,1]");
    }
  }
}

std::optional<Stance> resolve_label(const VideoId& video_id, std::span<const LabelRecord> records,
                                    const ResolutionPolicy& policy) {
  std::vector<const LabelRecord*> matching;
  for (const auto& r : records) {
    if (r.video_id == video_id) matching.push_back(&r);
  }
  if (matching.empty()) throw MissingLabel("no label records for video " + video_id);
  return resolve_matching(matching, policy);
}

void LabelStore::add(LabelRecord record) {
  validate_label(record);
  index_[record.video_id].push_back(records_.size());
  max_timestamp_ = std::max(max_timestamp_, record.timestamp);
  records_.push_back(std::move(record));
}

std::vector<LabelRecord> LabelStore::records_for(const VideoId& video_id) const {
  std::vector<LabelRecord> out;
  auto it = index_.find(video_id);
  if (it == index_.end()) return out;
  for (auto i : it->second) out.push_back(records_[i]);
  return out;
}

ResolvedLabels LabelStore::resolve(const ResolutionPolicy& policy) const {
  ResolvedLabels resolved;
  resolved.reserve(index_.size());
  std::vector<const LabelRecord*> matching;
  for (const auto& [id, positions] : index_) {
    matching.clear();
    for (auto i : positions) matching.push_back(&records_[i]);
    resolved.emplace(id, resolve_matching(matching, policy));
  }
  return resolved;
}

LabelStore LabelStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot read label table '" + path.string() + "'");
  LabelStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kHeader) throw ParseError(path.string() + ": unexpected label table header");
      continue;
    }
    store.add(parse_line(line, line_no));
  }
  return store;
}

void LabelStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write label table '" + path.string() + "'");
  out << kHeader << '\n';
  for (const auto& r : records_) out << to_line(r) << '\n';
  if (!out) throw Error("failed writing label table '" + path.string() + "'");
}

void LabelStore::append(const std::filesystem::path& path, std::span<const LabelRecord> records) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot append to label table '" + path.string() + "'");
  if (fresh) out << kHeader << '\n';
  for (const auto& r : records) {
    validate_label(r);
    out << to_line(r) << '\n';
  }
  if (!out) throw Error("failed writing label table '" + path.string() + "'");
}

std::pair<std::vector<AnnotationCode>, std::vector<AnnotationCode>> paired_codes(
    const LabelStore& store, const std::string& annotator_a, const std::string& annotator_b) {
  std::map<VideoId, std::pair<std::optional<LabelRecord>, std::optional<LabelRecord>>> by_video;
  auto keep_latest = [](std::optional<LabelRecord>& slot, const LabelRecord& r) {
    if (!slot || r.timestamp >= slot->timestamp) slot = r;
  };
  for (const auto& r : store.records()) {
    if (r.source != LabelSource::kManual) continue;
    if (r.annotator_id == annotator_a) keep_latest(by_video[r.video_id].first, r);
    if (r.annotator_id == annotator_b) keep_latest(by_video[r.video_id].second, r);
  }
  std::pair<std::vector<AnnotationCode>, std::vector<AnnotationCode>> out;
  for (const auto& [id, pair] : by_video) {
    if (pair.first && pair.second) {
      out.first.push_back(pair.first->code);
      out.second.push_back(pair.second->code);
    }
  }
  return out;
}

}  // namespace sockaudit::annotation
