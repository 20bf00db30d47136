#include "sockaudit/classifier/features.hpp"

#include <cctype>
#include <cmath>

#include "sockaudit/core/errors.hpp"

namespace sockaudit::classifier {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::uint64_t token_hash(std::string_view token) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : token) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

std::vector<double> featurize_text(std::string_view text, std::size_t dims) {
  std::vector<double> block(dims, 0.0);
  for (const auto& token : tokenize(text)) block[token_hash(token) % dims] += 1.0;
  double norm = 0.0;
  for (double v : block) norm += v * v;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& v : block) v /= norm;
  }
  return block;
}

FeatureVector featurize(const VideoRecord& video, std::span<const std::string> comments,
                        const FeatureConfig& config) {
  if (config.dims_per_channel == 0) throw InvalidArgument("dims_per_channel must be positive");
  std::string snippet = video.title;
  if (!video.description.empty()) {
    if (!snippet.empty()) snippet.push_back(' ');
    snippet += video.description;
  }
  std::string comment_text;
  for (const auto& c : comments) {
    comment_text += c;
    comment_text.push_back(' ');
  }
  const std::string_view channels[kChannelCount] = {snippet, video.transcript, comment_text};

  FeatureVector features;
  features.reserve(config.total_dims());
  bool any = false;
  for (auto text : channels) {
    auto block = featurize_text(text, config.dims_per_channel);
    for (double v : block) any = any || v != 0.0;
    features.insert(features.end(), block.begin(), block.end());
  }
  if (!any) throw Unfeaturizable("video " + video.video_id + " has no usable text");
  return features;
}

}  // namespace sockaudit::classifier
