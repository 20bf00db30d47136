#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sockaudit/core/types.hpp"

namespace sockaudit::classifier {

using FeatureVector = std::vector<double>;

// Channels in concatenation order.
enum class Channel { kSnippet = 0, kTranscript = 1, kComments = 2 };
inline constexpr std::size_t kChannelCount = 3;

struct FeatureConfig {
  std::size_t dims_per_channel = 128;

  std::size_t total_dims() const { return dims_per_channel * kChannelCount; }
};

// Lowercased ASCII-alphanumeric tokens; everything else separates tokens.
std::vector<std::string> tokenize(std::string_view text);

// 64-bit FNV-1a followed by the splitmix64 finalizer. Stable across platforms
// and runs, unlike std::hash.
std::uint64_t token_hash(std::string_view token);

// Hashed bag of tokens for one channel, L2-normalized. Empty text gives the
// zero vector.
std::vector<double> featurize_text(std::string_view text, std::size_t dims);

// Snippet (title + description), transcript and comments blocks, in that
// order. Throws Unfeaturizable when all three channels are empty.
FeatureVector featurize(const VideoRecord& video, std::span<const std::string> comments,
                        const FeatureConfig& config = {});

}  // namespace sockaudit::classifier
