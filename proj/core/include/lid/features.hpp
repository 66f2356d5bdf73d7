#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lid {

// N-gram orders and hashing parameters. Serialized into the model file so
// inference always reuses the training-time settings.
struct FeatureConfig {
  std::vector<int> char_orders{2, 4, 6};
  std::vector<int> word_orders{1, 2};
  std::uint32_t num_buckets = 1u << 20;  // power of two
  bool lowercase = true;

  // Throws Error unless all orders are >= 1 and num_buckets is a power of
  // two >= 2.
  void validate() const;

  bool operator==(const FeatureConfig&) const = default;
};

// Sparse bucket -> count map, entries sorted by bucket index.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;

  std::uint64_t total_count() const;
  bool empty() const { return entries.empty(); }

  bool operator==(const FeatureVector&) const = default;
};

// Lowercases (simple one-to-one mapping over the Latin, Greek and Cyrillic
// blocks), collapses whitespace runs to a single space, trims the ends.
// Lengths are measured in Unicode code points throughout; invalid UTF-8
// bytes are carried through unchanged.
std::string normalize(std::string_view text, bool lowercase = true);
std::string normalize(std::string_view text, const FeatureConfig& config);

// Maximal runs of non-space characters of a normalized text.
std::vector<std::string> tokenize(std::string_view normalized_text);

// All contiguous code-point windows of length n, spaces included, with
// multiplicity and in text order. Expects normalized input.
std::vector<std::string> char_ngrams(std::string_view normalized_text, int n);

// All contiguous token windows of length n, joined by a single space.
std::vector<std::string> word_ngrams(std::string_view normalized_text, int n);

// Normalizes, extracts every configured n-gram order, tags each gram with
// its namespace ("c2|", "w1|", ...) and hashes the tagged UTF-8 bytes with
// FNV-1a 64 reduced modulo num_buckets. Counts accumulate across
// collisions. Deterministic across runs and platforms.
FeatureVector featurize(std::string_view text, const FeatureConfig& config);

// Same, for text that has already been through normalize().
FeatureVector featurize_normalized(std::string_view normalized_text,
                                   const FeatureConfig& config);

}  // namespace lid
