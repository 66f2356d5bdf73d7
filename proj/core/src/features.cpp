#include "lid/features.hpp"

#include <algorithm>
#include <bit>

#include "lid/errors.hpp"
#include "lid/hash.hpp"
#include "utf8.hpp"

namespace lid {

namespace {

// Namespace tag hashed before the n-gram bytes: "c4|", "w2|", ...
std::uint64_t tag_state(char kind, int order) {
  Fnv1a hash;
  hash.update(kind);
  char digits[12];
  int i = 0;
  do {
    digits[i++] = static_cast<char>('0' + order % 10);
    order /= 10;
  } while (order > 0);
  while (i > 0) hash.update(digits[--i]);
  hash.update('|');
  return hash.digest();
}

std::vector<std::string_view> token_views(std::string_view normalized) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < normalized.size()) {
    auto space = normalized.find(' ', pos);
    if (space == std::string_view::npos) space = normalized.size();
    if (space > pos) tokens.push_back(normalized.substr(pos, space - pos));
    pos = space + 1;
  }
  return tokens;
}

}  // namespace

void FeatureConfig::validate() const {
  if (char_orders.empty() && word_orders.empty())
    throw Error("feature config: at least one n-gram order is required");
  for (int n : char_orders)
    if (n < 1) throw Error("feature config: char order must be >= 1");
  for (int n : word_orders)
    if (n < 1) throw Error("feature config: word order must be >= 1");
  if (num_buckets < 2 || !std::has_single_bit(num_buckets))
    throw Error("feature config: num_buckets must be a power of two >= 2");
}

std::uint64_t FeatureVector::total_count() const {
  std::uint64_t total = 0;
  for (const auto& [bucket, count] : entries) total += count;
  return total;
}

std::string normalize(std::string_view text, bool lowercase) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  bool at_start = true;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto [cp, length] = utf8::decode(text, pos);
    pos += length;
    if (utf8::is_space(cp)) {
      pending_space = !at_start;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    utf8::encode(lowercase ? utf8::to_lower(cp) : cp, out);
    at_start = false;
  }
  return out;
}

std::string normalize(std::string_view text, const FeatureConfig& config) {
  return normalize(text, config.lowercase);
}

std::vector<std::string> tokenize(std::string_view normalized_text) {
  std::vector<std::string> tokens;
  for (std::string_view tok : token_views(normalized_text))
    tokens.emplace_back(tok);
  return tokens;
}

std::vector<std::string> char_ngrams(std::string_view normalized_text, int n) {
  if (n < 1) throw Error("char_ngrams: n must be >= 1");
  const auto offs = utf8::codepoint_offsets(normalized_text);
  const std::size_t len = offs.size() - 1;
  std::vector<std::string> grams;
  if (len < static_cast<std::size_t>(n)) return grams;
  grams.reserve(len - n + 1);
  for (std::size_t i = 0; i + n <= len; ++i)
    grams.emplace_back(normalized_text.substr(offs[i], offs[i + n] - offs[i]));
  return grams;
}

std::vector<std::string> word_ngrams(std::string_view normalized_text, int n) {
  if (n < 1) throw Error("word_ngrams: n must be >= 1");
  const auto tokens = token_views(normalized_text);
  std::vector<std::string> grams;
  if (tokens.size() < static_cast<std::size_t>(n)) return grams;
  grams.reserve(tokens.size() - n + 1);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string gram(tokens[i]);
    for (std::size_t j = 1; j < static_cast<std::size_t>(n); ++j) {
      gram.push_back(' ');
      gram.append(tokens[i + j]);
    }
    grams.push_back(std::move(gram));
  }
  return grams;
}

FeatureVector featurize(std::string_view text, const FeatureConfig& config) {
  return featurize_normalized(normalize(text, config.lowercase), config);
}

FeatureVector featurize_normalized(std::string_view normalized_text,
                                   const FeatureConfig& config) {
  config.validate();
  const std::uint32_t mask = config.num_buckets - 1;
  std::vector<std::uint32_t> buckets;

  if (!normalized_text.empty()) {
    const auto offs = utf8::codepoint_offsets(normalized_text);
    const std::size_t len = offs.size() - 1;
    for (int n : config.char_orders) {
      if (len < static_cast<std::size_t>(n)) continue;
      const std::uint64_t tag = tag_state('c', n);
      for (std::size_t i = 0; i + n <= len; ++i) {
        const std::uint64_t h = fnv1a64(
            normalized_text.substr(offs[i], offs[i + n] - offs[i]), tag);
        buckets.push_back(static_cast<std::uint32_t>(h) & mask);
      }
    }
    const auto tokens = token_views(normalized_text);
    for (int n : config.word_orders) {
      if (tokens.size() < static_cast<std::size_t>(n)) continue;
      const std::uint64_t tag = tag_state('w', n);
      for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::uint64_t h = fnv1a64(tokens[i], tag);
        for (std::size_t j = 1; j < static_cast<std::size_t>(n); ++j) {
          h = fnv1a64(" ", h);
          h = fnv1a64(tokens[i + j], h);
        }
        buckets.push_back(static_cast<std::uint32_t>(h) & mask);
      }
    }
  }

  std::sort(buckets.begin(), buckets.end());
  FeatureVector fv;
  for (std::size_t i = 0; i < buckets.size();) {
    std::size_t j = i;
    while (j < buckets.size() && buckets[j] == buckets[i]) ++j;
    fv.entries.emplace_back(buckets[i], static_cast<std::uint32_t>(j - i));
    i = j;
  }
  return fv;
}

}  // namespace lid
