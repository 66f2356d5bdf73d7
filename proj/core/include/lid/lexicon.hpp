#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lid/corpus.hpp"

namespace lid {

// What dropout removes: whole word types, or token occurrences (a type
// survives if any of its occurrences does).
enum class DropoutUnit { kType, kToken };

struct LexiconOptions {
  bool include_test = true;   // transductive: fold test vocabulary in
  double dropout_rate = 0.0;  // in [0, 1)
  std::uint64_t dropout_seed = 0;
  DropoutUnit dropout_unit = DropoutUnit::kType;
  int margin = 1;
};

// Per-language word-type sets with a confidence-margin decision rule.
struct Lexicon {
  std::vector<LanguageCode> languages;  // insertion order of first sighting
  std::unordered_map<LanguageCode, std::unordered_set<std::string>> vocab;
  int margin = 1;
  bool built_with_test = false;
  double dropout_rate = 0.0;
  std::uint64_t dropout_seed = 0;
  DropoutUnit dropout_unit = DropoutUnit::kType;
  bool lowercase = true;  // normalization applied to words and queries

  std::size_t total_types() const;
  const std::unordered_set<std::string>* words(const LanguageCode& lang) const;
};

// vocab[L] = word types of samples labeled L across the provided splits.
// Dropout removes entries with probability dropout_rate, decided by a
// deterministic hash of (seed, language, word[, occurrence]) so identical
// seeds rebuild identical lexicons. Throws Error on empty train or a rate
// outside [0, 1).
Lexicon build_lexicon(std::span<const LabeledSample> train,
                      std::span<const LabeledSample> test,
                      const LexiconOptions& options, bool lowercase = true);

// Tokens of the normalized text found in vocab[candidates[i]], counted with
// multiplicity. Candidates must exist in the lexicon.
std::vector<std::uint32_t> lex_counts(const Lexicon& lex, std::string_view text,
                                      std::span<const LanguageCode> candidates);

struct LexDecision {
  std::optional<LanguageCode> language;  // empty when not confident
  std::vector<std::uint32_t> counts;     // aligned with group members
};

// Margin rule over group members: answer the top-count language iff its
// count is positive and beats the runner-up by at least lex.margin; a
// singleton group only needs a positive count. Ties yield no answer.
LexDecision lex_predict(const Lexicon& lex, std::string_view text,
                        const LanguageGroup& group);

// Plain-text dump, "language<TAB>word" per line, sorted for determinism.
void export_lexicon(const Lexicon& lex, std::ostream& out);

}  // namespace lid
