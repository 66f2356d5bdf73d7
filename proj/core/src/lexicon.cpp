#include "lid/lexicon.hpp"

#include <algorithm>
#include <ostream>

#include "lid/errors.hpp"
#include "lid/features.hpp"
#include "lid/hash.hpp"

namespace lid {

namespace {

// Uniform variate attached to a (seed, language, word[, occurrence]) key.
// Pure function of its inputs, so rebuilds are exact.
double dropout_variate(std::uint64_t seed, std::string_view lang,
                       std::string_view word, std::uint64_t occurrence) {
  Fnv1a hash;
  hash.update(lang);
  hash.update('\x1f');
  hash.update(word);
  hash.update('\x1f');
  for (int i = 0; i < 8; ++i)
    hash.update(static_cast<char>((occurrence >> (8 * i)) & 0xFF));
  return unit_interval(splitmix64(hash.digest() ^ splitmix64(seed)));
}

}  // namespace

std::size_t Lexicon::total_types() const {
  std::size_t total = 0;
  for (const auto& [lang, words] : vocab) total += words.size();
  return total;
}

const std::unordered_set<std::string>* Lexicon::words(
    const LanguageCode& lang) const {
  auto it = vocab.find(lang);
  return it == vocab.end() ? nullptr : &it->second;
}

Lexicon build_lexicon(std::span<const LabeledSample> train,
                      std::span<const LabeledSample> test,
                      const LexiconOptions& options, bool lowercase) {
  if (train.empty()) throw Error("build_lexicon: no training samples");
  if (options.dropout_rate < 0.0 || options.dropout_rate >= 1.0)
    throw Error("build_lexicon: dropout_rate must be in [0, 1)");
  if (options.margin < 1) throw Error("build_lexicon: margin must be >= 1");

  Lexicon lex;
  lex.margin = options.margin;
  lex.built_with_test = !test.empty();
  lex.dropout_rate = options.dropout_rate;
  lex.dropout_seed = options.dropout_seed;
  lex.dropout_unit = options.dropout_unit;
  lex.lowercase = lowercase;

  const bool token_dropout =
      options.dropout_rate > 0.0 && options.dropout_unit == DropoutUnit::kToken;
  // occurrence index per (language, word), for token-level dropout
  std::unordered_map<std::string, std::uint64_t> occurrence;

  auto add_split = [&](std::span<const LabeledSample> samples) {
    for (const LabeledSample& sample : samples) {
      auto [it, inserted] = lex.vocab.try_emplace(sample.label);
      if (inserted) lex.languages.push_back(sample.label);
      auto& words = it->second;
      for (std::string& word : tokenize(normalize(sample.text, lowercase))) {
        if (token_dropout) {
          const std::uint64_t k = occurrence[sample.label + '\x1f' + word]++;
          if (dropout_variate(options.dropout_seed, sample.label, word, k) <
              options.dropout_rate)
            continue;
        }
        words.insert(std::move(word));
      }
    }
  };
  add_split(train);
  add_split(test);

  if (options.dropout_rate > 0.0 &&
      options.dropout_unit == DropoutUnit::kType) {
    for (auto& [lang, words] : lex.vocab) {
      std::erase_if(words, [&](const std::string& word) {
        return dropout_variate(options.dropout_seed, lang, word, 0) <
               options.dropout_rate;
      });
    }
  }
  return lex;
}

std::vector<std::uint32_t> lex_counts(const Lexicon& lex, std::string_view text,
                                      std::span<const LanguageCode> candidates) {
  std::vector<const std::unordered_set<std::string>*> sets;
  sets.reserve(candidates.size());
  for (const LanguageCode& lang : candidates) {
    const auto* words = lex.words(lang);
    if (!words) throw Error("lex_counts: language '" + lang + "' not in lexicon");
    sets.push_back(words);
  }
  std::vector<std::uint32_t> counts(candidates.size(), 0);
  for (const std::string& token : tokenize(normalize(text, lex.lowercase)))
    for (std::size_t i = 0; i < sets.size(); ++i)
      if (sets[i]->contains(token)) ++counts[i];
  return counts;
}

LexDecision lex_predict(const Lexicon& lex, std::string_view text,
                        const LanguageGroup& group) {
  if (group.members.empty()) throw Error("lex_predict: empty group");
  LexDecision decision;
  decision.counts = lex_counts(lex, text, group.members);

  if (group.members.size() == 1) {
    if (decision.counts[0] > 0) decision.language = group.members[0];
    return decision;
  }

  std::size_t top = 0;
  for (std::size_t i = 1; i < decision.counts.size(); ++i)
    if (decision.counts[i] > decision.counts[top]) top = i;
  std::uint32_t second = 0;
  for (std::size_t i = 0; i < decision.counts.size(); ++i)
    if (i != top) second = std::max(second, decision.counts[i]);

  // Strict argmax beats every tie; the margin then gates confidence.
  if (decision.counts[top] > 0 &&
      decision.counts[top] >= second + static_cast<std::uint32_t>(lex.margin))
    decision.language = group.members[top];
  return decision;
}

void export_lexicon(const Lexicon& lex, std::ostream& out) {
  std::vector<LanguageCode> langs = lex.languages;
  std::sort(langs.begin(), langs.end());
  for (const LanguageCode& lang : langs) {
    const auto* words = lex.words(lang);
    std::vector<std::string_view> sorted(words->begin(), words->end());
    std::sort(sorted.begin(), sorted.end());
    for (std::string_view word : sorted)
      out << lang << '\t' << word << '\n';
  }
}

}  // namespace lid
