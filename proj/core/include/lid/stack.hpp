#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lid/corpus.hpp"
#include "lid/features.hpp"
#include "lid/lexicon.hpp"
#include "lid/nb.hpp"

namespace lid {

enum class StackVariant : std::uint8_t {
  kNbOnly,   // flat naive Bayes
  kNbNb,     // NB router + per-group NB resolvers
  kNbLex,    // NB router + lexicon resolver, NB fallback
  kLexOnly,  // lexicon over all task languages
};

// Where the NB fallback of kNbLex takes its argmax from.
enum class FallbackScope : std::uint8_t { kGroup, kGlobal };

enum class Source : std::uint8_t { kNb, kLexicon };

struct Prediction {
  LanguageCode language;
  std::string group;  // name of the group `language` belongs to
  Source source = Source::kNb;
  bool lex_confident = false;
  std::vector<double> scores;  // router scores (router class order); may be empty
};

struct StackOptions {
  StackVariant variant = StackVariant::kNbLex;
  FeatureConfig features;
  double alpha = 0.01;
  Aggregation aggregation = Aggregation::kSum;
  FallbackScope fallback_scope = FallbackScope::kGroup;
  LexiconOptions lexicon;
};

// The hierarchical classifier. Immutable once built or loaded; classify()
// is pure and safe to call from any number of threads.
struct StackedModel {
  StackVariant variant = StackVariant::kNbLex;
  Aggregation aggregation = Aggregation::kSum;
  FallbackScope fallback_scope = FallbackScope::kGroup;
  FeatureConfig features;
  double alpha = 0.01;
  GroupMap groups;                      // restricted to task languages
  std::vector<LanguageCode> languages;  // group order, then member order
  std::optional<NBModel> router;
  std::vector<std::pair<std::string, NBModel>> group_models;  // kNbNb only
  std::optional<Lexicon> lexicon;

  const NBModel* group_model(const std::string& group_name) const;
};

// Trains the components the variant needs. The router is a single NB over
// specific labels, reused for both group routing and the NB fallback;
// kNbNb adds one NB per multi-member group trained on that group's samples
// only. Every dataset language must appear in `map`.
StackedModel build_stacked(const Dataset& dataset, const GroupMap& map,
                           const StackOptions& options);

// Routes and resolves one text. Throws InputError when the text is empty
// after normalization.
Prediction classify(const StackedModel& model, std::string_view text);

// Featurization split out so callers classifying the same text under many
// models (the evaluation matrix) can share the work.
struct PreparedText {
  std::string normalized;
  FeatureVector features;
};
PreparedText prepare_text(std::string_view text, const FeatureConfig& config);
Prediction classify_prepared(const StackedModel& model, const PreparedText& text);

// Canonical variant names: "nb", "nb+nb", "nb+lex", "lex".
std::string_view to_string(StackVariant variant);
// Prediction-row spelling: "NB" or "LEXICON".
std::string_view to_string(Source source);
std::optional<StackVariant> parse_variant(std::string_view name);

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Versioned, checksummed binary container. load(save(m)) classifies every
// input bit-identically to m. Corruption, truncation and unknown versions
// all surface as ModelIoError.
void save_model(const StackedModel& model, std::ostream& out);
void save_model_file(const StackedModel& model, const std::string& path);
StackedModel load_model(std::istream& in);
StackedModel load_model_file(const std::string& path);

}  // namespace lid
