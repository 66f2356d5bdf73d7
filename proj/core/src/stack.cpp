#include "lid/stack.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "binio.hpp"
#include "lid/errors.hpp"
#include "lid/hash.hpp"

namespace lid {

namespace {

constexpr char kMagic[4] = {'L', 'I', 'D', 'M'};

bool needs_router(StackVariant v) { return v != StackVariant::kLexOnly; }
bool needs_lexicon(StackVariant v) {
  return v == StackVariant::kNbLex || v == StackVariant::kLexOnly;
}

Prediction nb_prediction(const StackedModel& model, LanguageCode language,
                         std::string group, std::vector<double> scores) {
  Prediction p;
  p.language = std::move(language);
  p.group = std::move(group);
  p.source = Source::kNb;
  p.lex_confident = false;
  p.scores = std::move(scores);
  (void)model;
  return p;
}

}  // namespace

const NBModel* StackedModel::group_model(const std::string& group_name) const {
  for (const auto& [name, model] : group_models)
    if (name == group_name) return &model;
  return nullptr;
}

StackedModel build_stacked(const Dataset& dataset, const GroupMap& map,
                           const StackOptions& options) {
  options.features.validate();
  if (dataset.train.empty()) throw TrainError("dataset has no training samples");
  for (const LanguageCode& lang : dataset.languages)
    if (!map.contains(lang))
      throw TrainError("dataset language '" + lang + "' not in group map");

  StackedModel model;
  model.variant = options.variant;
  model.aggregation = options.aggregation;
  model.fallback_scope = options.fallback_scope;
  model.features = options.features;
  model.alpha = options.alpha;
  model.groups = map.restricted_to(dataset.languages);
  model.languages = model.groups.languages();

  if (needs_router(options.variant)) {
    try {
      model.router = train_nb(std::span<const LabeledSample>(dataset.train),
                              options.features, options.alpha);
    } catch (const Error& e) {
      throw TrainError(std::string("router: ") + e.what());
    }
  }

  if (options.variant == StackVariant::kNbNb) {
    for (const LanguageGroup& group : model.groups.groups()) {
      if (group.members.size() < 2) continue;
      std::unordered_set<std::string_view> members(group.members.begin(),
                                                   group.members.end());
      std::vector<LabeledSample> subset;
      for (const LabeledSample& s : dataset.train)
        if (members.contains(s.label)) subset.push_back(s);
      try {
        model.group_models.emplace_back(
            group.name, train_nb(std::span<const LabeledSample>(subset),
                                 options.features, options.alpha));
      } catch (const Error& e) {
        throw TrainError("group model '" + group.name + "': " + e.what());
      }
    }
  }

  if (needs_lexicon(options.variant)) {
    const std::span<const LabeledSample> test_split =
        options.lexicon.include_test
            ? std::span<const LabeledSample>(dataset.test)
            : std::span<const LabeledSample>();
    try {
      model.lexicon = build_lexicon(dataset.train, test_split, options.lexicon,
                                    options.features.lowercase);
    } catch (const Error& e) {
      throw TrainError(std::string("lexicon: ") + e.what());
    }
    // Candidates at inference time are group members; make sure every task
    // language resolves even if it never contributed a word.
    for (const LanguageCode& lang : model.languages) {
      auto [it, inserted] = model.lexicon->vocab.try_emplace(lang);
      if (inserted) model.lexicon->languages.push_back(lang);
    }
  }
  return model;
}

PreparedText prepare_text(std::string_view text, const FeatureConfig& config) {
  PreparedText prepared;
  prepared.normalized = normalize(text, config.lowercase);
  if (prepared.normalized.empty())
    throw InputError("cannot classify empty text");
  prepared.features = featurize_normalized(prepared.normalized, config);
  return prepared;
}

Prediction classify_prepared(const StackedModel& model,
                             const PreparedText& text) {
  if (text.normalized.empty()) throw InputError("cannot classify empty text");

  if (model.variant == StackVariant::kLexOnly) {
    LanguageGroup all{"all", model.languages};
    LexDecision decision = lex_predict(*model.lexicon, text.normalized, all);
    Prediction p;
    p.source = Source::kLexicon;
    if (decision.language) {
      p.language = *decision.language;
      p.lex_confident = true;
    } else {
      p.language = model.languages.front();  // fixed-order fallback
      p.lex_confident = false;
    }
    p.group = model.groups.group_of(p.language).name;
    return p;
  }

  const NBModel& router = *model.router;
  std::vector<double> scores = score(router, text.features);

  if (model.variant == StackVariant::kNbOnly) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c)
      if (scores[c] > scores[best]) best = c;
    const LanguageCode& lang = router.classes[best];
    return nb_prediction(model, lang, model.groups.group_of(lang).name,
                         std::move(scores));
  }

  const LanguageGroup* group = nullptr;
  if (model.aggregation == Aggregation::kMax) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c)
      if (scores[c] > scores[best]) best = c;
    group = &model.groups.group_of(router.classes[best]);
  } else {
    const std::vector<double> post = posteriors_from_scores(scores);
    double best_mass = -1.0;
    for (const LanguageGroup& g : model.groups.groups()) {
      double mass = 0.0;
      for (const LanguageCode& lang : g.members)
        if (auto c = router.class_index(lang)) mass += post[*c];
      if (mass > best_mass) {
        best_mass = mass;
        group = &g;
      }
    }
  }

  if (group->members.size() == 1)
    return nb_prediction(model, group->members.front(), group->name,
                         std::move(scores));

  if (model.variant == StackVariant::kNbLex) {
    LexDecision decision =
        lex_predict(*model.lexicon, text.normalized, *group);
    if (decision.language) {
      Prediction p;
      p.language = *decision.language;
      p.group = group->name;
      p.source = Source::kLexicon;
      p.lex_confident = true;
      p.scores = std::move(scores);
      return p;
    }
    // Not confident: fall back to the router.
    if (model.fallback_scope == FallbackScope::kGlobal) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < scores.size(); ++c)
        if (scores[c] > scores[best]) best = c;
      const LanguageCode& lang = router.classes[best];
      // A global fallback may answer outside the routed group; the reported
      // group always follows the predicted language.
      return nb_prediction(model, lang, model.groups.group_of(lang).name,
                           std::move(scores));
    }
    LanguageCode lang = predict_within(router, text.features, *group);
    return nb_prediction(model, std::move(lang), group->name,
                         std::move(scores));
  }

  // kNbNb: resolve inside the group with its dedicated model.
  const NBModel* resolver = model.group_model(group->name);
  LanguageCode lang = resolver
                          ? predict_within(*resolver, text.features, *group)
                          : predict_within(router, text.features, *group);
  return nb_prediction(model, std::move(lang), group->name, std::move(scores));
}

Prediction classify(const StackedModel& model, std::string_view text) {
  return classify_prepared(model, prepare_text(text, model.features));
}

std::string_view to_string(StackVariant variant) {
  switch (variant) {
    case StackVariant::kNbOnly: return "nb";
    case StackVariant::kNbNb: return "nb+nb";
    case StackVariant::kNbLex: return "nb+lex";
    case StackVariant::kLexOnly: return "lex";
  }
  return "?";
}

std::string_view to_string(Source source) {
  return source == Source::kLexicon ? "LEXICON" : "NB";
}

std::optional<StackVariant> parse_variant(std::string_view name) {
  if (name == "nb") return StackVariant::kNbOnly;
  if (name == "nb+nb") return StackVariant::kNbNb;
  if (name == "nb+lex") return StackVariant::kNbLex;
  if (name == "lex") return StackVariant::kLexOnly;
  return std::nullopt;
}

// --- persistence ---

namespace {

void write_feature_config(detail::BinaryWriter& w, const FeatureConfig& c) {
  w.u32(static_cast<std::uint32_t>(c.char_orders.size()));
  for (int n : c.char_orders) w.u32(static_cast<std::uint32_t>(n));
  w.u32(static_cast<std::uint32_t>(c.word_orders.size()));
  for (int n : c.word_orders) w.u32(static_cast<std::uint32_t>(n));
  w.u32(c.num_buckets);
  w.u8(c.lowercase ? 1 : 0);
}

FeatureConfig read_feature_config(detail::BinaryReader& r) {
  FeatureConfig c;
  c.char_orders.clear();
  c.word_orders.clear();
  for (std::uint32_t i = 0, n = r.u32(); i < n; ++i)
    c.char_orders.push_back(static_cast<int>(r.u32()));
  for (std::uint32_t i = 0, n = r.u32(); i < n; ++i)
    c.word_orders.push_back(static_cast<int>(r.u32()));
  c.num_buckets = r.u32();
  c.lowercase = r.u8() != 0;
  return c;
}

void write_nb(detail::BinaryWriter& w, const NBModel& m) {
  const std::size_t num_classes = m.classes.size();
  w.u32(static_cast<std::uint32_t>(num_classes));
  for (const auto& c : m.classes) w.str(c);
  for (double v : m.log_prior) w.f64(v);
  for (double v : m.unseen_log_likelihood) w.f64(v);
  w.f64(m.alpha);
  w.u32(m.num_buckets);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> rows(
      m.bucket_row.begin(), m.bucket_row.end());
  std::sort(rows.begin(), rows.end());
  w.u32(static_cast<std::uint32_t>(rows.size()));
  for (const auto& [bucket, row] : rows) {
    w.u32(bucket);
    const double* values = m.likelihood_rows.data() +
                           static_cast<std::size_t>(row) * num_classes;
    for (std::size_t c = 0; c < num_classes; ++c) w.f64(values[c]);
  }
}

NBModel read_nb(detail::BinaryReader& r, const FeatureConfig& config) {
  NBModel m;
  const std::uint32_t num_classes = r.u32();
  for (std::uint32_t c = 0; c < num_classes; ++c) m.classes.push_back(r.str());
  for (std::uint32_t c = 0; c < num_classes; ++c) m.log_prior.push_back(r.f64());
  for (std::uint32_t c = 0; c < num_classes; ++c)
    m.unseen_log_likelihood.push_back(r.f64());
  m.alpha = r.f64();
  m.num_buckets = r.u32();
  m.feature_config = config;
  const std::uint32_t num_rows = r.u32();
  m.bucket_row.reserve(num_rows);
  m.likelihood_rows.resize(static_cast<std::size_t>(num_rows) * num_classes);
  for (std::uint32_t row = 0; row < num_rows; ++row) {
    const std::uint32_t bucket = r.u32();
    m.bucket_row.emplace(bucket, row);
    for (std::uint32_t c = 0; c < num_classes; ++c)
      m.likelihood_rows[static_cast<std::size_t>(row) * num_classes + c] =
          r.f64();
  }
  return m;
}

void write_lexicon(detail::BinaryWriter& w, const Lexicon& lex) {
  w.u32(static_cast<std::uint32_t>(lex.languages.size()));
  for (const LanguageCode& lang : lex.languages) {
    w.str(lang);
    const auto* words = lex.words(lang);
    std::vector<std::string_view> sorted(words->begin(), words->end());
    std::sort(sorted.begin(), sorted.end());
    w.u32(static_cast<std::uint32_t>(sorted.size()));
    for (std::string_view word : sorted) w.str(word);
  }
  w.u32(static_cast<std::uint32_t>(lex.margin));
  w.u8(lex.built_with_test ? 1 : 0);
  w.f64(lex.dropout_rate);
  w.u64(lex.dropout_seed);
  w.u8(lex.dropout_unit == DropoutUnit::kToken ? 1 : 0);
  w.u8(lex.lowercase ? 1 : 0);
}

Lexicon read_lexicon(detail::BinaryReader& r) {
  Lexicon lex;
  const std::uint32_t num_langs = r.u32();
  for (std::uint32_t i = 0; i < num_langs; ++i) {
    LanguageCode lang = r.str();
    auto& words = lex.vocab[lang];
    const std::uint32_t num_words = r.u32();
    words.reserve(num_words);
    for (std::uint32_t k = 0; k < num_words; ++k) words.insert(r.str());
    lex.languages.push_back(std::move(lang));
  }
  lex.margin = static_cast<int>(r.u32());
  lex.built_with_test = r.u8() != 0;
  lex.dropout_rate = r.f64();
  lex.dropout_seed = r.u64();
  lex.dropout_unit = r.u8() ? DropoutUnit::kToken : DropoutUnit::kType;
  lex.lowercase = r.u8() != 0;
  return lex;
}

void write_groups(detail::BinaryWriter& w, const GroupMap& map) {
  w.u32(static_cast<std::uint32_t>(map.size()));
  for (const LanguageGroup& group : map.groups()) {
    w.str(group.name);
    w.u32(static_cast<std::uint32_t>(group.members.size()));
    for (const LanguageCode& lang : group.members) w.str(lang);
  }
}

GroupMap read_groups(detail::BinaryReader& r) {
  std::vector<LanguageGroup> groups;
  const std::uint32_t num_groups = r.u32();
  for (std::uint32_t g = 0; g < num_groups; ++g) {
    LanguageGroup group;
    group.name = r.str();
    const std::uint32_t num_members = r.u32();
    for (std::uint32_t m = 0; m < num_members; ++m)
      group.members.push_back(r.str());
    groups.push_back(std::move(group));
  }
  return GroupMap(std::move(groups));
}

}  // namespace

void save_model(const StackedModel& model, std::ostream& out) {
  std::string payload;
  detail::BinaryWriter w(payload);
  w.u8(static_cast<std::uint8_t>(model.variant));
  w.u8(static_cast<std::uint8_t>(model.aggregation));
  w.u8(static_cast<std::uint8_t>(model.fallback_scope));
  write_feature_config(w, model.features);
  w.f64(model.alpha);
  write_groups(w, model.groups);
  w.u32(static_cast<std::uint32_t>(model.languages.size()));
  for (const LanguageCode& lang : model.languages) w.str(lang);
  w.u8(model.router.has_value() ? 1 : 0);
  if (model.router) write_nb(w, *model.router);
  w.u32(static_cast<std::uint32_t>(model.group_models.size()));
  for (const auto& [name, nb] : model.group_models) {
    w.str(name);
    write_nb(w, nb);
  }
  w.u8(model.lexicon.has_value() ? 1 : 0);
  if (model.lexicon) write_lexicon(w, *model.lexicon);

  std::string header;
  detail::BinaryWriter h(header);
  header.append(kMagic, sizeof(kMagic));
  h.u32(kModelFormatVersion);
  h.u64(payload.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  std::string footer;
  detail::BinaryWriter f(footer);
  f.u64(fnv1a64(payload));
  out.write(footer.data(), static_cast<std::streamsize>(footer.size()));
  if (!out) throw ModelIoError("failed writing model stream");
}

void save_model_file(const StackedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelIoError("cannot open model file for writing: " + path);
  save_model(model, out);
}

StackedModel load_model(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string data = buffer.str();

  detail::BinaryReader head(data);
  if (data.size() < sizeof(kMagic) + 12)
    throw ModelIoError("model file truncated or malformed");
  char magic[4];
  for (char& c : magic) c = static_cast<char>(head.u8());
  if (std::string_view(magic, 4) != std::string_view(kMagic, 4))
    throw ModelIoError("not a model file (bad magic)");
  const std::uint32_t version = head.u32();
  if (version != kModelFormatVersion)
    throw ModelIoError("unsupported model format version " +
                       std::to_string(version) + " (expected " +
                       std::to_string(kModelFormatVersion) + ")");
  const std::uint64_t payload_size = head.u64();
  const std::size_t header_size = sizeof(kMagic) + 12;
  if (data.size() != header_size + payload_size + 8)
    throw ModelIoError("model file truncated or malformed");
  const std::string_view payload(data.data() + header_size, payload_size);

  detail::BinaryReader foot(
      std::string_view(data).substr(header_size + payload_size));
  if (foot.u64() != fnv1a64(payload))
    throw ModelIoError("model file checksum mismatch");

  detail::BinaryReader r(payload);
  StackedModel model;
  const std::uint8_t variant = r.u8();
  if (variant > static_cast<std::uint8_t>(StackVariant::kLexOnly))
    throw ModelIoError("model file corrupt: unknown variant");
  model.variant = static_cast<StackVariant>(variant);
  model.aggregation = r.u8() ? Aggregation::kMax : Aggregation::kSum;
  model.fallback_scope = r.u8() ? FallbackScope::kGlobal : FallbackScope::kGroup;
  model.features = read_feature_config(r);
  model.alpha = r.f64();
  model.groups = read_groups(r);
  for (std::uint32_t i = 0, n = r.u32(); i < n; ++i)
    model.languages.push_back(r.str());
  if (r.u8()) model.router = read_nb(r, model.features);
  for (std::uint32_t i = 0, n = r.u32(); i < n; ++i) {
    std::string name = r.str();
    model.group_models.emplace_back(std::move(name),
                                    read_nb(r, model.features));
  }
  if (r.u8()) model.lexicon = read_lexicon(r);
  if (!r.exhausted())
    throw ModelIoError("model file corrupt: trailing payload bytes");

  if (needs_router(model.variant) && !model.router)
    throw ModelIoError("model file corrupt: variant requires a router");
  if (needs_lexicon(model.variant) && !model.lexicon)
    throw ModelIoError("model file corrupt: variant requires a lexicon");
  return model;
}

StackedModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelIoError("cannot open model file: " + path);
  return load_model(in);
}

}  // namespace lid
