#include "lid/eval.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "lid/errors.hpp"

namespace lid {

std::uint64_t EvalReport::total_samples() const {
  std::uint64_t total = 0;
  for (const auto& row : confusion)
    for (std::uint64_t v : row) total += v;
  return total;
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(15) << v;
  return os.str();
}

std::string fixed6(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

template <typename T>
std::string join(const std::vector<T>& values, char sep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << sep;
    os << values[i];
  }
  return os.str();
}

void fill_metadata(EvalReport& report, const StackedModel& model,
                   std::span<const LabeledSample> test) {
  auto& meta = report.run_metadata;
  meta["variant"] = std::string(to_string(model.variant));
  meta["aggregation"] = model.aggregation == Aggregation::kMax ? "max" : "sum";
  meta["fallback_scope"] =
      model.fallback_scope == FallbackScope::kGlobal ? "global" : "group";
  meta["alpha"] = num(model.alpha);
  meta["features.char_orders"] = join(model.features.char_orders, ',');
  meta["features.word_orders"] = join(model.features.word_orders, ',');
  meta["features.num_buckets"] = std::to_string(model.features.num_buckets);
  meta["features.lowercase"] = model.features.lowercase ? "true" : "false";
  meta["languages"] = join(model.languages, ',');
  std::ostringstream groups;
  for (std::size_t g = 0; g < model.groups.size(); ++g) {
    if (g) groups << ';';
    const LanguageGroup& group = model.groups.groups()[g];
    groups << group.name << ':' << join(group.members, ',');
  }
  meta["groups"] = groups.str();
  if (model.lexicon) {
    const Lexicon& lex = *model.lexicon;
    meta["lexicon.include_test"] = lex.built_with_test ? "true" : "false";
    meta["lexicon.dropout_rate"] = num(lex.dropout_rate);
    meta["lexicon.dropout_seed"] = std::to_string(lex.dropout_seed);
    meta["lexicon.dropout_unit"] =
        lex.dropout_unit == DropoutUnit::kToken ? "token" : "type";
    meta["lexicon.margin"] = std::to_string(lex.margin);
    meta["lexicon.total_types"] = std::to_string(lex.total_types());
  }
  meta["test.samples"] = std::to_string(test.size());
  meta["test.checksum"] = hex64(samples_checksum(test));
}

EvalReport evaluate_impl(const StackedModel& model,
                         std::span<const LabeledSample> test,
                         const std::vector<PreparedText>* prepared) {
  if (test.empty()) throw InputError("test set is empty");
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < model.languages.size(); ++i)
    index.emplace(model.languages[i], i);
  for (const LabeledSample& s : test)
    if (!index.contains(s.label))
      throw InputError("unknown gold label '" + s.label + "'");

  const std::size_t k = model.languages.size();
  EvalReport report;
  report.labels = model.languages;
  report.confusion.assign(k, std::vector<std::uint64_t>(k, 0));

  std::uint64_t correct = 0;
  std::uint64_t group_correct = 0;
  std::uint64_t lex_answered = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const LabeledSample& s = test[i];
    const Prediction p = prepared ? classify_prepared(model, (*prepared)[i])
                                  : classify(model, s.text);
    const std::size_t gold = index.at(s.label);
    const std::size_t pred = index.at(p.language);
    ++report.confusion[gold][pred];
    if (gold == pred) ++correct;
    if (p.group == model.groups.group_of(s.label).name) ++group_correct;
    if (p.source == Source::kLexicon && p.lex_confident) ++lex_answered;
  }

  const double total = static_cast<double>(test.size());
  report.accuracy = static_cast<double>(correct) / total;
  report.group_accuracy = static_cast<double>(group_correct) / total;
  report.lexicon_answer_rate = static_cast<double>(lex_answered) / total;

  report.per_class.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::uint64_t support = 0, predicted = 0;
    for (std::size_t j = 0; j < k; ++j) {
      support += report.confusion[c][j];
      predicted += report.confusion[j][c];
    }
    const std::uint64_t tp = report.confusion[c][c];
    ClassMetrics& m = report.per_class[c];
    m.support = support;
    m.precision = predicted ? static_cast<double>(tp) / predicted : 0.0;
    m.recall = support ? static_cast<double>(tp) / support : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
  }

  fill_metadata(report, model, test);
  return report;
}

}  // namespace

EvalReport evaluate(const StackedModel& model,
                    std::span<const LabeledSample> test) {
  return evaluate_impl(model, test, nullptr);
}

std::vector<MatrixSpec> table_variant_specs(const StackOptions& base) {
  auto with = [&base](StackVariant v) {
    StackOptions o = base;
    o.variant = v;
    return o;
  };
  StackOptions dropout = with(StackVariant::kNbLex);
  dropout.lexicon.dropout_rate = 0.5;
  StackOptions sans_test = with(StackVariant::kLexOnly);
  sans_test.lexicon.include_test = false;
  return {
      {"Naive-Bayes only", with(StackVariant::kNbOnly)},
      {"Stacked model (NB)", with(StackVariant::kNbNb)},
      {"Stacked model (lexicon)", with(StackVariant::kNbLex)},
      {"Stacked model (50% lex dropout)", dropout},
      {"Lexicon only", with(StackVariant::kLexOnly)},
      {"Lexicon only (sans test data)", sans_test},
  };
}

std::vector<MatrixResult> run_matrix(const Dataset& dataset, const GroupMap& map,
                                     std::span<const MatrixSpec> specs) {
  std::vector<MatrixResult> results;
  results.reserve(specs.size());
  // Featurization dominates evaluation cost and is identical for rows that
  // share a feature config, so it is computed once per distinct config.
  std::vector<std::pair<FeatureConfig, std::vector<PreparedText>>> caches;
  for (const MatrixSpec& spec : specs) {
    MatrixResult result;
    result.name = spec.name;
    try {
      const StackedModel model = build_stacked(dataset, map, spec.options);
      const std::vector<PreparedText>* prepared = nullptr;
      for (const auto& [config, cache] : caches)
        if (config == model.features) {
          prepared = &cache;
          break;
        }
      if (!prepared) {
        std::vector<PreparedText> cache;
        cache.reserve(dataset.test.size());
        for (const LabeledSample& s : dataset.test)
          cache.push_back(prepare_text(s.text, model.features));
        caches.emplace_back(model.features, std::move(cache));
        prepared = &caches.back().second;
      }
      result.report = evaluate_impl(model, dataset.test, prepared);
    } catch (const Error& e) {
      result.error = e.what();
    }
    results.push_back(std::move(result));
  }
  return results;
}

namespace {

std::string machine_descriptor() {
  std::string cpu = "unknown cpu";
  std::ifstream info("/proc/cpuinfo");
  std::string line;
  while (std::getline(info, line)) {
    if (line.rfind("model name", 0) == 0) {
      const std::size_t colon = line.find(':');
      if (colon != std::string::npos) {
        std::size_t start = line.find_first_not_of(" \t", colon + 1);
        if (start != std::string::npos) cpu = line.substr(start);
      }
      break;
    }
  }
  const unsigned threads = std::thread::hardware_concurrency();
  return cpu + ", " + std::to_string(threads) + " hardware threads";
}

void check_benchmark_input(std::size_t texts, std::uint64_t warmup) {
  if (texts < warmup + 1000)
    throw InputError("benchmark needs at least warmup + 1000 texts (got " +
                     std::to_string(texts) + " for warmup " +
                     std::to_string(warmup) + ")");
}

}  // namespace

BenchReport benchmark(const StackedModel& model,
                      std::span<const std::string> texts,
                      std::uint64_t warmup) {
  check_benchmark_input(texts.size(), warmup);
  for (std::uint64_t i = 0; i < warmup; ++i) classify(model, texts[i]);

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  for (std::size_t i = warmup; i < texts.size(); ++i) classify(model, texts[i]);
  const auto stop = clock::now();

  BenchReport report;
  report.total_samples = texts.size() - warmup;
  report.warmup_discarded = warmup;
  report.wall_time_seconds =
      std::max(std::chrono::duration<double>(stop - start).count(), 1e-9);
  report.requests_per_sec =
      static_cast<double>(report.total_samples) / report.wall_time_seconds;
  report.machine = machine_descriptor();
  return report;
}

BenchReport benchmark_threaded(const StackedModel& model,
                               std::span<const std::string> texts,
                               std::uint64_t warmup, unsigned threads) {
  check_benchmark_input(texts.size(), warmup);
  if (threads == 0) threads = 1;
  for (std::uint64_t i = 0; i < warmup; ++i) classify(model, texts[i]);

  const std::span<const std::string> timed = texts.subspan(warmup);
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  std::vector<std::thread> workers;
  workers.reserve(threads);
  const std::size_t per_worker = (timed.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(timed.size(), t * per_worker);
    const std::size_t end = std::min(timed.size(), begin + per_worker);
    workers.emplace_back([&model, timed, begin, end] {
      for (std::size_t i = begin; i < end; ++i) classify(model, timed[i]);
    });
  }
  for (std::thread& worker : workers) worker.join();
  const auto stop = clock::now();

  BenchReport report;
  report.total_samples = timed.size();
  report.warmup_discarded = warmup;
  report.wall_time_seconds =
      std::max(std::chrono::duration<double>(stop - start).count(), 1e-9);
  report.requests_per_sec =
      static_cast<double>(report.total_samples) / report.wall_time_seconds;
  report.machine = machine_descriptor() + ", " + std::to_string(threads) +
                   " worker threads";
  return report;
}

void write_report_text(std::ostream& out, const EvalReport& report) {
  out << std::fixed << std::setprecision(4);
  out << "accuracy             " << report.accuracy << "  ("
      << std::setprecision(2) << 100.0 * report.accuracy << "%)\n"
      << std::setprecision(4);
  out << "group accuracy       " << report.group_accuracy << '\n';
  out << "lexicon answer rate  " << report.lexicon_answer_rate << '\n';
  out << "samples              " << report.total_samples() << '\n';
  out << '\n';

  std::size_t width = 5;
  for (const LanguageCode& label : report.labels)
    width = std::max(width, label.size());
  out << std::left << std::setw(static_cast<int>(width)) << "class"
      << std::right << std::setw(11) << "precision" << std::setw(11)
      << "recall" << std::setw(11) << "f1" << std::setw(11) << "support"
      << '\n';
  for (std::size_t c = 0; c < report.labels.size(); ++c) {
    const ClassMetrics& m = report.per_class[c];
    out << std::left << std::setw(static_cast<int>(width)) << report.labels[c]
        << std::right << std::setw(11) << m.precision << std::setw(11)
        << m.recall << std::setw(11) << m.f1 << std::setw(11) << m.support
        << '\n';
  }
  out << '\n';
  for (const auto& [key, value] : report.run_metadata)
    out << key << " = " << value << '\n';
}

void write_report_tsv(std::ostream& out, const EvalReport& report) {
  out << "accuracy\t" << fixed6(report.accuracy) << '\n';
  out << "group_accuracy\t" << fixed6(report.group_accuracy) << '\n';
  out << "lexicon_answer_rate\t" << fixed6(report.lexicon_answer_rate) << '\n';
  out << "samples\t" << report.total_samples() << '\n';
  for (std::size_t c = 0; c < report.labels.size(); ++c) {
    const LanguageCode& label = report.labels[c];
    const ClassMetrics& m = report.per_class[c];
    out << "precision." << label << '\t' << fixed6(m.precision) << '\n';
    out << "recall." << label << '\t' << fixed6(m.recall) << '\n';
    out << "f1." << label << '\t' << fixed6(m.f1) << '\n';
    out << "support." << label << '\t' << m.support << '\n';
  }
  for (const auto& [key, value] : report.run_metadata)
    out << "meta." << key << '\t' << value << '\n';
}

void write_confusion_csv(std::ostream& out, const EvalReport& report) {
  out << "gold\\predicted";
  for (const LanguageCode& label : report.labels) out << ',' << label;
  out << '\n';
  for (std::size_t g = 0; g < report.labels.size(); ++g) {
    out << report.labels[g];
    for (std::uint64_t v : report.confusion[g]) out << ',' << v;
    out << '\n';
  }
}

std::span<const ReferenceRow> published_reference() {
  static constexpr std::array<ReferenceRow, 6> kRows{{
      {"Naive-Bayes only", 94.36, 94.98, 91.89},
      {"Stacked model (NB)", 94.41, 95.23, 91.96},
      {"Stacked model (lexicon)", 96.12, 99.34, 98.70},
      {"Stacked model (50% lex dropout)", 94.90, 98.06, 96.21},
      {"Lexicon only", 82.88, 97.86, 93.56},
      {"Lexicon only (sans test data)", 75.39, 81.57, 69.74},
  }};
  return kRows;
}

std::span<const ThroughputReference> published_throughput() {
  static constexpr std::array<ThroughputReference, 4> kRows{{
      {"fasttext (Joulin et al. 2017)", 44000.0},
      {"Duvenhage et al. 2017", 2.3},
      {"Kocmi & Bojar 2017", 0.75},
      {"reference implementation of this design (sklearn)", 7.4},
  }};
  return kRows;
}

}  // namespace lid
