#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lid/corpus.hpp"
#include "lid/stack.hpp"

namespace lid {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct EvalReport {
  double accuracy = 0.0;        // micro: trace(confusion) / total
  double group_accuracy = 0.0;  // predicted group matches gold group
  double lexicon_answer_rate = 0.0;  // confident lexicon answers / total
  std::vector<LanguageCode> labels;  // row/column order of `confusion`
  std::vector<ClassMetrics> per_class;
  std::vector<std::vector<std::uint64_t>> confusion;  // gold x predicted
  std::map<std::string, std::string> run_metadata;

  std::uint64_t total_samples() const;
};

// Classifies every sample once and fills the full report. Deterministic.
// Throws InputError naming the label if any gold label is unknown to the
// model, before classifying anything.
EvalReport evaluate(const StackedModel& model,
                    std::span<const LabeledSample> test);

struct MatrixSpec {
  std::string name;
  StackOptions options;
};

// The six standard rows: flat NB, NB+NB, NB+lexicon, NB+lexicon with 50%
// dropout, lexicon only, lexicon only without test vocabulary. `base`
// supplies features/alpha/aggregation and the lexicon seed and margin.
std::vector<MatrixSpec> table_variant_specs(const StackOptions& base);

struct MatrixResult {
  std::string name;
  std::optional<EvalReport> report;
  std::string error;  // set when this row failed; other rows still run
};

std::vector<MatrixResult> run_matrix(const Dataset& dataset, const GroupMap& map,
                                     std::span<const MatrixSpec> specs);

struct BenchReport {
  double requests_per_sec = 0.0;
  std::uint64_t total_samples = 0;  // timed requests
  double wall_time_seconds = 0.0;
  std::uint64_t warmup_discarded = 0;
  std::string machine;
};

// Single-threaded classification loop on a monotonic clock; the first
// `warmup` texts are classified but not timed. Requires at least
// warmup + 1000 texts.
BenchReport benchmark(const StackedModel& model,
                      std::span<const std::string> texts, std::uint64_t warmup);

// Same work split over `threads` workers. Reported separately; the
// single-threaded figure is the comparable one.
BenchReport benchmark_threaded(const StackedModel& model,
                               std::span<const std::string> texts,
                               std::uint64_t warmup, unsigned threads);

void write_report_text(std::ostream& out, const EvalReport& report);
void write_report_tsv(std::ostream& out, const EvalReport& report);
void write_confusion_csv(std::ostream& out, const EvalReport& report);

// Published reference accuracies for the six variant rows (percent), as
// reported in the original evaluation of this classifier design. Used only
// for printing comparison deltas.
struct ReferenceRow {
  const char* name;
  double nchlt;
  double dsl2015;
  double dsl2017;
};
std::span<const ReferenceRow> published_reference();

// Published single-machine throughput figures (requests/sec) reported
// alongside the original accuracy tables, for context.
struct ThroughputReference {
  const char* name;
  double requests_per_sec;
};
std::span<const ThroughputReference> published_throughput();

}  // namespace lid
