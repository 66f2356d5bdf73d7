// lid — train, inspect and serve predictions from the stacked LID classifier.
//
// Exit codes: 0 success, 1 usage error, 2 data/model error.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lid/corpus.hpp"
#include "lid/errors.hpp"
#include "lid/eval.hpp"
#include "lid/lexicon.hpp"
#include "lid/stack.hpp"

namespace {

struct StackFlags {
  std::string variant = "nb+lex";
  std::vector<int> char_orders{2, 4, 6};
  std::vector<int> word_orders{1, 2};
  std::uint32_t buckets = 1u << 20;
  bool lowercase = true;
  double alpha = 0.01;
  std::string aggregation = "sum";
  std::string fallback = "group";
  bool include_test = true;
  double dropout = 0.0;
  std::string dropout_unit = "type";
  std::uint64_t seed = 0;
  int margin = 1;
};

lid::StackOptions to_stack_options(const StackFlags& f) {
  lid::StackOptions o;
  o.variant = lid::parse_variant(f.variant).value();  // IsMember already checked
  o.features.char_orders = f.char_orders;
  o.features.word_orders = f.word_orders;
  o.features.num_buckets = f.buckets;
  o.features.lowercase = f.lowercase;
  o.alpha = f.alpha;
  o.aggregation =
      f.aggregation == "max" ? lid::Aggregation::kMax : lid::Aggregation::kSum;
  o.fallback_scope = f.fallback == "global" ? lid::FallbackScope::kGlobal
                                            : lid::FallbackScope::kGroup;
  o.lexicon.include_test = f.include_test;
  o.lexicon.dropout_rate = f.dropout;
  o.lexicon.dropout_seed = f.seed;
  o.lexicon.dropout_unit = f.dropout_unit == "token" ? lid::DropoutUnit::kToken
                                                     : lid::DropoutUnit::kType;
  o.lexicon.margin = f.margin;
  return o;
}

void add_stack_flags(CLI::App* cmd, StackFlags& f, bool with_variant) {
  if (with_variant)
    cmd->add_option("--variant", f.variant, "Classifier variant")
        ->check(CLI::IsMember({"nb", "nb+nb", "nb+lex", "lex"}))
        ->capture_default_str();
  cmd->add_option("--char-orders", f.char_orders,
                  "Character n-gram orders (comma separated)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--word-orders", f.word_orders,
                  "Word n-gram orders (comma separated)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--buckets", f.buckets,
                  "Feature hash buckets (power of two)")
      ->check(CLI::Validator(
          [](std::string& s) {
            const unsigned long long v = std::stoull(s);
            return (v >= 2 && (v & (v - 1)) == 0)
                       ? std::string()
                       : std::string("must be a power of two >= 2");
          },
          "POW2"))
      ->capture_default_str();
  cmd->add_flag("--lowercase,!--no-lowercase", f.lowercase,
                "Lowercase during normalization");
  cmd->add_option("--alpha", f.alpha, "Additive smoothing strength")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--aggregation", f.aggregation,
                  "Group routing rule: posterior sum or argmax class")
      ->check(CLI::IsMember({"sum", "max"}))
      ->capture_default_str();
  cmd->add_option("--fallback", f.fallback,
                  "NB fallback scope when the lexicon abstains")
      ->check(CLI::IsMember({"group", "global"}))
      ->capture_default_str();
  cmd->add_flag("--include-test-lexicon,!--exclude-test-lexicon",
                f.include_test,
                "Fold the test split's vocabulary into the lexicon "
                "(transductive; on by default to match the reference setup)");
  cmd->add_option("--dropout", f.dropout, "Lexicon dropout rate")
      ->check(CLI::Validator(
          [](std::string& s) {
            const double v = std::stod(s);
            return (v >= 0.0 && v < 1.0) ? std::string()
                                         : std::string("must be in [0,1)");
          },
          "RATE"))
      ->capture_default_str();
  cmd->add_option("--dropout-unit", f.dropout_unit,
                  "Drop whole word types or individual token occurrences")
      ->check(CLI::IsMember({"type", "token"}))
      ->capture_default_str();
  cmd->add_option("--seed", f.seed,
                  "Seed for every stochastic choice (lexicon dropout)")
      ->capture_default_str();
  cmd->add_option("--margin", f.margin, "Lexicon confidence margin")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

lid::GroupMap load_groups(const std::string& path) {
  return path.empty() ? lid::GroupMap::south_african()
                      : lid::GroupMap::load_file(path);
}

// Owns the optional --out file; defaults to stdout.
struct Output {
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw lid::Error("cannot open output file: " + path);
      out = &file;
    }
  }
  std::ostream& stream() { return *out; }

  std::ofstream file;
  std::ostream* out = &std::cout;
};

void warn_transductive(const lid::StackedModel& model) {
  if (model.lexicon && model.lexicon->built_with_test)
    std::cerr << "warning: the lexicon folds in test-set vocabulary "
                 "(transductive setup); use --exclude-test-lexicon for a "
                 "deployable model\n";
}

int run_train(const std::string& train_path, const std::string& test_path,
              const std::string& groups_path, const std::string& model_path,
              const StackFlags& flags) {
  lid::Dataset dataset = lid::make_dataset(
      lid::load_tsv_file(train_path),
      test_path.empty() ? std::vector<lid::LabeledSample>{}
                        : lid::load_tsv_file(test_path));
  const lid::GroupMap groups = load_groups(groups_path);
  const lid::StackedModel model =
      lid::build_stacked(dataset, groups, to_stack_options(flags));
  warn_transductive(model);
  lid::save_model_file(model, model_path);
  std::cout << "wrote " << model_path << " (variant " << to_string(model.variant)
            << ", " << model.languages.size() << " languages, "
            << model.groups.size() << " groups)\n";
  return 0;
}

void print_prediction(std::ostream& out, const lid::Prediction& p) {
  out << p.language << '\t' << p.group << '\t' << to_string(p.source) << '\n';
}

int run_classify(const std::string& model_path, const std::string& text,
                 bool text_given) {
  const lid::StackedModel model = lid::load_model_file(model_path);
  if (text_given) {
    print_prediction(std::cout, lid::classify(model, text));
    return 0;
  }
  std::string line;
  while (std::getline(std::cin, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    print_prediction(std::cout, lid::classify(model, line));
  }
  return 0;
}

int run_eval(const std::string& model_path, const std::string& test_path,
             const std::string& out_path, const std::string& format,
             const std::string& confusion_path) {
  const lid::StackedModel model = lid::load_model_file(model_path);
  const std::vector<lid::LabeledSample> test = lid::load_tsv_file(test_path);
  const lid::EvalReport report = lid::evaluate(model, test);
  Output output(out_path);
  if (format == "tsv")
    write_report_tsv(output.stream(), report);
  else
    write_report_text(output.stream(), report);
  if (!confusion_path.empty()) {
    std::ofstream csv(confusion_path);
    if (!csv) throw lid::Error("cannot open output file: " + confusion_path);
    write_confusion_csv(csv, report);
  }
  return 0;
}

double lookup_reference(const std::string& row_name,
                        const std::string& dataset) {
  for (const lid::ReferenceRow& row : lid::published_reference())
    if (row_name == row.name) {
      if (dataset == "nchlt") return row.nchlt;
      if (dataset == "dsl2015") return row.dsl2015;
      return row.dsl2017;
    }
  return std::numeric_limits<double>::quiet_NaN();
}

void print_matrix_text(std::ostream& out,
                       const std::vector<lid::MatrixResult>& rows,
                       const std::string& reference) {
  std::size_t width = 4;
  for (const lid::MatrixResult& row : rows)
    width = std::max(width, row.name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "row" << std::right
      << std::setw(10) << "accuracy" << std::setw(10) << "group"
      << std::setw(10) << "lex-rate";
  if (!reference.empty())
    out << std::setw(11) << "published" << std::setw(8) << "delta";
  out << '\n';
  for (const lid::MatrixResult& row : rows) {
    out << std::left << std::setw(static_cast<int>(width)) << row.name
        << std::right;
    if (!row.report) {
      out << "  ERROR: " << row.error << '\n';
      continue;
    }
    const lid::EvalReport& r = *row.report;
    out << std::fixed << std::setprecision(2) << std::setw(9)
        << 100.0 * r.accuracy << '%' << std::setw(9)
        << 100.0 * r.group_accuracy << '%' << std::setprecision(4)
        << std::setw(10) << r.lexicon_answer_rate;
    if (!reference.empty()) {
      const double published = lookup_reference(row.name, reference);
      if (std::isnan(published)) {
        out << std::setw(11) << '-' << std::setw(8) << '-';
      } else {
        out << std::setprecision(2) << std::setw(11) << published
            << std::showpos << std::setw(8) << 100.0 * r.accuracy - published
            << std::noshowpos;
      }
    }
    out << '\n';
  }
  if (!reference.empty())
    out << "\npublished = originally reported accuracy (" << reference
        << "); delta = measured - published\n";
}

void print_matrix_tsv(std::ostream& out,
                      const std::vector<lid::MatrixResult>& rows,
                      const std::string& reference) {
  out << "row\taccuracy\tgroup_accuracy\tlexicon_answer_rate";
  if (!reference.empty()) out << "\tpublished\tdelta";
  out << '\n';
  out << std::fixed << std::setprecision(6);
  for (const lid::MatrixResult& row : rows) {
    if (!row.report) {
      out << row.name << "\tERROR\t" << row.error << '\n';
      continue;
    }
    const lid::EvalReport& r = *row.report;
    out << row.name << '\t' << r.accuracy << '\t' << r.group_accuracy << '\t'
        << r.lexicon_answer_rate;
    if (!reference.empty()) {
      const double published = lookup_reference(row.name, reference);
      out << '\t' << published << '\t' << 100.0 * r.accuracy - published;
    }
    out << '\n';
  }
}

int run_matrix(const std::string& train_path, const std::string& test_path,
               const std::string& groups_path, const StackFlags& flags,
               const std::string& out_path, const std::string& format,
               const std::string& reference) {
  lid::Dataset dataset = lid::make_dataset(lid::load_tsv_file(train_path),
                                           lid::load_tsv_file(test_path));
  const lid::GroupMap groups = load_groups(groups_path);
  if (flags.include_test)
    std::cerr << "warning: lexicon rows except '(sans test data)' fold "
                 "test-set vocabulary into the lexicon (transductive setup)\n";
  const std::vector<lid::MatrixSpec> specs =
      lid::table_variant_specs(to_stack_options(flags));
  const std::vector<lid::MatrixResult> rows =
      lid::run_matrix(dataset, groups, specs);
  Output output(out_path);
  if (format == "tsv")
    print_matrix_tsv(output.stream(), rows, reference);
  else
    print_matrix_text(output.stream(), rows, reference);
  for (const lid::MatrixResult& row : rows)
    if (!row.report) {
      std::cerr << "error: row '" << row.name << "' failed: " << row.error
                << '\n';
      return 2;
    }
  return 0;
}

int run_bench(const std::string& model_path, const std::string& test_path,
              std::uint64_t warmup, unsigned threads, bool show_reference) {
  const lid::StackedModel model = lid::load_model_file(model_path);
  const std::vector<lid::LabeledSample> samples =
      lid::load_tsv_file(test_path);
  std::vector<std::string> texts;
  texts.reserve(samples.size());
  for (const lid::LabeledSample& s : samples) texts.push_back(s.text);
  const lid::BenchReport report =
      threads > 1 ? lid::benchmark_threaded(model, texts, warmup, threads)
                  : lid::benchmark(model, texts, warmup);
  std::cout << std::fixed;
  std::cout << "requests/sec   " << std::setprecision(1)
            << report.requests_per_sec << '\n';
  std::cout << "timed samples  " << report.total_samples << '\n';
  std::cout << "wall time (s)  " << std::setprecision(6)
            << report.wall_time_seconds << '\n';
  std::cout << "warmup         " << report.warmup_discarded << '\n';
  std::cout << "machine        " << report.machine << '\n';
  if (show_reference) {
    std::cout << "\noriginally reported single-machine figures:\n";
    for (const lid::ThroughputReference& row : lid::published_throughput())
      std::cout << "  " << row.name << ": " << std::setprecision(2)
                << row.requests_per_sec << "/s\n";
  }
  return 0;
}

int run_export_lexicon(const std::string& model_path,
                       const std::string& out_path) {
  const lid::StackedModel model = lid::load_model_file(model_path);
  if (!model.lexicon)
    throw lid::Error("model has no lexicon component (variant " +
                     std::string(to_string(model.variant)) + ")");
  Output output(out_path);
  export_lexicon(*model.lexicon, output.stream());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical naive-Bayes + lexicon language identifier"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lid 0.1.0");

  // train
  CLI::App* train = app.add_subcommand("train", "Train a model, write it to disk");
  std::string train_train, train_test, train_groups, train_model;
  StackFlags train_flags;
  train->add_option("--train", train_train, "Training TSV (text<TAB>label)")
      ->required();
  train->add_option("--test", train_test,
                    "Test TSV; vocabulary source for the transductive lexicon");
  train->add_option("--groups", train_groups,
                    "Group map config (default: built-in South African map)");
  train->add_option("--model", train_model, "Output model path")->required();
  add_stack_flags(train, train_flags, true);

  // classify
  CLI::App* classify =
      app.add_subcommand("classify", "Predict language for text or stdin lines");
  std::string classify_model, classify_text;
  classify->add_option("--model", classify_model, "Model path")->required();
  CLI::Option* text_opt = classify->add_option(
      "--text", classify_text,
      "Text to classify; omit to read one text per line from stdin");

  // eval
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a model on a test TSV");
  std::string eval_model, eval_test, eval_out, eval_confusion;
  std::string eval_format = "text";
  eval->add_option("--model", eval_model, "Model path")->required();
  eval->add_option("--test", eval_test, "Test TSV")->required();
  eval->add_option("--out", eval_out, "Write the report here (default stdout)");
  eval->add_option("--format", eval_format, "Report format")
      ->check(CLI::IsMember({"text", "tsv"}))
      ->capture_default_str();
  eval->add_option("--confusion-csv", eval_confusion,
                   "Also write the confusion matrix as CSV");

  // matrix
  CLI::App* matrix = app.add_subcommand(
      "matrix", "Train and evaluate the six standard variant rows");
  std::string matrix_train, matrix_test, matrix_groups, matrix_out,
      matrix_reference;
  std::string matrix_format = "text";
  StackFlags matrix_flags;
  matrix->add_option("--train", matrix_train, "Training TSV")->required();
  matrix->add_option("--test", matrix_test, "Test TSV")->required();
  matrix->add_option("--groups", matrix_groups,
                     "Group map config (default: built-in South African map)");
  matrix->add_option("--out", matrix_out, "Write the table here (default stdout)");
  matrix->add_option("--format", matrix_format, "Table format")
      ->check(CLI::IsMember({"text", "tsv"}))
      ->capture_default_str();
  matrix->add_option("--reference", matrix_reference,
                     "Print deltas against the originally reported column")
      ->check(CLI::IsMember({"nchlt", "dsl2015", "dsl2017"}));
  add_stack_flags(matrix, matrix_flags, false);

  // bench
  CLI::App* bench =
      app.add_subcommand("bench", "Measure classification throughput");
  std::string bench_model, bench_test;
  std::uint64_t bench_warmup = 100;
  unsigned bench_threads = 1;
  bool bench_reference = false;
  bench->add_option("--model", bench_model, "Model path")->required();
  bench->add_option("--test", bench_test, "TSV supplying the request texts")
      ->required();
  bench->add_option("--warmup", bench_warmup, "Untimed warmup requests")
      ->capture_default_str();
  bench->add_option("--threads", bench_threads,
                    "Worker threads (1 = the reported single-threaded mode)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_flag("--reference", bench_reference,
                  "Also print originally reported throughput figures");

  // export-lexicon
  CLI::App* export_lex = app.add_subcommand(
      "export-lexicon", "Dump a model's lexicon as language<TAB>word lines");
  std::string export_model, export_out;
  export_lex->add_option("--model", export_model, "Model path")->required();
  export_lex->add_option("--out", export_out,
                         "Write the dump here (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train->parsed())
      return run_train(train_train, train_test, train_groups, train_model,
                       train_flags);
    if (classify->parsed())
      return run_classify(classify_model, classify_text, text_opt->count() > 0);
    if (eval->parsed())
      return run_eval(eval_model, eval_test, eval_out, eval_format,
                      eval_confusion);
    if (matrix->parsed())
      return run_matrix(matrix_train, matrix_test, matrix_groups, matrix_flags,
                        matrix_out, matrix_format, matrix_reference);
    if (bench->parsed())
      return run_bench(bench_model, bench_test, bench_warmup, bench_threads,
                       bench_reference);
    if (export_lex->parsed())
      return run_export_lexicon(export_model, export_out);
  } catch (const lid::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
