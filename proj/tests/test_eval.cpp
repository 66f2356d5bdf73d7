#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lid/errors.hpp"
#include "lid/eval.hpp"
#include "lid/hash.hpp"

using namespace lid;
using doctest::Approx;

namespace {

GroupMap toy_groups() {
  return GroupMap({{"Nguni", {"zul", "xho"}},
                   {"Sotho", {"nso", "sot"}},
                   {"English", {"eng"}}});
}

Dataset toy_dataset() {
  std::vector<LabeledSample> train{
      {"bona umuntu ngani", "zul"},    {"hamba umuntu bona", "zul"},
      {"zebenzela hamba ngani", "zul"}, {"umuntu zebenzela bona", "zul"},
      {"molo enkosi ngani", "xho"},    {"kakuhle molo enkosi", "xho"},
      {"enkosi ngani kakuhle", "xho"}, {"molo kakuhle ngani", "xho"},
      {"thobela lefase pula", "nso"},  {"pele thobela lefase", "nso"},
      {"lefase pula pele", "nso"},     {"thobela pele pula", "nso"},
      {"dumela metsi pula", "sot"},    {"haeso dumela metsi", "sot"},
      {"metsi pula haeso", "sot"},     {"dumela haeso pula", "sot"},
      {"hello world good", "eng"},     {"good morning world", "eng"},
      {"hello good morning", "eng"},   {"world morning hello", "eng"},
  };
  std::vector<LabeledSample> test{
      {"umuntu hamba", "zul"}, {"molo enkosi", "xho"}, {"thobela pele", "nso"},
      {"dumela haeso", "sot"}, {"hello morning", "eng"},
  };
  return make_dataset(std::move(train), std::move(test));
}

StackOptions toy_options(StackVariant variant) {
  StackOptions opt;
  opt.variant = variant;
  opt.features.char_orders = {2, 3};
  opt.features.word_orders = {1};
  opt.features.num_buckets = 1u << 12;
  return opt;
}

// kLexOnly with an empty vocabulary: always answers languages.front().
StackedModel constant_classifier() {
  StackedModel m;
  m.variant = StackVariant::kLexOnly;
  m.features.char_orders = {2};
  m.features.word_orders = {1};
  m.features.num_buckets = 1u << 10;
  m.groups = GroupMap::south_african();
  m.languages = m.groups.languages();
  m.lexicon = Lexicon{};
  for (const LanguageCode& lang : m.languages) {
    m.lexicon->vocab[lang];
    m.lexicon->languages.push_back(lang);
  }
  return m;
}

std::map<std::string, std::string> parse_tsv(const std::string& text) {
  std::map<std::string, std::string> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    rows[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return rows;
}

}  // namespace

TEST_CASE("a perfect run yields a diagonal confusion matrix") {
  const Dataset data = toy_dataset();
  const StackedModel m =
      build_stacked(data, toy_groups(), toy_options(StackVariant::kNbLex));
  // the training split itself: fully separable vocabulary
  const EvalReport report = evaluate(m, data.train);
  CHECK(report.accuracy == 1.0);
  CHECK(report.group_accuracy == 1.0);
  CHECK(report.total_samples() == data.train.size());
  REQUIRE(report.labels == m.languages);
  for (std::size_t g = 0; g < report.labels.size(); ++g)
    for (std::size_t p = 0; p < report.labels.size(); ++p)
      CHECK(report.confusion[g][p] == (g == p ? 4 : 0));
  for (const ClassMetrics& c : report.per_class) {
    CHECK(c.precision == 1.0);
    CHECK(c.recall == 1.0);
    CHECK(c.f1 == 1.0);
    CHECK(c.support == 4);
  }
}

TEST_CASE("a constant classifier on a balanced set scores 1/num_languages") {
  const StackedModel m = constant_classifier();
  std::vector<LabeledSample> test;
  for (const LanguageCode& lang : m.languages) {
    test.push_back({"abc def", lang});
    test.push_back({"ghi jkl", lang});
  }
  const EvalReport report = evaluate(m, test);
  CHECK(report.accuracy == Approx(1.0 / 11).epsilon(1e-12));
  // the constant answer is zul, so all four Nguni languages group-match
  CHECK(report.group_accuracy == Approx(4.0 / 11).epsilon(1e-12));
  CHECK(report.lexicon_answer_rate == 0.0);  // never confident
  const std::size_t zul = 0;
  for (std::size_t g = 0; g < report.labels.size(); ++g)
    CHECK(report.confusion[g][zul] == 2);
}

TEST_CASE("an unknown gold label fails before anything is classified") {
  const Dataset data = toy_dataset();
  const StackedModel m =
      build_stacked(data, toy_groups(), toy_options(StackVariant::kNbOnly));
  std::vector<LabeledSample> test = data.test;
  test.push_back({"bonjour tout le monde", "fra"});
  try {
    evaluate(m, test);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("fra") != std::string::npos);
  }
  CHECK_THROWS_AS(evaluate(m, std::vector<LabeledSample>{}), InputError);
}

TEST_CASE("micro accuracy equals support-weighted recall") {
  const Dataset data = toy_dataset();
  for (const StackVariant variant :
       {StackVariant::kNbOnly, StackVariant::kNbLex, StackVariant::kLexOnly}) {
    const StackedModel m = build_stacked(data, toy_groups(), toy_options(variant));
    const EvalReport report = evaluate(m, data.test);
    double weighted = 0.0;
    std::uint64_t total = 0;
    for (const ClassMetrics& c : report.per_class) {
      weighted += c.recall * static_cast<double>(c.support);
      total += c.support;
    }
    CHECK(report.accuracy ==
          Approx(weighted / static_cast<double>(total)).epsilon(1e-12));
    CHECK(report.group_accuracy >= report.accuracy);
  }
}

TEST_CASE("evaluation is deterministic") {
  const Dataset data = toy_dataset();
  const StackedModel m =
      build_stacked(data, toy_groups(), toy_options(StackVariant::kNbLex));
  const EvalReport a = evaluate(m, data.test);
  const EvalReport b = evaluate(m, data.test);
  CHECK(a.accuracy == b.accuracy);
  CHECK(a.confusion == b.confusion);
  CHECK(a.run_metadata == b.run_metadata);
}

TEST_CASE("run metadata pins the full configuration") {
  const Dataset data = toy_dataset();
  StackOptions opt = toy_options(StackVariant::kNbLex);
  opt.lexicon.dropout_rate = 0.25;
  opt.lexicon.dropout_seed = 7;
  const StackedModel m = build_stacked(data, toy_groups(), opt);
  const EvalReport report = evaluate(m, data.test);
  const auto& meta = report.run_metadata;
  CHECK(meta.at("variant") == "nb+lex");
  CHECK(meta.at("aggregation") == "sum");
  CHECK(meta.at("fallback_scope") == "group");
  CHECK(std::stod(meta.at("alpha")) == Approx(0.01));
  CHECK(meta.at("features.char_orders") == "2,3");
  CHECK(meta.at("features.word_orders") == "1");
  CHECK(meta.at("features.num_buckets") == "4096");
  CHECK(meta.at("languages") == "zul,xho,nso,sot,eng");
  CHECK(meta.at("groups") == "Nguni:zul,xho;Sotho:nso,sot;English:eng");
  CHECK(meta.at("lexicon.include_test") == "true");
  CHECK(std::stod(meta.at("lexicon.dropout_rate")) == Approx(0.25));
  CHECK(meta.at("lexicon.dropout_seed") == "7");
  CHECK(meta.at("lexicon.margin") == "1");
  CHECK(std::stoul(meta.at("lexicon.total_types")) > 0);
  CHECK(meta.at("test.samples") == "5");
  CHECK(meta.at("test.checksum").size() == 16);
  CHECK(meta.at("test.checksum") != "0000000000000000");
}

TEST_CASE("the matrix runs the six standard rows") {
  const Dataset data = toy_dataset();
  const GroupMap map = toy_groups();
  const StackOptions base = toy_options(StackVariant::kNbLex);
  const std::vector<MatrixSpec> specs = table_variant_specs(base);

  REQUIRE(specs.size() == 6);
  CHECK(specs[0].name == "Naive-Bayes only");
  CHECK(specs[1].name == "Stacked model (NB)");
  CHECK(specs[2].name == "Stacked model (lexicon)");
  CHECK(specs[3].name == "Stacked model (50% lex dropout)");
  CHECK(specs[4].name == "Lexicon only");
  CHECK(specs[5].name == "Lexicon only (sans test data)");
  CHECK(specs[0].options.variant == StackVariant::kNbOnly);
  CHECK(specs[1].options.variant == StackVariant::kNbNb);
  CHECK(specs[2].options.variant == StackVariant::kNbLex);
  CHECK(specs[3].options.variant == StackVariant::kNbLex);
  CHECK(specs[3].options.lexicon.dropout_rate == 0.5);
  CHECK(specs[4].options.variant == StackVariant::kLexOnly);
  CHECK(specs[5].options.variant == StackVariant::kLexOnly);
  CHECK_FALSE(specs[5].options.lexicon.include_test);
  for (const MatrixSpec& spec : specs)
    CHECK(spec.options.features == base.features);

  const std::vector<MatrixResult> results = run_matrix(data, map, specs);
  REQUIRE(results.size() == specs.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    CAPTURE(results[i].name);
    CHECK(results[i].name == specs[i].name);
    CHECK(results[i].error.empty());
    REQUIRE(results[i].report.has_value());
    // a matrix row is exactly a standalone build + evaluate
    const StackedModel standalone = build_stacked(data, map, specs[i].options);
    const EvalReport expected = evaluate(standalone, data.test);
    CHECK(results[i].report->accuracy == expected.accuracy);
    CHECK(results[i].report->confusion == expected.confusion);
  }
}

TEST_CASE("one failing matrix row does not poison the others") {
  const Dataset data = toy_dataset();
  std::vector<MatrixSpec> specs = table_variant_specs(toy_options(StackVariant::kNbLex));
  specs[1].options.alpha = -4.0;
  const std::vector<MatrixResult> results = run_matrix(data, toy_groups(), specs);
  CHECK_FALSE(results[1].report.has_value());
  CHECK_FALSE(results[1].error.empty());
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (i == 1) continue;
    CAPTURE(results[i].name);
    CHECK(results[i].report.has_value());
    CHECK(results[i].error.empty());
  }
}

TEST_CASE("lexicon answer rate counts confident lexicon decisions") {
  const Dataset data = toy_dataset();
  for (const StackVariant variant :
       {StackVariant::kNbOnly, StackVariant::kNbNb, StackVariant::kNbLex,
        StackVariant::kLexOnly}) {
    CAPTURE(to_string(variant));
    const StackedModel m = build_stacked(data, toy_groups(), toy_options(variant));
    const EvalReport report = evaluate(m, data.test);
    std::uint64_t confident = 0;
    for (const LabeledSample& s : data.test) {
      const Prediction p = classify(m, s.text);
      if (p.source == Source::kLexicon && p.lex_confident) ++confident;
    }
    CHECK(report.lexicon_answer_rate ==
          Approx(static_cast<double>(confident) / data.test.size())
              .epsilon(1e-12));
    if (variant == StackVariant::kNbOnly || variant == StackVariant::kNbNb)
      CHECK(report.lexicon_answer_rate == 0.0);
  }
  // the toy test set resolves each multi-member group by private words
  const StackedModel lex_model =
      build_stacked(data, toy_groups(), toy_options(StackVariant::kNbLex));
  CHECK(evaluate(lex_model, data.test).lexicon_answer_rate > 0.0);
}

TEST_CASE("benchmark") {
  const Dataset data = toy_dataset();
  const StackedModel m =
      build_stacked(data, toy_groups(), toy_options(StackVariant::kNbOnly));
  std::vector<std::string> texts;
  std::uint64_t state = 0;
  const std::vector<std::string> pool{"bona", "molo", "thobela", "dumela",
                                      "hello", "pula", "ngani"};
  for (int i = 0; i < 2200; ++i) {
    std::string text;
    for (int w = 0; w < 3; ++w)
      text += pool[splitmix64(++state) % pool.size()] + " ";
    texts.push_back(text);
  }

  SUBCASE("rejects too-small workloads") {
    const std::vector<std::string> few(texts.begin(), texts.begin() + 900);
    CHECK_THROWS_AS(benchmark(m, few, 100), InputError);
    CHECK_NOTHROW(benchmark(m, std::vector<std::string>(
                                   texts.begin(), texts.begin() + 1100), 100));
  }
  SUBCASE("accounts for warmup and reports a consistent rate") {
    const BenchReport report = benchmark(m, texts, 200);
    CHECK(report.warmup_discarded == 200);
    CHECK(report.total_samples == texts.size() - 200);
    CHECK(report.wall_time_seconds > 0.0);
    CHECK(report.requests_per_sec ==
          Approx(static_cast<double>(report.total_samples) /
                 report.wall_time_seconds)
              .epsilon(1e-9));
    CHECK_FALSE(report.machine.empty());
  }
  SUBCASE("threaded variant covers the same workload") {
    const BenchReport report = benchmark_threaded(m, texts, 100, 2);
    CHECK(report.total_samples == texts.size() - 100);
    CHECK(report.machine.find("2 worker threads") != std::string::npos);
    CHECK(report.requests_per_sec > 0.0);
  }
}

TEST_CASE("report writers") {
  const Dataset data = toy_dataset();
  const StackedModel m =
      build_stacked(data, toy_groups(), toy_options(StackVariant::kNbLex));
  const EvalReport report = evaluate(m, data.test);

  SUBCASE("text") {
    std::ostringstream out;
    write_report_text(out, report);
    const std::string text = out.str();
    CHECK(text.find("accuracy") != std::string::npos);
    CHECK(text.find("lexicon answer rate") != std::string::npos);
    for (const LanguageCode& label : report.labels)
      CHECK(text.find(label) != std::string::npos);
    CHECK(text.find("variant = nb+lex") != std::string::npos);
  }
  SUBCASE("tsv") {
    std::ostringstream out;
    write_report_tsv(out, report);
    const auto rows = parse_tsv(out.str());
    CHECK(std::stod(rows.at("accuracy")) == Approx(report.accuracy).epsilon(1e-6));
    CHECK(std::stod(rows.at("group_accuracy")) ==
          Approx(report.group_accuracy).epsilon(1e-6));
    CHECK(rows.at("samples") == std::to_string(report.total_samples()));
    CHECK(rows.count("precision.zul") == 1);
    CHECK(rows.count("recall.eng") == 1);
    CHECK(rows.count("f1.sot") == 1);
    CHECK(rows.at("support.xho") == "1");
    CHECK(rows.at("meta.variant") == "nb+lex");
  }
  SUBCASE("confusion csv") {
    std::ostringstream out;
    write_confusion_csv(out, report);
    std::istringstream in(out.str());
    std::string header;
    REQUIRE(std::getline(in, header));
    CHECK(header == "gold\\predicted,zul,xho,nso,sot,eng");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) {
      CHECK(line.substr(0, line.find(',')) == report.labels[rows]);
      ++rows;
    }
    CHECK(rows == report.labels.size());
  }
}

TEST_CASE("published reference tables align with the matrix rows") {
  const std::vector<MatrixSpec> specs =
      table_variant_specs(toy_options(StackVariant::kNbLex));
  const auto reference = published_reference();
  REQUIRE(reference.size() == specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i)
    CHECK(reference[i].name == specs[i].name);

  CHECK(reference[0].nchlt == 94.36);
  CHECK(reference[2].nchlt == 96.12);
  CHECK(reference[2].dsl2015 == 99.34);
  CHECK(reference[2].dsl2017 == 98.70);
  CHECK(reference[5].nchlt == 75.39);
  // the stacked lexicon beats plain NB on every published dataset
  for (int col = 0; col < 3; ++col) {
    auto value = [&](std::size_t row) {
      return col == 0 ? reference[row].nchlt
                      : col == 1 ? reference[row].dsl2015 : reference[row].dsl2017;
    };
    CHECK(value(2) > value(1));
    CHECK(value(1) >= value(0));
    CHECK(value(5) < value(4));
  }

  const auto throughput = published_throughput();
  REQUIRE(throughput.size() == 4);
  CHECK(throughput[0].requests_per_sec == 44000.0);
  CHECK(std::string(throughput[3].name).find("sklearn") != std::string::npos);
  CHECK(throughput[3].requests_per_sec == 7.4);
}
