// Microbenchmarks for the classification pipeline stages. The corpus is a
// small synthetic one (distinct syllable inventories per language) so the
// numbers track code changes, not dataset quirks.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <string>
#include <vector>

#include "lid/corpus.hpp"
#include "lid/features.hpp"
#include "lid/hash.hpp"
#include "lid/nb.hpp"
#include "lid/stack.hpp"

namespace {

std::string make_word(std::string_view lang, std::uint64_t& state) {
  static constexpr std::string_view kConsonants[] = {"bcdfg", "klmnp", "rstvz",
                                                     "ghjlq", "mnwrs"};
  static constexpr std::string_view kVowels[] = {"ae", "io", "ua", "ei", "ou"};
  const std::uint64_t h = lid::fnv1a64(lang);
  const std::string_view cons = kConsonants[h % 5];
  const std::string_view vowels = kVowels[(h / 5) % 5];
  std::string word;
  const int syllables = 2 + static_cast<int>(lid::splitmix64(++state) % 3);
  for (int s = 0; s < syllables; ++s) {
    word += cons[lid::splitmix64(++state) % cons.size()];
    word += vowels[lid::splitmix64(++state) % vowels.size()];
  }
  return word;
}

std::string make_text(std::string_view lang, std::uint64_t& state) {
  std::string text;
  const int words = 3 + static_cast<int>(lid::splitmix64(++state) % 3);
  for (int w = 0; w < words; ++w) {
    if (w) text += ' ';
    text += make_word(lang, state);
  }
  return text;
}

struct Fixture {
  lid::StackedModel model;
  std::vector<std::string> texts;
  std::vector<lid::FeatureVector> vectors;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    const std::vector<lid::LanguageGroup> groups{
        {"A", {"aa", "ab"}}, {"B", {"ba", "bb"}}, {"C", {"cc"}}};
    const lid::GroupMap map((std::vector<lid::LanguageGroup>(groups)));
    std::uint64_t state = 1;
    std::vector<lid::LabeledSample> train, test;
    for (const lid::LanguageGroup& group : groups)
      for (const lid::LanguageCode& lang : group.members) {
        for (int i = 0; i < 200; ++i)
          train.push_back({make_text(lang, state), lang});
        for (int i = 0; i < 40; ++i)
          test.push_back({make_text(lang, state), lang});
      }

    Fixture fx;
    lid::Dataset dataset = lid::make_dataset(std::move(train), std::move(test));
    fx.model = lid::build_stacked(dataset, map, lid::StackOptions{});
    for (const lid::LabeledSample& s : dataset.test) {
      fx.texts.push_back(s.text);
      fx.vectors.push_back(lid::featurize(s.text, fx.model.features));
    }
    return fx;
  }();
  return f;
}

void BM_Normalize(benchmark::State& state) {
  const Fixture& f = fixture();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lid::normalize(f.texts[i], true));
    i = (i + 1) % f.texts.size();
  }
}
BENCHMARK(BM_Normalize);

void BM_Featurize(benchmark::State& state) {
  const Fixture& f = fixture();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lid::featurize(f.texts[i], f.model.features));
    i = (i + 1) % f.texts.size();
  }
}
BENCHMARK(BM_Featurize);

void BM_Score(benchmark::State& state) {
  const Fixture& f = fixture();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lid::score(*f.model.router, f.vectors[i]));
    i = (i + 1) % f.vectors.size();
  }
}
BENCHMARK(BM_Score);

void BM_Classify(benchmark::State& state) {
  const Fixture& f = fixture();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lid::classify(f.model, f.texts[i]));
    i = (i + 1) % f.texts.size();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_Classify);

}  // namespace

BENCHMARK_MAIN();
