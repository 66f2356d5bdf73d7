#include <doctest.h>

#include <string>
#include <vector>

#include "lid/errors.hpp"
#include "lid/features.hpp"
#include "lid/hash.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace lid;

namespace {

FeatureConfig only_chars(int order, std::uint32_t buckets = 1u << 20) {
  FeatureConfig c;
  c.char_orders = {order};
  c.word_orders = {};
  c.num_buckets = buckets;
  return c;
}

FeatureConfig only_words(int order, std::uint32_t buckets = 1u << 20) {
  FeatureConfig c;
  c.char_orders = {};
  c.word_orders = {order};
  c.num_buckets = buckets;
  return c;
}

}  // namespace

TEST_CASE("hash primitives match frozen reference vectors") {
  // Vectors computed with an independent implementation of the published
  // FNV-1a and splitmix64 constants.
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("c2|ab") == 0x246956b26137b7d7ull);
  CHECK(fnv1a64("w1|aa") == 0xad2e21e11fe49f5dull);
  CHECK(fnv1a64("w1|hello") == 0x4bdaf29e543ad669ull);
  CHECK(fnv1a64("c2|šé") == 0x26ecb3f637ae1e62ull);

  CHECK(splitmix64(0) == 0xe220a8397b1dcdafull);
  CHECK(splitmix64(1) == 0x910a2dec89025cc1ull);
  CHECK(splitmix64(0xdeadbeefull) == 0x4adfb90f68c9eb9bull);

  Fnv1a incremental;
  incremental.update("c2|");
  incremental.update('a');
  incremental.update("b");
  CHECK(incremental.digest() == fnv1a64("c2|ab"));

  CHECK(unit_interval(0) == 0.0);
  CHECK(unit_interval(~0ull) < 1.0);
  CHECK(unit_interval(~0ull) > 0.9999999999999998);
}

TEST_CASE("normalize collapses whitespace and lowercases") {
  CHECK(normalize("  MOLO   Unjani\t\n") == "molo unjani");
  CHECK(normalize("MOLO", false) == "MOLO");
  CHECK(normalize("a b") == "a b");    // NBSP is whitespace
  CHECK(normalize("a b") == "a b");    // thin space
  CHECK(normalize("АБ") == "аб");  // Cyrillic А Б
  CHECK(normalize("ΑΣ") == "ασ");  // Greek Α Σ
  CHECK(normalize("ÉŠ") == "éš");  // É Š
  CHECK(normalize("") == "");
  CHECK(normalize("   \t  ") == "");

  SUBCASE("invalid UTF-8 bytes survive unchanged") {
    const std::string raw = "ab\xffzz";
    CHECK(normalize(raw, true) == raw);
  }
  SUBCASE("idempotent") {
    const std::vector<std::string> inputs{
        "Molo  UNJANI", "Élève Аб", "x", "",
        "a  b  c", "mixed\tCASE Štring"};
    for (const std::string& s : inputs) {
      const std::string once = normalize(s);
      CHECK(normalize(once) == once);
    }
  }
}

TEST_CASE("tokenize splits normalized text on spaces") {
  CHECK(tokenize("molo unjani") == std::vector<std::string>{"molo", "unjani"});
  CHECK(tokenize("one") == std::vector<std::string>{"one"});
  CHECK(tokenize("") == std::vector<std::string>{});
}

TEST_CASE("char_ngrams are code-point windows, spaces included") {
  CHECK(char_ngrams("abc", 2) == std::vector<std::string>{"ab", "bc"});
  CHECK(char_ngrams("a b", 2) == std::vector<std::string>{"a ", " b"});
  CHECK(char_ngrams("ab", 4) == std::vector<std::string>{});
  CHECK(char_ngrams("šéž", 2) ==
        std::vector<std::string>{"šé", "éž"});
  // multiplicity preserved
  CHECK(char_ngrams("aaa", 2) == std::vector<std::string>{"aa", "aa"});
}

TEST_CASE("word_ngrams join tokens with a single space") {
  CHECK(word_ngrams("a b c", 2) == std::vector<std::string>{"a b", "b c"});
  CHECK(word_ngrams("a b c", 1) == std::vector<std::string>{"a", "b", "c"});
  CHECK(word_ngrams("a", 2) == std::vector<std::string>{});
}

TEST_CASE("featurize matches frozen bucket constants") {
  SUBCASE("char bigram") {
    const FeatureVector fv = featurize("ab", only_chars(2));
    REQUIRE(fv.entries.size() == 1);
    CHECK(fv.entries[0].first == 505815u);  // fnv1a64("c2|ab") mod 2^20
    CHECK(fv.entries[0].second == 1u);
  }
  SUBCASE("word unigrams") {
    CHECK(featurize("aa", only_words(1)).entries ==
          std::vector<std::pair<std::uint32_t, std::uint32_t>>{{302941u, 1u}});
    CHECK(featurize("hello", only_words(1)).entries ==
          std::vector<std::pair<std::uint32_t, std::uint32_t>>{{710249u, 1u}});
  }
  SUBCASE("multi-byte char bigram") {
    const FeatureVector fv = featurize("šé", only_chars(2));
    REQUIRE(fv.entries.size() == 1);
    CHECK(fv.entries[0].first == 925282u);
  }
  SUBCASE("default config on molo unjani") {
    const FeatureVector fv = featurize("molo unjani", FeatureConfig{});
    CHECK(fv.total_count() == 27u);  // 10+8+6 char grams, 2+1 word grams
    CHECK(fv.entries.size() == 27u);
    CHECK(fv.entries.front().first == 57313u);
    CHECK(fv.entries.back().first == 1046085u);
  }
}

TEST_CASE("featurize agrees with an independent oracle on ASCII texts") {
  // For ASCII, code points are bytes, so the reference can extract grams
  // with plain substrings and hash with the independent FNV.
  const FeatureConfig config = [] {
    FeatureConfig c;
    c.num_buckets = 1u << 10;  // small table to exercise collisions
    return c;
  }();
  const std::vector<std::string> texts =
      lidtest::synthetic_texts(200, /*seed=*/7);
  for (const std::string& text : texts) {
    std::vector<std::uint32_t> expected;
    for (const int n : config.char_orders)
      for (std::size_t i = 0; i + n <= text.size(); ++i)
        expected.push_back(static_cast<std::uint32_t>(oracle::fnv1a64(
                               "c" + std::to_string(n) + "|" +
                               text.substr(i, n))) %
                           config.num_buckets);
    std::vector<std::string> tokens;
    for (std::size_t pos = 0; pos < text.size();) {
      const std::size_t space = text.find(' ', pos);
      const std::size_t end = space == std::string::npos ? text.size() : space;
      if (end > pos) tokens.push_back(text.substr(pos, end - pos));
      pos = end + 1;
    }
    for (const int n : config.word_orders)
      for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string gram = "w" + std::to_string(n) + "|";
        for (int k = 0; k < n; ++k) {
          if (k) gram += ' ';
          gram += tokens[i + k];
        }
        expected.push_back(
            static_cast<std::uint32_t>(oracle::fnv1a64(gram)) %
            config.num_buckets);
      }

    std::sort(expected.begin(), expected.end());
    std::vector<std::pair<std::uint32_t, std::uint32_t>> collapsed;
    for (const std::uint32_t bucket : expected)
      if (!collapsed.empty() && collapsed.back().first == bucket)
        ++collapsed.back().second;
      else
        collapsed.emplace_back(bucket, 1u);

    CHECK(featurize(text, config).entries == collapsed);
  }
}

TEST_CASE("featurize composes normalize and featurize_normalized") {
  const FeatureConfig config;
  const std::vector<std::string> messy{
      "  MOLO   unjani ", "А  БВ", "one\ttwo  three",
      "cafÉ molo"};
  for (const std::string& text : messy)
    CHECK(featurize(text, config) ==
          featurize_normalized(normalize(text, config), config));
}

TEST_CASE("featurize accumulates counts across repeats") {
  const FeatureVector fv = featurize("aaaa", only_chars(2));
  REQUIRE(fv.entries.size() == 1);
  CHECK(fv.entries[0].second == 3u);  // "aa" three times
}

TEST_CASE("buckets stay below num_buckets and entries stay sorted") {
  FeatureConfig config;
  config.num_buckets = 1u << 10;
  for (const std::string& text : lidtest::synthetic_texts(100, 3)) {
    const FeatureVector fv = featurize(text, config);
    for (std::size_t i = 0; i < fv.entries.size(); ++i) {
      CHECK(fv.entries[i].first < config.num_buckets);
      if (i) CHECK(fv.entries[i - 1].first < fv.entries[i].first);
    }
  }
}

TEST_CASE("feature config validation") {
  FeatureConfig config;
  CHECK_NOTHROW(config.validate());

  FeatureConfig zero_order = config;
  zero_order.char_orders = {0};
  CHECK_THROWS_AS(zero_order.validate(), Error);

  FeatureConfig negative = config;
  negative.word_orders = {-1};
  CHECK_THROWS_AS(negative.validate(), Error);

  FeatureConfig bad_buckets = config;
  bad_buckets.num_buckets = 3;
  CHECK_THROWS_AS(bad_buckets.validate(), Error);

  bad_buckets.num_buckets = 1;
  CHECK_THROWS_AS(bad_buckets.validate(), Error);

  FeatureConfig no_orders = config;  // no features at all is still invalid
  no_orders.char_orders = {};
  no_orders.word_orders = {};
  CHECK_THROWS_AS(no_orders.validate(), Error);
}
