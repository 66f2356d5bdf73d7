#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lid/corpus.hpp"

namespace lidtest {

struct SyntheticSpec {
  std::uint64_t seed = 2024;
  int train_per_language = 300;
  int test_per_language = 60;
  int private_types = 500;  // word types per language
  int shared_types = 250;   // word types shared inside each group
  double shared_fraction = 0.45;  // chance a text word comes from the shared pool
};

// Eleven-language corpus shaped like the South African task: the standard
// six groups, heavy shared vocabulary inside each group, disjoint syllable
// inventories across groups, texts in the 15-25 character band. Fully
// deterministic in the seed.
lid::Dataset za_synthetic(const SyntheticSpec& spec = {});

// A plain request stream of the same kind of texts, round-robin across the
// eleven languages.
std::vector<std::string> synthetic_texts(std::size_t count, std::uint64_t seed);

}  // namespace lidtest
