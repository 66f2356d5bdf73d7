#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lid {

// Lowercase language label, e.g. an ISO-639 code ("zul") or a shared-task
// variety label ("pt-br"). Labels are kept verbatim apart from lowercasing.
using LanguageCode = std::string;

struct LabeledSample {
  std::string text;
  LanguageCode label;

  bool operator==(const LabeledSample&) const = default;
};

struct LanguageGroup {
  std::string name;
  std::vector<LanguageCode> members;
};

// A partition of task languages into routing groups. Group order and member
// order are significant: they define tie-breaking and canonical language
// order everywhere downstream.
class GroupMap {
 public:
  GroupMap() = default;
  // Validates: non-empty group names, non-empty member lists, no language in
  // two groups. Throws Error.
  explicit GroupMap(std::vector<LanguageGroup> groups);

  // The 11 official South African languages in their six routing groups.
  static GroupMap south_african();

  // Config format: one group per line, "Name: code1,code2,...".
  // Blank lines and lines starting with '#' are skipped.
  static GroupMap parse(std::istream& in);
  static GroupMap load_file(const std::string& path);

  const std::vector<LanguageGroup>& groups() const { return groups_; }
  std::size_t size() const { return groups_.size(); }
  bool empty() const { return groups_.empty(); }

  const LanguageGroup* find(const LanguageCode& lang) const;
  bool contains(const LanguageCode& lang) const { return find(lang) != nullptr; }
  // Throws Error for languages outside the map.
  const LanguageGroup& group_of(const LanguageCode& lang) const;

  // All member languages, in group order then member order.
  std::vector<LanguageCode> languages() const;

  // Same groups with members limited to `keep` (empty groups dropped).
  GroupMap restricted_to(std::span<const LanguageCode> keep) const;

 private:
  std::vector<LanguageGroup> groups_;
  std::unordered_map<LanguageCode, std::size_t> lang_to_group_;
};

struct Dataset {
  std::vector<LabeledSample> train;
  std::vector<LabeledSample> test;
  // Distinct labels in order of first appearance (train first, then test).
  std::vector<LanguageCode> languages;
};

Dataset make_dataset(std::vector<LabeledSample> train,
                     std::vector<LabeledSample> test);

// Reads UTF-8 "text<TAB>label" lines. Lines must contain exactly one TAB;
// empty lines are skipped, text is taken verbatim, labels are lowercased.
// Throws ParseError with a 1-based line number on malformed rows.
std::vector<LabeledSample> load_tsv(std::istream& in);
std::vector<LabeledSample> load_tsv_file(const std::string& path);

void write_tsv(std::ostream& out, std::span<const LabeledSample> samples);

// Prefix of `text` ending at the last word boundary at or before `max_len`
// code points, provided that keeps at least `min_len` code points; otherwise
// a hard cut at `max_len`. Texts shorter than `min_len` pass through.
std::string truncate_short(std::string_view text, std::size_t min_len,
                           std::size_t max_len);

// Order-sensitive content checksum, recorded in evaluation metadata.
std::uint64_t samples_checksum(std::span<const LabeledSample> samples);

}  // namespace lid
