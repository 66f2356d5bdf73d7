#include "lid/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "lid/errors.hpp"
#include "lid/hash.hpp"
#include "utf8.hpp"

namespace lid {

namespace {

std::string lowercase_ascii(std::string s) {
  for (char& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

LanguageCode parse_label(std::string_view raw, std::size_t line) {
  std::string label = lowercase_ascii(std::string(trim(raw)));
  if (label.empty()) throw ParseError("empty label field", line);
  if (has_whitespace(label))
    throw ParseError("label contains whitespace: '" + label + "'", line);
  return label;
}

}  // namespace

GroupMap::GroupMap(std::vector<LanguageGroup> groups)
    : groups_(std::move(groups)) {
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const LanguageGroup& group = groups_[g];
    if (group.name.empty()) throw Error("group map: empty group name");
    if (group.members.empty())
      throw Error("group map: group '" + group.name + "' has no members");
    for (const LanguageCode& lang : group.members) {
      if (lang.empty() || has_whitespace(lang))
        throw Error("group map: bad language code in group '" + group.name + "'");
      auto [it, inserted] = lang_to_group_.emplace(lang, g);
      if (!inserted)
        throw Error("group map: language '" + lang + "' appears in groups '" +
                    groups_[it->second].name + "' and '" + group.name + "'");
    }
  }
}

GroupMap GroupMap::south_african() {
  return GroupMap({
      {"Nguni", {"zul", "xho", "nbl", "ssw"}},
      {"Sotho", {"nso", "sot", "tsn"}},
      {"English", {"eng"}},
      {"Afrikaans", {"afr"}},
      {"Xitsonga", {"tso"}},
      {"Tshivenda", {"ven"}},
  });
}

GroupMap GroupMap::parse(std::istream& in) {
  std::vector<LanguageGroup> groups;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto colon = view.find(':');
    if (colon == std::string_view::npos)
      throw ParseError("expected 'Name: code1,code2,...'", line_no);
    LanguageGroup group;
    group.name = std::string(trim(view.substr(0, colon)));
    if (group.name.empty()) throw ParseError("empty group name", line_no);
    std::string_view rest = view.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      std::string_view code = trim(rest.substr(0, comma));
      if (code.empty()) throw ParseError("empty language code", line_no);
      group.members.push_back(lowercase_ascii(std::string(code)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (group.members.empty())
      throw ParseError("group '" + group.name + "' has no members", line_no);
    groups.push_back(std::move(group));
  }
  return GroupMap(std::move(groups));
}

GroupMap GroupMap::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open group map file: " + path);
  return parse(in);
}

const LanguageGroup* GroupMap::find(const LanguageCode& lang) const {
  auto it = lang_to_group_.find(lang);
  return it == lang_to_group_.end() ? nullptr : &groups_[it->second];
}

const LanguageGroup& GroupMap::group_of(const LanguageCode& lang) const {
  const LanguageGroup* group = find(lang);
  if (!group) throw Error("language '" + lang + "' not in group map");
  return *group;
}

std::vector<LanguageCode> GroupMap::languages() const {
  std::vector<LanguageCode> all;
  for (const LanguageGroup& group : groups_)
    all.insert(all.end(), group.members.begin(), group.members.end());
  return all;
}

GroupMap GroupMap::restricted_to(std::span<const LanguageCode> keep) const {
  std::unordered_set<std::string_view> wanted(keep.begin(), keep.end());
  std::vector<LanguageGroup> kept;
  for (const LanguageGroup& group : groups_) {
    LanguageGroup reduced{group.name, {}};
    for (const LanguageCode& lang : group.members)
      if (wanted.contains(lang)) reduced.members.push_back(lang);
    if (!reduced.members.empty()) kept.push_back(std::move(reduced));
  }
  return GroupMap(std::move(kept));
}

Dataset make_dataset(std::vector<LabeledSample> train,
                     std::vector<LabeledSample> test) {
  Dataset ds;
  ds.train = std::move(train);
  ds.test = std::move(test);
  std::unordered_set<std::string_view> seen;
  auto collect = [&](const std::vector<LabeledSample>& samples) {
    for (const LabeledSample& s : samples)
      if (seen.insert(s.label).second) ds.languages.push_back(s.label);
  };
  collect(ds.train);
  collect(ds.test);
  return ds;
}

std::vector<LabeledSample> load_tsv(std::istream& in) {
  std::vector<LabeledSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto first_tab = line.find('\t');
    if (first_tab == std::string::npos)
      throw ParseError("expected one TAB separating text from label", line_no);
    if (line.find('\t', first_tab + 1) != std::string::npos)
      throw ParseError("more than one TAB", line_no);
    std::string text = line.substr(0, first_tab);
    if (trim(text).empty()) throw ParseError("empty text field", line_no);
    LanguageCode label = parse_label(line.substr(first_tab + 1), line_no);
    samples.push_back({std::move(text), std::move(label)});
  }
  return samples;
}

std::vector<LabeledSample> load_tsv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset file: " + path);
  try {
    return load_tsv(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_tsv(std::ostream& out, std::span<const LabeledSample> samples) {
  for (const LabeledSample& s : samples)
    out << s.text << '\t' << s.label << '\n';
}

std::string truncate_short(std::string_view text, std::size_t min_len,
                           std::size_t max_len) {
  if (min_len > max_len)
    throw Error("truncate_short: min_len exceeds max_len");
  const std::vector<std::size_t> offs = utf8::codepoint_offsets(text);
  const std::size_t len = offs.size() - 1;
  if (len <= max_len) return std::string(text);

  auto is_space_at = [&](std::size_t cp_index) {
    return utf8::is_space(utf8::decode(text, offs[cp_index]).cp);
  };
  // Word boundaries: prefix lengths that end exactly on a word.
  std::size_t best = 0;
  for (std::size_t p = 1; p <= max_len; ++p) {
    if (!is_space_at(p - 1) && (p == len || is_space_at(p))) best = p;
  }
  const std::size_t cut = (best >= min_len) ? best : max_len;
  return std::string(text.substr(0, offs[cut]));
}

std::uint64_t samples_checksum(std::span<const LabeledSample> samples) {
  Fnv1a hash;
  for (const LabeledSample& s : samples) {
    hash.update(s.text);
    hash.update('\t');
    hash.update(s.label);
    hash.update('\n');
  }
  return hash.digest();
}

}  // namespace lid
