#include "applause/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "applause/error.hpp"
#include "applause/text.hpp"

namespace applause {

namespace {

constexpr std::array<std::string_view, kPhonemeCount> kPhonemeNames = {
    "AA", "AE", "AH", "AO", "AW", "AY", "B",  "CH", "D",  "DH",
    "EH", "ER", "EY", "F",  "G",  "HH", "IH", "IY", "JH", "K",
    "L",  "M",  "N",  "NG", "OW", "OY", "P",  "R",  "S",  "SH",
    "T",  "TH", "UH", "UW", "V",  "W",  "Y",  "Z",  "ZH"};

std::string line_error(std::string_view what, std::size_t line_no,
                       std::string_view line) {
  return std::string(what) + " at line " + std::to_string(line_no) + ": '" +
         std::string(line) + "'";
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    const std::size_t begin = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
    if (pos > begin) fields.push_back(line.substr(begin, pos - begin));
  }
  return fields;
}

std::vector<std::string_view> split_on(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  while (true) {
    const auto end = line.find(sep, begin);
    fields.push_back(line.substr(begin, end - begin));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return fields;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

std::string strip_stress(std::string_view symbol) {
  while (!symbol.empty() && symbol.back() >= '0' && symbol.back() <= '2') {
    symbol.remove_suffix(1);
  }
  return std::string(symbol);
}

std::optional<Phoneme> parse_phoneme(std::string_view symbol) {
  const std::string bare = to_upper_ascii(strip_stress(symbol));
  const auto it = std::find(kPhonemeNames.begin(), kPhonemeNames.end(), bare);
  if (it == kPhonemeNames.end()) return std::nullopt;
  return static_cast<Phoneme>(it - kPhonemeNames.begin());
}

std::string_view to_string(Phoneme phoneme) {
  return kPhonemeNames[static_cast<std::size_t>(phoneme)];
}

void PhoneticDict::add(const std::string& word, Pronunciation pronunciation) {
  entries_[to_upper_ascii(word)].push_back(std::move(pronunciation));
}

const Pronunciation* PhoneticDict::lookup(std::string_view word) const {
  const auto it = entries_.find(to_upper_ascii(word));
  if (it == entries_.end() || it->second.empty()) return nullptr;
  return &it->second.front();
}

std::span<const Pronunciation> PhoneticDict::pronunciations(
    std::string_view word) const {
  const auto it = entries_.find(to_upper_ascii(word));
  if (it == entries_.end()) return {};
  return it->second;
}

std::optional<Pronunciation> lookup_phonemes(const PhoneticDict& dict,
                                             std::string_view word) {
  if (const Pronunciation* p = dict.lookup(word)) return *p;
  return std::nullopt;
}

PhoneticDict load_phonetic_dict(std::istream& in) {
  PhoneticDict dict;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = strip_cr(raw);
    if (line.starts_with(";;;")) continue;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) {
      throw Error(ErrorCode::kParse,
                  line_error("entry without phonemes", line_no, raw));
    }
    std::string_view word = fields[0];
    if (word.size() > 3 && word.back() == ')') {
      const auto open = word.rfind('(');
      if (open != std::string_view::npos && open > 0) word = word.substr(0, open);
    }
    Pronunciation pronunciation;
    pronunciation.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto phoneme = parse_phoneme(fields[i]);
      if (!phoneme) {
        throw Error(ErrorCode::kParse,
                    line_error("unknown phoneme '" + std::string(fields[i]) + "'",
                               line_no, raw));
      }
      pronunciation.push_back(*phoneme);
    }
    dict.add(std::string(word), std::move(pronunciation));
  }
  return dict;
}

EmotionSet EmotionLexicon::categories(const std::string& word) const {
  const auto it = word_to_categories.find(word);
  return it == word_to_categories.end() ? EmotionSet{} : it->second;
}

EmotionLexicon load_emotion_lexicon(std::istream& in) {
  EmotionLexicon lexicon;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (trim(line).empty()) continue;
    const auto fields = split_on(line, '\t');
    if (fields.size() != 3) {
      throw Error(ErrorCode::kParse,
                  line_error("expected word<TAB>category<TAB>flag", line_no, raw));
    }
    const std::string category = to_lower_ascii(trim(fields[1]));
    const auto it = std::find(kEmotionNames.begin(), kEmotionNames.end(), category);
    if (it == kEmotionNames.end()) {
      throw Error(ErrorCode::kParse,
                  line_error("unknown emotion category '" + category + "'",
                             line_no, raw));
    }
    const std::string_view flag = trim(fields[2]);
    if (flag != "0" && flag != "1") {
      throw Error(ErrorCode::kParse, line_error("flag must be 0 or 1", line_no, raw));
    }
    if (flag == "0") continue;
    const std::string word = to_lower_ascii(trim(fields[0]));
    if (word.empty()) {
      throw Error(ErrorCode::kParse, line_error("empty word", line_no, raw));
    }
    lexicon.word_to_categories[word].set(
        static_cast<std::size_t>(it - kEmotionNames.begin()));
  }
  return lexicon;
}

std::vector<CategoryLexicon> load_category_lexicon_file(std::istream& in) {
  std::vector<CategoryLexicon> lexicons;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (trim(line).empty() || line.starts_with('#')) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::kParse,
                  line_error("expected term<TAB>category", line_no, raw));
    }
    std::string term = to_lower_ascii(trim(line.substr(0, tab)));
    const std::string category(trim(line.substr(tab + 1)));
    bool prefix = false;
    if (!term.empty() && term.back() == '*') {
      prefix = true;
      term.pop_back();
    }
    if (term.empty() || category.empty()) {
      throw Error(ErrorCode::kParse, line_error("empty term or category", line_no, raw));
    }
    auto it = std::find_if(lexicons.begin(), lexicons.end(),
                           [&](const CategoryLexicon& c) {
                             return c.category_name == category;
                           });
    if (it == lexicons.end()) {
      lexicons.push_back(CategoryLexicon{category, {}, {}});
      it = std::prev(lexicons.end());
    }
    (prefix ? it->prefix_terms : it->exact_terms).insert(std::move(term));
  }
  return lexicons;
}

bool match_token(const CategoryLexicon& lexicon, std::string_view token) {
  const std::string key(token);
  if (lexicon.exact_terms.count(key) > 0) return true;
  if (token.empty()) return false;
  // Any matching prefix sorts at or before the token; walk back from there.
  auto it = lexicon.prefix_terms.upper_bound(key);
  while (it != lexicon.prefix_terms.begin()) {
    --it;
    if (token.starts_with(*it)) return true;
    if (it->empty() || (*it)[0] != token[0]) break;
  }
  return false;
}

bool matches_any_prefix(std::span<const std::string> prefixes,
                        std::string_view token) {
  return std::any_of(prefixes.begin(), prefixes.end(),
                     [&](const std::string& p) { return token.starts_with(p); });
}

NameSet load_name_set(std::istream& in, std::uint64_t min_count) {
  NameSet set;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(strip_cr(raw));
    if (line.empty() || line.starts_with('#')) continue;
    std::string_view name = line;
    std::optional<std::uint64_t> count;
    std::vector<std::string_view> fields;
    if (line.find(',') != std::string_view::npos) {
      fields = split_on(line, ',');
    } else if (line.find('\t') != std::string_view::npos) {
      fields = split_on(line, '\t');
    }
    if (!fields.empty()) {
      name = trim(fields.front());
      const std::string_view last = trim(fields.back());
      std::uint64_t value = 0;
      const auto [ptr, ec] =
          std::from_chars(last.data(), last.data() + last.size(), value);
      if (fields.size() < 2 || ec != std::errc{} || ptr != last.data() + last.size()) {
        throw Error(ErrorCode::kParse, line_error("malformed name entry", line_no, raw));
      }
      count = value;
    }
    if (name.empty() || name.find(' ') != std::string_view::npos) {
      throw Error(ErrorCode::kParse,
                  line_error("name must be a single token", line_no, raw));
    }
    if (count && *count < min_count) continue;
    set.names.insert(to_lower_ascii(name));
  }
  if (set.names.empty()) {
    throw Error(ErrorCode::kParse, "name list is empty");
  }
  return set;
}

LexiconBundle load_bundle(const LexiconPaths& paths) {
  namespace fs = std::filesystem;
  std::string missing;
  for (const fs::path* p : {&paths.phonetic_dict, &paths.emotion_lexicon,
                            &paths.category_lexicon, &paths.names}) {
    if (p->empty() || !fs::is_regular_file(*p)) {
      missing += "\n  " + (p->empty() ? std::string("<unset>") : p->string());
    }
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::kMissingResource, "missing lexicon files:" + missing);
  }
  auto open = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot read " + p.string());
    return in;
  };
  LexiconBundle bundle;
  {
    auto in = open(paths.phonetic_dict);
    bundle.phonetic = load_phonetic_dict(in);
  }
  {
    auto in = open(paths.emotion_lexicon);
    bundle.emotions = load_emotion_lexicon(in);
  }
  {
    auto in = open(paths.category_lexicon);
    bundle.categories = load_category_lexicon_file(in);
  }
  {
    auto in = open(paths.names);
    bundle.names = load_name_set(in, paths.name_min_count);
  }
  return bundle;
}

}  // namespace applause
