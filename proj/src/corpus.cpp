#include "mswe/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mswe::corpus {

namespace {

bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Emoticons that survive punctuation peeling. Lowercased forms; the
// multiword ": )" / ": (" variants are collapsed before splitting.
const std::set<std::string>& emoticon_set() {
  static const std::set<std::string> set = {":)", ":-)", ":(", ":-(", ":d", ":p", ";)"};
  return set;
}

bool is_emoticon(const std::string& t) { return emoticon_set().count(t) > 0; }

bool is_url(const std::string& t) {
  return t.rfind("http://", 0) == 0 || t.rfind("https://", 0) == 0 ||
         t.rfind("www.", 0) == 0;
}

bool is_mention(const std::string& t) { return t.size() > 1 && t[0] == '@'; }

// Replace every occurrence of `from` with `to`.
void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// Emoticon glued to the front or back of a token; longest match first, so
// ":-)" wins over ":-". Splitting these off whole keeps tokenize idempotent:
// peeling ":)" into ":" + ")" would re-merge on the next pass.
std::size_t emoticon_prefix(const std::string& t) {
  for (std::size_t len : {3, 2}) {
    if (t.size() > len && emoticon_set().count(t.substr(0, len))) return len;
  }
  return 0;
}

std::size_t emoticon_suffix(const std::string& t) {
  for (std::size_t len : {3, 2}) {
    if (t.size() > len && emoticon_set().count(t.substr(t.size() - len))) return len;
  }
  return 0;
}

void emit_token(std::string t, std::vector<std::string>& out) {
  std::vector<std::string> back;
  while (!t.empty()) {
    if (t == "<user>" || t == "<url>" || is_emoticon(t) || t.size() == 1) break;
    if (is_mention(t)) {
      t = "<user>";
      break;
    }
    if (is_url(t)) {
      t = "<url>";
      break;
    }
    if (std::size_t len = emoticon_prefix(t)) {
      out.push_back(t.substr(0, len));
      t.erase(0, len);
      continue;
    }
    if (std::size_t len = emoticon_suffix(t)) {
      back.push_back(t.substr(t.size() - len));
      t.erase(t.size() - len);
      continue;
    }
    // hashtags keep their leading '#'
    if (is_ascii_punct(t.front()) && !(t.front() == '#' && t.size() > 1)) {
      out.emplace_back(1, t.front());
      t.erase(t.begin());
      continue;
    }
    if (is_ascii_punct(t.back())) {
      back.emplace_back(1, t.back());
      t.pop_back();
      continue;
    }
    break;
  }
  if (!t.empty()) out.push_back(std::move(t));
  out.insert(out.end(), back.rbegin(), back.rend());
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  return in;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::string lowered = to_lower(text);
  // collapse whitespace runs so the multiword emoticons below match any spacing
  std::string normalized;
  normalized.reserve(lowered.size());
  bool in_space = false;
  for (char c : lowered) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !normalized.empty()) normalized += ' ';
    in_space = false;
    normalized += c;
  }
  replace_all(normalized, ": )", " :) ");
  replace_all(normalized, ": (", " :( ");

  std::vector<std::string> out;
  std::istringstream stream(normalized);
  std::string raw;
  while (stream >> raw) emit_token(std::move(raw), out);
  return out;
}

Vocabulary::Vocabulary() {
  id_to_word_.push_back(kUnkToken);
  freq_.push_back(0);
  word_to_id_.emplace(kUnkToken, kUnkId);
}

int Vocabulary::id(const std::string& word) const {
  auto it = word_to_id_.find(word);
  return it == word_to_id_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::word(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_word_.size()) {
    throw QueryError("word id out of range: " + std::to_string(id));
  }
  return id_to_word_[static_cast<std::size_t>(id)];
}

bool Vocabulary::contains(const std::string& word) const {
  auto it = word_to_id_.find(word);
  return it != word_to_id_.end() && it->second != kUnkId;
}

std::uint64_t Vocabulary::frequency(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= freq_.size()) {
    throw QueryError("word id out of range: " + std::to_string(id));
  }
  return freq_[static_cast<std::size_t>(id)];
}

int Vocabulary::add(const std::string& word, std::uint64_t frequency) {
  int id = static_cast<int>(id_to_word_.size());
  auto [it, inserted] = word_to_id_.emplace(word, id);
  if (!inserted) throw ConfigError("duplicate word in vocabulary: " + word);
  id_to_word_.push_back(word);
  freq_.push_back(frequency);
  return id;
}

MarkerConfig MarkerConfig::defaults() {
  MarkerConfig cfg;
  for (const char* m : {"#happy", "#joy", "#happyness", ":)", ":-)", ":d"}) {
    cfg.markers.emplace(m, Polarity::positive);
  }
  for (const char* m : {"#sadness", "#angry", "#frustrated", ":(", ":-("}) {
    cfg.markers.emplace(m, Polarity::negative);
  }
  return cfg;
}

MarkerConfig MarkerConfig::load(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  MarkerConfig cfg;
  std::optional<Polarity> section;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    trimmed.erase(trimmed.find_last_not_of(" \t") + 1);
    if (trimmed.empty() || trimmed[0] == ';') continue;
    if (trimmed == "[positive]") {
      section = Polarity::positive;
      continue;
    }
    if (trimmed == "[negative]") {
      section = Polarity::negative;
      continue;
    }
    if (!section) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": marker before [positive]/[negative] header");
    }
    std::string marker = to_lower(trimmed);
    replace_all(marker, ": )", ":)");
    replace_all(marker, ": (", ":(");
    cfg.markers[marker] = *section;
  }
  if (cfg.markers.empty()) {
    throw ConfigError(path + ": no markers defined");
  }
  return cfg;
}

std::optional<DistantLabel> distant_label(const std::vector<std::string>& tokens,
                                          const MarkerConfig& markers) {
  bool saw_positive = false;
  bool saw_negative = false;
  bool saw_hashtag = false;
  DistantLabel result;
  for (const std::string& tok : tokens) {
    auto it = markers.markers.find(tok);
    if (it == markers.markers.end()) {
      result.tokens.push_back(tok);
      continue;
    }
    if (it->second == Polarity::positive) saw_positive = true;
    if (it->second == Polarity::negative) saw_negative = true;
    if (!tok.empty() && tok[0] == '#') saw_hashtag = true;
  }
  if (saw_positive == saw_negative) return std::nullopt;  // none or conflict
  result.label = saw_positive ? Polarity::positive : Polarity::negative;
  result.provenance = saw_hashtag ? Provenance::hashtag : Provenance::emoticon;
  return result;
}

std::vector<TokenizedTweet> dedupe_and_filter(std::vector<TokenizedTweet> tweets,
                                              std::size_t window) {
  std::set<std::vector<std::string>> seen;
  std::vector<TokenizedTweet> out;
  out.reserve(tweets.size());
  for (auto& tweet : tweets) {
    if (tweet.tokens.size() < window) continue;
    if (!seen.insert(tweet.tokens).second) continue;
    out.push_back(std::move(tweet));
  }
  return out;
}

Vocabulary build_vocab(const std::vector<TokenizedTweet>& tweets,
                       std::uint64_t min_count) {
  if (tweets.empty()) throw ConfigError("build_vocab: empty corpus");
  std::map<std::string, std::uint64_t> counts;
  for (const auto& tweet : tweets) {
    for (const auto& tok : tweet.tokens) ++counts[tok];
  }
  std::vector<std::pair<std::string, std::uint64_t>> retained;
  for (auto& [word, count] : counts) {
    if (count >= min_count) retained.emplace_back(word, count);
  }
  std::sort(retained.begin(), retained.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  for (const auto& [word, count] : retained) vocab.add(word, count);
  return vocab;
}

namespace {

void load_lexicon_file(const std::string& path, Polarity polarity,
                       std::map<std::string, std::set<Polarity>>& raw) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string word = line;
    word.erase(0, word.find_first_not_of(" \t"));
    word.erase(word.find_last_not_of(" \t") + 1);
    if (word.empty() || word[0] == ';') continue;
    raw[to_lower(word)].insert(polarity);
  }
}

}  // namespace

SentimentLexicon load_lexicon(const std::string& positive_path,
                              const std::string& negative_path) {
  std::map<std::string, std::set<Polarity>> raw;
  load_lexicon_file(positive_path, Polarity::positive, raw);
  load_lexicon_file(negative_path, Polarity::negative, raw);
  SentimentLexicon lex;
  for (const auto& [word, polarities] : raw) {
    if (polarities.size() > 1) {
      ++lex.conflicts;
      continue;
    }
    lex.entries.emplace(word, *polarities.begin());
  }
  return lex;
}

LabeledTweet encode(const TokenizedTweet& tweet, const Vocabulary& vocab) {
  LabeledTweet out;
  out.label = tweet.label;
  out.provenance = tweet.provenance;
  out.tokens.reserve(tweet.tokens.size());
  for (const auto& tok : tweet.tokens) out.tokens.push_back(vocab.id(tok));
  return out;
}

std::vector<ContextWindow> extract_windows(const LabeledTweet& tweet,
                                           std::size_t tweet_index, std::size_t t) {
  if (t < 1 || t % 2 == 0) throw ConfigError("extract_windows: t must be odd");
  std::vector<ContextWindow> out;
  if (tweet.tokens.size() < t) return out;
  const std::size_t half = t / 2;
  for (std::size_t center = half; center + half < tweet.tokens.size(); ++center) {
    ContextWindow w;
    w.tweet_index = tweet_index;
    w.tokens.assign(tweet.tokens.begin() + static_cast<std::ptrdiff_t>(center - half),
                    tweet.tokens.begin() + static_cast<std::ptrdiff_t>(center + half + 1));
    out.push_back(std::move(w));
  }
  return out;
}

int sample_replacement_id(int center, std::size_t vocab_size, nn::Rng& rng) {
  const std::size_t real_words = vocab_size > 0 ? vocab_size - 1 : 0;  // minus UNK
  if (real_words < 2 && !(real_words == 1 && center == Vocabulary::kUnkId)) {
    throw ConfigError("sample_replacement_id: vocabulary too small to corrupt");
  }
  for (;;) {
    int candidate = 1 + static_cast<int>(rng.uniform_index(real_words));
    if (candidate != center) return candidate;
  }
}

ContextWindow corrupt_window(const ContextWindow& window, const Vocabulary& vocab,
                             nn::Rng& rng) {
  ContextWindow out = window;
  out.tokens[out.center_pos()] =
      sample_replacement_id(window.center(), vocab.size(), rng);
  return out;
}

std::vector<TokenizedTweet> load_gold_corpus(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<TokenizedTweet> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'label<TAB>text'");
    }
    std::string label = line.substr(0, tab);
    if (label != "0" && label != "1") {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": label must be 0 or 1, got '" + label + "'");
    }
    TokenizedTweet tweet;
    tweet.label = label == "1" ? Polarity::positive : Polarity::negative;
    tweet.provenance = Provenance::gold;
    tweet.tokens = tokenize(line.substr(tab + 1));
    if (tweet.tokens.empty()) continue;
    out.push_back(std::move(tweet));
  }
  return out;
}

std::vector<std::string> load_raw_lines(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

void write_prepared(const std::vector<TokenizedTweet>& tweets,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  for (const auto& tweet : tweets) {
    out << (tweet.label == Polarity::positive ? '1' : '0') << '\t';
    for (std::size_t i = 0; i < tweet.tokens.size(); ++i) {
      if (i) out << ' ';
      out << tweet.tokens[i];
    }
    out << '\n';
  }
}

}  // namespace mswe::corpus
