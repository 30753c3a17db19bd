#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mswe/common.hpp"
#include "mswe/nn.hpp"

namespace mswe::corpus {

enum class Provenance { hashtag, emoticon, gold };

// Tweet after tokenization and labeling, before vocabulary encoding.
struct TokenizedTweet {
  std::vector<std::string> tokens;
  Polarity label = Polarity::positive;
  Provenance provenance = Provenance::gold;
};

// Tweet encoded against a vocabulary.
struct LabeledTweet {
  std::vector<int> tokens;
  Polarity label = Polarity::positive;
  Provenance provenance = Provenance::gold;
};

// Bijective word <-> id map with id 0 reserved for the unknown word.
class Vocabulary {
 public:
  static constexpr int kUnkId = 0;
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary();

  // Id for a word; kUnkId when the word is not retained.
  int id(const std::string& word) const;
  const std::string& word(int id) const;
  bool contains(const std::string& word) const;
  std::uint64_t frequency(int id) const;
  std::size_t size() const { return id_to_word_.size(); }  // includes UNK

  // Appends a word with the next id. Used by builders and loaders only.
  int add(const std::string& word, std::uint64_t frequency);

 private:
  std::unordered_map<std::string, int> word_to_id_;
  std::vector<std::string> id_to_word_;
  std::vector<std::uint64_t> freq_;
};

struct SentimentLexicon {
  std::unordered_map<std::string, Polarity> entries;
  std::size_t conflicts = 0;  // words dropped for appearing with both polarities

  std::optional<Polarity> polarity(const std::string& word) const {
    auto it = entries.find(word);
    if (it == entries.end()) return std::nullopt;
    return it->second;
  }
  std::size_t size() const { return entries.size(); }
};

// Distant-supervision marker lists. Hashtag markers start with '#';
// everything else is treated as an emoticon.
struct MarkerConfig {
  std::unordered_map<std::string, Polarity> markers;

  static MarkerConfig defaults();
  // One marker per line under [positive] / [negative] headers, '#'-only
  // comment lines are not supported since hashtags start with '#'; use ';'.
  static MarkerConfig load(const std::string& path);
};

// t consecutive token ids; the modeled word sits at position t/2.
struct ContextWindow {
  std::vector<int> tokens;
  std::size_t tweet_index = 0;

  std::size_t center_pos() const { return tokens.size() / 2; }
  int center() const { return tokens[center_pos()]; }
};

// Lowercases, splits on whitespace, peels leading/trailing punctuation into
// single-character tokens. Emoticons and hashtags stay intact; @-mentions
// become "<user>" and URLs become "<url>". The multiword emoticons ": )"
// and ": (" are collapsed before splitting.
std::vector<std::string> tokenize(std::string_view text);

struct DistantLabel {
  Polarity label = Polarity::positive;
  Provenance provenance = Provenance::hashtag;
  std::vector<std::string> tokens;  // marker tokens removed
};

// Labels a tokenized tweet from its markers. Returns nothing when markers
// of both polarities are present (conflict) or none are.
std::optional<DistantLabel> distant_label(const std::vector<std::string>& tokens,
                                          const MarkerConfig& markers);

// Drops exact-duplicate token sequences (first kept) and tweets shorter
// than the window size.
std::vector<TokenizedTweet> dedupe_and_filter(std::vector<TokenizedTweet> tweets,
                                              std::size_t window);

// Words with frequency >= min_count get ids ordered by descending frequency,
// ties broken lexicographically. Empty corpus is an error.
Vocabulary build_vocab(const std::vector<TokenizedTweet>& tweets,
                       std::uint64_t min_count);

// Hu-Liu list format: one word per line, lines starting with ';' ignored.
// Words present in both files are dropped and counted as conflicts.
SentimentLexicon load_lexicon(const std::string& positive_path,
                              const std::string& negative_path);

LabeledTweet encode(const TokenizedTweet& tweet, const Vocabulary& vocab);

// One window per center position; empty when the tweet is shorter than t.
// No padding is ever used. t must be odd.
std::vector<ContextWindow> extract_windows(const LabeledTweet& tweet,
                                           std::size_t tweet_index, std::size_t t);

// Uniform random non-UNK id different from `center`.
int sample_replacement_id(int center, std::size_t vocab_size, nn::Rng& rng);

// Copy of `window` with the center replaced by a random different word.
ContextWindow corrupt_window(const ContextWindow& window, const Vocabulary& vocab,
                             nn::Rng& rng);

// ---- corpus files ----

// Gold / prepared format: "label<TAB>text" per line, label 1 = positive,
// 0 = negative. Text is re-tokenized on load (tokenize is idempotent).
std::vector<TokenizedTweet> load_gold_corpus(const std::string& path);

// Raw format: one tweet per line, no labels.
std::vector<std::string> load_raw_lines(const std::string& path);

void write_prepared(const std::vector<TokenizedTweet>& tweets,
                    const std::string& path);

}  // namespace mswe::corpus
