#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "mswe/corpus.hpp"
#include "mswe/nn.hpp"

using namespace mswe;
using corpus::MarkerConfig;
using corpus::TokenizedTweet;
using corpus::Vocabulary;

namespace {

std::vector<std::string> toks(std::initializer_list<const char*> list) {
  return {list.begin(), list.end()};
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("mswe_corpus_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const char* name, const std::string& content) const {
    auto p = (path / name).string();
    std::ofstream out(p);
    out << content;
    return p;
  }
};

}  // namespace

TEST_CASE("tokenize rule applications") {
  CHECK(corpus::tokenize("I LOVE this!") == toks({"i", "love", "this", "!"}));
  CHECK(corpus::tokenize("@bob check www.x.com :)") ==
        toks({"<user>", "check", "<url>", ":)"}));
  CHECK(corpus::tokenize("#happy day") == toks({"#happy", "day"}));
}

TEST_CASE("tokenize handles urls, punctuation peeling, and emoticons") {
  CHECK(corpus::tokenize("see https://example.org/x now") ==
        toks({"see", "<url>", "now"}));
  CHECK(corpus::tokenize("(good)") == toks({"(", "good", ")"}));
  CHECK(corpus::tokenize("happy : ) day") == toks({"happy", ":)", "day"}));
  CHECK(corpus::tokenize("so sad : (") == toks({"so", "sad", ":("}));
  CHECK(corpus::tokenize("great :-) !!") == toks({"great", ":-)", "!", "!"}));
  CHECK(corpus::tokenize("wow :D") == toks({"wow", ":d"}));
  CHECK(corpus::tokenize("#happy!") == toks({"#happy", "!"}));
  CHECK(corpus::tokenize("don't stop") == toks({"don't", "stop"}));
}

TEST_CASE("tokenize of empty or whitespace text is empty") {
  CHECK(corpus::tokenize("").empty());
  CHECK(corpus::tokenize("   \t  \n").empty());
}

TEST_CASE("tokenize is idempotent on its own output") {
  const char* samples[] = {
      "I LOVE this!",
      "@bob check www.x.com :)",
      "#happy day... really?! :-( https://x.y",
      "a,b,,c  (quoted) 'single' don't",
      "happy : ) sad : ( mixed :D #tag!",
      "!!!",
      "@x @ <3 #",
      "x:) ::)) ab:\t)y great:-) :-(ouch",
  };
  for (const char* s : samples) {
    auto once = corpus::tokenize(s);
    auto twice = corpus::tokenize(join(once));
    CHECK(once == twice);
  }
}

TEST_CASE("tokenize idempotence holds under fuzzing") {
  // characters chosen to hit emoticons, urls, mentions, hashtags, peeling
  const std::string alphabet = "ab:)(-#@.!  \tdw/<>";
  nn::Rng rng(20260809);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const std::size_t len = rng.uniform_index(24);
    for (std::size_t i = 0; i < len; ++i) {
      text += alphabet[rng.uniform_index(alphabet.size())];
    }
    auto once = corpus::tokenize(text);
    auto twice = corpus::tokenize(join(once));
    CAPTURE(text);
    CAPTURE(join(once));
    CHECK(once == twice);
  }
}

TEST_CASE("distant_label on the stock marker lists") {
  auto markers = MarkerConfig::defaults();

  auto pos = corpus::distant_label(toks({"great", "day", "#happy"}), markers);
  REQUIRE(pos.has_value());
  CHECK(pos->label == Polarity::positive);
  CHECK(pos->provenance == corpus::Provenance::hashtag);
  CHECK(pos->tokens == toks({"great", "day"}));

  auto neg = corpus::distant_label(toks({"bad", ":("}), markers);
  REQUIRE(neg.has_value());
  CHECK(neg->label == Polarity::negative);
  CHECK(neg->provenance == corpus::Provenance::emoticon);
  CHECK(neg->tokens == toks({"bad"}));

  CHECK_FALSE(corpus::distant_label(toks({"#happy", "#sadness"}), markers).has_value());
  CHECK_FALSE(corpus::distant_label(toks({"plain", "text"}), markers).has_value());
}

TEST_CASE("distant_label strips every marker token") {
  auto markers = MarkerConfig::defaults();
  auto result =
      corpus::distant_label(toks({":)", "nice", "#happy", "day", ":-)"}), markers);
  REQUIRE(result.has_value());
  for (const auto& tok : result->tokens) {
    CHECK(markers.markers.find(tok) == markers.markers.end());
  }
  CHECK(result->tokens == toks({"nice", "day"}));
}

TEST_CASE("marker config files round-trip sections") {
  TempDir dir;
  auto path = dir.file("markers.conf",
                       "; comment\n[positive]\n#yay\n:)\n[negative]\n#ugh\n");
  auto markers = MarkerConfig::load(path);
  CHECK(markers.markers.at("#yay") == Polarity::positive);
  CHECK(markers.markers.at(":)") == Polarity::positive);
  CHECK(markers.markers.at("#ugh") == Polarity::negative);

  auto bad = dir.file("bad.conf", "#yay\n[positive]\n");
  CHECK_THROWS_AS(MarkerConfig::load(bad), ConfigError);
}

TEST_CASE("dedupe_and_filter drops duplicates and short tweets") {
  std::vector<TokenizedTweet> tweets(4);
  tweets[0].tokens = toks({"a", "b", "c"});
  tweets[1].tokens = toks({"a", "b", "c"});  // duplicate
  tweets[2].tokens = toks({"a", "b"});       // too short for t = 3
  tweets[3].tokens = toks({"c", "b", "a"});
  auto kept = corpus::dedupe_and_filter(tweets, 3);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].tokens == toks({"a", "b", "c"}));
  CHECK(kept[1].tokens == toks({"c", "b", "a"}));
}

TEST_CASE("build_vocab orders by frequency then lexicographically") {
  std::vector<TokenizedTweet> tweets(1);
  tweets[0].tokens = toks({"a", "a", "b"});
  auto vocab = corpus::build_vocab(tweets, 1);
  CHECK(vocab.id("a") == 1);
  CHECK(vocab.id("b") == 2);
  CHECK(vocab.frequency(1) == 2);

  auto cut = corpus::build_vocab(tweets, 2);
  CHECK(cut.id("a") == 1);
  CHECK(cut.id("b") == Vocabulary::kUnkId);

  std::vector<TokenizedTweet> ties(1);
  ties[0].tokens = toks({"zebra", "apple"});
  auto tied = corpus::build_vocab(ties, 1);
  CHECK(tied.id("apple") == 1);
  CHECK(tied.id("zebra") == 2);

  CHECK_THROWS_AS(corpus::build_vocab({}, 1), ConfigError);
}

TEST_CASE("vocabulary round-trips every retained word") {
  std::vector<TokenizedTweet> tweets(2);
  tweets[0].tokens = toks({"red", "green", "blue", "red"});
  tweets[1].tokens = toks({"green", "red", "teal"});
  auto vocab = corpus::build_vocab(tweets, 1);
  for (std::size_t id = 1; id < vocab.size(); ++id) {
    CHECK(vocab.id(vocab.word(static_cast<int>(id))) == static_cast<int>(id));
  }
  CHECK(vocab.id("missing") == Vocabulary::kUnkId);
  CHECK_THROWS_AS(vocab.word(99), QueryError);
}

TEST_CASE("load_lexicon merges files and counts conflicts") {
  TempDir dir;
  auto pos = dir.file("pos.txt", "; header\ngood\nGreat\nshared\n");
  auto neg = dir.file("neg.txt", "bad\nshared\n");
  auto lexicon = corpus::load_lexicon(pos, neg);
  CHECK(lexicon.size() == 3);
  CHECK(lexicon.polarity("good") == Polarity::positive);
  CHECK(lexicon.polarity("great") == Polarity::positive);  // lowercased
  CHECK(lexicon.polarity("bad") == Polarity::negative);
  CHECK_FALSE(lexicon.polarity("shared").has_value());
  CHECK(lexicon.conflicts == 1);

  auto empty_pos = dir.file("empty_pos.txt", "");
  auto empty_neg = dir.file("empty_neg.txt", "; nothing\n");
  auto empty = corpus::load_lexicon(empty_pos, empty_neg);
  CHECK(empty.size() == 0);

  CHECK_THROWS_AS(corpus::load_lexicon("/nonexistent/x.txt", neg), ConfigError);
}

TEST_CASE("extract_windows covers exactly the interior centers") {
  corpus::LabeledTweet tweet;
  tweet.tokens = {1, 2, 3, 4, 5};
  auto windows = corpus::extract_windows(tweet, 7, 3);
  REQUIRE(windows.size() == 3);
  CHECK(windows[0].tokens == std::vector<int>{1, 2, 3});
  CHECK(windows[1].tokens == std::vector<int>{2, 3, 4});
  CHECK(windows[2].tokens == std::vector<int>{3, 4, 5});
  for (const auto& w : windows) {
    CHECK(w.tweet_index == 7);
    CHECK(w.center_pos() == 1);
    CHECK(w.tokens.size() == 3);
  }

  corpus::LabeledTweet two;
  two.tokens = {1, 2};
  CHECK(corpus::extract_windows(two, 0, 3).empty());

  corpus::LabeledTweet three;
  three.tokens = {4, 5, 6};
  auto one = corpus::extract_windows(three, 0, 3);
  REQUIRE(one.size() == 1);
  CHECK(one[0].center() == 5);

  CHECK_THROWS_AS(corpus::extract_windows(tweet, 0, 4), ConfigError);
}

TEST_CASE("corrupt_window replaces only the center, never with itself") {
  std::vector<TokenizedTweet> tweets(1);
  tweets[0].tokens = toks({"a", "b", "c", "d", "e"});
  auto vocab = corpus::build_vocab(tweets, 1);
  nn::Rng rng(17);
  corpus::ContextWindow window;
  window.tokens = {vocab.id("a"), vocab.id("b"), vocab.id("c")};
  for (int trial = 0; trial < 500; ++trial) {
    auto corrupted = corpus::corrupt_window(window, vocab, rng);
    CHECK(corrupted.tokens[0] == window.tokens[0]);
    CHECK(corrupted.tokens[2] == window.tokens[2]);
    CHECK(corrupted.center() != window.center());
    CHECK(corrupted.center() != Vocabulary::kUnkId);
  }
}

TEST_CASE("corrupt_window draws replacements uniformly (3 sigma per word)") {
  // |V| = 11 -> 10 real words, 9 valid replacements for a real center.
  std::vector<TokenizedTweet> tweets(1);
  for (char c = 'a'; c <= 'j'; ++c) {
    tweets[0].tokens.push_back(std::string(1, c));
  }
  auto vocab = corpus::build_vocab(tweets, 1);
  REQUIRE(vocab.size() == 11);

  corpus::ContextWindow window;
  window.tokens = {vocab.id("a"), vocab.id("b"), vocab.id("c")};
  const int draws = 10000;
  std::map<int, int> counts;
  nn::Rng rng(23);
  for (int i = 0; i < draws; ++i) {
    ++counts[corpus::corrupt_window(window, vocab, rng).center()];
  }
  CHECK(counts.size() == 9);
  const double p = 1.0 / 9.0;
  const double expected = draws * p;
  const double sigma = std::sqrt(draws * p * (1.0 - p));
  for (const auto& [id, count] : counts) {
    CHECK(std::abs(count - expected) <= 3.0 * sigma);
  }
}

TEST_CASE("gold corpus files round-trip through prepare format") {
  TempDir dir;
  auto path = dir.file("gold.tsv", "1\tgood day today\n0\tbad sad time\n");
  auto tweets = corpus::load_gold_corpus(path);
  REQUIRE(tweets.size() == 2);
  CHECK(tweets[0].label == Polarity::positive);
  CHECK(tweets[1].label == Polarity::negative);
  CHECK(tweets[0].tokens == toks({"good", "day", "today"}));

  auto out = (dir.path / "prepared.tsv").string();
  corpus::write_prepared(tweets, out);
  auto reloaded = corpus::load_gold_corpus(out);
  REQUIRE(reloaded.size() == 2);
  CHECK(reloaded[0].tokens == tweets[0].tokens);
  CHECK(reloaded[1].label == tweets[1].label);

  auto bad = dir.file("bad.tsv", "2\toops\n");
  CHECK_THROWS_AS(corpus::load_gold_corpus(bad), ConfigError);
  auto missing_tab = dir.file("bad2.tsv", "1 no tab here\n");
  CHECK_THROWS_AS(corpus::load_gold_corpus(missing_tab), ConfigError);
}
