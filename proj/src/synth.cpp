#include "mswe/synth.hpp"

#include <cstdio>
#include <fstream>

#include "mswe/nn.hpp"

namespace mswe::synth {

namespace {

std::vector<std::string> make_words(const char* prefix, std::size_t count) {
  std::vector<std::string> words(count);
  for (std::size_t i = 0; i < count; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%02zu", prefix, i);
    words[i] = buf;
  }
  return words;
}

}  // namespace

SynthCorpus generate(const SynthConfig& config) {
  if (config.min_length < 1 || config.max_length < config.min_length) {
    throw ConfigError("synth: bad tweet length range");
  }
  if (config.positive_words == 0 || config.negative_words == 0 ||
      config.neutral_words == 0) {
    throw ConfigError("synth: word pools must be non-empty");
  }
  if (config.noise < 0.0 || config.noise > 1.0) {
    throw ConfigError("synth: noise must lie in [0, 1]");
  }

  SynthCorpus corpus;
  corpus.positive_words = make_words("pos", config.positive_words);
  corpus.negative_words = make_words("neg", config.negative_words);
  corpus.neutral_words = make_words("fill", config.neutral_words);

  nn::Rng rng(config.seed);
  corpus.tweets.reserve(config.tweets);
  while (corpus.tweets.size() < config.tweets) {
    const Polarity intended =
        rng.uniform(0.0, 1.0) < 0.5 ? Polarity::positive : Polarity::negative;
    const std::size_t length =
        config.min_length +
        rng.uniform_index(config.max_length - config.min_length + 1);
    SynthTweet tweet;
    std::size_t pos_count = 0, neg_count = 0;
    for (std::size_t i = 0; i < length; ++i) {
      if (rng.uniform(0.0, 1.0) < config.sentiment_token_prob) {
        const bool match = rng.uniform(0.0, 1.0) < config.same_polarity_prob;
        const Polarity pol =
            match ? intended
                  : (intended == Polarity::positive ? Polarity::negative
                                                    : Polarity::positive);
        const auto& pool = pol == Polarity::positive ? corpus.positive_words
                                                     : corpus.negative_words;
        tweet.tokens.push_back(pool[rng.uniform_index(pool.size())]);
        (pol == Polarity::positive ? pos_count : neg_count) += 1;
      } else {
        tweet.tokens.push_back(
            corpus.neutral_words[rng.uniform_index(corpus.neutral_words.size())]);
      }
    }
    if (pos_count == neg_count) continue;  // no majority, redraw the tweet
    tweet.true_label = pos_count > neg_count ? Polarity::positive : Polarity::negative;
    tweet.noisy_label = tweet.true_label;
    if (rng.uniform(0.0, 1.0) < config.noise) {
      tweet.noisy_label = tweet.true_label == Polarity::positive ? Polarity::negative
                                                                : Polarity::positive;
    }
    corpus.tweets.push_back(std::move(tweet));
  }
  return corpus;
}

namespace {

std::vector<corpus::TokenizedTweet> slice(const SynthCorpus& corpus, std::size_t begin,
                                          std::size_t end, bool noisy) {
  if (begin > end || end > corpus.tweets.size()) {
    throw ConfigError("synth: slice out of range");
  }
  std::vector<corpus::TokenizedTweet> out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    corpus::TokenizedTweet tweet;
    tweet.tokens = corpus.tweets[i].tokens;
    tweet.label = noisy ? corpus.tweets[i].noisy_label : corpus.tweets[i].true_label;
    tweet.provenance = corpus::Provenance::gold;
    out.push_back(std::move(tweet));
  }
  return out;
}

}  // namespace

std::vector<corpus::TokenizedTweet> as_noisy(const SynthCorpus& corpus,
                                             std::size_t begin, std::size_t end) {
  return slice(corpus, begin, end, true);
}

std::vector<corpus::TokenizedTweet> as_clean(const SynthCorpus& corpus,
                                             std::size_t begin, std::size_t end) {
  return slice(corpus, begin, end, false);
}

void write_gold(const SynthCorpus& corpus, const std::string& path, bool noisy_labels) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  for (const auto& tweet : corpus.tweets) {
    const Polarity label = noisy_labels ? tweet.noisy_label : tweet.true_label;
    out << (label == Polarity::positive ? '1' : '0') << '\t';
    for (std::size_t i = 0; i < tweet.tokens.size(); ++i) {
      if (i) out << ' ';
      out << tweet.tokens[i];
    }
    out << '\n';
  }
}

void write_raw_with_markers(const SynthCorpus& corpus, const std::string& path,
                            std::uint64_t seed) {
  static const std::vector<std::string> positive_markers = {"#happy", "#joy", ":)",
                                                            ":-)"};
  static const std::vector<std::string> negative_markers = {"#sadness", "#angry", ":(",
                                                            ":-("};
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  nn::Rng rng(seed);
  for (const auto& tweet : corpus.tweets) {
    for (const auto& token : tweet.tokens) out << token << ' ';
    const auto& markers = tweet.noisy_label == Polarity::positive ? positive_markers
                                                                  : negative_markers;
    out << markers[rng.uniform_index(markers.size())] << '\n';
  }
}

void write_lexicon_files(const SynthCorpus& corpus, const std::string& positive_path,
                         const std::string& negative_path) {
  auto write = [](const std::vector<std::string>& words, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << "; planted sentiment words\n";
    for (const auto& w : words) out << w << '\n';
  };
  write(corpus.positive_words, positive_path);
  write(corpus.negative_words, negative_path);
}

}  // namespace mswe::synth
