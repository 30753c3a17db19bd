#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mswe/common.hpp"
#include "mswe/corpus.hpp"

namespace mswe::synth {

// Synthetic distant-supervision corpus: each tweet mixes planted sentiment
// words with neutral filler; its true label is the majority polarity of the
// planted words it contains, and the noisy label flips that with the given
// rate. Makes evaluation runs self-contained.
struct SynthConfig {
  std::size_t tweets = 2000;
  std::size_t positive_words = 20;
  std::size_t negative_words = 20;
  std::size_t neutral_words = 60;
  std::size_t min_length = 6;
  std::size_t max_length = 12;
  double sentiment_token_prob = 0.6;  // chance a token slot is a lexicon word
  double same_polarity_prob = 0.85;   // chance that lexicon word matches the tweet
  double noise = 0.10;                // label flip rate
  std::uint64_t seed = 7;
};

struct SynthTweet {
  std::vector<std::string> tokens;
  Polarity true_label = Polarity::positive;   // majority polarity, pre-noise
  Polarity noisy_label = Polarity::positive;  // training signal
};

struct SynthCorpus {
  std::vector<SynthTweet> tweets;
  std::vector<std::string> positive_words;
  std::vector<std::string> negative_words;
  std::vector<std::string> neutral_words;
};

SynthCorpus generate(const SynthConfig& config);

// TokenizedTweet views: noisy labels for training, clean labels for held-out
// scoring.
std::vector<corpus::TokenizedTweet> as_noisy(const SynthCorpus& corpus,
                                             std::size_t begin, std::size_t end);
std::vector<corpus::TokenizedTweet> as_clean(const SynthCorpus& corpus,
                                             std::size_t begin, std::size_t end);

// "label<TAB>text" lines; label from the noisy or true field.
void write_gold(const SynthCorpus& corpus, const std::string& path, bool noisy_labels);

// One raw tweet per line with a polarity marker appended per the noisy
// label, for exercising the distant-labeling pipeline.
void write_raw_with_markers(const SynthCorpus& corpus, const std::string& path,
                            std::uint64_t seed);

// Planted word lists in Hu-Liu format.
void write_lexicon_files(const SynthCorpus& corpus, const std::string& positive_path,
                         const std::string& negative_path);

}  // namespace mswe::synth
