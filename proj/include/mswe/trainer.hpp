#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mswe/corpus.hpp"
#include "mswe/model.hpp"

namespace mswe::train {

struct TrainConfig {
  std::size_t window = 3;       // t
  std::size_t dim = 50;         // d
  std::size_t hidden = 20;      // h
  std::size_t main_batch = 32;  // tweet-level batch; the word-level batch is
                                // each tweet's own window list
  double lr = 0.01;
  double alpha = 0.5;
  double beta = 0.8;
  double init_scale = 0.01;  // uniform(-s, s) draws for weights and embeddings
  std::size_t epochs = 5;
  std::uint64_t seed = 1;
  std::uint64_t min_count = 1;
  std::size_t checkpoint_every = 0;  // epochs; 0 disables periodic checkpoints
  std::string checkpoint_path;

  void validate() const;  // throws ConfigError
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double mean_word_loss = 0.0;
  double mean_tweet_loss = 0.0;
  std::size_t windows_seen = 0;
  std::size_t optimizer_steps = 0;
  double wall_seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::size_t tweets_used = 0;
  std::size_t tweets_skipped = 0;  // shorter than the window size
  std::size_t total_windows = 0;
  std::size_t untouched_embedding_rows = 0;  // never appeared in any window
};

struct TrainResult {
  model::MsweParams params;
  TrainReport report;
};

// Epochs of shuffled main batches; one SGD step per batch on the mean of
// the per-tweet joint losses. All randomness (init, shuffling, corruption)
// flows from config.seed. Progress lines go to `log` when given.
// When `resume_from` names a checkpoint, training continues it: the tensors,
// RNG stream and epoch counter pick up where the checkpoint left off.
TrainResult train(const std::vector<corpus::LabeledTweet>& tweets,
                  const corpus::Vocabulary& vocab,
                  const corpus::SentimentLexicon& lexicon, const TrainConfig& config,
                  std::ostream* log = nullptr, const std::string& resume_from = "");

}  // namespace mswe::train
