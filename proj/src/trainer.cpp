#include "mswe/trainer.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

namespace mswe::train {

using corpus::ContextWindow;
using corpus::LabeledTweet;

void TrainConfig::validate() const {
  if (window == 0 || window % 2 == 0) throw ConfigError("train: window must be odd");
  if (dim == 0 || hidden == 0) throw ConfigError("train: dim and hidden must be positive");
  if (main_batch < 1) throw ConfigError("train: main_batch must be at least 1");
  if (!(lr > 0.0)) throw ConfigError("train: lr must be positive");
  if (!(init_scale > 0.0)) throw ConfigError("train: init_scale must be positive");
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("train: alpha must lie in [0, 1]");
  if (beta < 0.0 || beta > 1.0) throw ConfigError("train: beta must lie in [0, 1]");
}

TrainResult train(const std::vector<LabeledTweet>& tweets,
                  const corpus::Vocabulary& vocab,
                  const corpus::SentimentLexicon& lexicon, const TrainConfig& config,
                  std::ostream* log, const std::string& resume_from) {
  config.validate();

  // Keep only tweets long enough to yield at least one window.
  std::vector<const LabeledTweet*> usable;
  TrainReport report;
  for (const auto& tweet : tweets) {
    if (tweet.tokens.size() < config.window) {
      ++report.tweets_skipped;
    } else {
      usable.push_back(&tweet);
    }
  }
  if (usable.empty()) throw ConfigError("train: no usable tweets in corpus");
  report.tweets_used = usable.size();

  // Pre-extract each usable tweet's window list (its word-level batch).
  std::vector<std::vector<ContextWindow>> windows(usable.size());
  std::vector<bool> touched(vocab.size(), false);
  for (std::size_t i = 0; i < usable.size(); ++i) {
    windows[i] = corpus::extract_windows(*usable[i], i, config.window);
    report.total_windows += windows[i].size();
    for (const auto& w : windows[i]) {
      for (int id : w.tokens) touched[static_cast<std::size_t>(id)] = true;
    }
  }

  model::MsweHyper hyper{config.window, config.dim, config.hidden,
                         config.alpha, config.beta};
  nn::Rng rng(config.seed);
  model::MsweParams params =
      model::MsweParams::init(vocab.size(), hyper, rng, config.init_scale);
  model::IdLexicon id_lexicon = model::IdLexicon::build(vocab, lexicon);
  std::size_t start_epoch = 0;

  if (!resume_from.empty()) {
    model::Checkpoint ck = model::load_checkpoint(resume_from);
    if (ck.vocab.size() != vocab.size()) {
      throw ConfigError("resume: checkpoint vocabulary size differs from corpus");
    }
    for (std::size_t id = 0; id < vocab.size(); ++id) {
      if (ck.vocab.word(static_cast<int>(id)) != vocab.word(static_cast<int>(id))) {
        throw ConfigError("resume: checkpoint vocabulary differs at id " +
                          std::to_string(id));
      }
    }
    if (ck.params.hyper.window != hyper.window || ck.params.hyper.dim != hyper.dim ||
        ck.params.hyper.hidden != hyper.hidden) {
      throw ConfigError("resume: checkpoint hyperparameters differ from config");
    }
    params = std::move(ck.params);
    params.hyper.alpha = config.alpha;
    params.hyper.beta = config.beta;
    rng.restore(ck.state.rng_state);
    start_epoch = ck.state.completed_epochs;
  }

  std::vector<std::size_t> order(usable.size());

  for (std::size_t epoch = start_epoch; epoch < config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    // Each epoch shuffles the identity so that the visiting order depends
    // only on the RNG stream position; resumed runs then match straight ones.
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);

    double loss_sum = 0.0, word_sum = 0.0, tweet_sum = 0.0;
    std::size_t windows_seen = 0;
    std::size_t steps = 0;

    for (std::size_t begin = 0; begin < order.size(); begin += config.main_batch) {
      const std::size_t end = std::min(begin + config.main_batch, order.size());
      model::MsweGrads batch_grads = model::MsweGrads::zeros_like(params);
      for (std::size_t pos = begin; pos < end; ++pos) {
        const std::size_t i = order[pos];
        std::vector<int> corrupt_centers;
        corrupt_centers.reserve(windows[i].size());
        for (const auto& w : windows[i]) {
          corrupt_centers.push_back(
              corpus::sample_replacement_id(w.center(), vocab.size(), rng));
        }
        model::MsweLossResult result = model::mswe_loss_fixed(
            *usable[i], windows[i], corrupt_centers, id_lexicon, params);
        if (!std::isfinite(result.loss)) {
          throw NumericalError("train: non-finite loss at epoch " +
                               std::to_string(epoch + 1) + ", batch " +
                               std::to_string(begin / config.main_batch + 1));
        }
        loss_sum += result.loss;
        word_sum += result.word_loss;
        tweet_sum += result.tweet_loss;
        windows_seen += result.window_count;
        batch_grads.add(result.grads);
      }
      batch_grads.scale(1.0 / static_cast<double>(end - begin));
      auto param_refs = params.tensor_refs();
      auto grad_refs = batch_grads.tensor_refs();
      for (std::size_t t = 0; t < param_refs.size(); ++t) {
        nn::sgd_step(param_refs[t].values, grad_refs[t].values, config.lr,
                     param_refs[t].name.data());
      }
      ++steps;
    }

    EpochStats stats;
    stats.epoch = epoch + 1;
    const double count = static_cast<double>(order.size());
    stats.mean_loss = loss_sum / count;
    stats.mean_word_loss = word_sum / count;
    stats.mean_tweet_loss = tweet_sum / count;
    stats.windows_seen = windows_seen;
    stats.optimizer_steps = steps;
    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.epochs.push_back(stats);
    if (log) {
      (*log) << "epoch=" << stats.epoch << " loss=" << stats.mean_loss
             << " loss_w=" << stats.mean_word_loss
             << " loss_t=" << stats.mean_tweet_loss << '\n';
    }

    const bool last = epoch + 1 == config.epochs;
    const bool periodic =
        config.checkpoint_every > 0 && (epoch + 1) % config.checkpoint_every == 0;
    if (!config.checkpoint_path.empty() && (periodic || last)) {
      model::TrainerState state{rng.state(), epoch + 1};
      model::save_checkpoint(params, vocab, state, config.checkpoint_path);
    }
  }

  for (std::size_t id = 0; id < touched.size(); ++id) {
    if (!touched[id]) ++report.untouched_embedding_rows;
  }
  return {std::move(params), std::move(report)};
}

}  // namespace mswe::train
