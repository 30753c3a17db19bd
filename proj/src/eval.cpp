#include "mswe/eval.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>


namespace mswe::eval {

using corpus::TokenizedTweet;

ConfusionCounts confusion(std::span<const Polarity> gold,
                          std::span<const Polarity> pred) {
  if (gold.size() != pred.size()) {
    throw ConfigError("confusion: gold and prediction lengths differ (" +
                      std::to_string(gold.size()) + " vs " +
                      std::to_string(pred.size()) + ")");
  }
  if (gold.empty()) throw ConfigError("confusion: empty inputs");
  ConfusionCounts counts;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool gold_pos = gold[i] == Polarity::positive;
    const bool pred_pos = pred[i] == Polarity::positive;
    if (gold_pos && pred_pos) {
      ++counts.positive.tp;
      ++counts.negative.tn;
    } else if (gold_pos && !pred_pos) {
      ++counts.positive.fn;
      ++counts.negative.fp;
    } else if (!gold_pos && pred_pos) {
      ++counts.positive.fp;
      ++counts.negative.fn;
    } else {
      ++counts.positive.tn;
      ++counts.negative.tp;
    }
  }
  return counts;
}

namespace {

double f1(const ClassCounts& c) {
  const double p_den = static_cast<double>(c.tp + c.fp);
  const double r_den = static_cast<double>(c.tp + c.fn);
  const double precision = p_den > 0.0 ? static_cast<double>(c.tp) / p_den : 0.0;
  const double recall = r_den > 0.0 ? static_cast<double>(c.tp) / r_den : 0.0;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

double macro_f1(std::span<const Polarity> gold, std::span<const Polarity> pred) {
  ConfusionCounts counts = confusion(gold, pred);
  return (f1(counts.positive) + f1(counts.negative)) / 2.0;
}

PipelineResult run_pipeline(const std::vector<TokenizedTweet>& train_corpus,
                            const corpus::SentimentLexicon& lexicon,
                            const std::vector<TokenizedTweet>& dev_set,
                            const PipelineConfig& config, std::ostream* log) {
  PipelineResult result;
  result.vocab = corpus::build_vocab(train_corpus, config.embedding.min_count);

  std::vector<corpus::LabeledTweet> encoded;
  encoded.reserve(train_corpus.size());
  for (const auto& tweet : train_corpus) {
    encoded.push_back(corpus::encode(tweet, result.vocab));
  }
  train::TrainResult trained =
      train::train(encoded, result.vocab, lexicon, config.embedding, log);
  result.params = std::move(trained.params);
  result.report = std::move(trained.report);

  // Classifier sees only tweets long enough for the embedding model too;
  // the CNN itself pads, so no extra filtering is needed here.
  cls::ClassifierResult cls_result = cls::train_classifier(
      encoded, config.classifier, result.params.embeddings, log);
  result.classifier = std::move(cls_result.params);

  std::vector<corpus::LabeledTweet> dev;
  std::vector<Polarity> gold;
  dev.reserve(dev_set.size());
  for (const auto& tweet : dev_set) {
    dev.push_back(corpus::encode(tweet, result.vocab));
    gold.push_back(tweet.label);
  }
  std::vector<Polarity> pred =
      cls::predict(dev, result.classifier, result.params.embeddings, config.classifier);
  result.dev_macro_f1 = macro_f1(gold, pred);
  return result;
}

std::vector<SweepRow> sweep_beta(const std::vector<TokenizedTweet>& train_corpus,
                                 const corpus::SentimentLexicon& lexicon,
                                 const std::vector<TokenizedTweet>& dev_set,
                                 std::span<const double> betas,
                                 const PipelineConfig& config, std::ostream* log) {
  for (double beta : betas) {
    if (beta < 0.0 || beta > 1.0) {
      throw ConfigError("sweep_beta: beta " + std::to_string(beta) +
                        " outside [0, 1]");
    }
  }
  std::vector<SweepRow> rows;
  for (double beta : betas) {
    PipelineConfig point = config;
    point.embedding.beta = beta;
    if (log) (*log) << "sweep beta=" << beta << '\n';
    try {
      PipelineResult result = run_pipeline(train_corpus, lexicon, dev_set, point, log);
      rows.push_back({beta, config.embedding.seed, result.dev_macro_f1});
    } catch (const NumericalError& e) {
      throw NumericalError("sweep at beta=" + std::to_string(beta) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("sweep at beta=" + std::to_string(beta) + ": " + e.what());
    }
  }
  return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << "beta,seed,macro_f1\n";
  char buf[64];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%g,%llu,%.6f", row.beta,
                  static_cast<unsigned long long>(row.seed), row.macro_f1);
    out << buf << '\n';
  }
}

std::vector<Fold> kfold_split(std::span<const Polarity> labels, std::size_t k,
                              std::uint64_t seed) {
  if (k < 2) throw ConfigError("kfold_split: k must be at least 2");
  if (labels.size() < k) throw ConfigError("kfold_split: dataset smaller than k");

  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] == Polarity::positive ? pos : neg).push_back(i);
  }
  if (pos.size() < k || neg.size() < k) {
    throw ConfigError("kfold_split: a class has fewer than k members");
  }
  nn::Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);

  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < pos.size(); ++i) folds[i % k].push_back(pos[i]);
  for (std::size_t i = 0; i < neg.size(); ++i) folds[i % k].push_back(neg[i]);

  std::vector<Fold> out(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(folds[f].begin(), folds[f].end());
    out[f].test_indices = folds[f];
    for (std::size_t g = 0; g < k; ++g) {
      if (g == f) continue;
      out[f].train_indices.insert(out[f].train_indices.end(), folds[g].begin(),
                                  folds[g].end());
    }
    std::sort(out[f].train_indices.begin(), out[f].train_indices.end());
  }
  return out;
}

}  // namespace mswe::eval
