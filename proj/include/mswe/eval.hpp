#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mswe/classifier.hpp"
#include "mswe/common.hpp"
#include "mswe/corpus.hpp"
#include "mswe/trainer.hpp"

namespace mswe::eval {

struct ClassCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct ConfusionCounts {
  ClassCounts positive;
  ClassCounts negative;
};

ConfusionCounts confusion(std::span<const Polarity> gold, std::span<const Polarity> pred);

// Unweighted mean of the per-class F1 scores. 0/0 precision or recall is 0.
double macro_f1(std::span<const Polarity> gold, std::span<const Polarity> pred);

struct SweepRow {
  double beta = 0.0;
  std::uint64_t seed = 0;
  double macro_f1 = 0.0;
};

struct PipelineConfig {
  train::TrainConfig embedding;
  cls::ClassifierConfig classifier;
};

struct PipelineResult {
  corpus::Vocabulary vocab;
  model::MsweParams params;
  train::TrainReport report;
  cls::ClassifierParams classifier;
  double dev_macro_f1 = 0.0;
};

// Full pipeline at one configuration: build vocabulary from the training
// corpus, train embeddings, train the classifier on the same corpus with
// frozen embeddings, score macro-F1 on the dev set.
PipelineResult run_pipeline(const std::vector<corpus::TokenizedTweet>& train_corpus,
                            const corpus::SentimentLexicon& lexicon,
                            const std::vector<corpus::TokenizedTweet>& dev_set,
                            const PipelineConfig& config, std::ostream* log = nullptr);

// One pipeline run per beta; every run shares the seed and all non-beta
// configuration. Rows come back in beta order.
std::vector<SweepRow> sweep_beta(const std::vector<corpus::TokenizedTweet>& train_corpus,
                                 const corpus::SentimentLexicon& lexicon,
                                 const std::vector<corpus::TokenizedTweet>& dev_set,
                                 std::span<const double> betas,
                                 const PipelineConfig& config,
                                 std::ostream* log = nullptr);

// Header "beta,seed,macro_f1", one row per run.
void write_sweep_csv(std::span<const SweepRow> rows, const std::string& path);

struct Fold {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// Stratified k-fold partition: folds are disjoint, cover every index, and
// per-class fold sizes differ by at most one. A class with fewer than k
// members is an error.
std::vector<Fold> kfold_split(std::span<const Polarity> labels, std::size_t k,
                              std::uint64_t seed);

}  // namespace mswe::eval
