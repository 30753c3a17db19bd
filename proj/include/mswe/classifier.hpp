#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mswe/common.hpp"
#include "mswe/corpus.hpp"
#include "mswe/model.hpp"
#include "mswe/nn.hpp"

namespace mswe::cls {

struct ClassifierConfig {
  std::vector<std::size_t> filter_widths = {2, 3, 4, 5};  // S
  std::size_t filters_per_width = 30;                     // N
  std::size_t hidden = 200;                               // H
  double keep_input = 0.8;   // d1, dropout keep-probability on embeddings
  double keep_hidden = 0.7;  // d2, keep-probability on the ReLU layer
  double lr = 0.01;          // AdaGrad learning rate
  std::size_t batch = 32;
  std::size_t epochs = 200;
  std::uint64_t seed = 1;

  std::size_t feature_dim() const { return filters_per_width * filter_widths.size(); }
  std::size_t max_width() const;
  void validate() const;  // throws ConfigError
};

struct ClassifierParams {
  // filter_weights[wi] packs the N filters for width S[wi], one per row,
  // each row s*d long; filter_bias[wi] holds the N matching biases.
  std::vector<nn::Matrix> filter_weights;
  std::vector<nn::Vector> filter_bias;
  nn::Matrix hidden_weight;  // H x (N*|S|)
  nn::Vector hidden_bias;    // H
  nn::Matrix out_weight;     // 2 x H
  nn::Vector out_bias;       // 2
  std::vector<std::size_t> filter_widths;
  std::size_t embedding_dim = 0;

  static ClassifierParams init(const ClassifierConfig& config, std::size_t embedding_dim,
                               nn::Rng& rng);
  std::vector<model::TensorRef> tensor_refs();
};

enum class Mode { train, infer };

// Max-pooled convolution features without dropout, N*|S| values in
// (width, filter) order. Exposed for inspection and tests.
nn::Vector conv_features(const model::EmbeddingTable& table,
                         std::span<const int> tokens, const ClassifierParams& params);

// Softmax distribution [positive, negative] for one tweet. Tweets shorter
// than the widest filter are right-padded with zero vectors. Dropout (with
// inverted scaling) runs in train mode only; keep == 1.0 is a no-op.
std::array<double, 2> classify_forward(const model::EmbeddingTable& table,
                                       std::span<const int> tokens,
                                       const ClassifierParams& params, Mode mode,
                                       const ClassifierConfig& config, nn::Rng& rng);

// Cross-entropy of classify_forward against a one-hot gold label, plus
// analytic gradients for every classifier tensor. Masks are the dropout
// masks already scaled by 1/keep (all ones disables dropout). Embeddings
// receive no gradient: they are frozen.
struct ForwardBackwardResult {
  double loss = 0.0;
  std::array<double, 2> distribution{};
  ClassifierParams grads;  // same shapes, gradient values
};
ForwardBackwardResult classifier_loss_and_grads(const model::EmbeddingTable& table,
                                                std::span<const int> tokens,
                                                Polarity label,
                                                const ClassifierParams& params,
                                                std::span<const double> input_mask,
                                                std::span<const double> hidden_mask);

struct EpochHistory {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
};

struct ClassifierResult {
  ClassifierParams params;
  std::vector<EpochHistory> history;
};

// Mini-batch AdaGrad training on frozen embeddings, deterministic under
// config.seed. Aborts (NumericalError) on a non-finite loss.
ClassifierResult train_classifier(const std::vector<corpus::LabeledTweet>& tweets,
                                  const ClassifierConfig& config,
                                  const model::EmbeddingTable& table,
                                  std::ostream* log = nullptr);

Polarity predict_one(const model::EmbeddingTable& table, std::span<const int> tokens,
                     const ClassifierParams& params, const ClassifierConfig& config);

// Argmax of the inference distribution; an exact tie goes to positive.
std::vector<Polarity> predict(const std::vector<corpus::LabeledTweet>& tweets,
                              const ClassifierParams& params,
                              const model::EmbeddingTable& table,
                              const ClassifierConfig& config);

inline constexpr std::string_view kClassifierMagic = "mswe-classifier";
inline constexpr int kClassifierVersion = 1;

// Versioned text checkpoint; round-trips bitwise.
void save_classifier(const ClassifierParams& params, const std::string& path);
ClassifierParams load_classifier(const std::string& path);

}  // namespace mswe::cls
