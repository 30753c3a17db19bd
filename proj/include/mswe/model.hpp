#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mswe/common.hpp"
#include "mswe/corpus.hpp"
#include "mswe/nn.hpp"

namespace mswe::model {

// The word-sentiment head scores follow the lexicon label encoding:
// slot 0 carries the negative-polarity score, slot 1 the positive one.
// (2-class *distributions* elsewhere use slot 0 = positive; see common.hpp.)
inline constexpr std::size_t kWsNegativeSlot = 0;
inline constexpr std::size_t kWsPositiveSlot = 1;

inline std::size_t ws_slot(Polarity p) {
  return p == Polarity::positive ? kWsPositiveSlot : kWsNegativeSlot;
}

struct MsweHyper {
  std::size_t window = 3;  // t, odd
  std::size_t dim = 50;    // d
  std::size_t hidden = 20; // h
  double alpha = 0.5;      // n-gram vs word-sentiment weight inside the word level
  double beta = 0.8;       // word level vs tweet level weight

  std::size_t concat_dim() const { return window * dim; }
  std::size_t pooled_dim() const { return 3 * hidden; }  // max | avg | min
};

// |V| x d lookup table. Row 0 belongs to the unknown word: it takes part in
// lookups but is excluded from nearest-neighbor reports.
struct EmbeddingTable {
  nn::Matrix vectors;

  std::size_t vocab_size() const { return vectors.rows; }
  std::size_t dim() const { return vectors.cols; }
  std::span<const double> row(int id) const {
    return vectors.row(static_cast<std::size_t>(id));
  }
};

struct TensorRef {
  std::string_view name;
  std::span<double> values;
};

// All trainable tensors of the two-sub-network model.
struct MsweParams {
  EmbeddingTable embeddings;       // |V| x d
  nn::Matrix shared_weight;        // h x (t*d), applied to concatenated windows
  nn::Vector shared_bias;          // h
  nn::Vector ngram_head;           // h (a single output row)
  nn::Matrix ws_head;              // 2 x h, rows [negative, positive]
  nn::Matrix tweet_hidden_weight;  // h x 3h, over [max|avg|min] pooling
  nn::Vector tweet_hidden_bias;    // h
  nn::Matrix tweet_out_weight;     // 2 x h, rows [positive, negative]
  nn::Vector tweet_out_bias;       // 2
  MsweHyper hyper;

  // Weights and embeddings uniform(-init_range, init_range), biases zero,
  // shapes from (vocab_size, hyper). Draw order is fixed for reproducibility.
  static MsweParams init(std::size_t vocab_size, const MsweHyper& hyper, nn::Rng& rng,
                         double init_range = nn::kInitRange);

  std::vector<TensorRef> tensor_refs();
  void check_consistent() const;  // throws ConfigError on any shape violation
};

// Gradient mirror of MsweParams. Untouched embedding rows stay zero.
struct MsweGrads {
  nn::Matrix embeddings;
  nn::Matrix shared_weight;
  nn::Vector shared_bias;
  nn::Vector ngram_head;
  nn::Matrix ws_head;
  nn::Matrix tweet_hidden_weight;
  nn::Vector tweet_hidden_bias;
  nn::Matrix tweet_out_weight;
  nn::Vector tweet_out_bias;

  static MsweGrads zeros_like(const MsweParams& params);
  std::vector<TensorRef> tensor_refs();
  void add(const MsweGrads& other);
  void scale(double factor);
};

struct WordLevelOutput {
  nn::Vector e;                  // shared unit output, h
  nn::Vector a1;                 // hTanh(e), entries in [-1, 1]
  double f_ngram = 0.0;          // n-gram score
  std::array<double, 2> f_ws{};  // raw word-sentiment scores [negative, positive]
};

struct TweetLevelOutput {
  nn::Vector pooled;              // [max|avg|min](e), 3h
  nn::Vector a2;                  // hidden layer, h
  std::array<double, 2> f_ds{};   // softmax distribution [positive, negative]
};

// e = W*concat(embeddings of window) + b. The shared unit is linear; the
// word-level hTanh is applied by the caller, the tweet level pools e as is.
nn::Vector shared_forward(const MsweParams& params, const corpus::ContextWindow& window);

WordLevelOutput word_level_forward(const MsweParams& params,
                                   const corpus::ContextWindow& window);

// alpha * hinge(ngram) + (1-alpha) * hinge(word sentiment) when the center
// carries a lexicon label; plain hinge(ngram) otherwise.
double word_level_loss(const MsweParams& params, const corpus::ContextWindow& window,
                       const corpus::ContextWindow& corrupted,
                       std::optional<Polarity> center_label);

TweetLevelOutput tweet_level_forward(const MsweParams& params,
                                     std::span<const corpus::ContextWindow> windows);

// Cross-entropy of the distant-supervision softmax against the gold
// distribution ([positive, negative], one-hot).
double tweet_level_loss(const MsweParams& params,
                        std::span<const corpus::ContextWindow> windows,
                        const std::array<double, 2>& gold);

// Per-id view of a lexicon under a fixed vocabulary.
struct IdLexicon {
  std::vector<std::int8_t> tag;  // 0 none, 1 positive, 2 negative

  static IdLexicon build(const corpus::Vocabulary& vocab,
                         const corpus::SentimentLexicon& lexicon);
  std::optional<Polarity> polarity(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= tag.size() || tag[id] == 0) {
      return std::nullopt;
    }
    return tag[id] == 1 ? Polarity::positive : Polarity::negative;
  }
};

struct MsweLossResult {
  double loss = 0.0;        // beta * word_loss + (1-beta) * tweet_loss
  double word_loss = 0.0;   // mean over the tweet's windows
  double tweet_loss = 0.0;
  std::size_t window_count = 0;
  MsweGrads grads;
};

// Joint loss and exact analytic subgradients for one tweet. Corrupted
// centers are fixed by the caller (one per window); this is the
// deterministic core used by both training and gradient checking.
MsweLossResult mswe_loss_fixed(const corpus::LabeledTweet& tweet,
                               std::span<const corpus::ContextWindow> windows,
                               std::span<const int> corrupt_centers,
                               const IdLexicon& lexicon, const MsweParams& params);

// Draws one fresh corruption per window from `rng`, then evaluates.
MsweLossResult mswe_loss(const corpus::LabeledTweet& tweet, const IdLexicon& lexicon,
                         const MsweParams& params, nn::Rng& rng);

// Top-k by cosine similarity, excluding the query and UNK; ties broken by
// word id. Unknown query words are an error.
std::vector<std::pair<std::string, double>> nearest_neighbors(
    const std::string& word, std::size_t k, const EmbeddingTable& table,
    const corpus::Vocabulary& vocab);

// Text format: first line "|V| d", then one "word v1 ... vd" line per word
// (UNK included). Values carry 17 significant digits so that
// load(save(x)) == x bitwise.
void save_embeddings(const EmbeddingTable& table, const corpus::Vocabulary& vocab,
                     const std::string& path);
std::pair<EmbeddingTable, corpus::Vocabulary> load_embeddings(const std::string& path);

// ---- model checkpoints ----

struct TrainerState {
  std::array<std::uint64_t, 4> rng_state{};
  std::size_t completed_epochs = 0;
};

inline constexpr std::string_view kCheckpointMagic = "mswe-checkpoint";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  MsweParams params;
  corpus::Vocabulary vocab;
  TrainerState state;
};

// Versioned text checkpoint of all tensors + hyperparameters + RNG state;
// round-trips bitwise.
void save_checkpoint(const MsweParams& params, const corpus::Vocabulary& vocab,
                     const TrainerState& state, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mswe::model
