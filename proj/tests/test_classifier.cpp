#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <cmath>

#include "mswe/classifier.hpp"
#include "oracles.hpp"

using namespace mswe;
using cls::ClassifierConfig;
using cls::ClassifierParams;
using corpus::LabeledTweet;
using nn::Matrix;
using nn::Vector;

namespace {

model::EmbeddingTable make_table(std::size_t vocab, std::size_t dim,
                                 std::uint64_t seed, double scale = 1.0) {
  nn::Rng rng(seed);
  model::EmbeddingTable table;
  table.vectors = Matrix(vocab, dim);
  for (double& v : table.vectors.data) v = rng.uniform(-scale, scale);
  for (std::size_t c = 0; c < dim; ++c) table.vectors(0, c) = 0.0;  // UNK stays zero
  return table;
}

ClassifierConfig tiny_config() {
  ClassifierConfig cfg;
  cfg.filter_widths = {2, 3};
  cfg.filters_per_width = 2;
  cfg.hidden = 4;
  cfg.keep_input = 1.0;
  cfg.keep_hidden = 1.0;
  cfg.lr = 0.05;
  cfg.batch = 8;
  cfg.epochs = 0;
  cfg.seed = 5;
  return cfg;
}

ClassifierParams zeroed(const ClassifierConfig& cfg, std::size_t dim) {
  nn::Rng rng(1);
  auto p = ClassifierParams::init(cfg, dim, rng);
  for (auto& ref : p.tensor_refs()) {
    std::fill(ref.values.begin(), ref.values.end(), 0.0);
  }
  return p;
}

bool params_equal(ClassifierParams& a, ClassifierParams& b) {
  auto ra = a.tensor_refs();
  auto rb = b.tensor_refs();
  if (ra.size() != rb.size()) return false;
  for (std::size_t t = 0; t < ra.size(); ++t) {
    if (ra[t].values.size() != rb[t].values.size()) return false;
    for (std::size_t i = 0; i < ra[t].values.size(); ++i) {
      if (ra[t].values[i] != rb[t].values[i]) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("all-zero parameters and embeddings give the uniform distribution") {
  auto cfg = tiny_config();
  model::EmbeddingTable table;
  table.vectors = Matrix(5, 3);
  auto params = zeroed(cfg, 3);
  nn::Rng rng(0);
  std::vector<int> tokens{1, 2, 3, 4};
  auto dist = cls::classify_forward(table, tokens, params, cls::Mode::infer, cfg, rng);
  CHECK(dist == std::array<double, 2>{0.5, 0.5});
}

TEST_CASE("convolution and max pooling match hand dot products") {
  // one width-2 filter [[1,0],[0,1]] over embeddings [1,0],[0,1],[0,0]
  ClassifierConfig cfg = tiny_config();
  cfg.filter_widths = {2};
  cfg.filters_per_width = 1;
  auto params = zeroed(cfg, 2);
  params.filter_widths = {2};
  params.filter_weights.resize(1);
  params.filter_bias.resize(1);
  params.filter_weights[0] = Matrix(1, 4);
  params.filter_weights[0](0, 0) = 1.0;  // row 0 of the filter
  params.filter_weights[0](0, 3) = 1.0;  // row 1 of the filter
  params.filter_bias[0] = {0.0};

  model::EmbeddingTable table;
  table.vectors = Matrix(4, 2);
  table.vectors(1, 0) = 1.0;  // token 1 -> [1, 0]
  table.vectors(2, 1) = 1.0;  // token 2 -> [0, 1]
  // token 3 -> [0, 0]

  std::vector<int> tokens{1, 2, 3};
  auto features = cls::conv_features(table, tokens, params);
  REQUIRE(features.size() == 1);
  // positions: [x1;x2] -> 1*1 + 1*1 = 2, [x2;x3] -> 0; max pool takes 2
  CHECK(features[0] == 2.0);

  // shifting the bias moves every conv value, and the max with it
  params.filter_bias[0] = {0.25};
  CHECK(cls::conv_features(table, tokens, params)[0] == 2.25);
}

TEST_CASE("short tweets are right-padded and padding only adds candidates") {
  ClassifierConfig cfg = tiny_config();
  cfg.filter_widths = {2};
  cfg.filters_per_width = 3;
  nn::Rng rng(9);
  auto narrow = ClassifierParams::init(cfg, 4, rng);

  ClassifierConfig wide_cfg = cfg;
  wide_cfg.filter_widths = {2, 5};  // forces padding to length 5
  nn::Rng rng2(9);
  auto wide = ClassifierParams::init(wide_cfg, 4, rng2);
  // same width-2 filters in both parameter sets
  wide.filter_weights[0] = narrow.filter_weights[0];
  wide.filter_bias[0] = narrow.filter_bias[0];

  auto table = make_table(8, 4, 77);
  std::vector<int> tokens{1, 2, 3};
  auto base = cls::conv_features(table, tokens, narrow);
  auto padded = cls::conv_features(table, tokens, wide);
  for (std::size_t f = 0; f < 3; ++f) {
    CHECK(padded[f] >= base[f]);  // max over a superset of positions
  }

  // single-token tweet still classifies (padded to the widest filter)
  std::vector<int> one{2};
  nn::Rng unused(0);
  auto dist = cls::classify_forward(table, one, wide, cls::Mode::infer, wide_cfg,
                                    unused);
  CHECK(std::abs(dist[0] + dist[1] - 1.0) <= 1e-12);
}

TEST_CASE("inference is deterministic and keep = 1 dropout is the identity") {
  auto cfg = tiny_config();
  nn::Rng rng(44);
  auto params = ClassifierParams::init(cfg, 3, rng);
  auto table = make_table(9, 3, 78);
  std::vector<int> tokens{1, 5, 2, 7};

  nn::Rng r1(1), r2(2);
  auto a = cls::classify_forward(table, tokens, params, cls::Mode::infer, cfg, r1);
  auto b = cls::classify_forward(table, tokens, params, cls::Mode::infer, cfg, r2);
  CHECK(a == b);

  // train mode with keep probabilities 1.0 matches inference bitwise
  nn::Rng r3(3);
  auto trained = cls::classify_forward(table, tokens, params, cls::Mode::train, cfg, r3);
  CHECK(trained == a);
}

TEST_CASE("inverted dropout scaling preserves the mean activation within 1%") {
  const double keep = 0.7;
  const std::size_t n = 50;
  Vector activation(n);
  nn::Rng rng(123);
  for (double& v : activation) v = rng.uniform(0.5, 1.5);

  // emulate the mask arithmetic the classifier applies
  Vector mean(n, 0.0);
  const int trials = 100000;
  for (int trial = 0; trial < trials; ++trial) {
    for (std::size_t i = 0; i < n; ++i) {
      const double mask = rng.uniform(0.0, 1.0) < keep ? 1.0 / keep : 0.0;
      mean[i] += activation[i] * mask;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    mean[i] /= trials;
    CHECK(std::abs(mean[i] - activation[i]) <= 0.01 * activation[i]);
  }
}

TEST_CASE("classifier gradients match finite differences (dropout disabled)") {
  auto cfg = tiny_config();
  auto table = make_table(10, 3, 501);
  std::vector<int> tokens{1, 4, 2, 7, 3};

  for (std::uint64_t attempt = 0;; ++attempt) {
    nn::Rng rng(900 + attempt * 31);
    auto params = ClassifierParams::init(cfg, 3, rng);
    for (auto& ref : params.tensor_refs()) {
      for (double& v : ref.values) v = rng.uniform(-0.3, 0.3);
    }

    // keep clear of ReLU and max-pool kinks before differencing
    Vector features = cls::conv_features(table, tokens, params);
    Vector pre = nn::linear_forward(params.hidden_weight, params.hidden_bias, features);
    double kink = 1e300;
    for (double v : pre) kink = std::min(kink, std::abs(v));
    if (kink < 1e-3) continue;

    const std::size_t padded = std::max(tokens.size(), std::size_t{3});
    Vector ones_in(padded * 3, 1.0), ones_hid(cfg.hidden, 1.0);
    auto fb = cls::classifier_loss_and_grads(table, tokens, Polarity::negative, params,
                                             ones_in, ones_hid);
    auto loss = [&]() {
      return cls::classifier_loss_and_grads(table, tokens, Polarity::negative, params,
                                            ones_in, ones_hid)
          .loss;
    };
    auto prefs = params.tensor_refs();
    auto grefs = fb.grads.tensor_refs();
    double worst = 0.0;
    for (std::size_t t = 0; t < prefs.size(); ++t) {
      worst = std::max(
          worst, nn::grad_check(prefs[t].values, grefs[t].values, loss).max_rel_error);
    }
    CHECK(worst < 1e-4);
    break;
  }
}

TEST_CASE("two linearly separable classes reach perfect training accuracy") {
  // class decides which half of the vocabulary a tweet draws from
  nn::Rng rng(31);
  auto table = make_table(21, 6, 880);
  std::vector<LabeledTweet> tweets;
  for (int i = 0; i < 24; ++i) {
    LabeledTweet t;
    t.label = i % 2 == 0 ? Polarity::positive : Polarity::negative;
    const int base = t.label == Polarity::positive ? 1 : 11;
    for (int j = 0; j < 6; ++j) {
      t.tokens.push_back(base + static_cast<int>(rng.uniform_index(10)));
    }
    tweets.push_back(std::move(t));
  }

  auto cfg = tiny_config();
  cfg.epochs = 200;
  cfg.lr = 0.05;
  auto result = cls::train_classifier(tweets, cfg, table);
  bool perfect = false;
  for (const auto& h : result.history) {
    if (h.train_accuracy == 1.0) {
      perfect = true;
      break;
    }
  }
  CHECK(perfect);
}

TEST_CASE("zero epochs return the untouched initialization") {
  auto cfg = tiny_config();
  cfg.epochs = 0;
  auto table = make_table(7, 3, 11);
  std::vector<LabeledTweet> tweets(3);
  for (auto& t : tweets) t.tokens = {1, 2, 3};
  auto result = cls::train_classifier(tweets, cfg, table);

  nn::Rng rng(cfg.seed);
  auto expected = ClassifierParams::init(cfg, 3, rng);
  CHECK(params_equal(result.params, expected));
  CHECK(result.history.empty());
}

TEST_CASE("training leaves the embedding table bitwise unchanged") {
  auto cfg = tiny_config();
  cfg.epochs = 5;
  cfg.keep_input = 0.8;
  cfg.keep_hidden = 0.7;
  auto table = make_table(9, 3, 303);
  auto before = table.vectors;
  std::vector<LabeledTweet> tweets;
  for (int i = 0; i < 10; ++i) {
    LabeledTweet t;
    t.label = i % 2 == 0 ? Polarity::positive : Polarity::negative;
    t.tokens = {1 + i % 8, 1 + (i + 3) % 8, 1 + (i + 5) % 8};
    tweets.push_back(std::move(t));
  }
  cls::train_classifier(tweets, cfg, table);
  CHECK(table.vectors == before);
}

TEST_CASE("training is deterministic under its seed") {
  auto cfg = tiny_config();
  cfg.epochs = 4;
  cfg.keep_input = 0.8;
  cfg.keep_hidden = 0.7;
  auto table = make_table(12, 3, 42);
  std::vector<LabeledTweet> tweets;
  for (int i = 0; i < 16; ++i) {
    LabeledTweet t;
    t.label = i < 8 ? Polarity::positive : Polarity::negative;
    t.tokens = {1 + i % 11, 1 + (i * 3) % 11, 1 + (i * 7) % 11, 1 + (i * 5) % 11};
    tweets.push_back(std::move(t));
  }
  auto a = cls::train_classifier(tweets, cfg, table);
  auto b = cls::train_classifier(tweets, cfg, table);
  CHECK(params_equal(a.params, b.params));
}

TEST_CASE("prediction resolves exact ties to positive") {
  auto cfg = tiny_config();
  model::EmbeddingTable table;
  table.vectors = Matrix(4, 2);
  auto params = zeroed(cfg, 2);  // all-zero params: distribution is exactly 0.5/0.5
  std::vector<int> tokens{1, 2, 3};
  CHECK(cls::predict_one(table, tokens, params, cfg) == Polarity::positive);
}

TEST_CASE("batch prediction equals per-item prediction") {
  auto cfg = tiny_config();
  nn::Rng rng(77);
  auto params = ClassifierParams::init(cfg, 3, rng);
  auto table = make_table(10, 3, 78);
  std::vector<LabeledTweet> tweets;
  for (int i = 0; i < 7; ++i) {
    LabeledTweet t;
    t.tokens = {1 + i % 9, 1 + (i + 2) % 9, 1 + (i + 4) % 9};
    tweets.push_back(std::move(t));
  }
  auto batch = cls::predict(tweets, params, table, cfg);
  REQUIRE(batch.size() == tweets.size());
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    CHECK(batch[i] == cls::predict_one(table, tweets[i].tokens, params, cfg));
  }
}

TEST_CASE("classifier checkpoints round-trip bitwise") {
  auto cfg = tiny_config();
  nn::Rng rng(404);
  auto params = ClassifierParams::init(cfg, 5, rng);
  const auto path = std::filesystem::temp_directory_path() /
                    ("mswe_cls_ckpt_" + std::to_string(::getpid()) + ".txt");
  cls::save_classifier(params, path.string());
  auto loaded = cls::load_classifier(path.string());
  CHECK(params_equal(params, loaded));
  CHECK(loaded.filter_widths == params.filter_widths);
  CHECK(loaded.embedding_dim == params.embedding_dim);
  std::filesystem::remove(path);
}

TEST_CASE("classifier configuration validation") {
  auto cfg = tiny_config();
  cfg.keep_input = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = tiny_config();
  cfg.keep_hidden = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = tiny_config();
  cfg.filter_widths.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
