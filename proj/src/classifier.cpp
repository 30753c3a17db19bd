#include "mswe/classifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "tensor_io.hpp"

namespace mswe::cls {

using corpus::LabeledTweet;
using nn::Matrix;
using nn::Vector;

std::size_t ClassifierConfig::max_width() const {
  std::size_t mx = 0;
  for (std::size_t s : filter_widths) mx = std::max(mx, s);
  return mx;
}

void ClassifierConfig::validate() const {
  if (filter_widths.empty()) throw ConfigError("classifier: no filter widths");
  for (std::size_t s : filter_widths) {
    if (s == 0) throw ConfigError("classifier: filter width must be positive");
  }
  if (filters_per_width == 0 || hidden == 0) {
    throw ConfigError("classifier: N and H must be positive");
  }
  if (keep_input <= 0.0 || keep_input > 1.0 || keep_hidden <= 0.0 || keep_hidden > 1.0) {
    throw ConfigError("classifier: keep probabilities must lie in (0, 1]");
  }
  if (!(lr > 0.0)) throw ConfigError("classifier: lr must be positive");
  if (batch < 1) throw ConfigError("classifier: batch must be at least 1");
}

namespace {

void fill_uniform(std::span<double> values, nn::Rng& rng) {
  for (double& v : values) v = rng.uniform(-nn::kInitRange, nn::kInitRange);
}

std::size_t max_width_of(const ClassifierParams& params) {
  std::size_t mx = 0;
  for (std::size_t s : params.filter_widths) mx = std::max(mx, s);
  return mx;
}

// Dropout mask already scaled by 1/keep. keep == 1.0 draws nothing.
Vector make_mask(std::size_t n, double keep, nn::Rng& rng) {
  Vector mask(n, 1.0);
  if (keep == 1.0) return mask;
  const double inv = 1.0 / keep;
  for (double& m : mask) m = rng.uniform(0.0, 1.0) < keep ? inv : 0.0;
  return mask;
}

struct ForwardCache {
  Matrix input;          // padded_len x d, mask applied
  Vector features;       // N*|S|
  std::vector<std::size_t> argmax;  // best position per feature
  Vector pre_hidden;     // H
  Vector hidden;         // relu(pre_hidden) with mask applied
  Vector distribution;   // 2
};

ForwardCache forward_core(const model::EmbeddingTable& table,
                          std::span<const int> tokens, const ClassifierParams& params,
                          std::span<const double> input_mask,
                          std::span<const double> hidden_mask) {
  const std::size_t d = params.embedding_dim;
  if (table.dim() != d) {
    throw ConfigError("classifier: embedding dimension mismatch, table has " +
                      std::to_string(table.dim()) + ", classifier expects " +
                      std::to_string(d));
  }
  const std::size_t padded = std::max(tokens.size(), max_width_of(params));
  if (input_mask.size() != padded * d) {
    throw ConfigError("classifier: input mask size mismatch");
  }

  ForwardCache cache;
  cache.input = Matrix(padded, d);  // rows past the tweet stay zero
  for (std::size_t p = 0; p < tokens.size(); ++p) {
    auto row = table.row(tokens[p]);
    for (std::size_t j = 0; j < d; ++j) {
      cache.input(p, j) = row[j] * input_mask[p * d + j];
    }
  }

  // Valid convolution per filter, max over positions.
  cache.features.reserve(64);
  for (std::size_t wi = 0; wi < params.filter_widths.size(); ++wi) {
    const std::size_t s = params.filter_widths[wi];
    const Matrix& filters = params.filter_weights[wi];
    for (std::size_t f = 0; f < filters.rows; ++f) {
      auto weights = filters.row(f);
      double best = 0.0;
      std::size_t best_pos = 0;
      for (std::size_t p = 0; p + s <= padded; ++p) {
        double v = params.filter_bias[wi][f];
        for (std::size_t i = 0; i < s; ++i) {
          v += nn::dot(weights.subspan(i * d, d), cache.input.row(p + i));
        }
        if (p == 0 || v > best) {
          best = v;
          best_pos = p;
        }
      }
      cache.features.push_back(best);
      cache.argmax.push_back(best_pos);
    }
  }

  cache.pre_hidden =
      nn::linear_forward(params.hidden_weight, params.hidden_bias, cache.features);
  cache.hidden = nn::relu(cache.pre_hidden);
  if (hidden_mask.size() != cache.hidden.size()) {
    throw ConfigError("classifier: hidden mask size mismatch");
  }
  for (std::size_t j = 0; j < cache.hidden.size(); ++j) {
    cache.hidden[j] *= hidden_mask[j];
  }
  Vector logits = nn::linear_forward(params.out_weight, params.out_bias, cache.hidden);
  cache.distribution = nn::softmax(logits);
  return cache;
}

ClassifierParams zeros_like(const ClassifierParams& params) {
  ClassifierParams g;
  g.filter_widths = params.filter_widths;
  g.embedding_dim = params.embedding_dim;
  for (std::size_t wi = 0; wi < params.filter_weights.size(); ++wi) {
    g.filter_weights.emplace_back(params.filter_weights[wi].rows,
                                  params.filter_weights[wi].cols);
    g.filter_bias.emplace_back(params.filter_bias[wi].size(), 0.0);
  }
  g.hidden_weight = Matrix(params.hidden_weight.rows, params.hidden_weight.cols);
  g.hidden_bias.assign(params.hidden_bias.size(), 0.0);
  g.out_weight = Matrix(params.out_weight.rows, params.out_weight.cols);
  g.out_bias.assign(params.out_bias.size(), 0.0);
  return g;
}

}  // namespace

ClassifierParams ClassifierParams::init(const ClassifierConfig& config,
                                        std::size_t embedding_dim, nn::Rng& rng) {
  config.validate();
  if (embedding_dim == 0) throw ConfigError("classifier: embedding dim must be positive");
  ClassifierParams p;
  p.filter_widths = config.filter_widths;
  p.embedding_dim = embedding_dim;
  for (std::size_t s : config.filter_widths) {
    Matrix w(config.filters_per_width, s * embedding_dim);
    fill_uniform(w.data, rng);
    p.filter_weights.push_back(std::move(w));
    p.filter_bias.emplace_back(config.filters_per_width, 0.0);
  }
  p.hidden_weight = Matrix(config.hidden, config.feature_dim());
  fill_uniform(p.hidden_weight.data, rng);
  p.hidden_bias.assign(config.hidden, 0.0);
  p.out_weight = Matrix(2, config.hidden);
  fill_uniform(p.out_weight.data, rng);
  p.out_bias.assign(2, 0.0);
  return p;
}

std::vector<model::TensorRef> ClassifierParams::tensor_refs() {
  std::vector<model::TensorRef> refs;
  for (std::size_t wi = 0; wi < filter_weights.size(); ++wi) {
    refs.push_back({"filter_weight", filter_weights[wi].data});
    refs.push_back({"filter_bias", filter_bias[wi]});
  }
  refs.push_back({"hidden_weight", hidden_weight.data});
  refs.push_back({"hidden_bias", hidden_bias});
  refs.push_back({"out_weight", out_weight.data});
  refs.push_back({"out_bias", out_bias});
  return refs;
}

nn::Vector conv_features(const model::EmbeddingTable& table,
                         std::span<const int> tokens, const ClassifierParams& params) {
  const std::size_t padded = std::max(tokens.size(), max_width_of(params));
  Vector ones_input(padded * params.embedding_dim, 1.0);
  Vector ones_hidden(params.hidden_bias.size(), 1.0);
  return forward_core(table, tokens, params, ones_input, ones_hidden).features;
}

std::array<double, 2> classify_forward(const model::EmbeddingTable& table,
                                       std::span<const int> tokens,
                                       const ClassifierParams& params, Mode mode,
                                       const ClassifierConfig& config, nn::Rng& rng) {
  const std::size_t d = params.embedding_dim;
  const std::size_t padded = std::max(tokens.size(), max_width_of(params));
  Vector input_mask(padded * d, 1.0);
  Vector hidden_mask(params.hidden_bias.size(), 1.0);
  if (mode == Mode::train) {
    input_mask = make_mask(padded * d, config.keep_input, rng);
    hidden_mask = make_mask(hidden_mask.size(), config.keep_hidden, rng);
  }
  ForwardCache cache = forward_core(table, tokens, params, input_mask, hidden_mask);
  return {cache.distribution[0], cache.distribution[1]};
}

ForwardBackwardResult classifier_loss_and_grads(const model::EmbeddingTable& table,
                                                std::span<const int> tokens,
                                                Polarity label,
                                                const ClassifierParams& params,
                                                std::span<const double> input_mask,
                                                std::span<const double> hidden_mask) {
  const std::size_t d = params.embedding_dim;
  ForwardCache cache = forward_core(table, tokens, params, input_mask, hidden_mask);

  Vector gold(2, 0.0);
  gold[distribution_slot(label)] = 1.0;

  ForwardBackwardResult result;
  result.distribution = {cache.distribution[0], cache.distribution[1]};
  result.loss = nn::cross_entropy(gold, cache.distribution);
  result.grads = zeros_like(params);

  // softmax + cross entropy
  Vector dz(2);
  for (std::size_t k = 0; k < 2; ++k) dz[k] = cache.distribution[k] - gold[k];
  nn::outer_accum(result.grads.out_weight, dz, cache.hidden);
  nn::axpy(1.0, dz, result.grads.out_bias);

  Vector dhidden(cache.hidden.size(), 0.0);
  nn::matvec_transpose_accum(params.out_weight, dz, dhidden);
  for (std::size_t j = 0; j < dhidden.size(); ++j) {
    dhidden[j] *= hidden_mask[j] * nn::relu_derivative(cache.pre_hidden[j]);
  }
  nn::outer_accum(result.grads.hidden_weight, dhidden, cache.features);
  nn::axpy(1.0, dhidden, result.grads.hidden_bias);

  Vector dfeat(cache.features.size(), 0.0);
  nn::matvec_transpose_accum(params.hidden_weight, dhidden, dfeat);

  // Each max-pooled feature routes to its best position only.
  std::size_t k = 0;
  for (std::size_t wi = 0; wi < params.filter_widths.size(); ++wi) {
    const std::size_t s = params.filter_widths[wi];
    for (std::size_t f = 0; f < params.filter_weights[wi].rows; ++f, ++k) {
      const double dconv = dfeat[k];
      if (dconv == 0.0) continue;
      const std::size_t p = cache.argmax[k];
      auto gw = result.grads.filter_weights[wi].row(f);
      for (std::size_t i = 0; i < s; ++i) {
        nn::axpy(dconv, cache.input.row(p + i), gw.subspan(i * d, d));
      }
      result.grads.filter_bias[wi][f] += dconv;
    }
  }
  return result;
}

ClassifierResult train_classifier(const std::vector<LabeledTweet>& tweets,
                                  const ClassifierConfig& config,
                                  const model::EmbeddingTable& table,
                                  std::ostream* log) {
  config.validate();
  if (tweets.empty()) throw ConfigError("train_classifier: empty training set");

  nn::Rng rng(config.seed);
  ClassifierResult result;
  result.params = ClassifierParams::init(config, table.dim(), rng);

  auto param_refs = result.params.tensor_refs();
  std::vector<nn::AdaGradState> states;
  states.reserve(param_refs.size());
  for (const auto& ref : param_refs) states.emplace_back(ref.values.size());

  std::vector<std::size_t> order(tweets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const std::size_t d = table.dim();
  const std::size_t mx = config.max_width();

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch) {
      const std::size_t end = std::min(begin + config.batch, order.size());
      ClassifierParams batch_grads = zeros_like(result.params);
      auto grad_refs = batch_grads.tensor_refs();
      for (std::size_t pos = begin; pos < end; ++pos) {
        const LabeledTweet& tweet = tweets[order[pos]];
        const std::size_t padded = std::max(tweet.tokens.size(), mx);
        Vector input_mask = make_mask(padded * d, config.keep_input, rng);
        Vector hidden_mask = make_mask(config.hidden, config.keep_hidden, rng);
        ForwardBackwardResult fb = classifier_loss_and_grads(
            table, tweet.tokens, tweet.label, result.params, input_mask, hidden_mask);
        if (!std::isfinite(fb.loss)) {
          throw NumericalError("train_classifier: non-finite loss at epoch " +
                               std::to_string(epoch + 1) + ", batch " +
                               std::to_string(begin / config.batch + 1));
        }
        loss_sum += fb.loss;
        auto fb_refs = fb.grads.tensor_refs();
        for (std::size_t t = 0; t < grad_refs.size(); ++t) {
          nn::axpy(1.0, fb_refs[t].values, grad_refs[t].values);
        }
      }
      const double inv = 1.0 / static_cast<double>(end - begin);
      for (std::size_t t = 0; t < grad_refs.size(); ++t) {
        for (double& g : grad_refs[t].values) g *= inv;
        nn::adagrad_step(param_refs[t].values, grad_refs[t].values, states[t],
                         config.lr, param_refs[t].name.data());
      }
    }

    std::size_t correct = 0;
    for (const auto& tweet : tweets) {
      if (predict_one(table, tweet.tokens, result.params, config) == tweet.label) {
        ++correct;
      }
    }
    EpochHistory h;
    h.epoch = epoch + 1;
    h.mean_loss = loss_sum / static_cast<double>(tweets.size());
    h.train_accuracy = static_cast<double>(correct) / static_cast<double>(tweets.size());
    result.history.push_back(h);
    if (log) {
      (*log) << "cls epoch=" << h.epoch << " loss=" << h.mean_loss
             << " acc=" << h.train_accuracy << '\n';
    }
  }
  return result;
}

Polarity predict_one(const model::EmbeddingTable& table, std::span<const int> tokens,
                     const ClassifierParams& params, const ClassifierConfig& config) {
  nn::Rng unused(0);  // inference draws nothing
  auto dist = classify_forward(table, tokens, params, Mode::infer, config, unused);
  return dist[kPositiveSlot] >= dist[kNegativeSlot] ? Polarity::positive
                                                    : Polarity::negative;
}

std::vector<Polarity> predict(const std::vector<LabeledTweet>& tweets,
                              const ClassifierParams& params,
                              const model::EmbeddingTable& table,
                              const ClassifierConfig& config) {
  std::vector<Polarity> out;
  out.reserve(tweets.size());
  for (const auto& tweet : tweets) {
    out.push_back(predict_one(table, tweet.tokens, params, config));
  }
  return out;
}

void save_classifier(const ClassifierParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << kClassifierMagic << ' ' << kClassifierVersion << '\n';
  out << "widths";
  for (std::size_t s : params.filter_widths) out << ' ' << s;
  out << '\n';
  out << "filters " << params.filter_weights.front().rows << '\n';
  out << "dim " << params.embedding_dim << '\n';
  out << "hidden " << params.hidden_bias.size() << '\n';
  for (std::size_t wi = 0; wi < params.filter_weights.size(); ++wi) {
    detail::write_matrix(out, "filter_weight", params.filter_weights[wi]);
    detail::write_vector(out, "filter_bias", params.filter_bias[wi]);
  }
  detail::write_matrix(out, "hidden_weight", params.hidden_weight);
  detail::write_vector(out, "hidden_bias", params.hidden_bias);
  detail::write_matrix(out, "out_weight", params.out_weight);
  detail::write_vector(out, "out_bias", params.out_bias);
  out << "end\n";
  if (!out) throw ConfigError("failed while writing " + path);
}

ClassifierParams load_classifier(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  detail::TokenReader reader(in, path);
  reader.expect(std::string(kClassifierMagic));
  const auto version = reader.next_u64("version");
  if (version != static_cast<std::uint64_t>(kClassifierVersion)) {
    throw ConfigError(path + ": unsupported classifier version " +
                      std::to_string(version));
  }
  reader.expect("widths");
  ClassifierParams p;
  // widths end where the "filters" keyword begins
  std::string token = reader.next("filter width");
  while (token != "filters") {
    p.filter_widths.push_back(
        static_cast<std::size_t>(detail::parse_double(token, path)));
    token = reader.next("filter width");
  }
  if (p.filter_widths.empty()) throw ConfigError(path + ": no filter widths");
  const auto filters = static_cast<std::size_t>(reader.next_u64("filter count"));
  reader.expect("dim");
  p.embedding_dim = static_cast<std::size_t>(reader.next_u64("embedding dim"));
  reader.expect("hidden");
  const auto hidden = static_cast<std::size_t>(reader.next_u64("hidden size"));
  for (std::size_t s : p.filter_widths) {
    Matrix w = detail::read_matrix(reader, "filter_weight");
    if (w.rows != filters || w.cols != s * p.embedding_dim) {
      throw ConfigError(path + ": filter tensor shape mismatch");
    }
    p.filter_weights.push_back(std::move(w));
    p.filter_bias.push_back(detail::read_vector(reader, "filter_bias"));
  }
  p.hidden_weight = detail::read_matrix(reader, "hidden_weight");
  p.hidden_bias = detail::read_vector(reader, "hidden_bias");
  p.out_weight = detail::read_matrix(reader, "out_weight");
  p.out_bias = detail::read_vector(reader, "out_bias");
  if (p.hidden_weight.rows != hidden || p.out_weight.rows != 2) {
    throw ConfigError(path + ": classifier tensor shape mismatch");
  }
  reader.expect("end");
  return p;
}

}  // namespace mswe::cls
