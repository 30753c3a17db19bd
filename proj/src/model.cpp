#include "mswe/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tensor_io.hpp"

namespace mswe::model {

using corpus::ContextWindow;
using corpus::LabeledTweet;
using corpus::Vocabulary;
using nn::Matrix;
using nn::Vector;

namespace {

void fill_uniform(std::span<double> values, nn::Rng& rng, double range) {
  for (double& v : values) v = rng.uniform(-range, range);
}

// Concatenation of the window's embedding rows, t*d entries.
Vector concat_embeddings(const MsweParams& params, std::span<const int> tokens) {
  const std::size_t d = params.hyper.dim;
  Vector x(tokens.size() * d);
  for (std::size_t p = 0; p < tokens.size(); ++p) {
    auto row = params.embeddings.row(tokens[p]);
    std::copy(row.begin(), row.end(), x.begin() + static_cast<std::ptrdiff_t>(p * d));
  }
  return x;
}

// dx has t*d entries; slice p goes to the embedding row of tokens[p].
void scatter_embedding_grad(MsweGrads& grads, std::span<const int> tokens,
                            std::span<const double> dx, std::size_t d) {
  for (std::size_t p = 0; p < tokens.size(); ++p) {
    nn::axpy(1.0, dx.subspan(p * d, d),
             grads.embeddings.row(static_cast<std::size_t>(tokens[p])));
  }
}

struct TweetCache {
  Vector pooled;                // 3h
  Vector a2;                    // h
  Vector f_ds;                  // 2, [positive, negative]
  std::vector<std::size_t> argmax;  // per hidden coordinate
  std::vector<std::size_t> argmin;
};

TweetCache tweet_forward_cache(const MsweParams& params,
                               std::span<const Vector> es) {
  const std::size_t h = params.hyper.hidden;
  const std::size_t n = es.size();
  TweetCache cache;
  cache.pooled.assign(3 * h, 0.0);
  cache.argmax.assign(h, 0);
  cache.argmin.assign(h, 0);
  for (std::size_t j = 0; j < h; ++j) {
    double mx = es[0][j], mn = es[0][j], sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = es[i][j];
      if (v > mx) {
        mx = v;
        cache.argmax[j] = i;
      }
      if (v < mn) {
        mn = v;
        cache.argmin[j] = i;
      }
      sum += v;
    }
    cache.pooled[j] = mx;
    cache.pooled[h + j] = sum / static_cast<double>(n);
    cache.pooled[2 * h + j] = mn;
  }
  cache.a2 = nn::linear_forward(params.tweet_hidden_weight, params.tweet_hidden_bias,
                                cache.pooled);
  Vector logits = nn::linear_forward(params.tweet_out_weight, params.tweet_out_bias,
                                     cache.a2);
  cache.f_ds = nn::softmax(logits);
  return cache;
}

}  // namespace

MsweParams MsweParams::init(std::size_t vocab_size, const MsweHyper& hyper,
                            nn::Rng& rng, double init_range) {
  if (hyper.window == 0 || hyper.window % 2 == 0) {
    throw ConfigError("MsweParams: window size must be odd");
  }
  if (hyper.dim == 0 || hyper.hidden == 0 || vocab_size == 0) {
    throw ConfigError("MsweParams: dimensions must be positive");
  }
  if (hyper.alpha < 0.0 || hyper.alpha > 1.0 || hyper.beta < 0.0 || hyper.beta > 1.0) {
    throw ConfigError("MsweParams: alpha and beta must lie in [0, 1]");
  }
  if (!(init_range > 0.0)) throw ConfigError("MsweParams: init range must be positive");
  MsweParams p;
  p.hyper = hyper;
  p.embeddings.vectors = Matrix(vocab_size, hyper.dim);
  p.shared_weight = Matrix(hyper.hidden, hyper.concat_dim());
  p.shared_bias.assign(hyper.hidden, 0.0);
  p.ngram_head.assign(hyper.hidden, 0.0);
  p.ws_head = Matrix(2, hyper.hidden);
  p.tweet_hidden_weight = Matrix(hyper.hidden, hyper.pooled_dim());
  p.tweet_hidden_bias.assign(hyper.hidden, 0.0);
  p.tweet_out_weight = Matrix(2, hyper.hidden);
  p.tweet_out_bias.assign(2, 0.0);
  // Weight draw order is part of the determinism contract.
  fill_uniform(p.embeddings.vectors.data, rng, init_range);
  fill_uniform(p.shared_weight.data, rng, init_range);
  fill_uniform(p.ngram_head, rng, init_range);
  fill_uniform(p.ws_head.data, rng, init_range);
  fill_uniform(p.tweet_hidden_weight.data, rng, init_range);
  fill_uniform(p.tweet_out_weight.data, rng, init_range);
  return p;
}

std::vector<TensorRef> MsweParams::tensor_refs() {
  return {
      {"embeddings", embeddings.vectors.data},
      {"shared_weight", shared_weight.data},
      {"shared_bias", shared_bias},
      {"ngram_head", ngram_head},
      {"ws_head", ws_head.data},
      {"tweet_hidden_weight", tweet_hidden_weight.data},
      {"tweet_hidden_bias", tweet_hidden_bias},
      {"tweet_out_weight", tweet_out_weight.data},
      {"tweet_out_bias", tweet_out_bias},
  };
}

void MsweParams::check_consistent() const {
  const auto& hy = hyper;
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("MsweParams: bad shape for ") + what);
  };
  require(embeddings.dim() == hy.dim, "embeddings");
  require(shared_weight.rows == hy.hidden && shared_weight.cols == hy.concat_dim(),
          "shared_weight");
  require(shared_bias.size() == hy.hidden, "shared_bias");
  require(ngram_head.size() == hy.hidden, "ngram_head");
  require(ws_head.rows == 2 && ws_head.cols == hy.hidden, "ws_head");
  require(tweet_hidden_weight.rows == hy.hidden &&
              tweet_hidden_weight.cols == hy.pooled_dim(),
          "tweet_hidden_weight");
  require(tweet_hidden_bias.size() == hy.hidden, "tweet_hidden_bias");
  require(tweet_out_weight.rows == 2 && tweet_out_weight.cols == hy.hidden,
          "tweet_out_weight");
  require(tweet_out_bias.size() == 2, "tweet_out_bias");
}

MsweGrads MsweGrads::zeros_like(const MsweParams& params) {
  MsweGrads g;
  g.embeddings = Matrix(params.embeddings.vocab_size(), params.embeddings.dim());
  g.shared_weight = Matrix(params.shared_weight.rows, params.shared_weight.cols);
  g.shared_bias.assign(params.shared_bias.size(), 0.0);
  g.ngram_head.assign(params.ngram_head.size(), 0.0);
  g.ws_head = Matrix(2, params.ws_head.cols);
  g.tweet_hidden_weight =
      Matrix(params.tweet_hidden_weight.rows, params.tweet_hidden_weight.cols);
  g.tweet_hidden_bias.assign(params.tweet_hidden_bias.size(), 0.0);
  g.tweet_out_weight = Matrix(2, params.tweet_out_weight.cols);
  g.tweet_out_bias.assign(2, 0.0);
  return g;
}

std::vector<TensorRef> MsweGrads::tensor_refs() {
  return {
      {"embeddings", embeddings.data},
      {"shared_weight", shared_weight.data},
      {"shared_bias", shared_bias},
      {"ngram_head", ngram_head},
      {"ws_head", ws_head.data},
      {"tweet_hidden_weight", tweet_hidden_weight.data},
      {"tweet_hidden_bias", tweet_hidden_bias},
      {"tweet_out_weight", tweet_out_weight.data},
      {"tweet_out_bias", tweet_out_bias},
  };
}

void MsweGrads::add(const MsweGrads& other) {
  auto mine = tensor_refs();
  auto theirs = const_cast<MsweGrads&>(other).tensor_refs();
  for (std::size_t i = 0; i < mine.size(); ++i) {
    nn::axpy(1.0, theirs[i].values, mine[i].values);
  }
}

void MsweGrads::scale(double factor) {
  for (auto& ref : tensor_refs()) {
    for (double& v : ref.values) v *= factor;
  }
}

Vector shared_forward(const MsweParams& params, const ContextWindow& window) {
  if (window.tokens.size() != params.hyper.window) {
    throw ConfigError("shared_forward: window size mismatch");
  }
  Vector x = concat_embeddings(params, window.tokens);
  return nn::linear_forward(params.shared_weight, params.shared_bias, x);
}

WordLevelOutput word_level_forward(const MsweParams& params,
                                   const ContextWindow& window) {
  WordLevelOutput out;
  out.e = shared_forward(params, window);
  out.a1 = nn::htanh(out.e);
  out.f_ngram = nn::dot(params.ngram_head, out.a1);
  out.f_ws[kWsNegativeSlot] = nn::dot(params.ws_head.row(kWsNegativeSlot), out.a1);
  out.f_ws[kWsPositiveSlot] = nn::dot(params.ws_head.row(kWsPositiveSlot), out.a1);
  return out;
}

double word_level_loss(const MsweParams& params, const ContextWindow& window,
                       const ContextWindow& corrupted,
                       std::optional<Polarity> center_label) {
  WordLevelOutput real = word_level_forward(params, window);
  WordLevelOutput fake = word_level_forward(params, corrupted);
  const double loss_ngm = nn::hinge_rank_loss(real.f_ngram, fake.f_ngram);
  if (!center_label) return loss_ngm;
  const std::size_t true_slot = ws_slot(*center_label);
  const double loss_ws =
      nn::hinge_rank_loss(real.f_ws[true_slot], real.f_ws[1 - true_slot]);
  const double a = params.hyper.alpha;
  return a * loss_ngm + (1.0 - a) * loss_ws;
}

TweetLevelOutput tweet_level_forward(const MsweParams& params,
                                     std::span<const ContextWindow> windows) {
  if (windows.empty()) throw ConfigError("tweet_level_forward: no windows");
  std::vector<Vector> es;
  es.reserve(windows.size());
  for (const auto& w : windows) es.push_back(shared_forward(params, w));
  TweetCache cache = tweet_forward_cache(params, es);
  TweetLevelOutput out;
  out.pooled = std::move(cache.pooled);
  out.a2 = std::move(cache.a2);
  out.f_ds = {cache.f_ds[0], cache.f_ds[1]};
  return out;
}

double tweet_level_loss(const MsweParams& params,
                        std::span<const ContextWindow> windows,
                        const std::array<double, 2>& gold) {
  TweetLevelOutput out = tweet_level_forward(params, windows);
  return nn::cross_entropy({gold[0], gold[1]}, {out.f_ds[0], out.f_ds[1]});
}

IdLexicon IdLexicon::build(const Vocabulary& vocab,
                           const corpus::SentimentLexicon& lexicon) {
  IdLexicon out;
  out.tag.assign(vocab.size(), 0);
  for (std::size_t id = 1; id < vocab.size(); ++id) {
    auto polarity = lexicon.polarity(vocab.word(static_cast<int>(id)));
    if (polarity) out.tag[id] = *polarity == Polarity::positive ? 1 : 2;
  }
  return out;
}

MsweLossResult mswe_loss_fixed(const LabeledTweet& tweet,
                               std::span<const ContextWindow> windows,
                               std::span<const int> corrupt_centers,
                               const IdLexicon& lexicon, const MsweParams& params) {
  if (windows.empty()) throw ConfigError("mswe_loss: tweet yields no windows");
  if (corrupt_centers.size() != windows.size()) {
    throw ConfigError("mswe_loss: one corruption per window required");
  }
  const std::size_t n = windows.size();
  const std::size_t h = params.hyper.hidden;
  const std::size_t d = params.hyper.dim;
  const double alpha = params.hyper.alpha;
  const double beta = params.hyper.beta;

  MsweLossResult result;
  result.window_count = n;
  result.grads = MsweGrads::zeros_like(params);
  MsweGrads& grads = result.grads;

  // Shared-unit forward over the real windows; reused by both levels.
  std::vector<Vector> xs(n), es(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = concat_embeddings(params, windows[i].tokens);
    es[i] = nn::linear_forward(params.shared_weight, params.shared_bias, xs[i]);
  }

  // Combined dLoss/de per real window, filled by both levels and pushed
  // through the shared unit once at the end.
  std::vector<Vector> delta_e(n, Vector(h, 0.0));

  // ---- word level: hinge losses over (window, corrupted window) pairs ----
  const double word_scale = beta / static_cast<double>(n);
  double word_loss_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector a1 = nn::htanh(es[i]);
    const double s_pos = nn::dot(params.ngram_head, a1);

    std::vector<int> fake_tokens = windows[i].tokens;
    fake_tokens[windows[i].center_pos()] = corrupt_centers[i];
    const Vector x_fake = concat_embeddings(params, fake_tokens);
    const Vector e_fake =
        nn::linear_forward(params.shared_weight, params.shared_bias, x_fake);
    const Vector a1_fake = nn::htanh(e_fake);
    const double s_neg = nn::dot(params.ngram_head, a1_fake);

    const double loss_ngm = nn::hinge_rank_loss(s_pos, s_neg);
    const auto center_label = lexicon.polarity(windows[i].center());

    double loss_word = loss_ngm;
    double ngram_weight = 1.0;  // windows without a lexicon label keep full weight
    double loss_ws = 0.0;
    std::array<double, 2> f_ws{};
    if (center_label) {
      f_ws[kWsNegativeSlot] = nn::dot(params.ws_head.row(kWsNegativeSlot), a1);
      f_ws[kWsPositiveSlot] = nn::dot(params.ws_head.row(kWsPositiveSlot), a1);
      const std::size_t true_slot = ws_slot(*center_label);
      loss_ws = nn::hinge_rank_loss(f_ws[true_slot], f_ws[1 - true_slot]);
      loss_word = alpha * loss_ngm + (1.0 - alpha) * loss_ws;
      ngram_weight = alpha;
    }
    word_loss_sum += loss_word;

    if (beta == 0.0) continue;  // word-level gradients vanish identically

    const double g_ngm = word_scale * ngram_weight;
    if (loss_ngm > 0.0 && g_ngm != 0.0) {
      // d loss_ngm / d s_pos = -1, / d s_neg = +1
      nn::axpy(-g_ngm, a1, grads.ngram_head);
      nn::axpy(g_ngm, a1_fake, grads.ngram_head);
      for (std::size_t j = 0; j < h; ++j) {
        delta_e[i][j] += -g_ngm * params.ngram_head[j] * nn::htanh_derivative(es[i][j]);
      }
      Vector delta_fake(h);
      for (std::size_t j = 0; j < h; ++j) {
        delta_fake[j] = g_ngm * params.ngram_head[j] * nn::htanh_derivative(e_fake[j]);
      }
      nn::outer_accum(grads.shared_weight, delta_fake, x_fake);
      nn::axpy(1.0, delta_fake, grads.shared_bias);
      Vector dx_fake(x_fake.size(), 0.0);
      nn::matvec_transpose_accum(params.shared_weight, delta_fake, dx_fake);
      scatter_embedding_grad(grads, fake_tokens, dx_fake, d);
    }

    if (center_label && loss_ws > 0.0) {
      const double g_ws = word_scale * (1.0 - alpha);
      if (g_ws != 0.0) {
        const std::size_t true_slot = ws_slot(*center_label);
        const std::size_t false_slot = 1 - true_slot;
        nn::axpy(-g_ws, a1, grads.ws_head.row(true_slot));
        nn::axpy(g_ws, a1, grads.ws_head.row(false_slot));
        for (std::size_t j = 0; j < h; ++j) {
          const double back = -g_ws * params.ws_head(true_slot, j) +
                              g_ws * params.ws_head(false_slot, j);
          delta_e[i][j] += back * nn::htanh_derivative(es[i][j]);
        }
      }
    }
  }
  result.word_loss = word_loss_sum / static_cast<double>(n);

  // ---- tweet level: pooled softmax against the distant-supervision label ----
  TweetCache cache = tweet_forward_cache(params, es);
  std::array<double, 2> gold{};
  gold[distribution_slot(tweet.label)] = 1.0;
  result.tweet_loss = nn::cross_entropy({gold[0], gold[1]}, cache.f_ds);

  if (beta != 1.0) {
    const double tweet_scale = 1.0 - beta;
    // softmax + cross entropy: dL/dlogits = f - gold
    Vector dz(2);
    for (std::size_t k = 0; k < 2; ++k) dz[k] = tweet_scale * (cache.f_ds[k] - gold[k]);
    nn::outer_accum(grads.tweet_out_weight, dz, cache.a2);
    nn::axpy(1.0, dz, grads.tweet_out_bias);
    Vector da2(h, 0.0);
    nn::matvec_transpose_accum(params.tweet_out_weight, dz, da2);
    nn::outer_accum(grads.tweet_hidden_weight, da2, cache.pooled);
    nn::axpy(1.0, da2, grads.tweet_hidden_bias);
    Vector dpooled(3 * h, 0.0);
    nn::matvec_transpose_accum(params.tweet_hidden_weight, da2, dpooled);
    // max routes to the arg window, avg spreads evenly, min routes likewise
    for (std::size_t j = 0; j < h; ++j) {
      delta_e[cache.argmax[j]][j] += dpooled[j];
      const double avg_share = dpooled[h + j] / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) delta_e[i][j] += avg_share;
      delta_e[cache.argmin[j]][j] += dpooled[2 * h + j];
    }
  }

  // ---- shared unit backward for the real windows ----
  for (std::size_t i = 0; i < n; ++i) {
    nn::outer_accum(grads.shared_weight, delta_e[i], xs[i]);
    nn::axpy(1.0, delta_e[i], grads.shared_bias);
    Vector dx(xs[i].size(), 0.0);
    nn::matvec_transpose_accum(params.shared_weight, delta_e[i], dx);
    scatter_embedding_grad(grads, windows[i].tokens, dx, d);
  }

  result.loss = beta * result.word_loss + (1.0 - beta) * result.tweet_loss;
  return result;
}

MsweLossResult mswe_loss(const LabeledTweet& tweet, const IdLexicon& lexicon,
                         const MsweParams& params, nn::Rng& rng) {
  std::vector<ContextWindow> windows =
      corpus::extract_windows(tweet, 0, params.hyper.window);
  std::vector<int> corrupt_centers;
  corrupt_centers.reserve(windows.size());
  for (const auto& w : windows) {
    corrupt_centers.push_back(
        corpus::sample_replacement_id(w.center(), params.embeddings.vocab_size(), rng));
  }
  return mswe_loss_fixed(tweet, windows, corrupt_centers, lexicon, params);
}

std::vector<std::pair<std::string, double>> nearest_neighbors(
    const std::string& word, std::size_t k, const EmbeddingTable& table,
    const Vocabulary& vocab) {
  if (!vocab.contains(word)) {
    throw QueryError("word not in vocabulary: " + word);
  }
  const int query = vocab.id(word);
  const auto qrow = table.row(query);
  const double qnorm = std::sqrt(nn::dot(qrow, qrow));
  std::vector<std::pair<double, int>> scored;  // (cosine, id)
  for (std::size_t id = 1; id < table.vocab_size(); ++id) {
    if (static_cast<int>(id) == query) continue;
    const auto row = table.row(static_cast<int>(id));
    const double norm = std::sqrt(nn::dot(row, row));
    const double denom = qnorm * norm;
    const double cosine = denom > 0.0 ? nn::dot(qrow, row) / denom : 0.0;
    scored.emplace_back(cosine, static_cast<int>(id));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (k > scored.size()) k = scored.size();
  std::vector<std::pair<std::string, double>> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.emplace_back(vocab.word(scored[i].second), scored[i].first);
  }
  return out;
}

void save_embeddings(const EmbeddingTable& table, const Vocabulary& vocab,
                     const std::string& path) {
  if (table.vocab_size() != vocab.size()) {
    throw ConfigError("save_embeddings: table and vocabulary sizes differ");
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << table.vocab_size() << ' ' << table.dim() << '\n';
  for (std::size_t id = 0; id < table.vocab_size(); ++id) {
    out << vocab.word(static_cast<int>(id));
    for (double v : table.row(static_cast<int>(id))) {
      out << ' ' << detail::format_double(v);
    }
    out << '\n';
  }
}

std::pair<EmbeddingTable, Vocabulary> load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  auto fail = [&](std::size_t lineno, const std::string& message) -> void {
    throw ConfigError(path + ":" + std::to_string(lineno) + ": " + message);
  };

  std::string line;
  if (!std::getline(in, line)) fail(1, "missing header");
  std::istringstream header(line);
  std::size_t count = 0, dim = 0;
  if (!(header >> count >> dim)) fail(1, "header must be '<vocab> <dim>'");
  if (count < 1) fail(1, "vocabulary size must be at least 1");
  if (dim < 1) fail(1, "embedding dimension must be positive");

  EmbeddingTable table;
  table.vectors = Matrix(count, dim);
  Vocabulary vocab;
  for (std::size_t id = 0; id < count; ++id) {
    const std::size_t lineno = id + 2;
    if (!std::getline(in, line)) fail(lineno, "fewer rows than the header declares");
    std::istringstream row(line);
    std::string word;
    if (!(row >> word)) fail(lineno, "missing word");
    if (id == 0) {
      if (word != Vocabulary::kUnkToken) {
        fail(lineno, std::string("first row must be the unknown word ") +
                         Vocabulary::kUnkToken);
      }
    } else {
      vocab.add(word, 0);
    }
    std::string token;
    for (std::size_t c = 0; c < dim; ++c) {
      if (!(row >> token)) fail(lineno, "fewer values than the header declares");
      table.vectors(id, c) =
          detail::parse_double(token, path + ":" + std::to_string(lineno));
    }
    if (row >> token) fail(lineno, "more values than the header declares");
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
      fail(count + 2, "more rows than the header declares");
    }
  }
  return {std::move(table), std::move(vocab)};
}

void save_checkpoint(const MsweParams& params, const Vocabulary& vocab,
                     const TrainerState& state, const std::string& path) {
  if (params.embeddings.vocab_size() != vocab.size()) {
    throw ConfigError("save_checkpoint: params and vocabulary sizes differ");
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  const auto& hy = params.hyper;
  out << "hyper " << hy.window << ' ' << hy.dim << ' ' << hy.hidden << ' '
      << detail::format_double(hy.alpha) << ' ' << detail::format_double(hy.beta)
      << '\n';
  out << "epochs " << state.completed_epochs << '\n';
  out << "rng " << state.rng_state[0] << ' ' << state.rng_state[1] << ' '
      << state.rng_state[2] << ' ' << state.rng_state[3] << '\n';
  out << "vocab " << vocab.size() << '\n';
  for (std::size_t id = 1; id < vocab.size(); ++id) {
    out << vocab.word(static_cast<int>(id)) << ' '
        << vocab.frequency(static_cast<int>(id)) << '\n';
  }
  auto& mutable_params = const_cast<MsweParams&>(params);
  for (const auto& ref : mutable_params.tensor_refs()) {
    out << "tensor " << ref.name << ' ' << ref.values.size() << '\n';
    for (std::size_t i = 0; i < ref.values.size(); ++i) {
      if (i) out << ' ';
      out << detail::format_double(ref.values[i]);
    }
    out << '\n';
  }
  out << "end\n";
  if (!out) throw ConfigError("failed while writing " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  detail::TokenReader reader(in, path);
  reader.expect(std::string(kCheckpointMagic));
  const auto version = reader.next_u64("version");
  if (version != static_cast<std::uint64_t>(kCheckpointVersion)) {
    throw ConfigError(path + ": unsupported checkpoint version " +
                      std::to_string(version));
  }
  reader.expect("hyper");
  MsweHyper hyper;
  hyper.window = static_cast<std::size_t>(reader.next_u64("window"));
  hyper.dim = static_cast<std::size_t>(reader.next_u64("dim"));
  hyper.hidden = static_cast<std::size_t>(reader.next_u64("hidden"));
  hyper.alpha = reader.next_double("alpha");
  hyper.beta = reader.next_double("beta");

  Checkpoint ck;
  reader.expect("epochs");
  ck.state.completed_epochs = static_cast<std::size_t>(reader.next_u64("epochs"));
  reader.expect("rng");
  for (auto& word : ck.state.rng_state) word = reader.next_u64("rng state");

  reader.expect("vocab");
  const auto vocab_size = static_cast<std::size_t>(reader.next_u64("vocab size"));
  if (vocab_size == 0) throw ConfigError(path + ": empty vocabulary");
  for (std::size_t id = 1; id < vocab_size; ++id) {
    std::string word = reader.next("vocab word");
    std::uint64_t freq = reader.next_u64("word frequency");
    ck.vocab.add(word, freq);
  }

  ck.params.hyper = hyper;
  ck.params.embeddings.vectors = Matrix(vocab_size, hyper.dim);
  ck.params.shared_weight = Matrix(hyper.hidden, hyper.concat_dim());
  ck.params.shared_bias.assign(hyper.hidden, 0.0);
  ck.params.ngram_head.assign(hyper.hidden, 0.0);
  ck.params.ws_head = Matrix(2, hyper.hidden);
  ck.params.tweet_hidden_weight = Matrix(hyper.hidden, hyper.pooled_dim());
  ck.params.tweet_hidden_bias.assign(hyper.hidden, 0.0);
  ck.params.tweet_out_weight = Matrix(2, hyper.hidden);
  ck.params.tweet_out_bias.assign(2, 0.0);
  for (auto& ref : ck.params.tensor_refs()) {
    reader.expect("tensor");
    reader.expect(std::string(ref.name));
    const auto n = reader.next_u64("tensor size");
    if (n != ref.values.size()) {
      throw ConfigError(path + ": tensor " + std::string(ref.name) +
                        " has size " + std::to_string(n) + ", expected " +
                        std::to_string(ref.values.size()));
    }
    for (std::size_t i = 0; i < ref.values.size(); ++i) {
      ref.values[i] = reader.next_double("tensor value");
    }
  }
  reader.expect("end");
  ck.params.check_consistent();
  return ck;
}

}  // namespace mswe::model
