#pragma once

// Test-only oracles, independent of the library's computation paths:
// brute-force dense kernels, finite differences, and the random tiny-model
// builder used by the gradient checks. Nothing here is linked into the
// shipped library.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "mswe/corpus.hpp"
#include "mswe/model.hpp"
#include "mswe/nn.hpp"

namespace oracles {

using mswe::Polarity;
using mswe::nn::Matrix;
using mswe::nn::Vector;

// Plain dot-product loop, written separately from nn::matvec on purpose.
inline Vector naive_matvec_plus_bias(const Matrix& w, const Vector& b,
                                     const Vector& x) {
  Vector out(w.rows, 0.0);
  for (std::size_t r = 0; r < w.rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < w.cols; ++c) s += w(r, c) * x[c];
    out[r] = s + b[r];
  }
  return out;
}

inline double central_difference(const std::function<double(double)>& f, double x,
                                 double step = 1e-5) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

// ---- random tiny MSWE configurations for gradient checking ----

struct TinyModel {
  mswe::model::MsweParams params;
  mswe::corpus::LabeledTweet tweet;
  std::vector<mswe::corpus::ContextWindow> windows;
  std::vector<int> corrupt_centers;
  mswe::model::IdLexicon lexicon;
};

struct TinyModelSpec {
  std::size_t vocab_size = 20;
  std::size_t dim = 5;
  std::size_t hidden = 4;
  std::size_t window = 3;
  std::size_t tweet_length = 6;
  double alpha = 0.5;
  double beta = 0.5;
  bool lexicon_centers = true;  // tag roughly half the vocabulary
  Polarity tweet_label = Polarity::positive;
  // Checked configurations use a larger parameter scale than training init:
  // gradients of size ~1e-7 drown in finite-difference roundoff otherwise.
  double param_scale = 0.3;
};

inline TinyModel make_tiny_model(const TinyModelSpec& spec, std::uint64_t seed) {
  mswe::nn::Rng rng(seed);
  TinyModel m;
  mswe::model::MsweHyper hyper{spec.window, spec.dim, spec.hidden, spec.alpha,
                               spec.beta};
  m.params = mswe::model::MsweParams::init(spec.vocab_size, hyper, rng);
  for (auto& ref : m.params.tensor_refs()) {
    for (double& v : ref.values) {
      v = rng.uniform(-spec.param_scale, spec.param_scale);
    }
  }

  m.tweet.label = spec.tweet_label;
  for (std::size_t i = 0; i < spec.tweet_length; ++i) {
    m.tweet.tokens.push_back(
        1 + static_cast<int>(rng.uniform_index(spec.vocab_size - 1)));
  }
  m.windows = mswe::corpus::extract_windows(m.tweet, 0, spec.window);
  for (const auto& w : m.windows) {
    m.corrupt_centers.push_back(
        mswe::corpus::sample_replacement_id(w.center(), spec.vocab_size, rng));
  }

  m.lexicon.tag.assign(spec.vocab_size, 0);
  if (spec.lexicon_centers) {
    // ids 1..k positive, k+1..2k negative; centers drawn above will hit both
    const std::size_t k = (spec.vocab_size - 1) / 4;
    for (std::size_t id = 1; id <= k; ++id) m.lexicon.tag[id] = 1;
    for (std::size_t id = k + 1; id <= 2 * k; ++id) m.lexicon.tag[id] = 2;
  }
  return m;
}

// Distance from the loss surface to the nearest nondifferentiability:
// hinge margins at 0, hTanh inputs at +-1, and pooling argmax/argmin ties.
// Configurations closer than a safety threshold get resampled before
// finite-difference checks (central differences straddle kinks).
inline double kink_distance(const TinyModel& m) {
  const auto& params = m.params;
  const std::size_t h = params.hyper.hidden;
  const std::size_t n = m.windows.size();
  double dist = 1e300;

  std::vector<Vector> es(n);
  for (std::size_t i = 0; i < n; ++i) {
    es[i] = mswe::model::shared_forward(params, m.windows[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto real = mswe::model::word_level_forward(params, m.windows[i]);
    mswe::corpus::ContextWindow fake = m.windows[i];
    fake.tokens[fake.center_pos()] = m.corrupt_centers[i];
    auto corrupted = mswe::model::word_level_forward(params, fake);

    for (double e : real.e) dist = std::min(dist, std::abs(1.0 - std::abs(e)));
    for (double e : corrupted.e) dist = std::min(dist, std::abs(1.0 - std::abs(e)));
    dist = std::min(dist, std::abs(1.0 - real.f_ngram + corrupted.f_ngram));
    auto label = m.lexicon.polarity(m.windows[i].center());
    if (label) {
      const std::size_t t = mswe::model::ws_slot(*label);
      dist = std::min(dist, std::abs(1.0 - real.f_ws[t] + real.f_ws[1 - t]));
    }
  }
  for (std::size_t j = 0; j < h; ++j) {
    double best = -1e300, second = -1e300, worst = 1e300, second_worst = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = es[i][j];
      if (v > best) {
        second = best;
        best = v;
      } else if (v > second) {
        second = v;
      }
      if (v < worst) {
        second_worst = worst;
        worst = v;
      } else if (v < second_worst) {
        second_worst = v;
      }
    }
    if (n > 1) {
      dist = std::min(dist, best - second);
      dist = std::min(dist, second_worst - worst);
    }
  }
  return dist;
}

// Independent long-double evaluation of the joint loss: its own loops over
// the same parameter tensors, sharing no code with the library's forward
// pass. Extended precision keeps finite-difference noise well below the
// reporting floor on coordinates whose true gradient cancels to zero.
inline long double joint_loss_oracle(const TinyModel& m) {
  using LD = long double;
  const auto& p = m.params;
  const std::size_t t = p.hyper.window;
  const std::size_t d = p.hyper.dim;
  const std::size_t h = p.hyper.hidden;
  const std::size_t n = m.windows.size();

  auto shared = [&](const std::vector<int>& tokens) {
    std::vector<LD> e(h);
    for (std::size_t j = 0; j < h; ++j) {
      LD sum = p.shared_bias[j];
      for (std::size_t pos = 0; pos < t; ++pos) {
        const int id = tokens[pos];
        for (std::size_t c = 0; c < d; ++c) {
          sum += static_cast<LD>(p.shared_weight(j, pos * d + c)) *
                 static_cast<LD>(p.embeddings.vectors(static_cast<std::size_t>(id), c));
        }
      }
      e[j] = sum;
    }
    return e;
  };
  auto clip = [](LD v) { return v < -1.0L ? -1.0L : (v > 1.0L ? 1.0L : v); };
  auto head = [&](const std::vector<LD>& a, auto weight_at) {
    LD s = 0.0L;
    for (std::size_t j = 0; j < a.size(); ++j) s += weight_at(j) * a[j];
    return s;
  };

  std::vector<std::vector<LD>> es(n);
  LD word_sum = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    es[i] = shared(m.windows[i].tokens);
    std::vector<LD> a1(h);
    for (std::size_t j = 0; j < h; ++j) a1[j] = clip(es[i][j]);
    std::vector<int> fake = m.windows[i].tokens;
    fake[fake.size() / 2] = m.corrupt_centers[i];
    auto e_fake = shared(fake);
    std::vector<LD> a1_fake(h);
    for (std::size_t j = 0; j < h; ++j) a1_fake[j] = clip(e_fake[j]);

    const LD s_pos = head(a1, [&](std::size_t j) { return static_cast<LD>(m.params.ngram_head[j]); });
    const LD s_neg = head(a1_fake, [&](std::size_t j) { return static_cast<LD>(m.params.ngram_head[j]); });
    LD margin = 1.0L - s_pos + s_neg;
    const LD loss_ngm = margin > 0.0L ? margin : 0.0L;

    auto label = m.lexicon.polarity(m.windows[i].center());
    if (label) {
      const std::size_t true_slot = mswe::model::ws_slot(*label);
      const LD f_true = head(a1, [&](std::size_t j) { return static_cast<LD>(p.ws_head(true_slot, j)); });
      const LD f_false = head(a1, [&](std::size_t j) { return static_cast<LD>(p.ws_head(1 - true_slot, j)); });
      LD ws_margin = 1.0L - f_true + f_false;
      const LD loss_ws = ws_margin > 0.0L ? ws_margin : 0.0L;
      word_sum += static_cast<LD>(p.hyper.alpha) * loss_ngm +
                  (1.0L - static_cast<LD>(p.hyper.alpha)) * loss_ws;
    } else {
      word_sum += loss_ngm;
    }
  }
  const LD word_loss = word_sum / static_cast<LD>(n);

  // pooled tweet path
  std::vector<LD> pooled(3 * h);
  for (std::size_t j = 0; j < h; ++j) {
    LD mx = es[0][j], mn = es[0][j], sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      mx = std::max(mx, es[i][j]);
      mn = std::min(mn, es[i][j]);
      sum += es[i][j];
    }
    pooled[j] = mx;
    pooled[h + j] = sum / static_cast<LD>(n);
    pooled[2 * h + j] = mn;
  }
  std::vector<LD> a2(h);
  for (std::size_t j = 0; j < h; ++j) {
    LD sum = p.tweet_hidden_bias[j];
    for (std::size_t c = 0; c < 3 * h; ++c) {
      sum += static_cast<LD>(p.tweet_hidden_weight(j, c)) * pooled[c];
    }
    a2[j] = sum;
  }
  LD logits[2];
  for (std::size_t k = 0; k < 2; ++k) {
    LD sum = p.tweet_out_bias[k];
    for (std::size_t j = 0; j < h; ++j) {
      sum += static_cast<LD>(p.tweet_out_weight(k, j)) * a2[j];
    }
    logits[k] = sum;
  }
  const LD mx = std::max(logits[0], logits[1]);
  const LD z0 = std::exp(logits[0] - mx), z1 = std::exp(logits[1] - mx);
  LD f_ds[2] = {z0 / (z0 + z1), z1 / (z0 + z1)};
  const std::size_t gold = mswe::distribution_slot(m.tweet.label);
  LD prob = f_ds[gold];
  if (prob <= 0.0L) prob = 1e-12L;
  const LD tweet_loss = -std::log(prob);

  const LD beta = static_cast<LD>(p.hyper.beta);
  return beta * word_loss + (1.0L - beta) * tweet_loss;
}

// Checks the analytic gradient of every tensor against central finite
// differences of the independent oracle. Returns the worst relative error.
inline double mswe_grad_check(TinyModel& m, double step = mswe::nn::kGradCheckStep) {
  auto loss = [&m]() { return joint_loss_oracle(m); };
  mswe::model::MsweLossResult at_point = mswe::model::mswe_loss_fixed(
      m.tweet, m.windows, m.corrupt_centers, m.lexicon, m.params);
  auto param_refs = m.params.tensor_refs();
  auto grad_refs = at_point.grads.tensor_refs();
  double worst = 0.0;
  for (std::size_t t = 0; t < param_refs.size(); ++t) {
    auto report = mswe::nn::grad_check_precise(param_refs[t].values,
                                               grad_refs[t].values, loss, step);
    worst = std::max(worst, report.max_rel_error);
  }
  return worst;
}

// Resamples until the configuration sits safely away from every kink and,
// when a lexicon is planted, until at least one window center is tagged.
inline TinyModel make_safe_tiny_model(const TinyModelSpec& spec, std::uint64_t seed,
                                      double safety = 1e-4) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    TinyModel m = make_tiny_model(spec, seed + attempt * 7919);
    if (kink_distance(m) < safety) continue;
    if (spec.lexicon_centers) {
      bool tagged = false;
      for (const auto& w : m.windows) {
        if (m.lexicon.polarity(w.center())) tagged = true;
      }
      if (!tagged) continue;
    }
    return m;
  }
}

}  // namespace oracles
