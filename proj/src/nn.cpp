#include "mswe/nn.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>

namespace mswe::nn {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

std::atomic<std::uint64_t> g_floor_events{0};

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform(double lo, double hi) {
  // 53 high bits -> [0, 1)
  double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw ConfigError("uniform_index: n must be positive");
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vector matvec(const Matrix& w, std::span<const double> x) {
  Vector out(w.rows, 0.0);
  for (std::size_t r = 0; r < w.rows; ++r) out[r] = dot(w.row(r), x);
  return out;
}

void matvec_transpose_accum(const Matrix& w, std::span<const double> delta,
                            std::span<double> out) {
  for (std::size_t r = 0; r < w.rows; ++r) axpy(delta[r], w.row(r), out);
}

void outer_accum(Matrix& g, std::span<const double> delta, std::span<const double> x) {
  for (std::size_t r = 0; r < g.rows; ++r) axpy(delta[r], x, g.row(r));
}

void check_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "non-finite value %g in %s at index %zu",
                    values[i], what, i);
      throw NumericalError(buf);
    }
  }
}

Vector linear_forward(const Matrix& w, const Vector& b, const Vector& x) {
  if (w.cols != x.size() || w.rows != b.size()) {
    throw ConfigError("linear_forward: shape mismatch, W is " +
                      std::to_string(w.rows) + "x" + std::to_string(w.cols) +
                      ", b has " + std::to_string(b.size()) + ", x has " +
                      std::to_string(x.size()));
  }
  Vector out = matvec(w, x);
  for (std::size_t r = 0; r < w.rows; ++r) out[r] += b[r];
  return out;
}

Vector htanh(const Vector& x) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = htanh(x[i]);
  return out;
}

Vector relu(const Vector& x) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = relu(x[i]);
  return out;
}

Vector softmax(const Vector& x) {
  if (x.empty()) throw ConfigError("softmax: empty input");
  double mx = x[0];
  for (double v : x) mx = std::max(mx, v);
  Vector out(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

double cross_entropy(const Vector& gold, const Vector& pred) {
  if (gold.size() != 2 || pred.size() != 2) {
    throw ConfigError("cross_entropy: expects 2-class distributions");
  }
  double loss = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    double p = pred[k];
    if (p <= 0.0) {
      p = kProbFloor;
      g_floor_events.fetch_add(1, std::memory_order_relaxed);
    }
    loss -= gold[k] * std::log(p);
  }
  return loss;
}

std::uint64_t floor_event_count() {
  return g_floor_events.load(std::memory_order_relaxed);
}

void reset_floor_events() { g_floor_events.store(0, std::memory_order_relaxed); }

void sgd_step(std::span<double> param, std::span<const double> grad, double lr,
              const char* name) {
  if (param.size() != grad.size()) throw ConfigError("sgd_step: shape mismatch");
  if (!(lr > 0.0)) throw ConfigError("sgd_step: lr must be positive");
  check_finite(grad, name);
  for (std::size_t i = 0; i < param.size(); ++i) param[i] -= lr * grad[i];
}

void sgd_step(Matrix& param, const Matrix& grad, double lr, const char* name) {
  if (param.rows != grad.rows || param.cols != grad.cols) {
    throw ConfigError("sgd_step: shape mismatch");
  }
  sgd_step(std::span<double>(param.data), std::span<const double>(grad.data), lr, name);
}

void adagrad_step(std::span<double> param, std::span<const double> grad,
                  AdaGradState& state, double lr, const char* name) {
  if (param.size() != grad.size() || state.accum.size() != param.size()) {
    throw ConfigError("adagrad_step: shape mismatch");
  }
  check_finite(grad, name);
  for (std::size_t i = 0; i < param.size(); ++i) {
    state.accum[i] += grad[i] * grad[i];
    param[i] -= lr * grad[i] / (std::sqrt(state.accum[i]) + state.epsilon);
  }
}

void adagrad_step(Matrix& param, const Matrix& grad, AdaGradState& state, double lr,
                  const char* name) {
  if (param.rows != grad.rows || param.cols != grad.cols) {
    throw ConfigError("adagrad_step: shape mismatch");
  }
  adagrad_step(std::span<double>(param.data), std::span<const double>(grad.data),
               state, lr, name);
}

namespace {

template <typename Real, typename Loss>
GradCheckReport grad_check_impl(std::span<double> params,
                                std::span<const double> analytic, const Loss& loss,
                                double step) {
  if (params.size() != analytic.size()) {
    throw ConfigError("grad_check: analytic gradient size mismatch");
  }
  GradCheckReport report;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + step;
    const Real up = loss();
    params[i] = saved - step;
    const Real down = loss();
    params[i] = saved;
    const double numeric =
        static_cast<double>((up - down) / (Real(2.0) * Real(step)));
    const double denom = std::max(1e-8, std::abs(analytic[i]) + std::abs(numeric));
    const double rel = std::abs(analytic[i] - numeric) / denom;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_index = i;
      report.analytic_at_worst = analytic[i];
      report.numeric_at_worst = numeric;
    }
  }
  return report;
}

}  // namespace

GradCheckReport grad_check(std::span<double> params, std::span<const double> analytic,
                           const std::function<double()>& loss, double step) {
  return grad_check_impl<double>(params, analytic, loss, step);
}

GradCheckReport grad_check_precise(std::span<double> params,
                                   std::span<const double> analytic,
                                   const std::function<long double()>& loss,
                                   double step) {
  return grad_check_impl<long double>(params, analytic, loss, step);
}

}  // namespace mswe::nn
