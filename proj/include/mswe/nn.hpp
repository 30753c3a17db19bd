#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mswe/common.hpp"

namespace mswe::nn {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. All models in this project are tiny,
// so the representation favors clarity over blocking/vectorization.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vector data;  // rows*cols entries, row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  std::size_t size() const { return data.size(); }
  void fill(double v) { std::fill(data.begin(), data.end(), v); }

  bool operator==(const Matrix&) const = default;
};

// Deterministic RNG: xoshiro256** seeded via splitmix64. The draw sequence
// depends only on the seed, on every platform, which the training and
// corruption contracts rely on. State is 4 words, serialized in checkpoints.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform real in [lo, hi).
  double uniform(double lo, double hi);

  // Uniform integer in [0, n); n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::array<std::uint64_t, 4> state() const { return s_; }
  void restore(const std::array<std::uint64_t, 4>& s) { s_ = s; }

 private:
  std::array<std::uint64_t, 4> s_{};
};

// ---- numeric constants fixed by the project contracts ----
inline constexpr double kAdaGradEpsilon = 1e-8;
inline constexpr double kProbFloor = 1e-12;
inline constexpr double kGradCheckStep = 1e-5;
inline constexpr double kInitRange = 0.01;  // weights ~ uniform(-0.01, 0.01)

// ---- small dense kernels used by the hand-derived backward passes ----
double dot(std::span<const double> a, std::span<const double> b);
// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
// out = W * x  (no bias)
Vector matvec(const Matrix& w, std::span<const double> x);
// out += W^T * delta
void matvec_transpose_accum(const Matrix& w, std::span<const double> delta,
                            std::span<double> out);
// G += delta * x^T
void outer_accum(Matrix& g, std::span<const double> delta, std::span<const double> x);

// Throws NumericalError naming `what` if any entry is NaN or infinite.
void check_finite(std::span<const double> values, const char* what);

// ---- layers and losses ----

// W*x + b. Dimension mismatch is a fatal configuration error.
Vector linear_forward(const Matrix& w, const Vector& b, const Vector& x);

inline double htanh(double v) { return v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v); }
// Subgradient at the |v| == 1 kinks is 0.
inline double htanh_derivative(double v) { return (v > -1.0 && v < 1.0) ? 1.0 : 0.0; }
Vector htanh(const Vector& x);

inline double relu(double v) { return v > 0.0 ? v : 0.0; }
// Subgradient at 0 is 0.
inline double relu_derivative(double v) { return v > 0.0 ? 1.0 : 0.0; }
Vector relu(const Vector& x);

// Max-subtracted for stability; output sums to 1 within 1e-12.
Vector softmax(const Vector& x);

// max(0, 1 - s_pos + s_neg); subgradient at the kink is 0.
inline double hinge_rank_loss(double s_pos, double s_neg) {
  double m = 1.0 - s_pos + s_neg;
  return m > 0.0 ? m : 0.0;
}

// -sum_k gold[k] * log(pred[k]) over a 2-class distribution. Entries of
// pred at or below 0 are clamped to kProbFloor and counted as floor events.
double cross_entropy(const Vector& gold, const Vector& pred);

std::uint64_t floor_event_count();
void reset_floor_events();

// ---- optimizers ----

// param -= lr * grad. Aborts (NumericalError) on a non-finite grad entry.
void sgd_step(std::span<double> param, std::span<const double> grad, double lr,
              const char* name = "param");
void sgd_step(Matrix& param, const Matrix& grad, double lr, const char* name = "param");

// Per-tensor AdaGrad accumulator; entries never decrease.
struct AdaGradState {
  Vector accum;
  double epsilon = kAdaGradEpsilon;

  explicit AdaGradState(std::size_t n = 0) : accum(n, 0.0) {}
};

// state.accum += grad^2; param -= lr * grad / (sqrt(accum) + epsilon).
void adagrad_step(std::span<double> param, std::span<const double> grad,
                  AdaGradState& state, double lr, const char* name = "param");
void adagrad_step(Matrix& param, const Matrix& grad, AdaGradState& state, double lr,
                  const char* name = "param");

// ---- finite-difference gradient checking ----

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

// Central differences with the given step over every coordinate of `params`,
// compared against `analytic`. `loss` must re-read `params` on every call;
// coordinates are perturbed in place and restored. Relative error per
// coordinate is |a - n| / max(1e-8, |a| + |n|).
GradCheckReport grad_check(std::span<double> params, std::span<const double> analytic,
                           const std::function<double()>& loss,
                           double step = kGradCheckStep);

// Same check for an extended-precision loss oracle. Composite losses have
// coordinates whose true gradient is exactly zero (cancelling hinge pairs);
// double-precision differencing leaves ~1e-12 of rounding noise there, which
// the 1e-8 floor turns into ~1e-4 phantom error. An 80-bit oracle keeps the
// noise three orders of magnitude below the reporting floor.
GradCheckReport grad_check_precise(std::span<double> params,
                                   std::span<const double> analytic,
                                   const std::function<long double()>& loss,
                                   double step = kGradCheckStep);

}  // namespace mswe::nn
