#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace vaa::detail {

/// Compensated (Neumaier) sum.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Pairwise summation with a fixed tree shape, so the result depends only on
/// the input order.
template <class T>
T pairwise_sum(std::span<const T> values) {
  constexpr std::size_t kLeaf = 256;
  if (values.size() <= kLeaf) {
    T acc{};
    for (const auto& v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline bool is_integer_valued(double x, double tol = 1e-9) { return std::abs(x - std::round(x)) < tol; }

/// Reduces an angle to [-pi, pi) before trig evaluation.
inline double wrap_phase(double theta) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  if (theta >= -3.14159265358979 && theta < 3.14159265358979) return theta;
  double r = std::fmod(theta, kTwoPi);
  if (r >= kTwoPi / 2) r -= kTwoPi;
  if (r < -kTwoPi / 2) r += kTwoPi;
  return r;
}

inline std::size_t worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, n) across worker threads. Each i writes only its
/// own output slot, so results do not depend on the worker count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace vaa::detail
