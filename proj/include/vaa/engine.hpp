#pragma once

// Statevector simulation of the amplify-measure loop: uniform superposition,
// diagonal cost-oracle phases exp(i * p_s * C), reflection about the mean
// amplitude, repeated k times, then sampling.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <ostream>
#include <span>
#include <vector>

#include "vaa/detail/numeric.hpp"
#include "vaa/error.hpp"
#include "vaa/rng.hpp"
#include "vaa/spectrum.hpp"

namespace vaa {

using Amplitude = std::complex<double>;

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::vector<Amplitude> amps) : amps_(std::move(amps)) {}

  std::uint64_t size() const { return amps_.size(); }
  std::span<Amplitude> amps() { return amps_; }
  std::span<const Amplitude> amps() const { return amps_; }
  Amplitude operator[](std::uint64_t i) const { return amps_[i]; }

  double norm_squared() const {
    detail::KahanSum s;
    for (const auto& a : amps_) s.add(std::norm(a));
    return s.value();
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_[i]);
    return p;
  }

 private:
  std::vector<Amplitude> amps_;
};

inline StateVector init_uniform(std::uint64_t d, std::uint64_t cap = kDefaultSpaceCap) {
  if (d < 1) throw Error(ErrorCode::InvalidSize, "state needs at least one amplitude");
  if (d > cap) {
    throw Error(ErrorCode::Capacity, "state needs " + std::to_string(d) + " amplitudes, cap is " + std::to_string(cap));
  }
  return StateVector(std::vector<Amplitude>(d, Amplitude(1.0 / std::sqrt(static_cast<double>(d)), 0.0)));
}

/// amps[i] *= exp(i * p_s * costs[i]).
inline void apply_cost_oracle(StateVector& state, const SolutionSpace& space, double p_s) {
  if (state.size() != space.size()) {
    throw Error(ErrorCode::Dimension, "state has " + std::to_string(state.size()) + " amplitudes but space has " +
                                          std::to_string(space.size()) + " costs");
  }
  auto amps = state.amps();
  const auto costs = space.costs();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double theta = detail::wrap_phase(p_s * costs[i]);
    amps[i] *= Amplitude(std::cos(theta), std::sin(theta));
  }
}

namespace detail {

inline constexpr std::uint64_t kPairwiseThreshold = std::uint64_t{1} << 22;

inline Amplitude mean_amplitude(std::span<const Amplitude> amps) {
  Amplitude sum;
  if (amps.size() > kPairwiseThreshold) {
    sum = pairwise_sum(amps);
  } else {
    double re = 0.0, im = 0.0;
    for (const auto& a : amps) {
      re += a.real();
      im += a.imag();
    }
    sum = {re, im};
  }
  return sum / static_cast<double>(amps.size());
}

}  // namespace detail

/// U_s = 2|s><s| - I, i.e. amps[i] <- 2 * mean - amps[i].
inline void apply_diffusion(StateVector& state) {
  auto amps = state.amps();
  const Amplitude twice_mean = 2.0 * detail::mean_amplitude(amps);
  for (auto& a : amps) a = twice_mean - a;
}

struct AmplifyResult {
  std::vector<double> probabilities;
  std::uint64_t iterations = 0;
  double p_s = 0.0;
  std::vector<std::uint64_t> tracked;
  /// history[t][j]: probability of tracked[j] after t iterations, t = 0..k.
  std::vector<std::vector<double>> history;
};

/// Final state of k (oracle, diffusion) rounds from the uniform state.
inline StateVector amplify_state(const SolutionSpace& space, double p_s, std::uint64_t k) {
  StateVector state = init_uniform(space.size(), std::max<std::uint64_t>(space.size(), kDefaultSpaceCap));
  for (std::uint64_t t = 0; t < k; ++t) {
    apply_cost_oracle(state, space, p_s);
    apply_diffusion(state);
  }
  return state;
}

inline AmplifyResult run_amplification(const SolutionSpace& space, double p_s, std::uint64_t k,
                                       std::span<const std::uint64_t> tracked = {}) {
  for (auto idx : tracked) {
    if (idx >= space.size()) throw Error(ErrorCode::Dimension, "tracked index out of range");
  }
  AmplifyResult result;
  result.iterations = k;
  result.p_s = p_s;
  result.tracked.assign(tracked.begin(), tracked.end());
  StateVector state = init_uniform(space.size(), std::max<std::uint64_t>(space.size(), kDefaultSpaceCap));
  auto record = [&] {
    if (tracked.empty()) return;
    std::vector<double> row;
    row.reserve(tracked.size());
    for (auto idx : tracked) row.push_back(std::norm(state[idx]));
    result.history.push_back(std::move(row));
  };
  record();
  for (std::uint64_t t = 0; t < k; ++t) {
    apply_cost_oracle(state, space, p_s);
    apply_diffusion(state);
    record();
  }
  result.probabilities = state.probabilities();
  return result;
}

/// k_G = round(pi/4 * sqrt(D / m)), nearest integer with halves rounded up.
inline std::uint64_t grover_iterations(std::uint64_t d, std::uint64_t m) {
  if (m == 0 || m > d) throw Error(ErrorCode::InvalidArgument, "marked count must lie in [1, D]");
  const double k = std::numbers::pi / 4.0 * std::sqrt(static_cast<double>(d) / static_cast<double>(m));
  return static_cast<std::uint64_t>(std::llround(k));
}

/// Independent draws from a probability table (need not be exactly normalized).
inline std::vector<std::uint64_t> measure(std::span<const double> probabilities, std::uint64_t shots,
                                          std::uint64_t seed) {
  if (shots < 1) throw Error(ErrorCode::InvalidArgument, "measure needs at least one shot");
  if (probabilities.empty()) throw Error(ErrorCode::InvalidSize, "empty probability table");
  std::vector<double> cdf(probabilities.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    acc += std::max(0.0, probabilities[i]);
    cdf[i] = acc;
  }
  Rng rng = make_stream(seed, "shots");
  std::uniform_real_distribution<double> u(0.0, acc);
  std::vector<std::uint64_t> out;
  out.reserve(shots);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double r = u(rng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    if (it == cdf.end()) --it;
    // Skip zero-probability entries that share the cdf value.
    while (it != cdf.begin() && probabilities[static_cast<std::size_t>(it - cdf.begin())] <= 0.0) --it;
    out.push_back(static_cast<std::uint64_t>(it - cdf.begin()));
  }
  return out;
}

inline std::vector<std::uint64_t> measure(const StateVector& state, std::uint64_t shots, std::uint64_t seed) {
  const auto p = state.probabilities();
  return measure(std::span<const double>(p), shots, seed);
}

inline std::vector<std::uint64_t> measure(const AmplifyResult& result, std::uint64_t shots, std::uint64_t seed) {
  return measure(std::span<const double>(result.probabilities), shots, seed);
}

// ---------------------------------------------------------------------------
// Level-compressed amplification. Exactly equivalent to the statevector loop
// (all members of a level share one amplitude), at O(levels) per iteration.

struct LevelTrace {
  std::vector<double> final_probs;  ///< total probability per level after k rounds
  std::vector<double> best_probs;   ///< per level: max total probability over rounds 1..k
  std::vector<std::uint32_t> best_round;
};

class LevelAmplifier {
 public:
  explicit LevelAmplifier(const CostLevels& levels) : levels_(&levels) {
    weights_.resize(levels.size());
    const double d = static_cast<double>(levels.total);
    for (std::size_t l = 0; l < levels.size(); ++l) weights_[l] = static_cast<double>(levels.counts[l]) / d;
  }

  const CostLevels& levels() const { return *levels_; }

  /// Total probability per level after k rounds at p_s. With track_best, also
  /// records each level's best round in [1, k].
  LevelTrace run(double p_s, std::uint64_t k, bool track_best = false) const {
    const std::size_t n = levels_->size();
    const double amp0 = 1.0 / std::sqrt(static_cast<double>(levels_->total));
    std::vector<double> re(n, amp0), im(n, 0.0), cr(n), ci(n);
    for (std::size_t l = 0; l < n; ++l) {
      const double theta = detail::wrap_phase(p_s * levels_->costs[l]);
      cr[l] = std::cos(theta);
      ci[l] = std::sin(theta);
    }
    LevelTrace out;
    if (track_best) {
      out.best_probs.assign(n, 0.0);
      out.best_round.assign(n, 0);
    }
    for (std::uint64_t t = 0; t < k; ++t) {
      double mr = 0.0, mi = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        const double r = re[l] * cr[l] - im[l] * ci[l];
        const double i = re[l] * ci[l] + im[l] * cr[l];
        re[l] = r;
        im[l] = i;
        mr += weights_[l] * r;
        mi += weights_[l] * i;
      }
      mr *= 2.0;
      mi *= 2.0;
      for (std::size_t l = 0; l < n; ++l) {
        re[l] = mr - re[l];
        im[l] = mi - im[l];
      }
      if (track_best) {
        for (std::size_t l = 0; l < n; ++l) {
          const double p = (re[l] * re[l] + im[l] * im[l]) * static_cast<double>(levels_->counts[l]);
          if (p > out.best_probs[l]) {
            out.best_probs[l] = p;
            out.best_round[l] = static_cast<std::uint32_t>(t + 1);
          }
        }
      }
    }
    out.final_probs.resize(n);
    for (std::size_t l = 0; l < n; ++l) {
      out.final_probs[l] = (re[l] * re[l] + im[l] * im[l]) * static_cast<double>(levels_->counts[l]);
    }
    return out;
  }

  /// Samples flat indices from the level distribution: level first, then a
  /// uniform member of that level.
  std::vector<std::uint64_t> sample(std::span<const double> level_probs, std::uint64_t shots, Rng& rng) const {
    std::vector<double> cdf(level_probs.size());
    double acc = 0.0;
    for (std::size_t l = 0; l < level_probs.size(); ++l) {
      acc += std::max(0.0, level_probs[l]);
      cdf[l] = acc;
    }
    std::uniform_real_distribution<double> u(0.0, acc);
    std::vector<std::uint64_t> out;
    out.reserve(shots);
    for (std::uint64_t s = 0; s < shots; ++s) {
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u(rng));
      if (it == cdf.end()) --it;
      auto l = static_cast<std::size_t>(it - cdf.begin());
      while (l > 0 && level_probs[l] <= 0.0) --l;
      const auto lo = levels_->offsets[l];
      const auto hi = levels_->offsets[l + 1];
      std::uniform_int_distribution<std::uint64_t> member(lo, hi - 1);
      out.push_back(levels_->members[member(rng)]);
    }
    return out;
  }

 private:
  const CostLevels* levels_;
  std::vector<double> weights_;
};

// ---------------------------------------------------------------------------
// Debug dumps

/// CSV `iter,index,prob` of a tracked history.
inline void write_history_csv(std::ostream& out, const AmplifyResult& result) {
  out << "iter,index,prob\n";
  for (std::size_t t = 0; t < result.history.size(); ++t) {
    for (std::size_t j = 0; j < result.tracked.size(); ++j) {
      out << t << ',' << result.tracked[j] << ',' << result.history[t][j] << '\n';
    }
  }
}

/// Raw interleaved (re, im) float64 pairs, native byte order.
inline void write_amplitudes(const std::string& path, const StateVector& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  for (const auto& a : state.amps()) {
    const double pair[2] = {a.real(), a.imag()};
    out.write(reinterpret_cast<const char*>(pair), sizeof(pair));
  }
}

}  // namespace vaa
