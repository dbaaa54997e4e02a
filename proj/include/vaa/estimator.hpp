#pragma once

// Sampling estimate of the phase scale p_s. A gaussian of total mass D and
// the sampled mean / deviation is assumed to model the cost histogram; the
// points where it drops to a single state approximate C(X_min) and C(X_max).

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <ostream>
#include <span>
#include <vector>

#include <json.hpp>

#include "vaa/detail/numeric.hpp"
#include "vaa/error.hpp"
#include "vaa/problems.hpp"
#include "vaa/rng.hpp"
#include "vaa/spectrum.hpp"

namespace vaa {

struct SampleEstimate {
  std::size_t m_samples = 0;
  double mu_t = 0.0;
  double sigma_t = 0.0;
  double alpha_t = 0.0;
  double x_minus = 0.0;
  double x_plus = 0.0;
  double ps_t = 0.0;
};

/// Shape assumed for the cost histogram when locating its single-state tails.
class TailModel {
 public:
  virtual ~TailModel() = default;
  /// Fills alpha_t, x_minus and x_plus from mu_t and sigma_t for a space of `states` entries.
  virtual void solve(SampleEstimate& est, double states) const = 0;
};

/// G(x) = alpha exp(-(x - mu)^2 / (2 sigma^2)) with integral equal to the
/// state count, so alpha = (D/2) / (sigma sqrt(pi/2)); G(x) = 1 at
/// x = mu +- sigma sqrt(-2 ln(sigma sqrt(pi/2) / (D/2))).
class GaussianTail final : public TailModel {
 public:
  void solve(SampleEstimate& est, double states) const override {
    const double root = est.sigma_t * std::sqrt(std::numbers::pi / 2.0);
    est.alpha_t = (states / 2.0) / root;
    if (!(est.alpha_t > 1.0)) {
      throw Error(ErrorCode::ModelViolation, "sample spread too wide for the gaussian model (alpha <= 1)");
    }
    const double half_width = est.sigma_t * std::sqrt(-2.0 * std::log(root / (states / 2.0)));
    est.x_minus = est.mu_t - half_width;
    est.x_plus = est.mu_t + half_width;
  }
};

/// Costs of m assignments drawn uniformly with replacement.
inline std::vector<double> sample_costs(const Problem& problem, std::size_t m, std::uint64_t seed) {
  if (m < 2) throw Error(ErrorCode::InsufficientSamples, "sampling needs m >= 2");
  const std::uint64_t d = problem.state_count();
  Rng rng = make_stream(seed, "sampling");
  std::uniform_int_distribution<std::uint64_t> pick(0, d - 1);
  std::vector<double> out(m);
  for (auto& c : out) c = evaluate_index(problem, pick(rng));
  return out;
}

/// Same draw sequence as sample_costs on the problem that produced `space`.
inline std::vector<double> sample_costs(const SolutionSpace& space, std::size_t m, std::uint64_t seed) {
  if (m < 2) throw Error(ErrorCode::InsufficientSamples, "sampling needs m >= 2");
  Rng rng = make_stream(seed, "sampling");
  std::uniform_int_distribution<std::uint64_t> pick(0, space.size() - 1);
  std::vector<double> out(m);
  for (auto& c : out) c = space[pick(rng)];
  return out;
}

/// Estimate for a space of `states` assignments.
inline SampleEstimate estimate_ps_states(std::span<const double> samples, double states,
                                         const TailModel& model = GaussianTail{}) {
  if (samples.size() < 2) throw Error(ErrorCode::InsufficientSamples, "estimate needs at least 2 samples");
  SampleEstimate est;
  est.m_samples = samples.size();
  std::tie(est.mu_t, est.sigma_t) = population_moments(samples);
  if (!(est.sigma_t > 0.0)) throw Error(ErrorCode::DegenerateSample, "all samples are equal");
  model.solve(est, states);
  est.ps_t = 2.0 * std::numbers::pi / (est.x_plus - est.x_minus);
  return est;
}

/// Estimate for an n-qubit space (2^n assignments).
inline SampleEstimate estimate_ps(std::span<const double> samples, int n_qubits,
                                  const TailModel& model = GaussianTail{}) {
  return estimate_ps_states(samples, std::ldexp(1.0, n_qubits), model);
}

/// |estimate - exact| / exact.
inline double ps_error(double estimate, double exact) {
  if (!(exact > 0.0)) throw Error(ErrorCode::InvalidReference, "reference p_s must be positive");
  return std::abs(estimate - exact) / exact;
}

// ---------------------------------------------------------------------------
// Table-1 style experiment

struct ErrorRow {
  std::size_t m = 0;
  double mean_error = 0.0;
  double std_error = 0.0;  ///< standard error of the mean
  std::size_t trials = 0;
};

/// For each of qubo_count linear QUBOs, `trials` independent sampling runs;
/// each run draws max(m_values) costs and the estimate at M uses the first M
/// of them. Errors are averaged over all QUBOs and runs per M.
inline std::vector<ErrorRow> table1_experiment(int n_qubits, std::span<const std::size_t> m_values,
                                               std::size_t trials, std::size_t qubo_count, std::uint64_t seed) {
  if (m_values.empty()) throw Error(ErrorCode::InvalidArgument, "no sample sizes given");
  std::size_t m_max = 0;
  for (auto m : m_values) {
    if (m < 2) throw Error(ErrorCode::InsufficientSamples, "sample sizes must be >= 2");
    m_max = std::max(m_max, m);
  }
  // errors[q][t][j]
  std::vector<std::vector<std::vector<double>>> errors(qubo_count);
  detail::parallel_for(qubo_count, [&](std::size_t q) {
    const std::uint64_t qubo_seed = make_stream(seed, "table1.qubo", q)();
    const auto problem = generate_linear_qubo(static_cast<std::size_t>(n_qubits), -100, 100, qubo_seed);
    const auto space = enumerate(problem);
    const double exact = exact_ps(space);
    errors[q].resize(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      const std::uint64_t trial_seed = make_stream(seed, "table1.trial", q * trials + t)();
      const auto samples = sample_costs(space, m_max, trial_seed);
      for (auto m : m_values) {
        const auto est = estimate_ps(std::span<const double>(samples).first(m), n_qubits);
        errors[q][t].push_back(ps_error(est.ps_t, exact));
      }
    }
  });
  std::vector<ErrorRow> rows;
  for (std::size_t j = 0; j < m_values.size(); ++j) {
    detail::KahanSum sum, sq;
    std::size_t count = 0;
    for (const auto& per_q : errors) {
      for (const auto& per_t : per_q) {
        sum.add(per_t[j]);
        sq.add(per_t[j] * per_t[j]);
        ++count;
      }
    }
    ErrorRow row;
    row.m = m_values[j];
    row.trials = count;
    row.mean_error = sum.value() / static_cast<double>(count);
    const double var = std::max(0.0, sq.value() / static_cast<double>(count) - row.mean_error * row.mean_error);
    row.std_error = count > 1 ? std::sqrt(var / static_cast<double>(count - 1)) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

inline void write_error_table_csv(std::ostream& out, std::span<const ErrorRow> rows) {
  out << "m,mean_error,std_error,trials\n";
  out.precision(17);
  for (const auto& r : rows) out << r.m << ',' << r.mean_error << ',' << r.std_error << ',' << r.trials << '\n';
}

inline nlohmann::json to_json(const SampleEstimate& e) {
  return {{"m_samples", e.m_samples}, {"mu_t", e.mu_t}, {"sigma_t", e.sigma_t}, {"alpha_t", e.alpha_t},
          {"x_minus", e.x_minus},     {"x_plus", e.x_plus}, {"ps_t", e.ps_t}};
}

inline nlohmann::json to_json(std::span<const ErrorRow> rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"m", r.m}, {"mean_error", r.mean_error}, {"std_error", r.std_error}, {"trials", r.trials}});
  }
  return arr;
}

}  // namespace vaa
