#pragma once

// Simulated measurement campaigns, steepest-descent greedy search, minimum
// verification, the three-phase hybrid solver, and subset-sum target queries.
//
// The solver talks to the spectrum only through SimulatedDevice: it submits
// (p_s, k, shots) and receives measured indices with their costs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vaa/detail/numeric.hpp"
#include "vaa/engine.hpp"
#include "vaa/error.hpp"
#include "vaa/estimator.hpp"
#include "vaa/problems.hpp"
#include "vaa/regression.hpp"
#include "vaa/rng.hpp"
#include "vaa/spectrum.hpp"
#include "vaa/sweep.hpp"

namespace vaa {

struct Shot {
  std::uint64_t index = 0;
  double cost = 0.0;
};

/// Budgeted amplify-and-measure access to a landscape. One iteration is one
/// oracle + diffusion round; a run of k rounds with t shots costs k * t.
class SimulatedDevice {
 public:
  static constexpr std::uint64_t kUnlimited = std::numeric_limits<std::uint64_t>::max();

  SimulatedDevice(const Landscape& land, std::uint64_t budget, std::uint64_t seed)
      : land_(&land), budget_(budget), rng_(make_stream(seed, "device")) {}

  std::uint64_t dimension() const { return land_->space().size(); }
  std::uint64_t budget() const { return budget_; }
  std::uint64_t used() const { return used_; }
  std::uint64_t remaining() const { return budget_ - used_; }
  std::uint64_t runs() const { return runs_; }
  std::uint64_t shots_taken() const { return shots_; }

  bool affordable(std::uint64_t k, std::uint64_t shots) const {
    if (k == 0 || shots == 0) return true;
    if (k > remaining()) return false;
    return shots <= remaining() / k;
  }

  std::vector<Shot> run(double p_s, std::uint64_t k, std::uint64_t shots) {
    if (!affordable(k, shots)) {
      throw Error(ErrorCode::Budget, "run needs " + std::to_string(k) + " x " + std::to_string(shots) +
                                         " iterations, " + std::to_string(remaining()) + " left");
    }
    used_ += k * shots;
    ++runs_;
    shots_ += shots;
    const auto trace = land_->amplifier().run(p_s, k);
    const auto idx = land_->amplifier().sample(trace.final_probs, shots, rng_);
    std::vector<Shot> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back({i, land_->space()[i]});
    return out;
  }

 private:
  const Landscape* land_;
  std::uint64_t budget_;
  std::uint64_t used_ = 0;
  std::uint64_t runs_ = 0;
  std::uint64_t shots_ = 0;
  Rng rng_;
};

// ---------------------------------------------------------------------------
// Measurement campaigns

struct MeasurementEntry {
  double p_s = 0.0;
  std::uint64_t k = 0;
  std::vector<Shot> outcomes;
};

struct MeasurementRecord {
  std::vector<MeasurementEntry> entries;
  double threshold = 0.0;  ///< outcomes with cost below it count as promising
  std::uint64_t budget_per_point = 0;
};

/// Nearest-rank quantile of a sample.
inline double sample_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::InsufficientSamples, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  return values[static_cast<std::size_t>(std::floor(pos))];
}

/// 1st percentile of the sampled costs.
inline double default_threshold(std::span<const double> samples) {
  return sample_quantile(std::vector<double>(samples.begin(), samples.end()), 0.01);
}

inline MeasurementRecord simulated_experiment(const Landscape& land, std::span<const double> ps_grid, std::uint64_t k,
                                              std::uint64_t budget_per_point, double threshold, std::uint64_t seed) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "experiment needs k >= 1");
  const std::uint64_t t = budget_per_point / k;
  if (t == 0) {
    throw Error(ErrorCode::Budget, "budget " + std::to_string(budget_per_point) + " buys no shot at k = " +
                                       std::to_string(k));
  }
  MeasurementRecord rec;
  rec.threshold = threshold;
  rec.budget_per_point = budget_per_point;
  rec.entries.resize(ps_grid.size());
  detail::parallel_for(ps_grid.size(), [&](std::size_t g) {
    SimulatedDevice dev(land, k * t, make_stream(seed, "experiment", g)());
    rec.entries[g] = {ps_grid[g], k, dev.run(ps_grid[g], k, t)};
  });
  return rec;
}

inline MeasurementRecord simulated_experiment(const SolutionSpace& space, std::span<const double> ps_grid,
                                              std::uint64_t k, std::uint64_t budget_per_point, double threshold,
                                              std::uint64_t seed) {
  const Landscape land(space);
  return simulated_experiment(land, ps_grid, k, budget_per_point, threshold, seed);
}

/// CSV `ps,k,shot,index,cost,below_threshold`.
inline void write_measurements_csv(std::ostream& out, const MeasurementRecord& rec) {
  out << "ps,k,shot,index,cost,below_threshold\n";
  out.precision(17);
  for (const auto& e : rec.entries) {
    for (std::size_t s = 0; s < e.outcomes.size(); ++s) {
      const auto& o = e.outcomes[s];
      out << e.p_s << ',' << e.k << ',' << s << ',' << o.index << ',' << o.cost << ','
          << (o.cost < rec.threshold ? 1 : 0) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Greedy descent

struct GreedyResult {
  Assignment assignment;
  double cost = 0.0;
  std::size_t flips = 0;
};

namespace detail {

inline double score(double cost, Direction dir) { return dir == Direction::Min ? cost : -cost; }

inline bool improves(double candidate, double current) {
  return candidate < current - 1e-12 * std::max(1.0, std::abs(current));
}

}  // namespace detail

/// Steepest single-variable descent. Each step applies the digit change with
/// the largest improvement; ties go to the lowest variable index, then the
/// lowest digit value. Stops when no single change improves.
inline GreedyResult greedy_descent(const Problem& problem, const Assignment& start, Direction dir = Direction::Min) {
  check_assignment(problem, start);
  GreedyResult res{start, evaluate_cost(problem, start), 0};
  const int radix = problem.radix();
  while (true) {
    double best = detail::score(res.cost, dir);
    std::optional<std::pair<std::size_t, int>> move;
    Assignment trial = res.assignment;
    for (std::size_t v = 0; v < trial.digits.size(); ++v) {
      const int orig = trial.digits[v];
      for (int val = 0; val < radix; ++val) {
        if (val == orig) continue;
        trial.digits[v] = val;
        const double s = detail::score(detail::evaluate_digits(problem, [&](std::size_t i) { return static_cast<int>(trial.digits[i]); }), dir);
        if (detail::improves(s, best)) {
          best = s;
          move = {v, val};
        }
      }
      trial.digits[v] = orig;
    }
    if (!move) break;
    res.assignment.digits[move->first] = move->second;
    res.cost = evaluate_cost(problem, res.assignment);
    ++res.flips;
  }
  return res;
}

/// True when no single digit change improves the cost.
inline bool is_local_optimum(const Problem& problem, const Assignment& x, Direction dir = Direction::Min) {
  const double cur = detail::score(evaluate_cost(problem, x), dir);
  Assignment trial = x;
  for (std::size_t v = 0; v < trial.digits.size(); ++v) {
    const int orig = trial.digits[v];
    for (int val = 0; val < problem.radix(); ++val) {
      if (val == orig) continue;
      trial.digits[v] = val;
      if (detail::improves(detail::score(detail::evaluate_digits(problem, [&](std::size_t i) { return static_cast<int>(trial.digits[i]); }), dir), cur)) return false;
    }
    trial.digits[v] = orig;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Minimum verification

struct VerifyConfig {
  std::size_t probes = 10;
  std::uint64_t shots = 50;
  std::uint64_t k = 0;  ///< 0: a quarter of the single-target Grover count
  double step = 0.0;    ///< relative p_s spacing of probes; 0: 1/k
  Direction direction = Direction::Min;
};

struct VerifyResult {
  bool improved = false;
  std::uint64_t index = 0;  ///< improving outcome (when improved)
  double cost = 0.0;
  std::uint64_t trials = 0;
  /// Consistent only: (1 - p_ref)^shots, the chance of missing a state that
  /// peaks at a probe as strongly as the candidate's band does at its own
  /// p_s. p_ref is the share of reference-probe outcomes within one probe step
  /// of the candidate's cost.
  double false_negative_bound = 1.0;
  std::vector<double> probe_ps;
  std::vector<MeasurementEntry> entries;
};

inline std::uint64_t default_verify_k(std::uint64_t d) {
  return std::max<std::uint64_t>(1, grover_iterations(d, 1) / 4);
}

/// Measures once at the candidate's predicted p_s (the reference probe), then
/// probes p_s values beyond it on the side the fit maps to better costs. Improved on any strictly better outcome; otherwise
/// Consistent, which is statistical evidence and not a proof of optimality.
inline VerifyResult verify_minimum(SimulatedDevice& device, double candidate_cost, const CorrelationFit& fit,
                                   const VerifyConfig& cfg) {
  if (cfg.probes < 1) throw Error(ErrorCode::InvalidArgument, "verification needs at least one probe");
  if (cfg.shots < 1) throw Error(ErrorCode::InvalidArgument, "verification needs at least one shot per probe");
  const std::uint64_t k = cfg.k ? cfg.k : default_verify_k(device.dimension());
  const double step = cfg.step > 0.0 ? cfg.step : 1.0 / static_cast<double>(k);
  const double ps_c = predict_ps(fit, candidate_cost, 4.0);
  if (!(ps_c > 0.0)) throw Error(ErrorCode::PredictionFailure, "fit predicts a non-positive p_s for the candidate");
  const double h = 1e-3 * ps_c;
  const double slope = (fit.cost_at(ps_c + h) - fit.cost_at(ps_c - h)) / (2 * h);
  if (slope == 0.0) throw Error(ErrorCode::PredictionFailure, "fit is flat at the candidate");
  // Move p_s toward better costs.
  const bool better_is_lower = cfg.direction == Direction::Min;
  const double sgn = (slope > 0.0) == better_is_lower ? -1.0 : 1.0;
  const double band = std::abs(slope) * step * ps_c;

  VerifyResult res;
  const double cand_score = detail::score(candidate_cost, cfg.direction);
  double p_ref = 0.0;
  for (std::size_t j = 0; j <= cfg.probes; ++j) {
    const double ps = ps_c * (1.0 + sgn * static_cast<double>(j) * step);
    if (!(ps > 0.0)) break;
    if (!device.affordable(k, cfg.shots)) {
      throw Error(ErrorCode::Budget, "verification ran out of budget after " + std::to_string(j - 1) + " probes");
    }
    auto shots = device.run(ps, k, cfg.shots);
    res.trials += shots.size();
    res.probe_ps.push_back(ps);
    std::size_t in_band = 0;
    const Shot* best = nullptr;
    for (const auto& s : shots) {
      const double sc = detail::score(s.cost, cfg.direction);
      if (detail::improves(sc, cand_score) && (!best || sc < detail::score(best->cost, cfg.direction))) best = &s;
      if (sc <= cand_score + band) ++in_band;
    }
    if (best) {
      res.improved = true;
      res.index = best->index;
      res.cost = best->cost;
      res.entries.push_back({ps, k, std::move(shots)});
      return res;
    }
    if (j == 0) p_ref = static_cast<double>(in_band) / static_cast<double>(cfg.shots);
    res.entries.push_back({ps, k, std::move(shots)});
  }
  res.false_negative_bound = std::pow(1.0 - p_ref, static_cast<double>(cfg.shots));
  return res;
}

inline VerifyResult verify_minimum(const SolutionSpace& space, double candidate_cost, const CorrelationFit& fit,
                                   std::size_t probes, std::uint64_t shots, std::uint64_t seed) {
  const Landscape land(space);
  SimulatedDevice device(land, SimulatedDevice::kUnlimited, seed);
  VerifyConfig cfg;
  cfg.probes = probes;
  cfg.shots = shots;
  return verify_minimum(device, candidate_cost, fit, cfg);
}

// ---------------------------------------------------------------------------
// Hybrid solver

enum class Verdict { ConfirmedMin, BudgetExhausted };

constexpr std::string_view to_string(Verdict v) {
  return v == Verdict::ConfirmedMin ? "confirmed_min" : "budget_exhausted";
}

struct HybridConfig {
  Direction direction = Direction::Min;
  std::size_t samples = 500;        ///< classical samples for the p_s estimate
  std::uint64_t phase1_k = 0;       ///< 0: single-target Grover count
  std::uint64_t phase1_shots = 16;  ///< shots per Phase-1 grid point
  double band_quantile = 0.01;      ///< shallow edge of the heuristic band
  double band_margin = 0.3;         ///< relative extension past the estimated extremum
  std::size_t greedy_starts = 5;
  std::size_t fit_points = 12;
  std::size_t max_cycles = 8;
  std::uint64_t baseline_shots = 64;
  VerifyConfig verify;
};

struct TraceEvent {
  std::size_t seq = 0;
  std::uint64_t iterations = 0;
  std::string phase;
  std::string event;
  double best_cost = 0.0;
  nlohmann::json detail;
};

struct HybridTrace {
  std::vector<TraceEvent> events;
  std::vector<double> best_cost_history;
  std::uint64_t oracle_calls = 0;
  std::uint64_t amplification_runs = 0;
  std::uint64_t shots = 0;
  Verdict verdict = Verdict::BudgetExhausted;
  bool asymmetry_detected = false;
};

struct HybridResult {
  Assignment best;
  double cost = 0.0;
  HybridTrace trace;
};

inline nlohmann::json to_json(const HybridTrace& t) {
  nlohmann::json j;
  j["verdict"] = std::string(to_string(t.verdict));
  j["oracle_calls"] = t.oracle_calls;
  j["amplification_runs"] = t.amplification_runs;
  j["shots"] = t.shots;
  j["asymmetry_detected"] = t.asymmetry_detected;
  j["best_cost_history"] = t.best_cost_history;
  auto ev = nlohmann::json::array();
  for (const auto& e : t.events) {
    ev.push_back({{"seq", e.seq},
                  {"iterations", e.iterations},
                  {"phase", e.phase},
                  {"event", e.event},
                  {"best_cost", e.best_cost},
                  {"detail", e.detail}});
  }
  j["events"] = std::move(ev);
  return j;
}

namespace detail {

class HybridRun {
 public:
  HybridRun(const Problem& problem, const Landscape& land, std::uint64_t budget, const HybridConfig& cfg,
            std::uint64_t seed)
      : problem_(problem), cfg_(cfg), device_(land, budget, seed), seed_(seed) {}

  HybridResult solve() {
    const auto d = device_.dimension();
    if (device_.budget() == 0) return baseline();

    // Phase 1: classical estimate, then a measurement grid over the band where
    // the gaussian model places the best few percent of states.
    const auto samples = sample_costs(problem_, std::max<std::size_t>(cfg_.samples, 2), make_stream(seed_, "hybrid.samples")());
    const auto est = estimate_ps_states(samples, static_cast<double>(d));
    mu_ = est.mu_t;
    const bool minimize = cfg_.direction == Direction::Min;
    const double tail = minimize ? est.x_minus : est.x_plus;
    const double q = minimize ? cfg_.band_quantile : 1.0 - cfg_.band_quantile;
    const double shallow = sample_quantile(samples, q);
    log("phase1", "estimate",
        {{"mu", est.mu_t}, {"sigma", est.sigma_t}, {"ps_estimate", est.ps_t}, {"tail", tail}, {"threshold", shallow}});
    const std::uint64_t k1 = cfg_.phase1_k ? cfg_.phase1_k : grover_iterations(d, 1);
    const double y_dir = scan_band(tail, shallow, k1, cfg_.direction, true);
    if (!best_) return baseline();

    {
      // The opposite tail, scanned the same way; a higher yield there marks
      // the skew that makes this direction hard to boost.
      const Direction other = minimize ? Direction::Max : Direction::Min;
      const double o_tail = minimize ? est.x_plus : est.x_minus;
      const double o_shallow = sample_quantile(samples, 1.0 - q);
      const double y_other = scan_band(o_tail, o_shallow, k1, other, false);
      trace_.asymmetry_detected = y_other > y_dir;
      log("phase1", "asymmetry",
          {{"yield", y_dir},
           {"opposite_yield", y_other},
           {"opposite_direction", minimize ? "max" : "min"},
           {"suspected_x_delta_sign", trace_.asymmetry_detected ? (minimize ? "negative" : "positive") : "unknown"}});
    }

    // Phase 2 and 3 cycles.
    std::vector<Assignment> starts = top_measured(cfg_.greedy_starts);
    for (std::size_t cycle = 0; cycle < cfg_.max_cycles; ++cycle) {
      for (const auto& s : starts) {
        auto g = greedy_descent(problem_, s, cfg_.direction);
        log("phase2", "greedy", {{"start_cost", evaluate_cost(problem_, s)}, {"cost", g.cost}, {"flips", g.flips}},
            &g);
      }
      auto fit = build_fit();
      try {
        VerifyConfig vc = cfg_.verify;
        vc.direction = cfg_.direction;
        auto v = verify_minimum(device_, best_cost_, fit, vc);
        for (auto& e : v.entries) record(std::move(e));
        if (!v.improved) {
          log("phase3", "consistent",
              {{"trials", v.trials}, {"false_negative_bound", v.false_negative_bound}, {"probe_ps", v.probe_ps}});
          return finish(Verdict::ConfirmedMin);
        }
        const auto x = problem_.assignment(v.index);
        log("phase3", "improved", {{"index", v.index}, {"cost", v.cost}, {"trials", v.trials}});
        offer(x, v.cost);
        starts = {x};
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Budget) {
          log("phase3", "budget", {{"message", e.what()}});
          return finish(Verdict::BudgetExhausted);
        }
        throw;
      }
    }
    log("phase3", "cycle_limit", {{"cycles", cfg_.max_cycles}});
    return finish(Verdict::BudgetExhausted);
  }

 private:
  HybridResult baseline() {
    auto shots = device_.run(0.0, 0, cfg_.baseline_shots);
    for (const auto& s : shots) offer(problem_.assignment(s.index), s.cost);
    log("baseline", "uniform", {{"shots", shots.size()}});
    return finish(Verdict::BudgetExhausted);
  }

  // Measures a grid between the estimated extremum (pushed out by the margin)
  // and the shallow quantile; returns the best per-point frequency of a single
  // promising cost.
  double scan_band(double tail, double shallow, std::uint64_t k, Direction dir, bool keep) {
    double deep_ps = std::numbers::pi / std::abs(mu_ - tail) * (1.0 - cfg_.band_margin);
    double shallow_ps = std::numbers::pi / std::max(std::abs(mu_ - shallow), 1e-300);
    if (deep_ps > shallow_ps) std::swap(deep_ps, shallow_ps);
    const auto steps = static_cast<std::size_t>(
        std::ceil((shallow_ps - deep_ps) / (deep_ps / static_cast<double>(k)))) + 1;
    const auto grid = linear_grid(deep_ps, shallow_ps, std::max<std::size_t>(steps, 2));
    const double thr_score = detail::score(shallow, dir);
    double yield = 0.0;
    std::size_t measured = 0;
    for (double ps : grid) {
      if (!device_.affordable(k, cfg_.phase1_shots)) break;
      auto shots = device_.run(ps, k, cfg_.phase1_shots);
      ++measured;
      std::map<double, std::size_t> counts;
      for (const auto& s : shots) {
        if (detail::score(s.cost, dir) < thr_score) ++counts[s.cost];
      }
      for (const auto& [c, n] : counts) {
        yield = std::max(yield, static_cast<double>(n) / static_cast<double>(shots.size()));
      }
      if (keep) {
        for (const auto& s : shots) offer(problem_.assignment(s.index), s.cost, false);
        record({ps, k, std::move(shots)});
      }
    }
    log("phase1", keep ? "scan" : "opposite_scan",
        {{"ps_lo", grid.front()}, {"ps_hi", grid.back()}, {"points", measured}, {"k", k}, {"yield", yield}});
    return yield;
  }

  void record(MeasurementEntry e) {
    for (const auto& s : e.outcomes) {
      if (!seen_.count(s.index)) seen_[s.index] = s.cost;
    }
    entries_.push_back(std::move(e));
  }

  std::vector<Assignment> top_measured(std::size_t n) const {
    std::vector<std::pair<double, std::uint64_t>> v;
    for (const auto& [idx, c] : seen_) v.push_back({detail::score(c, cfg_.direction), idx});
    std::sort(v.begin(), v.end());
    std::vector<Assignment> out;
    for (std::size_t i = 0; i < std::min(n, v.size()); ++i) out.push_back(problem_.assignment(v[i].second));
    return out;
  }

  // Confirmed (p_s, cost) pairs: a cost measured at least twice in one run,
  // keeping for each cost the run where it was most frequent. The fit uses the
  // confirmations closest to the best cost.
  CorrelationFit build_fit() {
    std::map<double, std::pair<std::size_t, double>> best_run;  // cost -> (count, ps)
    for (const auto& e : entries_) {
      std::map<double, std::size_t> counts;
      for (const auto& s : e.outcomes) ++counts[s.cost];
      for (const auto& [c, n] : counts) {
        if (n < 2) continue;
        auto& slot = best_run[c];
        if (n > slot.first) slot = {n, e.p_s};
      }
    }
    std::vector<std::pair<double, Point>> ranked;
    for (const auto& [c, cp] : best_run) {
      ranked.push_back({std::abs(c - best_cost_), Point{cp.second, c}});
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Point> pts;
    for (std::size_t i = 0; i < std::min(cfg_.fit_points, ranked.size()); ++i) pts.push_back(ranked[i].second);
    try {
      if (pts.size() >= 3) {
        auto fit = fit_correlation(pts);
        // Must map the candidate to a usable p_s.
        if (predict_ps(fit, best_cost_, 4.0) > 0.0) {
          log("phase2", "fit",
              {{"points", pts.size()}, {"model", std::string(to_string(fit.model))}, {"r", fit.linear.r}});
          return fit;
        }
      }
    } catch (const Error&) {
      // fall through to the half-turn model
    }
    // Fallback: two points of the half-turn relation p_s = pi / |mu - c|
    // around the best cost.
    const double spread = std::max(1.0, std::abs(mu_ - best_cost_)) * 0.05;
    std::vector<Point> model;
    for (double c : {best_cost_ - spread, best_cost_ + spread}) model.push_back({half_turn_ps(mu_, c), c});
    log("phase2", "fit_fallback", {{"confirmations", pts.size()}});
    return fit_correlation(model);
  }

  void offer(const Assignment& x, double cost, bool note = true) {
    if (!best_ || detail::improves(detail::score(cost, cfg_.direction), detail::score(best_cost_, cfg_.direction))) {
      best_ = x;
      best_cost_ = cost;
      if (note) trace_.best_cost_history.push_back(cost);
    }
  }

  void log(const std::string& phase, const std::string& event, nlohmann::json detail,
           const GreedyResult* g = nullptr) {
    if (g) offer(g->assignment, g->cost);
    if (best_ && (trace_.best_cost_history.empty() || trace_.best_cost_history.back() != best_cost_)) {
      trace_.best_cost_history.push_back(best_cost_);
    }
    TraceEvent e;
    e.seq = trace_.events.size();
    e.iterations = device_.used();
    e.phase = phase;
    e.event = event;
    e.best_cost = best_ ? best_cost_ : std::numeric_limits<double>::quiet_NaN();
    e.detail = std::move(detail);
    trace_.events.push_back(std::move(e));
  }

  HybridResult finish(Verdict v) {
    trace_.verdict = v;
    trace_.oracle_calls = device_.used();
    trace_.amplification_runs = device_.runs();
    trace_.shots = device_.shots_taken();
    log("done", std::string(to_string(v)), {});
    HybridResult r;
    r.best = best_.value_or(Assignment{});
    r.cost = best_cost_;
    r.trace = std::move(trace_);
    return r;
  }

  const Problem& problem_;
  HybridConfig cfg_;
  SimulatedDevice device_;
  std::uint64_t seed_;
  double mu_ = 0.0;
  std::optional<Assignment> best_;
  double best_cost_ = 0.0;
  std::map<std::uint64_t, double> seen_;
  std::vector<MeasurementEntry> entries_;
  HybridTrace trace_;
};

}  // namespace detail

inline constexpr std::uint64_t kDefaultHybridBudget = 4'000'000;

/// Solves with a prebuilt landscape of the problem's spectrum.
inline HybridResult hybrid_solve(const Problem& problem, const Landscape& land, std::uint64_t budget,
                                 const HybridConfig& cfg, std::uint64_t seed) {
  if (land.space().size() != problem.state_count()) {
    throw Error(ErrorCode::Dimension, "landscape does not belong to this problem");
  }
  detail::HybridRun run(problem, land, budget, cfg, seed);
  return run.solve();
}

inline HybridResult hybrid_solve(const Problem& problem, std::uint64_t budget, const HybridConfig& cfg,
                                 std::uint64_t seed) {
  const auto space = enumerate(problem);
  const Landscape land(space);
  return hybrid_solve(problem, land, budget, cfg, seed);
}

// ---------------------------------------------------------------------------
// Subset-sum queries

struct SubsetQueryConfig {
  double min_peak_prob = 0.1;    ///< a cost is boostable when its peak reaches this
  std::size_t reach_levels = 64;  ///< distinct costs examined from each extremum
  std::size_t probes = 6;         ///< probes on each side of a predicted p_s
  std::uint64_t shots = 32;
};

struct BoostableBand {
  double low_lo = 0.0, low_hi = 0.0;    ///< reachable from the minimum side
  double high_lo = 0.0, high_hi = 0.0;  ///< reachable from the maximum side
  bool contains(double t) const { return (t >= low_lo && t <= low_hi) || (t >= high_lo && t <= high_hi); }
};

struct SubsetQueryResult {
  bool exists = false;
  Assignment assignment;  ///< valid when exists
  std::uint64_t trials = 0;
  BoostableBand band;
};

/// Costs reachable by peaking amplification, walking inward from each
/// extremum until a peak falls below the threshold.
inline BoostableBand boostable_band(const Landscape& land, const SubsetQueryConfig& cfg) {
  const std::size_t g = land.group_count();
  const std::size_t span = std::min(cfg.reach_levels, g);
  const auto policy = KPolicy::best_up_to(grover_iterations(land.space().size(), 1));
  auto reach = [&](bool from_low) {
    std::vector<double> targets;
    for (std::size_t j = 0; j < span; ++j) targets.push_back(land.group_cost(from_low ? j : g - 1 - j));
    const double mu = population_moments(land.space().costs()).first;
    // Drop targets at the mean: no half-turn scale exists there.
    std::erase_if(targets, [&](double c) { return std::abs(c - mu) < 1e-12 * std::max(1.0, std::abs(mu)); });
    if (targets.empty()) return from_low ? land.group_cost(0) : land.group_cost(g - 1);
    const auto peaks = find_peaks(land, targets, window_for(land.space(), targets), policy);
    double edge = from_low ? land.group_cost(0) : land.group_cost(g - 1);
    for (const auto& p : peaks) {
      if (p.peak_prob < cfg.min_peak_prob) break;
      edge = p.cost_value;
    }
    return edge;
  };
  BoostableBand b;
  b.low_lo = land.group_cost(0);
  b.low_hi = reach(true);
  b.high_hi = land.group_cost(g - 1);
  b.high_lo = reach(false);
  return b;
}

/// Decides whether some subset sums to `target` by probing p_s values around
/// the target's predicted position. A measured exact hit gives Exists; the
/// absence of one is evidence, with the number of trials spent.
inline SubsetQueryResult subset_sum_query(const Problem& problem, double target, const SubsetQueryConfig& cfg,
                                          std::uint64_t seed) {
  if (problem.kind() != ProblemKind::SubsetSum) {
    throw Error(ErrorCode::UnsupportedKind, "subset_sum_query needs a subset-sum problem");
  }
  if (cfg.probes < 1 || cfg.shots < 1) throw Error(ErrorCode::InvalidArgument, "query needs probes and shots");
  const auto space = enumerate(problem);
  const Landscape land(space);
  SubsetQueryResult res;
  res.band = boostable_band(land, cfg);
  if (!res.band.contains(target)) {
    std::ostringstream msg;
    msg << "target " << target << " is outside the boostable band [" << res.band.low_lo << ", " << res.band.low_hi
        << "] u [" << res.band.high_lo << ", " << res.band.high_hi << "]";
    throw Error(ErrorCode::OutOfReach, msg.str());
  }
  double mu = 0.0;
  for (double w : problem.node_weights()) mu += w / 2.0;
  SimulatedDevice device(land, SimulatedDevice::kUnlimited, seed);
  const std::uint64_t k = grover_iterations(space.size(), 1);
  const double step = 1.0 / static_cast<double>(k);

  std::map<double, std::pair<std::size_t, double>> confirmed;  // cost -> (count, ps)
  auto probe_around = [&](double center, double rel) -> bool {
    for (long j = -static_cast<long>(cfg.probes); j <= static_cast<long>(cfg.probes); ++j) {
      const double ps = center * (1.0 + static_cast<double>(j) * rel);
      if (!(ps > 0.0)) continue;
      const auto shots = device.run(ps, k, cfg.shots);
      res.trials += shots.size();
      std::map<double, std::size_t> counts;
      for (const auto& s : shots) {
        if (s.cost == target) {
          res.exists = true;
          res.assignment = problem.assignment(s.index);
          return true;
        }
        ++counts[s.cost];
      }
      for (const auto& [c, n] : counts) {
        auto& slot = confirmed[c];
        if (n >= 2 && n > slot.first) slot = {n, ps};
      }
    }
    return false;
  };

  if (std::abs(target - mu) < 1e-12 * std::max(1.0, std::abs(mu))) {
    throw Error(ErrorCode::OutOfReach, "target equals the mean subset sum; no p_s isolates it");
  }
  const double ps_t = half_turn_ps(mu, target);
  if (probe_around(ps_t, step)) return res;
  // Extremum targets have no neighbor on one side; the half-turn scan is all.
  if (target <= res.band.low_lo || target >= res.band.high_hi) return res;

  // Bracket the target with the nearest confirmed costs on each side.
  std::vector<Point> below, above;
  for (const auto& [c, cp] : confirmed) {
    if (cp.first < 2) continue;
    (c < target ? below : above).push_back({cp.second, c});
  }
  if (below.empty() || above.empty()) return res;
  std::vector<Point> pts;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, below.size()); ++i) pts.push_back(below[below.size() - 1 - i]);
  for (std::size_t i = 0; i < std::min<std::size_t>(3, above.size()); ++i) pts.push_back(above[i]);
  try {
    const auto fit = fit_correlation(pts);
    const double ps_pred = predict_ps(fit, target, 4.0);
    if (ps_pred > 0.0) probe_around(ps_pred, step / 2.0);
  } catch (const Error&) {
    // No usable bracket fit; the half-turn scan stands as the evidence.
  }
  return res;
}

}  // namespace vaa
