#pragma once

// The p_s landscape: probability of tracked costs across a p_s grid, the p_s
// at which each solution peaks, and the cost-vs-p_s correlation built from
// those peaks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <json.hpp>

#include "vaa/detail/numeric.hpp"
#include "vaa/engine.hpp"
#include "vaa/error.hpp"
#include "vaa/regression.hpp"
#include "vaa/spectrum.hpp"

namespace vaa {

/// How many amplification rounds to use at a target.
struct KPolicy {
  enum class Mode {
    Fixed,    ///< exactly k rounds
    Grover,   ///< k_G for the target's degeneracy
    BestUpTo  ///< best round in [1, k]
  };
  Mode mode = Mode::Grover;
  std::uint64_t k = 0;

  static KPolicy fixed(std::uint64_t k) { return {Mode::Fixed, k}; }
  static KPolicy grover() { return {Mode::Grover, 0}; }
  static KPolicy best_up_to(std::uint64_t k) { return {Mode::BestUpTo, k}; }

  std::uint64_t rounds(std::uint64_t d, std::uint64_t degeneracy) const {
    return mode == Mode::Grover ? grover_iterations(d, std::max<std::uint64_t>(1, degeneracy)) : k;
  }
};

/// Interval of p_s searched for a peak.
struct PsWindow {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t steps = 200;      ///< minimum coarse grid size
  double resolution = 2.0;      ///< coarse points per expected peak width (0 = use `steps` only)
  double rel_tol = 1e-7;        ///< golden-section stopping width, relative to p_s
};

/// [0.5, 1.5] times the full-range scale 2*pi / (c_max - c_min).
inline PsWindow default_window(const SolutionSpace& space) {
  const double ps = exact_ps(space);
  return {0.5 * ps, 1.5 * ps};
}

/// Linear grid lo..hi inclusive.
inline std::vector<double> linear_grid(double lo, double hi, std::size_t steps) {
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "grid needs at least one point");
  if (steps == 1) return {lo};
  std::vector<double> g(steps);
  for (std::size_t i = 0; i < steps; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  return g;
}

struct PeakPoint {
  double cost_value = 0.0;
  double ps_star = 0.0;
  double peak_prob = 0.0;
  std::uint64_t degeneracy = 0;
  std::uint64_t k_at_peak = 0;
};

struct SweepRecord {
  std::vector<double> ps_grid;
  std::uint64_t k = 0;
  std::vector<double> tracked_costs;
  std::vector<std::uint64_t> degeneracies;
  std::vector<std::vector<double>> probs;  ///< probs[g][j]: tracked_costs[j] at ps_grid[g]
  std::size_t top_r = 0;
  std::vector<double> cumulative_top_r;    ///< summed probability of the top_r most probable distinct costs
  std::vector<double> top1;                ///< probability of the single most probable distinct cost
};

/// Groups cost levels the way rank_solutions groups distinct costs, and runs
/// level-compressed amplification for peak searches and sweeps.
class Landscape {
 public:
  explicit Landscape(const SolutionSpace& space)
      : space_(&space), levels_(make_levels(space)), amplifier_(levels_) {
    const bool exact = space.integer_valued();
    for (std::size_t l = 0; l < levels_.size(); ++l) {
      if (group_of_level_.empty() || !detail::same_cost(levels_.costs[l], group_cost_.back(), exact)) {
        group_cost_.push_back(levels_.costs[l]);
        group_count_.push_back(0);
        group_first_.push_back(l);
      }
      group_of_level_.push_back(group_cost_.size() - 1);
      group_count_.back() += levels_.counts[l];
    }
    group_first_.push_back(levels_.size());
  }

  const SolutionSpace& space() const { return *space_; }
  const CostLevels& levels() const { return levels_; }
  const LevelAmplifier& amplifier() const { return amplifier_; }
  std::size_t group_count() const { return group_cost_.size(); }
  double group_cost(std::size_t g) const { return group_cost_[g]; }
  std::uint64_t group_degeneracy(std::size_t g) const { return group_count_[g]; }

  /// Group holding `cost` under the distinct-cost rule.
  std::optional<std::size_t> find_group(double cost) const {
    auto it = std::lower_bound(group_cost_.begin(), group_cost_.end(), cost);
    const bool exact = space_->integer_valued();
    for (auto cand : {it, it == group_cost_.begin() ? it : it - 1}) {
      if (cand != group_cost_.end() && detail::same_cost(*cand, cost, exact)) {
        return static_cast<std::size_t>(cand - group_cost_.begin());
      }
    }
    return std::nullopt;
  }

  /// Per-group probabilities from per-level probabilities.
  std::vector<double> group_probs(std::span<const double> level_probs) const {
    std::vector<double> out(group_cost_.size(), 0.0);
    for (std::size_t l = 0; l < level_probs.size(); ++l) out[group_of_level_[l]] += level_probs[l];
    return out;
  }

  /// Probability of group g after k rounds (or its best round if track_best).
  std::pair<double, std::uint64_t> group_prob(std::size_t g, double ps, std::uint64_t k, bool best) const {
    if (!best) {
      auto tr = amplifier_.run(ps, k);
      double p = 0.0;
      for (auto l = group_first_[g]; l < group_first_[g + 1]; ++l) p += tr.final_probs[l];
      return {p, k};
    }
    if (group_first_[g + 1] - group_first_[g] == 1) {
      auto tr = amplifier_.run(ps, k, true);
      return {tr.best_probs[group_first_[g]], tr.best_round[group_first_[g]]};
    }
    // Multi-level groups (tolerance-merged float costs): scan rounds explicitly.
    double best_p = 0.0;
    std::uint64_t best_k = 0;
    for (std::uint64_t r = 1; r <= k; ++r) {
      auto [p, kk] = group_prob(g, ps, r, false);
      if (p > best_p) {
        best_p = p;
        best_k = kk;
      }
    }
    return {best_p, best_k};
  }

 private:
  const SolutionSpace* space_;
  CostLevels levels_;
  LevelAmplifier amplifier_;
  std::vector<double> group_cost_;
  std::vector<std::uint64_t> group_count_;
  std::vector<std::size_t> group_first_;
  std::vector<std::size_t> group_of_level_;
};

/// Probability of tracked costs (degenerate states summed) and of the top_r
/// most probable distinct costs at each grid p_s, all at k rounds.
inline SweepRecord sweep(const Landscape& land, std::span<const double> ps_grid, std::uint64_t k,
                         std::span<const double> tracked_costs, std::size_t top_r = 5) {
  if (ps_grid.empty()) throw Error(ErrorCode::InvalidArgument, "sweep grid is empty");
  for (std::size_t i = 1; i < ps_grid.size(); ++i) {
    if (!(ps_grid[i] > ps_grid[i - 1])) throw Error(ErrorCode::InvalidArgument, "sweep grid must be ascending");
  }
  SweepRecord rec;
  rec.ps_grid.assign(ps_grid.begin(), ps_grid.end());
  rec.k = k;
  rec.top_r = top_r;
  std::vector<std::size_t> groups;
  for (double c : tracked_costs) {
    auto g = land.find_group(c);
    if (!g) throw Error(ErrorCode::NotFound, "tracked cost " + std::to_string(c) + " does not occur");
    groups.push_back(*g);
    rec.tracked_costs.push_back(land.group_cost(*g));
    rec.degeneracies.push_back(land.group_degeneracy(*g));
  }
  rec.probs.assign(ps_grid.size(), {});
  rec.cumulative_top_r.assign(ps_grid.size(), 0.0);
  rec.top1.assign(ps_grid.size(), 0.0);
  detail::parallel_for(ps_grid.size(), [&](std::size_t i) {
    auto tr = land.amplifier().run(ps_grid[i], k);
    auto gp = land.group_probs(tr.final_probs);
    auto& row = rec.probs[i];
    row.reserve(groups.size());
    for (auto g : groups) row.push_back(gp[g]);
    const std::size_t r = std::min(top_r, gp.size());
    if (r > 0) {
      std::partial_sort(gp.begin(), gp.begin() + static_cast<std::ptrdiff_t>(r), gp.end(), std::greater<>());
      double acc = 0.0;
      for (std::size_t j = 0; j < r; ++j) acc += gp[j];
      rec.cumulative_top_r[i] = acc;
      rec.top1[i] = gp[0];
    }
  });
  return rec;
}

inline SweepRecord sweep(const SolutionSpace& space, std::span<const double> ps_grid, std::uint64_t k,
                         std::span<const double> tracked_costs, std::size_t top_r = 5) {
  Landscape land(space);
  return sweep(land, ps_grid, k, tracked_costs, top_r);
}

namespace detail {

/// Coarse grid size: at least window.steps, and `resolution` points per
/// expected peak width. A peak at round count k is about 1.2/k to 1.7/k wide
/// (full width at half maximum, relative to p_s), so ps/k is used as the unit.
inline std::size_t coarse_steps(const PsWindow& w, std::uint64_t k) {
  std::size_t steps = std::max<std::size_t>(w.steps, 3);
  if (w.resolution > 0.0 && k > 0 && w.lo > 0.0) {
    const double mid = 0.5 * (w.lo + w.hi);
    const double widths = (w.hi - w.lo) / (mid / static_cast<double>(k));
    steps = std::max(steps, static_cast<std::size_t>(std::ceil(widths * w.resolution)));
  }
  return steps;
}

/// Golden-section maximization of f on [a, b].
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace detail

/// Peaks of several target costs in one window. Targets sharing a round count
/// share the coarse grid; each is then refined by golden section around its
/// best grid point.
inline std::vector<PeakPoint> find_peaks(const Landscape& land, std::span<const double> target_costs,
                                         const PsWindow& window, const KPolicy& policy) {
  if (!(window.hi > window.lo) || window.lo <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "p_s window must satisfy 0 < lo < hi");
  }
  const std::uint64_t d = land.space().size();
  const bool best = policy.mode == KPolicy::Mode::BestUpTo;
  std::vector<std::size_t> groups;
  std::map<std::uint64_t, std::vector<std::size_t>> by_k;  // rounds -> target positions
  for (std::size_t t = 0; t < target_costs.size(); ++t) {
    auto g = land.find_group(target_costs[t]);
    if (!g) throw Error(ErrorCode::NotFound, "cost " + std::to_string(target_costs[t]) + " does not occur in the space");
    groups.push_back(*g);
    by_k[policy.rounds(d, land.group_degeneracy(*g))].push_back(t);
  }

  std::vector<PeakPoint> out(target_costs.size());
  for (const auto& [k, members] : by_k) {
    const auto grid = linear_grid(window.lo, window.hi, detail::coarse_steps(window, std::max<std::uint64_t>(k, 1)));
    // coarse[i][m]: probability of target members[m] at grid[i]
    std::vector<std::vector<double>> coarse(grid.size());
    detail::parallel_for(grid.size(), [&](std::size_t i) {
      auto tr = land.amplifier().run(grid[i], k, best);
      auto gp = land.group_probs(best ? tr.best_probs : tr.final_probs);
      coarse[i].reserve(members.size());
      for (auto t : members) coarse[i].push_back(gp[groups[t]]);
    });
    detail::parallel_for(members.size(), [&](std::size_t m) {
      const auto t = members[m];
      const auto g = groups[t];
      std::size_t arg = 0;
      for (std::size_t i = 1; i < grid.size(); ++i) {
        if (coarse[i][m] > coarse[arg][m]) arg = i;
      }
      PeakPoint pk;
      pk.cost_value = land.group_cost(g);
      pk.degeneracy = land.group_degeneracy(g);
      pk.ps_star = grid[arg];
      pk.peak_prob = coarse[arg][m];
      pk.k_at_peak = k;
      if (best) pk.k_at_peak = land.group_prob(g, grid[arg], k, true).second;
      if (grid.size() > 1) {
        const double a = grid[arg == 0 ? 0 : arg - 1];
        const double b = grid[std::min(arg + 1, grid.size() - 1)];
        auto f = [&](double ps) { return land.group_prob(g, ps, k, best).first; };
        auto [ps, p] = detail::golden_max(f, a, b, window.rel_tol * grid[arg]);
        if (p > pk.peak_prob) {
          pk.ps_star = ps;
          pk.peak_prob = p;
          if (best) pk.k_at_peak = land.group_prob(g, ps, k, true).second;
        }
      }
      out[t] = pk;
    });
  }
  return out;
}

inline PeakPoint find_peak(const Landscape& land, double target_cost, const PsWindow& window,
                           const KPolicy& policy = KPolicy::grover()) {
  const double t[1] = {target_cost};
  return find_peaks(land, t, window, policy).front();
}

inline PeakPoint find_peak(const SolutionSpace& space, double target_cost, const PsWindow& window,
                           const KPolicy& policy = KPolicy::grover()) {
  Landscape land(space);
  return find_peak(land, target_cost, window, policy);
}

/// p_s at which a state of the given cost sits half a turn from the mean
/// amplitude, pi / |mu - cost|. Used to place search windows.
inline double half_turn_ps(double mu, double cost) {
  const double gap = std::abs(mu - cost);
  if (gap == 0.0) throw Error(ErrorCode::PredictionFailure, "cost equals the mean; no half-turn scale");
  return std::numbers::pi / gap;
}

/// Window covering the default window and the half-turn estimates of every
/// target (with a 15% margin).
inline PsWindow window_for(const SolutionSpace& space, std::span<const double> targets) {
  PsWindow w = default_window(space);
  const double mu = population_moments(space.costs()).first;
  for (double c : targets) {
    if (c == mu) continue;
    const double ps = half_turn_ps(mu, c);
    w.lo = std::min(w.lo, 0.85 * ps);
    w.hi = std::max(w.hi, 1.15 * ps);
  }
  return w;
}

/// Peaks of the r best distinct costs, ordered best first.
inline std::vector<PeakPoint> correlation_points(const Landscape& land, std::size_t r, const KPolicy& policy,
                                                 Direction direction = Direction::Min,
                                                 std::optional<PsWindow> window = std::nullopt) {
  if (r < 2) throw Error(ErrorCode::InvalidArgument, "correlation needs r >= 2");
  std::vector<double> targets;
  const std::size_t groups = land.group_count();
  for (std::size_t j = 0; j < std::min(r, groups); ++j) {
    targets.push_back(land.group_cost(direction == Direction::Min ? j : groups - 1 - j));
  }
  const PsWindow w = window ? *window : window_for(land.space(), targets);
  return find_peaks(land, targets, w, policy);
}

inline std::vector<Point> to_points(std::span<const PeakPoint> peaks) {
  std::vector<Point> pts;
  pts.reserve(peaks.size());
  for (const auto& p : peaks) pts.push_back({p.ps_star, p.cost_value});
  return pts;
}

/// Number of adjacent pairs (in cost order) whose ps_star ordering is reversed.
inline std::size_t count_inversions(std::span<const PeakPoint> peaks) {
  std::vector<PeakPoint> sorted(peaks.begin(), peaks.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.cost_value < b.cost_value; });
  if (sorted.size() < 2) return 0;
  // Orientation of the relation is read from the end points.
  const bool increasing = sorted.back().ps_star >= sorted.front().ps_star;
  std::size_t inv = 0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const bool up = sorted[i].ps_star >= sorted[i - 1].ps_star;
    if (up != increasing) ++inv;
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Output

inline void write_sweep_csv(std::ostream& out, const SweepRecord& rec) {
  out << "ps,cost,prob\n";
  out.precision(17);
  for (std::size_t g = 0; g < rec.ps_grid.size(); ++g) {
    for (std::size_t j = 0; j < rec.tracked_costs.size(); ++j) {
      out << rec.ps_grid[g] << ',' << rec.tracked_costs[j] << ',' << rec.probs[g][j] << '\n';
    }
  }
}

inline nlohmann::json to_json(const SweepRecord& rec) {
  nlohmann::json j;
  j["ps_grid"] = rec.ps_grid;
  j["k"] = rec.k;
  j["tracked_costs"] = rec.tracked_costs;
  j["degeneracies"] = rec.degeneracies;
  j["probs"] = rec.probs;
  j["top_r"] = rec.top_r;
  j["cumulative_top_r"] = rec.cumulative_top_r;
  j["top1"] = rec.top1;
  return j;
}

inline void write_peaks_csv(std::ostream& out, std::span<const PeakPoint> peaks) {
  out << "ps_star,cost,peak_prob,degeneracy\n";
  out.precision(17);
  for (const auto& p : peaks) out << p.ps_star << ',' << p.cost_value << ',' << p.peak_prob << ',' << p.degeneracy << '\n';
}

inline nlohmann::json to_json(const CorrelationFit& fit) {
  nlohmann::json j;
  j["model"] = std::string(to_string(fit.model));
  j["linear"] = {{"slope", fit.linear.slope}, {"intercept", fit.linear.intercept}, {"r", fit.linear.r}};
  j["adj_r2_linear"] = fit.adj_r2_linear;
  j["rss_linear"] = fit.rss_linear;
  if (fit.quadratic) {
    j["quadratic"] = {{"coeffs", fit.quadratic->coeffs},
                      {"x_center", fit.quadratic->x_center},
                      {"x_scale", fit.quadratic->x_scale}};
    j["adj_r2_quadratic"] = fit.adj_r2_quadratic;
    j["rss_quadratic"] = fit.rss_quadratic;
  }
  j["ps_range"] = {fit.x_lo, fit.x_hi};
  return j;
}

}  // namespace vaa
