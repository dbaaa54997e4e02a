#pragma once

// Exhaustive solution-space tables and the distributional quantities defined
// over them: population moments, skewness X_delta, the 2*pi range scale,
// histograms with a moment-matched gaussian, and ranked distinct costs.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "vaa/detail/numeric.hpp"
#include "vaa/error.hpp"
#include "vaa/problems.hpp"

namespace vaa {

enum class Direction { Min, Max };

constexpr std::string_view to_string(Direction d) { return d == Direction::Min ? "min" : "max"; }

inline constexpr std::uint64_t kDefaultSpaceCap = std::uint64_t{1} << 26;

class SolutionSpace {
 public:
  SolutionSpace() = default;

  /// Wraps an explicit cost table (index order = flat assignment order).
  explicit SolutionSpace(std::vector<double> costs, std::size_t n_vars = 0, int radix = 2)
      : costs_(std::move(costs)), n_vars_(n_vars), radix_(radix) {
    if (costs_.empty()) throw Error(ErrorCode::InvalidSize, "solution space must hold at least one cost");
    finalize();
  }

  std::uint64_t size() const { return costs_.size(); }
  std::span<const double> costs() const { return costs_; }
  double operator[](std::uint64_t i) const { return costs_[i]; }

  double c_min() const { return c_min_; }
  double c_max() const { return c_max_; }
  const std::vector<std::uint64_t>& argmin() const { return argmin_; }
  const std::vector<std::uint64_t>& argmax() const { return argmax_; }

  /// Every cost within 1e-9 of an integer.
  bool integer_valued() const { return integer_valued_; }
  std::size_t n_vars() const { return n_vars_; }
  int radix() const { return radix_; }

 private:
  void finalize() {
    c_min_ = c_max_ = costs_[0];
    integer_valued_ = true;
    for (double c : costs_) {
      c_min_ = std::min(c_min_, c);
      c_max_ = std::max(c_max_, c);
      if (integer_valued_ && !detail::is_integer_valued(c)) integer_valued_ = false;
    }
    for (std::uint64_t i = 0; i < costs_.size(); ++i) {
      if (costs_[i] == c_min_) argmin_.push_back(i);
      if (costs_[i] == c_max_) argmax_.push_back(i);
    }
  }

  std::vector<double> costs_;
  std::size_t n_vars_ = 0;
  int radix_ = 2;
  double c_min_ = 0.0;
  double c_max_ = 0.0;
  std::vector<std::uint64_t> argmin_;
  std::vector<std::uint64_t> argmax_;
  bool integer_valued_ = true;
};

/// Evaluates the cost of every assignment.
inline SolutionSpace enumerate(const Problem& problem, std::uint64_t cap = kDefaultSpaceCap) {
  const std::uint64_t d = problem.state_count();
  if (d > cap) {
    throw Error(ErrorCode::Capacity, "solution space needs " + std::to_string(d) + " entries, cap is " +
                                         std::to_string(cap));
  }
  std::vector<double> costs(d);
  constexpr std::uint64_t kChunk = 1 << 14;
  const std::uint64_t chunks = (d + kChunk - 1) / kChunk;
  detail::parallel_for(chunks, [&](std::size_t c) {
    const std::uint64_t lo = c * kChunk;
    const std::uint64_t hi = std::min(d, lo + kChunk);
    for (std::uint64_t i = lo; i < hi; ++i) costs[i] = evaluate_index(problem, i);
  });
  return SolutionSpace(std::move(costs), problem.size(), problem.radix());
}

// ---------------------------------------------------------------------------
// Statistics

struct GaussianFit {
  double alpha = 0.0;  ///< peak height, in counts per bin
  double mu = 0.0;
  double sigma = 0.0;
  double bin_width = 1.0;

  /// G(x) = alpha * exp(-(x - mu)^2 / (2 sigma^2)).
  double operator()(double x) const {
    const double z = (x - mu) / sigma;
    return alpha * std::exp(-0.5 * z * z);
  }
};

struct SpaceStats {
  double mu = 0.0;
  double sigma = 0.0;
  double sigma_scaled = 0.0;
  double x_delta = 0.0;
  double p_s = 0.0;
  GaussianFit gaussian_fit;
};

/// Population mean and standard deviation (1/D normalization).
inline std::pair<double, double> population_moments(std::span<const double> values) {
  detail::KahanSum sum;
  for (double v : values) sum.add(v);
  const double mu = sum.value() / static_cast<double>(values.size());
  detail::KahanSum sq;
  for (double v : values) sq.add((v - mu) * (v - mu));
  return {mu, std::sqrt(sq.value() / static_cast<double>(values.size()))};
}

inline SpaceStats stats(const SolutionSpace& space, double p_s) {
  SpaceStats s;
  std::tie(s.mu, s.sigma) = population_moments(space.costs());
  s.p_s = p_s;
  s.sigma_scaled = s.sigma * p_s;
  s.x_delta = 2.0 * s.mu - (space.c_max() + space.c_min());
  const double d = static_cast<double>(space.size());
  s.gaussian_fit.mu = s.mu;
  s.gaussian_fit.sigma = s.sigma;
  s.gaussian_fit.bin_width = 1.0;
  s.gaussian_fit.alpha = s.sigma > 0.0 ? d / (s.sigma * std::sqrt(2.0 * std::numbers::pi)) : d;
  return s;
}

/// 2*pi / (c_max - c_min): the scale that maps the full cost range onto one phase turn.
inline double exact_ps(const SolutionSpace& space) {
  const double range = space.c_max() - space.c_min();
  if (!(range > 0.0)) throw Error(ErrorCode::DegenerateSpectrum, "constant cost function has no phase range");
  return 2.0 * std::numbers::pi / range;
}

// ---------------------------------------------------------------------------
// Histogram and gaussian fit

struct Histogram {
  std::vector<double> edges;  ///< bins + 1 entries
  std::vector<std::uint64_t> counts;

  std::size_t bins() const { return counts.size(); }
  double center(std::size_t b) const { return 0.5 * (edges[b] + edges[b + 1]); }
  double width(std::size_t b) const { return edges[b + 1] - edges[b]; }
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

/// Equal-width bins spanning [c_min, c_max].
inline Histogram histogram(const SolutionSpace& space, std::size_t bins) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  Histogram h;
  const double lo = space.c_min();
  double hi = space.c_max();
  if (hi == lo) hi = lo + 1.0;
  const double w = (hi - lo) / static_cast<double>(bins);
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + w * static_cast<double>(b);
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (double c : space.costs()) {
    auto b = static_cast<std::size_t>((c - lo) / w);
    h.counts[std::min(b, bins - 1)] += 1;
  }
  return h;
}

/// One bin per integer cost between c_min and c_max; bin b is centred on c_min + b.
inline Histogram unit_histogram(const SolutionSpace& space) {
  if (!space.integer_valued()) throw Error(ErrorCode::HistogramMode, "unit bins need integer-valued costs");
  const double lo = std::round(space.c_min());
  const auto bins = static_cast<std::size_t>(std::round(space.c_max()) - lo) + 1;
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo - 0.5 + static_cast<double>(b);
  h.counts.assign(bins, 0);
  for (double c : space.costs()) h.counts[static_cast<std::size_t>(std::round(c) - lo)] += 1;
  return h;
}

/// Moment fit of G(x) to a histogram. alpha is in counts per bin, so summing G
/// over bin centres recovers the histogram's total.
inline GaussianFit fit_gaussian(const Histogram& h) {
  std::size_t nonempty = 0;
  for (auto c : h.counts) nonempty += c > 0 ? 1 : 0;
  if (nonempty < 3) throw Error(ErrorCode::FitFailure, "gaussian fit needs at least 3 nonempty bins");
  detail::KahanSum n, sx;
  for (std::size_t b = 0; b < h.bins(); ++b) {
    n.add(static_cast<double>(h.counts[b]));
    sx.add(static_cast<double>(h.counts[b]) * h.center(b));
  }
  const double total = n.value();
  const double mu = sx.value() / total;
  detail::KahanSum sq;
  for (std::size_t b = 0; b < h.bins(); ++b) {
    const double dx = h.center(b) - mu;
    sq.add(static_cast<double>(h.counts[b]) * dx * dx);
  }
  GaussianFit fit;
  fit.mu = mu;
  fit.sigma = std::sqrt(sq.value() / total);
  fit.bin_width = h.width(0);
  fit.alpha = total * fit.bin_width / (fit.sigma * std::sqrt(2.0 * std::numbers::pi));
  return fit;
}

// ---------------------------------------------------------------------------
// Ranked distinct costs

struct RankedCost {
  double cost = 0.0;
  std::uint64_t degeneracy = 0;
  std::vector<std::uint64_t> indices;  ///< attaining indices, ascending, capped
};

namespace detail {

inline bool same_cost(double a, double b, bool exact) {
  if (exact) return a == b;
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace detail

/// The r best distinct cost values with their multiplicities. Equal costs are
/// grouped exactly for integer-valued spaces and within 1e-9 relative otherwise.
inline std::vector<RankedCost> rank_solutions(const SolutionSpace& space, std::size_t r, Direction direction,
                                              std::size_t max_indices = 64) {
  if (r < 1) throw Error(ErrorCode::InvalidArgument, "rank_solutions needs r >= 1");
  std::vector<std::uint64_t> order(space.size());
  for (std::uint64_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto costs = space.costs();
  auto better = [&](std::uint64_t a, std::uint64_t b) {
    if (costs[a] != costs[b]) return direction == Direction::Min ? costs[a] < costs[b] : costs[a] > costs[b];
    return a < b;
  };
  std::sort(order.begin(), order.end(), better);

  const bool exact = space.integer_valued();
  std::vector<RankedCost> out;
  for (std::uint64_t pos = 0; pos < order.size();) {
    const double head = costs[order[pos]];
    RankedCost rc;
    rc.cost = head;
    std::uint64_t end = pos;
    while (end < order.size() && detail::same_cost(costs[order[end]], head, exact)) {
      if (rc.indices.size() < max_indices) rc.indices.push_back(order[end]);
      ++end;
    }
    rc.degeneracy = end - pos;
    std::sort(rc.indices.begin(), rc.indices.end());
    out.push_back(std::move(rc));
    if (out.size() == r) break;
    pos = end;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact cost levels. States with bitwise-equal costs evolve identically under
// the amplification loop, so the loop can run over levels with multiplicities.

struct CostLevels {
  std::vector<double> costs;           ///< distinct costs, ascending
  std::vector<std::uint64_t> counts;   ///< multiplicity of each level
  std::vector<std::uint64_t> offsets;  ///< members of level l are members[offsets[l] .. offsets[l+1])
  std::vector<std::uint64_t> members;  ///< flat indices grouped by level
  std::uint64_t total = 0;

  std::size_t size() const { return costs.size(); }

  /// Level holding exactly this cost, if any.
  std::optional<std::size_t> find(double cost) const {
    auto it = std::lower_bound(costs.begin(), costs.end(), cost);
    if (it == costs.end() || *it != cost) return std::nullopt;
    return static_cast<std::size_t>(it - costs.begin());
  }
};

inline CostLevels make_levels(const SolutionSpace& space) {
  CostLevels lv;
  const auto costs = space.costs();
  lv.members.resize(costs.size());
  for (std::uint64_t i = 0; i < costs.size(); ++i) lv.members[i] = i;
  std::stable_sort(lv.members.begin(), lv.members.end(),
                   [&](std::uint64_t a, std::uint64_t b) { return costs[a] < costs[b]; });
  for (std::uint64_t pos = 0; pos < lv.members.size(); ++pos) {
    const double c = costs[lv.members[pos]];
    if (lv.costs.empty() || lv.costs.back() != c) {
      lv.costs.push_back(c);
      lv.counts.push_back(0);
      lv.offsets.push_back(pos);
    }
    lv.counts.back() += 1;
  }
  lv.offsets.push_back(lv.members.size());
  lv.total = costs.size();
  return lv;
}

// ---------------------------------------------------------------------------
// Persistence: raw little-endian float64 array plus a JSON sidecar.

inline void save_space(const SolutionSpace& space, const std::string& raw_path, const nlohmann::json& meta = {}) {
  std::ofstream out(raw_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + raw_path);
  for (double c : space.costs()) {
    auto bits = std::bit_cast<std::uint64_t>(c);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
  nlohmann::json side = meta;
  side["D"] = space.size();
  side["n"] = space.n_vars();
  side["radix"] = space.radix();
  std::ofstream sidecar(raw_path + ".json");
  if (!sidecar) throw Error(ErrorCode::Io, "cannot write " + raw_path + ".json");
  sidecar << side.dump(2) << "\n";
}

inline SolutionSpace load_space(const std::string& raw_path) {
  std::ifstream side_in(raw_path + ".json");
  if (!side_in) throw Error(ErrorCode::Io, "missing sidecar " + raw_path + ".json");
  nlohmann::json side;
  try {
    side = nlohmann::json::parse(side_in);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::Parse, std::string("bad sidecar: ") + ex.what());
  }
  const auto d = side.at("D").get<std::uint64_t>();
  std::ifstream in(raw_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + raw_path);
  std::vector<double> costs(d);
  for (auto& c : costs) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw Error(ErrorCode::Io, "truncated space file " + raw_path);
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    c = std::bit_cast<double>(bits);
  }
  return SolutionSpace(std::move(costs), side.value("n", std::size_t{0}), side.value("radix", 2));
}

}  // namespace vaa
