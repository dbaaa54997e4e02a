#pragma once

// Reference implementations used only by the tests. They are written from the
// definitions, without calling the library code they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

/// Bit of variable i in a flat index of n binary variables (variable 0 is the MSB).
inline int bit(std::uint64_t index, std::size_t n, std::size_t i) { return static_cast<int>((index >> (n - 1 - i)) & 1U); }

struct RawQubo {
  std::size_t n = 0;
  std::vector<double> w_node;
  std::vector<std::tuple<std::size_t, std::size_t, double>> w_edge;
};

/// Term-by-term QUBO cost.
inline double qubo_cost(const RawQubo& q, std::uint64_t index) {
  double c = 0.0;
  for (std::size_t i = 0; i < q.n; ++i) {
    if (bit(index, q.n, i) == 1) c += q.w_node[i];
  }
  for (const auto& [i, j, w] : q.w_edge) {
    if (bit(index, q.n, i) == 1 && bit(index, q.n, j) == 1) c += w;
  }
  return c;
}

inline std::vector<double> qubo_costs(const RawQubo& q) {
  std::vector<double> out(std::uint64_t{1} << q.n);
  for (std::uint64_t i = 0; i < out.size(); ++i) out[i] = qubo_cost(q, i);
  return out;
}

inline std::pair<double, std::uint64_t> scan_min(const std::vector<double>& c) {
  std::uint64_t best = 0;
  for (std::uint64_t i = 1; i < c.size(); ++i) {
    if (c[i] < c[best]) best = i;
  }
  return {c[best], best};
}

/// Probability of the m marked states after k Grover rounds.
inline double grover_probability(double d, double m, double k) {
  const double theta = std::asin(std::sqrt(m / d));
  const double s = std::sin((2.0 * k + 1.0) * theta);
  return s * s;
}

/// Plain statevector amplification: phase oracle then reflection about the mean.
inline std::vector<double> amplify(const std::vector<double>& costs, double ps, int k) {
  const std::size_t d = costs.size();
  std::vector<std::complex<double>> a(d, std::complex<double>(1.0 / std::sqrt(static_cast<double>(d)), 0.0));
  for (int it = 0; it < k; ++it) {
    std::complex<double> mean = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      a[i] *= std::exp(std::complex<double>(0.0, ps * costs[i]));
      mean += a[i];
    }
    mean /= static_cast<double>(d);
    for (auto& x : a) x = 2.0 * mean - x;
  }
  std::vector<double> p(d);
  for (std::size_t i = 0; i < d; ++i) p[i] = std::norm(a[i]);
  return p;
}

/// Mean-centered Pearson correlation.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Distinct costs ascending with their multiplicities.
inline std::vector<std::pair<double, std::uint64_t>> distinct(const std::vector<double>& costs) {
  std::map<double, std::uint64_t> m;
  for (double c : costs) ++m[c];
  return {m.begin(), m.end()};
}

}  // namespace oracle
