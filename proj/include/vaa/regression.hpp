#pragma once

// Least-squares fits of cost against p_s and their inversion.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "vaa/error.hpp"

namespace vaa {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r = 0.0;  ///< Pearson correlation factor
};

/// Slope, intercept and correlation factor from the raw sums
/// Sx, Sxx, Sy, Syy, Sxy:  R = (n Sxy - Sx Sy) / sqrt((n Sxx - Sx^2)(n Syy - Sy^2)).
inline LinearFit linear_regression(std::span<const Point> points) {
  if (points.size() < 2) throw Error(ErrorCode::UndefinedCorrelation, "regression needs at least 2 points");
  long double sx = 0, sxx = 0, sy = 0, syy = 0, sxy = 0;
  for (const auto& p : points) {
    const long double x = p.x, y = p.y;
    sx += x;
    sxx += x * x;
    sy += y;
    syy += y * y;
    sxy += x * y;
  }
  const long double n = static_cast<long double>(points.size());
  const long double vx = n * sxx - sx * sx;
  const long double vy = n * syy - sy * sy;
  const long double cxy = n * sxy - sx * sy;
  bool x_const = true, y_const = true;
  for (const auto& p : points) {
    x_const = x_const && p.x == points[0].x;
    y_const = y_const && p.y == points[0].y;
  }
  if (x_const || y_const || vx <= 0 || vy <= 0) {
    throw Error(ErrorCode::UndefinedCorrelation, "correlation undefined for constant x or y");
  }
  LinearFit fit;
  fit.slope = static_cast<double>(cxy / vx);
  fit.intercept = static_cast<double>((sy - cxy / vx * sx) / n);
  fit.r = static_cast<double>(cxy / std::sqrt(vx * vy));
  return fit;
}

/// y = c0 + c1 x + c2 x^2, solved in standardized x for conditioning.
struct QuadraticFit {
  std::array<double, 3> coeffs{};
  double x_center = 0.0;
  double x_scale = 1.0;

  double operator()(double x) const {
    const double u = (x - x_center) / x_scale;
    return coeffs[0] + u * (coeffs[1] + u * coeffs[2]);
  }
};

inline QuadraticFit quadratic_regression(std::span<const Point> points) {
  if (points.size() < 3) throw Error(ErrorCode::UndefinedCorrelation, "quadratic fit needs at least 3 points");
  QuadraticFit fit;
  double mean = 0.0;
  for (const auto& p : points) mean += p.x;
  mean /= static_cast<double>(points.size());
  double spread = 0.0;
  for (const auto& p : points) spread = std::max(spread, std::abs(p.x - mean));
  if (spread == 0.0) throw Error(ErrorCode::UndefinedCorrelation, "quadratic fit needs distinct x values");
  fit.x_center = mean;
  fit.x_scale = spread;

  // Normal equations A c = b with A_jk = sum u^(j+k).
  long double a[3][4] = {};
  for (const auto& p : points) {
    const long double u = (p.x - mean) / spread;
    const long double pw[5] = {1, u, u * u, u * u * u, u * u * u * u};
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) a[j][k] += pw[j + k];
      a[j][3] += pw[j] * p.y;
    }
  }
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-300L) {
      throw Error(ErrorCode::UndefinedCorrelation, "quadratic fit is singular (need 3 distinct x values)");
    }
    for (int k = 0; k < 4; ++k) std::swap(a[col][k], a[pivot][k]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const long double f = a[r][col] / a[col][col];
      for (int k = col; k < 4; ++k) a[r][k] -= f * a[col][k];
    }
  }
  for (int j = 0; j < 3; ++j) fit.coeffs[j] = static_cast<double>(a[j][3] / a[j][j]);
  return fit;
}

/// Residual sum of squares of a model over the points.
template <class Model>
double residual_ss(std::span<const Point> points, const Model& model) {
  double ss = 0.0;
  for (const auto& p : points) {
    const double e = p.y - model(p.x);
    ss += e * e;
  }
  return ss;
}

/// Adjusted R^2 for a model with `params` fitted parameters.
inline double adjusted_r2(std::span<const Point> points, double rss, std::size_t params) {
  double mean = 0.0;
  for (const auto& p : points) mean += p.y;
  mean /= static_cast<double>(points.size());
  double tss = 0.0;
  for (const auto& p : points) tss += (p.y - mean) * (p.y - mean);
  const double n = static_cast<double>(points.size());
  if (tss == 0.0 || n <= static_cast<double>(params)) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 - (rss / (n - static_cast<double>(params))) / (tss / (n - 1.0));
}

enum class FitModel { Linear, Quadratic };

constexpr std::string_view to_string(FitModel m) { return m == FitModel::Linear ? "linear" : "quadratic"; }

/// Cost-vs-p_s correlation summary: both models are fitted, the one with the
/// larger adjusted R^2 is selected.
struct CorrelationFit {
  FitModel model = FitModel::Linear;
  LinearFit linear;
  std::optional<QuadraticFit> quadratic;
  double adj_r2_linear = 0.0;
  double adj_r2_quadratic = std::numeric_limits<double>::quiet_NaN();
  double rss_linear = 0.0;
  double rss_quadratic = std::numeric_limits<double>::quiet_NaN();
  double x_lo = 0.0;  ///< p_s range covered by the fitted points
  double x_hi = 0.0;

  double cost_at(double ps) const {
    if (model == FitModel::Quadratic && quadratic) return (*quadratic)(ps);
    return linear.slope * ps + linear.intercept;
  }
};

inline CorrelationFit fit_correlation(std::span<const Point> points) {
  CorrelationFit fit;
  fit.linear = linear_regression(points);
  fit.rss_linear = residual_ss(points, [&](double x) { return fit.linear.slope * x + fit.linear.intercept; });
  fit.adj_r2_linear = adjusted_r2(points, fit.rss_linear, 2);
  fit.x_lo = fit.x_hi = points[0].x;
  for (const auto& p : points) {
    fit.x_lo = std::min(fit.x_lo, p.x);
    fit.x_hi = std::max(fit.x_hi, p.x);
  }
  if (points.size() >= 4) {
    try {
      auto q = quadratic_regression(points);
      fit.rss_quadratic = residual_ss(points, q);
      fit.adj_r2_quadratic = adjusted_r2(points, fit.rss_quadratic, 3);
      fit.quadratic = q;
      if (fit.adj_r2_quadratic > fit.adj_r2_linear) fit.model = FitModel::Quadratic;
    } catch (const Error&) {
      // Fewer than three distinct x values; the linear model stands alone.
    }
  }
  return fit;
}

/// p_s at which the fitted relation reaches `cost`. For the quadratic model
/// the root nearest the fitted p_s range is taken; the root must lie within
/// `extrapolation` range-widths of it.
inline double predict_ps(const CorrelationFit& fit, double cost, double extrapolation = 1.0) {
  if (fit.model == FitModel::Linear || !fit.quadratic) {
    if (fit.linear.slope == 0.0) throw Error(ErrorCode::PredictionFailure, "flat linear fit cannot be inverted");
    return (cost - fit.linear.intercept) / fit.linear.slope;
  }
  const auto& q = *fit.quadratic;
  const double a = q.coeffs[2], b = q.coeffs[1], c = q.coeffs[0] - cost;
  std::vector<double> roots;
  if (std::abs(a) < 1e-15 * (std::abs(b) + std::abs(c))) {
    if (b != 0.0) roots.push_back(-c / b);
  } else {
    const double disc = b * b - 4 * a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double qq = -0.5 * (b + std::copysign(sq, b));
      if (qq != 0.0) roots.push_back(c / qq);
      roots.push_back(qq / a);
    }
  }
  const double span = std::max(fit.x_hi - fit.x_lo, 1e-300);
  const double mid = 0.5 * (fit.x_lo + fit.x_hi);
  double best = std::numeric_limits<double>::quiet_NaN();
  double best_dist = std::numeric_limits<double>::infinity();
  for (double u : roots) {
    const double ps = q.x_center + u * q.x_scale;
    const double dist = std::abs(ps - mid);
    if (dist < best_dist) {
      best = ps;
      best_dist = dist;
    }
  }
  if (std::isnan(best) || best_dist > (0.5 + extrapolation) * span) {
    throw Error(ErrorCode::PredictionFailure, "quadratic fit has no real root near the fitted p_s window");
  }
  return best;
}

}  // namespace vaa
