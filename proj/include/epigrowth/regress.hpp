#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>

#include "epigrowth/error.hpp"
#include "epigrowth/timeseries.hpp"

namespace epigrowth {

// y = intercept + slope * x. Fitted on a LogSeries the slope is the growth rate k (1/day).
struct SimpleFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n = 0;
};

namespace detail {

template <class X, class Y>
SimpleFit fit_simple_impl(std::size_t n, X x, Y y) {
  if (n < 2) throw Error(ErrorKind::insufficient_data, "simple regression needs at least 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x(i);
    my += y(i);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x(i) - mx, dy = y(i) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw Error(ErrorKind::insufficient_data, "all x values are equal");

  SimpleFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (syy == 0.0) {
    // constant y: the fit is exact
    f.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y(i) - (f.intercept + f.slope * x(i));
      ss_res += r * r;
    }
    f.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return f;
}

}  // namespace detail

inline SimpleFit fit_simple(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::shape, "x and y lengths differ");
  return detail::fit_simple_impl(x.size(), [&](std::size_t i) { return x[i]; },
                                 [&](std::size_t i) { return y[i]; });
}

inline SimpleFit fit_simple(std::span<const LogPoint> points) {
  return detail::fit_simple_impl(
      points.size(), [&](std::size_t i) { return static_cast<double>(points[i].day); },
      [&](std::size_t i) { return points[i].log_count; });
}

inline SimpleFit fit_simple(const LogSeries& series) { return fit_simple(std::span(series.points)); }

// Two-sided tail P(|T| >= |t|) for Student's t with `dof` degrees of freedom,
// computed as I_{dof/(dof+t^2)}(dof/2, 1/2).
inline double student_t_sf(double t_stat, double dof) {
  if (!(dof >= 1.0)) throw Error(ErrorKind::domain, "student_t_sf: dof must be >= 1");
  if (std::isnan(t_stat)) throw Error(ErrorKind::domain, "student_t_sf: t statistic is NaN");
  if (std::isinf(t_stat)) return 0.0;
  double t2 = t_stat * t_stat;
  if (t2 == 0.0) return 1.0;
  // I_x(a, b) with x = dof / (dof + t^2); use the complement form when x is near 1.
  double x = dof / (dof + t2);
  if (x > 0.5) return boost::math::ibetac(0.5, dof / 2.0, t2 / (dof + t2));
  return boost::math::ibeta(dof / 2.0, 0.5, x);
}

// Ordinary least squares with an intercept. Index 0 of every vector is the
// intercept; index j >= 1 is design column j - 1.
//
// std_errors, p_values and r_squared are empty (NA) when the augmented design is
// rank-deficient or has no residual degrees of freedom. Coefficients are always
// reported; for rank-deficient designs they are the minimum-norm solution.
struct MultiFit {
  Eigen::VectorXd coefficients;
  std::vector<std::optional<double>> std_errors;
  std::vector<std::optional<double>> p_values;
  std::optional<double> r_squared;
  std::size_t n = 0;
  long dof = 0;
  long rank = 0;

  bool rank_deficient() const { return rank < coefficients.size(); }
};

// Pivots smaller than this fraction of the largest pivot, after scaling every column
// to unit norm, count as zero.
inline constexpr double rank_threshold = 1e-10;

inline MultiFit fit_multi(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (n < 1 || p < 1) throw Error(ErrorKind::shape, "design must have at least one row and column");
  if (response.size() != n)
    throw Error(ErrorKind::shape, "design has " + std::to_string(n) + " rows but response has " +
                                      std::to_string(response.size()));

  Eigen::MatrixXd a(n, p + 1);
  a.col(0).setOnes();
  a.rightCols(p) = design;

  Eigen::VectorXd scale(p + 1);
  for (Eigen::Index j = 0; j <= p; ++j) {
    double norm = a.col(j).norm();
    scale(j) = norm > 0.0 ? norm : 1.0;
    a.col(j) /= scale(j);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.rows(), a.cols());
  qr.setThreshold(rank_threshold);
  qr.compute(a);

  MultiFit fit;
  fit.n = static_cast<std::size_t>(n);
  fit.rank = qr.rank();
  fit.dof = n - fit.rank;

  Eigen::VectorXd scaled_coef;
  if (fit.rank == p + 1) {
    scaled_coef = qr.solve(response);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a.rows(), a.cols());
    cod.setThreshold(rank_threshold);
    cod.compute(a);
    scaled_coef = cod.solve(response);
  }
  fit.coefficients = scaled_coef.cwiseQuotient(scale);

  Eigen::VectorXd residual = response - a * scaled_coef;
  double ss_res = residual.squaredNorm();
  double ss_tot = (response.array() - response.mean()).matrix().squaredNorm();

  fit.std_errors.assign(static_cast<std::size_t>(p + 1), std::nullopt);
  fit.p_values.assign(static_cast<std::size_t>(p + 1), std::nullopt);
  if (fit.rank < p + 1 || fit.dof <= 0) return fit;

  fit.r_squared = ss_tot == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);

  // (A^T A)^-1 = P R^-1 R^-T P^T for A P = Q R.
  Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p + 1, p + 1).triangularView<Eigen::Upper>();
  Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p + 1, p + 1));
  Eigen::MatrixXd cov = qr.colsPermutation() * (r_inv * r_inv.transpose()) *
                        qr.colsPermutation().transpose();
  double sigma2 = ss_res / static_cast<double>(fit.dof);
  for (Eigen::Index j = 0; j <= p; ++j) {
    double se = std::sqrt(sigma2 * cov(j, j)) / scale(j);
    double coef = fit.coefficients(j);
    auto k = static_cast<std::size_t>(j);
    fit.std_errors[k] = se;
    if (se == 0.0)
      fit.p_values[k] = coef == 0.0 ? 1.0 : 0.0;
    else
      fit.p_values[k] = student_t_sf(coef / se, static_cast<double>(fit.dof));
  }
  return fit;
}

// Drop-one indicator coding. levels are sorted; levels[0] is the reference and gets
// no column, so columns[j] is the indicator of levels[j + 1].
struct DummyEncoding {
  std::vector<std::string> levels;
  std::string reference;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

  Eigen::MatrixXd matrix(std::size_t n_rows) const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j)
      for (std::size_t i = 0; i < n_rows; ++i)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = columns[j][i];
    return m;
  }
};

inline DummyEncoding encode_dummies(std::span<const std::string> labels) {
  if (labels.empty()) throw Error(ErrorKind::insufficient_data, "no labels to encode");
  std::set<std::string> distinct(labels.begin(), labels.end());
  DummyEncoding enc;
  enc.levels.assign(distinct.begin(), distinct.end());
  enc.reference = enc.levels.front();
  enc.columns.assign(enc.levels.size() - 1, std::vector<double>(labels.size(), 0.0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto pos = std::lower_bound(enc.levels.begin(), enc.levels.end(), labels[i]) - enc.levels.begin();
    if (pos > 0) enc.columns[static_cast<std::size_t>(pos - 1)][i] = 1.0;
  }
  return enc;
}

enum class TempScheme { high_temp, low_temp };
enum class TempBucket { H, M, L };

inline const char* to_string(TempBucket b) {
  switch (b) {
    case TempBucket::H: return "H";
    case TempBucket::M: return "M";
    case TempBucket::L: return "L";
  }
  return "?";
}

// Daily highs: >80 H, >60 M. Daily lows: >60 H, >50 M. Everything else L.
inline TempBucket bucket_temperature(double fahrenheit, TempScheme scheme) {
  if (!std::isfinite(fahrenheit)) throw Error(ErrorKind::domain, "temperature must be finite");
  double high_cut = scheme == TempScheme::high_temp ? 80.0 : 60.0;
  double mid_cut = scheme == TempScheme::high_temp ? 60.0 : 50.0;
  if (fahrenheit > high_cut) return TempBucket::H;
  if (fahrenheit > mid_cut) return TempBucket::M;
  return TempBucket::L;
}

}  // namespace epigrowth
