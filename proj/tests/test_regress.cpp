#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "epigrowth/regress.hpp"
#include "oracles.hpp"

using namespace epigrowth;
using Catch::Approx;

namespace {

SimpleFit fit_xy(std::vector<double> x, std::vector<double> y) { return fit_simple(x, y); }

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("fit_simple on hand-checked points") {
  auto a = fit_xy({0, 1, 2}, {0, 1, 2});
  CHECK(a.slope == Approx(1.0));
  CHECK(a.intercept == Approx(0.0).margin(1e-15));
  CHECK(a.r_squared == Approx(1.0));

  auto b = fit_xy({0, 1, 2}, {1, 1, 1});
  CHECK(b.slope == 0.0);
  CHECK(b.intercept == 1.0);
  CHECK(b.r_squared == 1.0);

  auto c = fit_xy({0, 1, 2}, {0, 2, 2});
  CHECK(c.slope == Approx(1.0));
  CHECK(c.intercept == Approx(1.0 / 3.0));
  CHECK(c.r_squared == Approx(0.75));
  CHECK(c.n == 3);
}

TEST_CASE("fit_simple needs two distinct x values") {
  CHECK_THROWS_AS(fit_xy({1}, {1}), Error);
  try {
    fit_xy({2, 2, 2}, {1, 2, 3});
    FAIL("degenerate x accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_data);
  }
}

TEST_CASE("fit_simple accepts log points") {
  std::vector<LogPoint> pts{{3, 1.0}, {4, 1.5}, {6, 2.5}};
  auto f = fit_simple(std::span<const LogPoint>(pts));
  CHECK(f.slope == Approx(0.5));
  CHECK(f.intercept == Approx(-0.5));
}

TEST_CASE("R^2 is invariant under affine rescaling of x") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x, y, x2;
    double a = 0.1 + std::abs(z(rng)) * 5, b = z(rng) * 10;
    for (int i = 0; i < 15; ++i) {
      x.push_back(z(rng));
      y.push_back(2 * x.back() + z(rng));
      x2.push_back(a * x.back() + b);
    }
    auto f1 = fit_simple(x, y), f2 = fit_simple(x2, y);
    CHECK(f2.r_squared == Approx(f1.r_squared).margin(1e-12));
    CHECK(f2.slope == Approx(f1.slope / a).margin(1e-12));
  }
}

TEST_CASE("fit_simple agrees with fit_multi on one predictor") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x, y;
    for (int i = 0; i < 12; ++i) {
      x.push_back(z(rng) * 3);
      y.push_back(-0.7 * x.back() + 4 + z(rng));
    }
    auto s = fit_simple(x, y);
    auto m = fit_multi(to_vector(x), to_vector(y));
    CHECK(m.coefficients(1) == Approx(s.slope).margin(1e-10));
    CHECK(m.coefficients(0) == Approx(s.intercept).margin(1e-10));
    CHECK(*m.r_squared == Approx(s.r_squared).margin(1e-10));
  }
}

TEST_CASE("fit_multi recovers an exact line") {
  Eigen::MatrixXd x(5, 1);
  x << 1, 2, 3, 4, 5;
  Eigen::VectorXd y = 2.0 * x.col(0).array() + 3.0;
  auto f = fit_multi(x, y);
  CHECK(f.coefficients(1) == Approx(2.0));
  CHECK(f.coefficients(0) == Approx(3.0));
  CHECK(*f.r_squared == Approx(1.0));
  CHECK(f.dof == 3);
}

TEST_CASE("fit_multi matches the normal-equation oracle on random designs") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    for (int i = 0; i < 20; ++i) {
      rows.push_back({z(rng), z(rng) * 2 + 1});
      y.push_back(1.5 + 0.3 * rows.back()[0] - 0.2 * rows.back()[1] + z(rng));
    }
    auto f = fit_multi(to_matrix(rows), to_vector(y));
    auto o = oracle::ols(rows, y);
    REQUIRE(o);
    REQUIRE_FALSE(f.rank_deficient());
    CHECK(f.dof == o->dof);
    CHECK(*f.r_squared == Approx(o->r2).margin(1e-10));
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(f.coefficients(static_cast<Eigen::Index>(j)) == Approx(o->coef[j]).margin(1e-10));
      CHECK(*f.std_errors[j] == Approx(o->se[j]).margin(1e-10));
      CHECK(*f.p_values[j] == Approx(o->p[j]).margin(1e-10));
    }
  }
}

TEST_CASE("fit_multi residuals are orthogonal to the design") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(30, 3);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = z(rng) * static_cast<double>(j + 1) * 10;
  Eigen::VectorXd y(30);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = z(rng);
  auto f = fit_multi(x, y);
  Eigen::VectorXd fitted = Eigen::VectorXd::Constant(30, f.coefficients(0)) + x * f.coefficients.tail(3);
  Eigen::VectorXd r = y - fitted;
  CHECK(std::abs(r.sum()) < 1e-8 * 30);
  for (Eigen::Index j = 0; j < 3; ++j) CHECK(std::abs(r.dot(x.col(j))) < 1e-8 * 30 * x.col(j).norm());
}

TEST_CASE("duplicated predictors give NA inference but usable fitted values") {
  Eigen::MatrixXd x(6, 2);
  x << 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 7, 7;
  Eigen::VectorXd y(6);
  y << 1.1, 1.9, 3.2, 3.9, 5.1, 7.0;
  auto f = fit_multi(x, y);
  CHECK(f.rank_deficient());
  CHECK(f.rank == 2);
  CHECK_FALSE(f.r_squared);
  for (const auto& p : f.p_values) CHECK_FALSE(p);
  for (const auto& s : f.std_errors) CHECK_FALSE(s);
  // the minimum-norm solution splits the slope evenly and still reproduces the fit
  CHECK(f.coefficients(1) == Approx(f.coefficients(2)));
  auto single = fit_multi(x.col(0), y);
  Eigen::VectorXd a = f.coefficients(0) + (x * f.coefficients.tail(2)).array();
  Eigen::VectorXd b = single.coefficients(0) + (x.col(0) * single.coefficients(1)).array();
  CHECK((a - b).norm() < 1e-10);
}

TEST_CASE("no residual degrees of freedom gives NA") {
  Eigen::MatrixXd x(2, 1);
  x << 1, 2;
  Eigen::VectorXd y(2);
  y << 3, 5;
  auto f = fit_multi(x, y);
  CHECK_FALSE(f.rank_deficient());
  CHECK(f.dof == 0);
  CHECK_FALSE(f.p_values[1]);
  CHECK_FALSE(f.r_squared);
  CHECK(f.coefficients(1) == Approx(2.0));
}

TEST_CASE("fit_multi shape errors") {
  try {
    fit_multi(Eigen::MatrixXd::Ones(4, 1), Eigen::VectorXd::Ones(3));
    FAIL("mismatch accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::shape);
  }
  CHECK_THROWS_AS(fit_multi(Eigen::MatrixXd(3, 0), Eigen::VectorXd::Ones(3)), Error);
}

TEST_CASE("student_t_sf known values and limits") {
  CHECK(student_t_sf(0.0, 7) == 1.0);
  CHECK(student_t_sf(INFINITY, 3) == 0.0);
  CHECK(student_t_sf(-INFINITY, 3) == 0.0);
  CHECK(student_t_sf(2.0, 10) == Approx(0.07338803477).margin(1e-10));
  CHECK(student_t_sf(-2.0, 10) == student_t_sf(2.0, 10));
  // dof 1 is the Cauchy distribution: 1 - 2 atan(t) / pi
  CHECK(student_t_sf(3.0, 1) == Approx(1.0 - 2.0 * std::atan(3.0) / M_PI).margin(1e-14));
  CHECK_THROWS_AS(student_t_sf(1.0, 0.5), Error);
  CHECK_THROWS_AS(student_t_sf(NAN, 5), Error);
}

TEST_CASE("student_t_sf matches integration of the t density") {
  for (int dof = 1; dof <= 30; dof += 3)
    for (double t = 0.0; t <= 10.0; t += 0.7) CHECK(std::abs(student_t_sf(t, dof) - oracle::t_two_sided(t, dof)) < 1e-8);
}

TEST_CASE("student_t_sf decreases in |t|") {
  for (int dof : {1, 2, 5, 30, 200}) {
    double prev = 1.0;
    for (double t = 0.05; t < 40.0; t *= 1.2) {
      double p = student_t_sf(t, dof);
      CHECK(p <= prev);
      CHECK(p >= 0.0);
      prev = p;
    }
  }
}

TEST_CASE("encode_dummies drops the lexicographically first level") {
  std::vector<std::string> labels{"sunny", "rainy", "sunny"};
  auto e = encode_dummies(labels);
  CHECK(e.levels == std::vector<std::string>{"rainy", "sunny"});
  CHECK(e.reference == "rainy");
  REQUIRE(e.columns.size() == 1);
  CHECK(e.columns[0] == std::vector<double>{1, 0, 1});

  std::vector<std::string> one{"foggy", "foggy"};
  CHECK(encode_dummies(one).columns.empty());

  std::vector<std::string> three{"cloudy", "foggy", "rainy"};
  auto t = encode_dummies(three);
  REQUIRE(t.columns.size() == 2);
  auto m = t.matrix(3);
  CHECK(m(0, 0) == 0);
  CHECK(m(0, 1) == 0);
  CHECK(m(1, 0) == 1);
  CHECK(m(1, 1) == 0);
  CHECK(m(2, 0) == 0);
  CHECK(m(2, 1) == 1);
}

TEST_CASE("dummy rows hold at most one indicator") {
  std::mt19937_64 rng(2);
  const std::vector<std::string> pool{"a", "b", "c", "d", "e"};
  std::vector<std::string> labels;
  for (int i = 0; i < 100; ++i) labels.push_back(pool[rng() % pool.size()]);
  auto e = encode_dummies(labels);
  CHECK(e.columns.size() == e.levels.size() - 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double sum = 0;
    for (const auto& c : e.columns) sum += c[i];
    CHECK(sum == (labels[i] == e.reference ? 0.0 : 1.0));
  }
}

TEST_CASE("temperature buckets use strict thresholds") {
  CHECK(bucket_temperature(85, TempScheme::high_temp) == TempBucket::H);
  CHECK(bucket_temperature(80, TempScheme::high_temp) == TempBucket::M);
  CHECK(bucket_temperature(60.5, TempScheme::high_temp) == TempBucket::M);
  CHECK(bucket_temperature(60, TempScheme::high_temp) == TempBucket::L);
  CHECK(bucket_temperature(61, TempScheme::low_temp) == TempBucket::H);
  CHECK(bucket_temperature(60, TempScheme::low_temp) == TempBucket::M);
  CHECK(bucket_temperature(55, TempScheme::low_temp) == TempBucket::M);
  CHECK(bucket_temperature(50, TempScheme::low_temp) == TempBucket::L);
}
