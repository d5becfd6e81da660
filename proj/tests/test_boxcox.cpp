#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "stm/boxcox.hpp"

using namespace stm;

TEST_CASE("transform examples") {
  CHECK(boxcox(2.0, 1.0, 0.0) == 1.0);
  CHECK(boxcox(1.0, 0.0, 0.0) == 0.0);
  CHECK(boxcox(3.0, 2.0, 0.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(boxcox(1.5, 0.5, 0.5) == doctest::Approx((std::sqrt(2.0) - 1) / 0.5));
  CHECK(boxcox(2.0, -1.0, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("transform domain") {
  CHECK_THROWS_AS(boxcox(0.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(boxcox(-1.0, 0.5, 0.5), DomainError);
  CHECK_NOTHROW(boxcox(-1.0, 0.5, 1.5));
}

TEST_CASE("inverse examples and domain") {
  CHECK(inverse_boxcox(1.0, 1.0, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(inverse_boxcox(0.0, 0.0, 0.0) == 1.0);
  CHECK(inverse_boxcox(4.0, 2.0, 0.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(inverse_boxcox(-1.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(inverse_boxcox(1.0, -1.0, 0.0), DomainError);
  CHECK_NOTHROW(inverse_boxcox(-0.9, 1.0, 0.0));
}

TEST_CASE("round trip to 1e-12 relative error") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lam(-3.0, 3.0), z(-0.9, 5.0), c(0.0, 2.0);
  for (int t = 0; t < 5000; ++t) {
    const double l = lam(rng), c0 = c(rng);
    double zz = z(rng);
    if (l * zz + 1 <= 0.05) continue;
    const double y = inverse_boxcox(zz, l, c0);
    if (y + c0 <= 0) continue;
    const double back = boxcox(y, l, c0);
    CHECK(std::abs(back - zz) <= 1e-12 * std::max(1.0, std::abs(zz)));
  }
}

TEST_CASE("continuity at lambda = 0") {
  for (double s = 0.1; s <= 100.0; s *= 1.07) {
    const double c0 = 0.25;
    const double y = s - c0;
    CHECK(std::abs(boxcox(y, 1e-9, c0) - boxcox(y, 0.0, c0)) <= 1e-7);
    // just above the log-branch cutoff still agrees with the log branch
    CHECK(std::abs(boxcox(y, 2e-8, c0) - std::log(s)) <= 1e-6);
  }
}

TEST_CASE("strictly increasing in y") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> lam(-3.0, 3.0), y(0.01, 50.0);
  for (int t = 0; t < 1000; ++t) {
    double a = y(rng), b = y(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const double l = lam(rng);
    CHECK(boxcox(a, l, 0.0) < boxcox(b, l, 0.0));
  }
}

TEST_CASE("derivative matches the Jacobian formula") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lam(-2.5, 2.5), y(0.2, 20.0);
  for (int t = 0; t < 500; ++t) {
    const double l = lam(rng), yy = y(rng), c0 = 0.1;
    const double h = 1e-5 * (yy + c0);
    const double fd = (boxcox(yy + h, l, c0) - boxcox(yy - h, l, c0)) / (2 * h);
    const double exact = std::pow(yy + c0, l - 1);
    CHECK(std::abs(fd - exact) <= 1e-6 * exact);
  }
}

TEST_CASE("log Jacobian") {
  Eigen::VectorXd ys(3);
  ys << 0.3, 2.0, 7.0;
  CHECK(boxcox_log_jacobian(ys, 1.0, 0.0) == 0.0);
  Eigen::VectorXd one(1);
  one << 1.0;
  CHECK(boxcox_log_jacobian(one, 3.0, 0.0) == 0.0);
  one << std::numbers::e;
  CHECK(boxcox_log_jacobian(one, 2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(boxcox_log_jacobian(ys, 0.5, 0.2) ==
        doctest::Approx(-0.5 * (std::log(0.5) + std::log(2.2) + std::log(7.2))));
  ys(0) = -1.0;
  CHECK_THROWS_AS(boxcox_log_jacobian(ys, 0.5, 0.0), DomainError);
}

TEST_CASE("default shift") {
  Eigen::MatrixXd y(2, 2);
  y << 1.0, 2.0, 3.0, 4.0;
  CHECK(default_shift(y) == 0.0);
  y(1, 1) = -2.0;
  CHECK(default_shift(y) == doctest::Approx(2.001));
  CHECK((y.array() + default_shift(y)).minCoeff() == doctest::Approx(1e-3));
}
