#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "loewner/driving.hpp"

using namespace loewner;

TEST_CASE("evaluation of the named families") {
  const auto circle = family::circle();
  CHECK(circle(0.0) == 0.0);
  CHECK(circle(0.125) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(circle(0.0625) == doctest::Approx(1.5 - 1.5 * std::sqrt(0.5)));

  const auto catching = family::sqrt_one_minus_t(4.0);
  CHECK(catching(1.0) == doctest::Approx(4.0));
  CHECK(catching(0.75) == doctest::Approx(2.0));

  const auto root = family::sqrt_t(3.0, 4.0);
  CHECK(root(4.0) == doctest::Approx(6.0));
  CHECK(root(9.0) == doctest::Approx(6.0));  // held at the terminal value
  CHECK_THROWS_AS((void)root(-1e-3), std::domain_error);
}

TEST_CASE("Lip(1/2) norm") {
  SUBCASE("closed forms") {
    auto c = lip_half_norm(family::circle(), 64);
    CHECK(c.exact);
    CHECK(c.norm == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(lip_half_norm(family::sqrt_one_minus_t(4.0), 64).norm == doctest::Approx(4.0));
    CHECK(lip_half_norm(DrivingTerm::constant(2.0, 1.0), 64).norm == 0.0);
    // linear: slope * sqrt(T)
    CHECK(lip_half_norm(DrivingTerm::linear(0.0, 3.0, 4.0), 64).norm == doctest::Approx(6.0));
  }
  SUBCASE("sampled estimate is a lower bound close to the truth") {
    const auto d = interpolate_sqrt(family::sqrt_t(1.0, 1.0), 4);
    const auto est = lip_half_norm(d, 256);
    CHECK_FALSE(est.exact);
    CHECK(est.norm > 0.99);
    CHECK(est.norm < 2.0 * 1.0001);
  }
  SUBCASE("invariant under rescale") {
    for (double r : {0.5, 2.0, 7.0}) {
      const auto d = family::sqrt_one_minus_t(3.0);
      CHECK(lip_half_norm(rescale(d, r), 64).norm == doctest::Approx(lip_half_norm(d, 64).norm).epsilon(1e-12));
    }
  }
}

TEST_CASE("rescale") {
  const auto d = family::sqrt_one_minus_t(4.0);
  const auto one = rescale(d, 1.0);
  for (int k = 0; k <= 100; ++k) CHECK(one(k / 100.0) == doctest::Approx(d(k / 100.0)).epsilon(1e-15));

  const auto half = rescale(d, 2.0);
  CHECK(half.horizon() == doctest::Approx(0.25));
  for (int k = 0; k <= 100; ++k) {
    const double t = 0.25 * k / 100.0;
    CHECK(half(t) == doctest::Approx(2.0 - 2.0 * std::sqrt(1.0 - 4.0 * t)).epsilon(1e-14));
  }

  const auto c5 = rescale(DrivingTerm::constant(5.0, 1.0), 4.0);
  CHECK(c5(0.01) == doctest::Approx(1.25));
  CHECK_THROWS_AS(rescale(d, 0.0), std::invalid_argument);
}

TEST_CASE("reverse") {
  CHECK(reverse(DrivingTerm::constant(2.0, 3.0))(1.0) == 2.0);

  const auto r = reverse(family::sqrt_one_minus_t(4.0));
  for (double t : {0.0, 0.1, 0.5, 0.99, 1.0}) CHECK(r(t) == doctest::Approx(4.0 - 4.0 * std::sqrt(t)).epsilon(1e-14));

  const auto tab = reverse(DrivingTerm::tabulated({0.0, 1.0}, {0.0, 3.0}));
  CHECK(tab(0.0) == 3.0);
  CHECK(tab(1.0) == 0.0);

  SUBCASE("involution") {
    const auto d = brownian(2.0, 11, 1.0, 500);
    const auto rr = reverse(reverse(d));
    for (int k = 0; k <= 1000; ++k) CHECK(rr(k / 1000.0) == doctest::Approx(d(k / 1000.0)).epsilon(1e-12));
  }
}

TEST_CASE("linear interpolant") {
  const std::vector<double> zeros(5, 0.0);
  const auto z = interpolate_linear(zeros, 1.0);
  for (int k = 0; k <= 10; ++k) CHECK(z(k / 10.0) == 0.0);

  const auto flat = interpolate_linear(reverse(family::sqrt_one_minus_t(4.0)), 1);
  // 4 - 4 sqrt(t) sampled at 0 and 1 gives 4 and 0
  CHECK(flat(0.5) == doctest::Approx(2.0));

  const auto two = interpolate_linear(family::sqrt_t(1.0, 1.0), 2);
  REQUIRE(two.pieces().size() == 2);
  const auto& m0 = std::get<LinearSegment>(two.pieces()[0].shape);
  const auto& m1 = std::get<LinearSegment>(two.pieces()[1].shape);
  CHECK(m0.slope == doctest::Approx(2.0 * std::sqrt(0.5)));
  CHECK(m1.slope == doctest::Approx(2.0 * (1.0 - std::sqrt(0.5))));

  SUBCASE("agrees at the nodes and does not raise the norm") {
    const auto d = family::sqrt_t(1.5, 2.0);
    for (std::size_t n : {1u, 3u, 16u}) {
      const auto li = interpolate_linear(d, n);
      for (std::size_t k = 0; k <= n; ++k) {
        const double t = 2.0 * k / n;
        CHECK(li(t) == doctest::Approx(d(t)).epsilon(1e-13));
      }
      CHECK(lip_half_norm(li, 512).norm <= lip_half_norm(d, 512).norm * (1 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("square-root interpolant") {
  const std::vector<double> zeros(4, 0.0);
  CHECK(interpolate_sqrt(zeros, 1.0)(0.3) == 0.0);

  // one piece of the same shape reproduces the term exactly
  const auto d = family::sqrt_one_minus_t(3.0);
  const auto one = interpolate_sqrt(d, 1);
  for (int k = 0; k <= 20; ++k) CHECK(one(k / 20.0) == doctest::Approx(d(k / 20.0)).epsilon(1e-14));

  const auto two = interpolate_sqrt(family::sqrt_t(1.0, 1.0), 2);
  REQUIRE(two.pieces().size() == 2);
  const auto& s0 = std::get<SqrtSegment>(two.pieces()[0].shape);
  const auto& s1 = std::get<SqrtSegment>(two.pieces()[1].shape);
  CHECK(s0.coeff == doctest::Approx(-1.0));
  CHECK(s1.coeff == doctest::Approx(-(1.0 - std::sqrt(0.5)) / std::sqrt(0.5)));
  CHECK(two.max_jump() <= 1e-12);
}

TEST_CASE("Brownian driving term") {
  CHECK(brownian(0.0, 1, 1.0, 100)(0.7) == 0.0);

  const auto a = brownian(4.0, 42, 1.0, 1000), b = brownian(4.0, 42, 1.0, 1000);
  for (int k = 0; k <= 100; ++k) CHECK(a(k / 100.0) == b(k / 100.0));
  CHECK(a(0.0) == 0.0);

  // Var B(1) sqrt(kappa) = kappa across seeds
  double sum = 0.0, sq = 0.0;
  const int paths = 20000;
  for (int s = 0; s < paths; ++s) {
    const double v = brownian(4.0, 1000 + s, 1.0, 8)(1.0);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / paths, var = sq / paths - mean * mean;
  CHECK(std::abs(var - 4.0) < 0.2);
}

TEST_CASE("construction rejects malformed input") {
  CHECK_THROWS_AS(DrivingTerm::tabulated({0.0, 0.5, 0.5}, {0.0, 1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(DrivingTerm::tabulated({0.1, 0.5}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(DrivingTerm::tabulated({0.0, 0.5}, {0.0, 1.0}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(DrivingTerm::constant(0.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(family::circle(0.2), std::invalid_argument);
  CHECK_THROWS_AS(
      DrivingTerm::from_pieces({{0.0, 0.5, Constant{0.0}}, {0.5, 1.0, Constant{1.0}}}), std::invalid_argument);
}

TEST_CASE("closed-form pieces join continuously") {
  for (const auto& d : {family::circle(), interpolate_sqrt(family::sqrt_t(2.0, 1.0), 8),
                        interpolate_linear(family::circle(), 16)})
    CHECK(d.max_jump() <= 1e-12);
}

TEST_CASE("CSV round trip") {
  const auto path = (std::filesystem::temp_directory_path() / "lw_driving_roundtrip.csv").string();
  const auto d = brownian(3.0, 5, 0.5, 200);
  write_driving_csv(d, path);
  const auto back = read_driving_csv(path);
  for (int k = 0; k <= 50; ++k) CHECK(back(0.01 * k) == doctest::Approx(d(0.01 * k)).epsilon(1e-12));
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,value");
  std::filesystem::remove(path);
  CHECK_THROWS(read_driving_csv("/nonexistent/dir/none.csv"));
}
