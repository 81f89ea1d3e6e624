#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "loewner/errors.hpp"
#include "loewner/flow.hpp"
#include "oracles.hpp"

using namespace loewner;

TEST_CASE("backward real flow against closed forms") {
  SolverConfig cfg;
  cfg.dt = 1e-4;

  SUBCASE("zero driving term") {
    const auto d = DrivingTerm::constant(0.0, 2.0);
    const auto out = advance_bwr(1.0, d, 2.0, cfg, Trajectory::Record);
    CHECK_FALSE(out.caught());
    CHECK(out.x == doctest::Approx(3.0).epsilon(1e-12));
    for (const auto& s : out.trajectory) CHECK(std::abs(s.x - std::sqrt(1.0 + 4.0 * s.t)) <= 1e-8);
  }
  SUBCASE("circle driving term is caught at the horizon") {
    const auto out = advance_bwr(1.0, family::circle(), 0.125, cfg, Trajectory::Record);
    REQUIRE(out.caught());
    CHECK(out.catch_time == doctest::Approx(0.125).epsilon(1e-9));
    CHECK(out.catch_value == doctest::Approx(1.5).epsilon(1e-9));
    for (const auto& s : out.trajectory)
      if (s.t < 0.125 - 1e-4) CHECK(std::abs(s.x - oracle::circle_x(s.t)) <= 1e-6);
  }
  SUBCASE("c = 5 catches at t = 1") {
    const auto out = advance_bwr(1.0, family::sqrt_one_minus_t(5.0), 1.0, cfg, Trajectory::Record);
    REQUIRE(out.caught());
    CHECK(out.catch_time == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(out.catch_value == doctest::Approx(5.0).epsilon(1e-6));
    // x(t) = 5 - 4 sqrt(1 - t)
    for (const auto& s : out.trajectory)
      if (s.t < 1.0 - 1e-6) CHECK(std::abs(s.x - (5.0 - 4.0 * std::sqrt(1.0 - s.t))) <= 1e-6);
  }
}

TEST_CASE("forward real flow") {
  SolverConfig cfg;
  const auto zero = DrivingTerm::constant(0.0, 2.0);
  for (double x0 : {2.0, -2.0}) {
    const auto out = advance_fwr(x0, zero, 2.0, cfg);
    REQUIRE(out.caught());
    CHECK(out.catch_time == doctest::Approx(1.0).epsilon(1e-9));
  }
  const auto rev = reverse(family::sqrt_one_minus_t(4.0));
  const auto out = advance_fwr(1e-3, rev, 1.0, cfg);
  REQUIRE(out.caught());
  CHECK(out.catch_time < 1.0);
}

TEST_CASE("complex flows") {
  SolverConfig cfg;
  const auto zero = DrivingTerm::constant(0.0, 1.0);
  const auto bw = advance_bw({0.0, 2.0}, zero, 0.5, cfg);
  CHECK(std::abs(bw.z - Complex(0.0, std::sqrt(2.0))) <= 1e-10);
  const auto fw = advance_fw({0.0, std::sqrt(2.0)}, zero, 0.5, cfg);
  CHECK(std::abs(fw.z - Complex(0.0, 2.0)) <= 1e-10);

  SUBCASE("hydrodynamic normalization") {
    const auto d = family::sqrt_one_minus_t(2.0);
    for (double theta : {0.3, 1.2, 2.5}) {
      const Complex z = std::polar(1e3, theta);
      const auto g = advance_bw(z, d, 1.0, cfg).z;
      CHECK(std::abs(g - (z + 2.0 / z)) <= 10.0 / std::norm(z));
    }
  }
  SUBCASE("forward flow of the reversed term undoes the backward flow") {
    const auto d = family::sqrt_one_minus_t(2.0, 0.5);
    const Complex z0(0.3, 1.0);
    const auto g = advance_bw(z0, d, 0.5, cfg).z;
    CHECK(std::abs(advance_fw(g, reverse(d), 0.5, cfg).z - z0) <= 1e-8);
  }
  SUBCASE("a point on the slit is swallowed") {
    const auto out = advance_bw({0.0, 1.0}, zero, 1.0, cfg);
    CHECK(out.swallowed);
    CHECK(out.swallow_time == doctest::Approx(0.25).epsilon(1e-6));
  }
}

TEST_CASE("vertical slit map") {
  CHECK(vertical_slit_map({0.7, 0.3}, 1.0, 0.0) == Complex(0.7, 0.3));
  CHECK(std::abs(vertical_slit_map({1.0, 0.0}, 1.0, 0.25) - Complex(1.0, 1.0)) <= 1e-15);
  CHECK(std::abs(vertical_slit_map({0.0, 3.0}, 0.0, 1.0) - Complex(0.0, std::sqrt(13.0))) <= 1e-15);
  CHECK(std::abs(vertical_slit_inverse({0.0, std::sqrt(13.0)}, 0.0, 1.0) - Complex(0.0, 3.0)) <= 1e-14);
  CHECK(std::abs(vertical_slit_inverse({0.0, 2.0}, 0.0, 1.0)) <= 1e-15);
  CHECK(std::abs(vertical_slit_map({5.0, 0.0}, 5.0, 0.25) - Complex(5.0, 1.0)) <= 1e-15);
  CHECK(std::abs(vertical_slit_inverse({0.0, 0.0}, 0.0, 1.0) - Complex(2.0, 0.0)) <= 1e-15);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> re(-5.0, 5.0), im(1e-3, 5.0), xi(-2.0, 2.0), dt(1e-6, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Complex z(re(rng), im(rng));
    const double x = xi(rng), h = dt(rng);
    const Complex w = vertical_slit_map(z, x, h);
    CHECK(w.imag() >= -1e-15);
    CHECK(std::abs(vertical_slit_inverse(w, x, h) - z) <= 1e-12 * std::max(1.0, std::abs(z)));
  }
}

TEST_CASE("real flows are monotone and order preserving") {
  SolverConfig cfg;
  const auto d = family::sqrt_one_minus_t(3.0);

  for (double x0 : {0.5, -0.5}) {
    const auto out = advance_bwr(x0, d, 1.0, cfg, Trajectory::Record);
    for (std::size_t i = 1; i < out.trajectory.size(); ++i) {
      if (x0 > 0) CHECK(out.trajectory[i].x > out.trajectory[i - 1].x);
      else CHECK(out.trajectory[i].x < out.trajectory[i - 1].x);
    }
    CHECK(out.gap > 0.0);
  }

  SolverConfig fixed;
  fixed.scheme = Scheme::ClosedFormPiecewise;
  fixed.dt = 1e-4;
  const auto xi = family::sqrt_t(1.0, 4.0);
  const auto a = advance_fwr(0.5, xi, 4.0, fixed, Trajectory::Record);
  const auto b = advance_fwr(0.8, xi, 4.0, fixed, Trajectory::Record);
  REQUIRE(a.caught());
  const std::size_t n = std::min(a.trajectory.size(), b.trajectory.size());
  double prev = 0.3;
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(a.trajectory[i].t == b.trajectory[i].t);
    const double gap = b.trajectory[i].x - a.trajectory[i].x;
    CHECK(gap >= prev - 1e-12);
    prev = gap;
  }
}

TEST_CASE("scaling covariance of the backward flow") {
  SolverConfig cfg;
  const auto d = family::sqrt_one_minus_t(3.0);
  const auto base = advance_bwr(0.7, d, 0.9, cfg);
  for (double r : {0.5, 3.0}) {
    const auto sc = advance_bwr(0.7 / r, rescale(d, r), 0.9 / (r * r), cfg);
    CHECK(sc.x == doctest::Approx(base.x / r).epsilon(1e-9));
  }
}

TEST_CASE("closed-form stepping converges") {
  const auto d = family::circle(0.1);
  auto err = [&](double dt) {
    SolverConfig cfg;
    cfg.scheme = Scheme::ClosedFormPiecewise;
    cfg.dt = dt;
    return std::abs(advance_bwr(1.0, d, 0.1, cfg).x - oracle::circle_x(0.1));
  };
  const double e1 = err(1e-3), e2 = err(5e-4);
  CHECK(e1 < 1e-4);
  CHECK(e2 < e1 / 2.0);
}

TEST_CASE("catching threshold") {
  SolverConfig cfg;
  // Oracle gaps at t = 1 for x0 = 1e-4, frozen from the tau-equation.
  const std::vector<std::pair<double, double>> frozen = {
      {3.0, 0.128789}, {3.2, 0.0715298}, {3.4, 0.0307827}, {3.6, 0.00773364}, {3.8, 3.71193e-4}, {3.9, 5.51268e-6}};
  double prev = 1.0;
  for (const auto& [c, gap] : frozen) {
    const double ref = oracle::catching_gap(c, 1e-4);
    CHECK(ref == doctest::Approx(gap).epsilon(1e-4));
    const auto out = advance_bwr(1e-4, family::sqrt_one_minus_t(c), 1.0, cfg);
    REQUIRE_FALSE(out.caught());
    CHECK(out.gap == doctest::Approx(ref).epsilon(1e-4));
    CHECK(out.gap < prev);
    prev = out.gap;
  }
  for (double c : {4.0, 4.1, 4.5}) {
    CHECK(oracle::catching_gap(c, 1e-4) < 1e-12);
    CHECK(advance_bwr(1e-4, family::sqrt_one_minus_t(c), 1.0, cfg).caught());
  }
}

TEST_CASE("errors are reported by kind") {
  SolverConfig cfg;
  const auto d = DrivingTerm::constant(0.0, 1.0);
  CHECK_THROWS_AS(advance_bwr(0.0, d, 1.0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(advance_bwr(1.0, d, -1.0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(advance_bw({0.0, -1.0}, d, 1.0, cfg), std::invalid_argument);
  SolverConfig bad;
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  SolverConfig tight;
  tight.max_steps = 3;
  try {
    (void)advance_bwr(1.0, d, 1.0, tight);
    FAIL("expected a step limit");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == NumericalFailure::StepLimitExceeded);
  }
}

TEST_CASE("trajectory CSV") {
  const auto path = (std::filesystem::temp_directory_path() / "lw_traj.csv").string();
  const auto out = advance_bwr(1.0, DrivingTerm::constant(0.0, 1.0), 1.0, SolverConfig{}, Trajectory::Record);
  write_trajectory_csv(out, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == out.trajectory.size());
  std::filesystem::remove(path);
}
