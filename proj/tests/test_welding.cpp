#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "loewner/errors.hpp"
#include "loewner/recursion.hpp"
#include "loewner/welding.hpp"
#include "oracles.hpp"

using namespace loewner;

TEST_CASE("hitting times") {
  SolverConfig cfg;
  const auto zero = DrivingTerm::constant(0.0, 100.0);
  for (double x0 : {0.5, 1.0, 2.0, 4.0, -3.0})
    CHECK(hitting_time(x0, zero, cfg).hit_time == doctest::Approx(x0 * x0 / 4.0).epsilon(1e-9));

  SUBCASE("square-root singularity against the oracle") {
    const auto d = family::sqrt_t(1.0, 1000.0);
    for (double x0 : {1.0, -1.0, 0.25}) {
      const auto rec = hitting_time(x0, d, cfg);
      CHECK_FALSE(rec.past_horizon);
      CHECK(rec.hit_time == doctest::Approx(oracle::sqrt_t_hit(1.0, x0)).epsilon(1e-6));
      CHECK(rec.terminal_value == doctest::Approx(std::sqrt(rec.hit_time)));
    }
    // frozen oracle constant: T(x0) / x0^2 for x0 > 0
    CHECK(oracle::sqrt_t_hit(1.0, 1.0) == doctest::Approx(0.126569138).epsilon(1e-7));
  }
  SUBCASE("hits past the horizon are obtained in closed form") {
    const auto rec = hitting_time(4.0, DrivingTerm::constant(0.0, 1.0), cfg);
    CHECK(rec.past_horizon);
    CHECK(rec.hit_time == doctest::Approx(4.0).epsilon(1e-9));
  }
  SUBCASE("scaling law") {
    const auto d = family::sqrt_one_minus_t(1.0);
    const auto base = hitting_time(0.3, d, cfg).hit_time;
    for (double r : {0.5, 2.0}) CHECK(hitting_time(0.3 / r, rescale(d, r), cfg).hit_time == doctest::Approx(base / (r * r)).epsilon(1e-8));
  }
  SUBCASE("strictly monotone in the distance to the singularity") {
    const auto d = family::sqrt_one_minus_t(2.0);
    double right = 0.0, left = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double x = 0.04 * k;
      const double tr = hitting_time(x, d, cfg).hit_time, tl = hitting_time(-x, d, cfg).hit_time;
      CHECK(tr > right);
      CHECK(tl > left);
      right = tr;
      left = tl;
    }
  }
  SUBCASE("hitting constants") {
    const std::vector<double> xs = {0.125, 0.25, 0.5, 1.0, 2.0};
    const auto k = hitting_constants(family::sqrt_t(1.0, 1000.0), xs, cfg);
    CHECK(k.k1 > 0.0);
    CHECK(k.k2 / k.k1 < 1.0 + 1e-6);
  }
}

TEST_CASE("hitting time failures") {
  SolverConfig cfg;
  CHECK_THROWS_AS(hitting_time(0.0, DrivingTerm::constant(0.0, 1.0), cfg), std::invalid_argument);
  CHECK_THROWS_AS(hitting_time(1.0, family::sqrt_t(4.5, 1.0), cfg), std::invalid_argument);
  SolverConfig tight;
  tight.max_steps = 3;
  try {
    (void)hitting_time(1.0, DrivingTerm::constant(0.0, 1.0), tight);
    FAIL("expected a failure");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == NumericalFailure::NoHitWithinBudget);
  }
}

TEST_CASE("welding") {
  SolverConfig cfg;
  const auto zero = DrivingTerm::constant(0.0, 100.0);
  for (double x : {0.5, 1.0, 2.0}) {
    const auto w = welding_point(x, zero, cfg);
    CHECK(w.phi_x == doctest::Approx(-x).epsilon(1e-9));
    CHECK(w.residual <= 1e-6 * w.hit_time);
  }

  const auto root = family::sqrt_t(1.0, 1000.0);
  const auto w = welding_point(1.0, root, cfg);
  CHECK(w.phi_x == doctest::Approx(oracle::sqrt_t_phi(1.0, 1.0)).epsilon(1e-6));
  CHECK(std::abs(w.phi_x + 1.0) > 0.1);

  // phi_{rescaled}(x / r) = phi(x) / r
  const auto d = family::sqrt_one_minus_t(1.5);
  const double phi = welding_point(0.4, d, cfg).phi_x;
  CHECK(welding_point(0.2, rescale(d, 2.0), cfg).phi_x == doctest::Approx(phi / 2.0).epsilon(1e-8));

  CHECK_THROWS_AS(welding_point(-1.0, zero, cfg), std::invalid_argument);
}

TEST_CASE("quasisymmetry") {
  SolverConfig cfg;
  const auto triples = equispaced_triples(0.0, 4.0, 8);
  CHECK(triples.size() == 16);
  for (const auto& t : triples) CHECK(t.z - t.y == doctest::Approx(t.y - t.x));

  const auto flat = quasisymmetry_scan(DrivingTerm::constant(0.0, 100.0), triples, cfg);
  CHECK(flat.max_ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(flat.min_ratio == doctest::Approx(1.0).epsilon(1e-9));

  // With horizon 1 the far points of c = 1 hit after the driving term has
  // frozen, so their ratios drift off 1.
  CHECK(quasisymmetry_scan(family::sqrt_t(1.0, 1.0), triples, cfg).min_ratio < 1.0 - 1e-3);
  double prev = 0.0;
  for (double c : {1.0, 3.0}) {
    const auto rep = quasisymmetry_scan(family::sqrt_t(c, 1.0), triples, cfg);
    for (const auto& r : rep.rows) {
      CHECK(std::isfinite(r.ratio));
      CHECK(r.ratio > 0.0);
    }
    CHECK(rep.max_ratio >= prev - 1e-6);
    prev = rep.max_ratio;
  }
  CHECK_THROWS_AS(quasisymmetry_scan(DrivingTerm::constant(0.0, 1.0), std::vector<Triple>{{1.0, 0.5, 2.0}}, cfg),
                  std::invalid_argument);
}

TEST_CASE("ratio check") {
  SolverConfig cfg;
  CHECK(ratio_check(DrivingTerm::constant(0.0, 100.0), -1.0, -2.0, cfg) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(ratio_check(family::sqrt_t(2.0, 1.0), -1.0, -1.5, cfg) == doctest::Approx(1.146996569).epsilon(1e-6));
  CHECK_THROWS_AS(ratio_check(family::sqrt_t(2.0, 1.0), -1.0, 1.5, cfg), std::invalid_argument);
  CHECK_THROWS_AS(ratio_check(family::sqrt_t(2.0, 1.0), 2.0, 1.0, cfg), std::invalid_argument);
}

TEST_CASE("quasislit conditions") {
  SolverConfig cfg;
  const auto flat = quasislit_conditions(DrivingTerm::constant(0.0, 100.0), {}, cfg);
  CHECK(flat.m == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(flat.pass);

  double prev = 1.0;
  for (double c : {0.5, 1.0, 2.0, 3.0}) {
    const auto r = quasislit_conditions(family::sqrt_t(c, 1.0), {}, cfg);
    CHECK(std::isfinite(r.m));
    CHECK(r.m >= prev);
    CHECK(r.m == doctest::Approx(std::max(r.m_symmetry, r.m_triples)));
    prev = r.m;
  }
}

TEST_CASE("gap below the catching threshold exceeds the certified epsilon") {
  SolverConfig cfg;
  const auto out = advance_bwr(1e-4, family::sqrt_one_minus_t(3.9), 1.0, cfg);
  const auto cert = epsilon_bound(3.9);
  REQUIRE(cert.certified);
  CHECK(out.gap > cert.epsilon);
}

TEST_CASE("welding CSV writers") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = (dir / "lw_weld.csv").string();
  const std::vector<WeldingPair> rows = {{1.0, -1.0, 0.25, 0.0}};
  write_welding_csv(rows, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,phi_x,T_hit,residual");
  std::getline(in, line);
  CHECK(line == "1,-1,0.25,0");
  in.close();

  QuasisymmetryReport rep;
  rep.rows.push_back({{0.0, 1.0, 2.0}, 1.0});
  write_quasisymmetry_csv(rep, path);
  std::ifstream q(path);
  std::getline(q, line);
  CHECK(line == "x,y,z,ratio");
  std::filesystem::remove(path);
}
