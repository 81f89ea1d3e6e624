#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "loewner/trace.hpp"

using namespace loewner;

namespace {

double circle_error(const Trace& tr) {
  double e = 0.0;
  for (const auto& p : tr.samples) e = std::max(e, std::abs(std::abs(p.z - Complex(0.5, 0.0)) - 0.5));
  return e;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("vertical slit is reproduced exactly") {
  const auto tr = compose_trace(DrivingTerm::constant(0.0, 1.0), 1000, {});
  REQUIRE(tr.samples.size() == 1001);
  for (const auto& p : tr.samples) CHECK(std::abs(p.z - Complex(0.0, 2.0 * std::sqrt(p.t))) <= 1e-12);
}

TEST_CASE("circle trace and refinement") {
  const auto d = family::circle(0.125 - 1e-4);
  const double e1 = circle_error(compose_trace(d, 1000, {}));
  const double e2 = circle_error(compose_trace(d, 2000, {}));
  CHECK(e2 <= 1e-2);
  CHECK(e2 < e1 / 1.5);
}

TEST_CASE("trace invariants") {
  const auto d = family::sqrt_one_minus_t(2.0);
  const auto tr = compose_trace(d, 500, {});
  CHECK(tr.samples.front().z == Complex(d(0.0), 0.0));
  CHECK(tr.samples.back().t == 1.0);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) {
    CHECK(tr.samples[i].t > tr.samples[i - 1].t);
    CHECK(tr.samples[i].z.imag() >= 0.0);
  }

  SUBCASE("scaling covariance") {
    const double r = 2.0;
    const auto sc = compose_trace(rescale(d, r), 500, {});
    for (std::size_t i = 0; i < tr.samples.size(); ++i)
      CHECK(std::abs(sc.samples[i].z - tr.samples[i].z / r) <= 1e-12);
  }
}

TEST_CASE("tip by forward flow") {
  SolverConfig cfg;
  CHECK(std::abs(tip_by_flow(DrivingTerm::constant(0.0, 1.0), 1.0, 1e-4, cfg) - Complex(0.0, 2.0)) <= 1e-2);
  const auto tip = tip_by_flow(family::circle(), 0.0625, 1e-4, cfg);
  CHECK(std::abs(std::abs(tip - Complex(0.5, 0.0)) - 0.5) <= 1e-2);
  CHECK(default_tip_lift(cfg) == doctest::Approx(std::sqrt(1e-3) / 10));

  const auto d = family::sqrt_one_minus_t(2.0);
  const auto a = compose_trace(d, 2000, cfg), b = flow_trace(d, 200, 1e-4, cfg);
  for (std::size_t k = 0; k <= 200; ++k) CHECK(std::abs(a.samples[10 * k].z - b.samples[k].z) <= 1e-2);
  CHECK_THROWS_AS(tip_by_flow(d, 2.0, 1e-4, cfg), std::invalid_argument);
  CHECK_THROWS_AS(tip_by_flow(d, 0.5, 0.0, cfg), std::invalid_argument);
}

TEST_CASE("slit diagnostics") {
  const auto slit = slit_diagnostics(compose_trace(DrivingTerm::constant(0.0, 1.0), 1000, {}));
  CHECK(slit.simple_curve_plausible);
  CHECK(slit.return_ratio == doctest::Approx(1.0));

  const auto c2 = slit_diagnostics(compose_trace(family::sqrt_one_minus_t(2.0), 2000, {}));
  CHECK(c2.simple_curve_plausible);

  for (const auto& d : {family::circle(), family::sqrt_one_minus_t(4.5)}) {
    const auto rep = slit_diagnostics(compose_trace(d, 4000, {}));
    CHECK_FALSE(rep.simple_curve_plausible);
    CHECK(rep.return_ratio < 0.2);
  }
  Trace tiny;
  tiny.samples.resize(2);
  CHECK_THROWS_AS(slit_diagnostics(tiny), std::invalid_argument);
}

TEST_CASE("half-plane capacity is 2t") {
  SolverConfig cfg;
  for (const auto& d : {DrivingTerm::constant(1.0, 1.0), family::circle(0.1), family::sqrt_one_minus_t(2.0, 0.9),
                        brownian(2.0, 3, 0.5, 1000)}) {
    const double t = d.horizon();
    CHECK(half_plane_capacity(d, t, cfg) == doctest::Approx(2.0 * t).epsilon(1e-2));
  }
}

TEST_CASE("CSV and SVG output") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto csv = (dir / "lw_trace.csv").string(), svg = (dir / "lw_trace.svg").string();
  const std::vector<Trace> trs = {compose_trace(DrivingTerm::constant(0.0, 1.0), 10, {}),
                                  compose_trace(family::circle(), 10, {})};
  write_trace_csv(trs[0], csv);
  const auto text = slurp(csv);
  CHECK(text.rfind("t,re,im\n0,0,0\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 12);

  write_trace_svg(trs, svg, 1.5);
  const auto pic = slurp(svg);
  CHECK(pic.find("viewBox=\"0 0 1000 600\"") != std::string::npos);
  std::size_t lines = 0;
  for (auto pos = pic.find("<polyline"); pos != std::string::npos; pos = pic.find("<polyline", pos + 1)) ++lines;
  CHECK(lines == 2);
  CHECK_THROWS_AS(write_trace_svg(trs, svg, 0.0), std::invalid_argument);
  std::filesystem::remove(csv);
  std::filesystem::remove(svg);
}
