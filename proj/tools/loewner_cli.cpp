// Command-line front end. Talks to the library through the C interface only.

#include <CLI11.hpp>

#include <unistd.h>

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "loewner/loewner.h"

namespace {

struct Failure {
  lw_status status;
  std::string message;
};

struct UsageError {
  std::string message;
};

void check(lw_status s) {
  if (s != LW_OK) throw Failure{s, lw_last_error()};
}

struct DrivingDeleter {
  void operator()(lw_driving* d) const { lw_driving_free(d); }
};
struct TraceDeleter {
  void operator()(lw_trace* t) const { lw_trace_free(t); }
};
using Driving = std::unique_ptr<lw_driving, DrivingDeleter>;
using TraceHandle = std::unique_ptr<lw_trace, TraceDeleter>;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return {buf, r.ptr};
}

struct Globals {
  double dt = 1e-3;
  double eps_sing = 1e-8;
  std::int64_t max_steps = 5'000'000;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
  std::string svg;

  [[nodiscard]] lw_solver_config config() const {
    lw_solver_config cfg;
    lw_solver_config_default(&cfg);
    cfg.dt = dt;
    cfg.eps_sing = eps_sing;
    cfg.max_steps = max_steps;
    return cfg;
  }
};

// Library writers take a path. For `-` they write to a scratch file that is
// copied to standard output afterwards.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& out) : to_stdout_(out == "-") {
    if (!to_stdout_) {
      path_ = out;
      return;
    }
    static std::atomic<unsigned> counter{0};
    path_ = (std::filesystem::temp_directory_path() /
             ("loewner_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".csv"))
                .string();
  }
  OutputTarget(const OutputTarget&) = delete;
  OutputTarget& operator=(const OutputTarget&) = delete;
  ~OutputTarget() {
    if (to_stdout_) std::filesystem::remove(path_);
  }

  [[nodiscard]] const char* path() const { return path_.c_str(); }

  void flush() const {
    if (!to_stdout_) return;
    std::ifstream in(path_, std::ios::binary);
    std::cout << in.rdbuf();
    std::cout.flush();
  }

 private:
  bool to_stdout_;
  std::string path_;
};

struct FamilyArgs {
  std::string family = "constant";
  std::string csv;
  double c = 1.0;
  double value = 0.0;
  double slope = 1.0;
  std::optional<double> horizon;
  double kappa = 2.0;
  double resolution = 1000.0;

  void add_to(CLI::App* app, const std::string& default_family) {
    family = default_family;
    app->add_option("--family", family, "Driving term: constant, linear, circle, sqrt1mt, sqrtt, brownian")
        ->check(CLI::IsMember({"constant", "linear", "circle", "sqrt1mt", "sqrtt", "brownian"}))
        ->capture_default_str();
    app->add_option("--driving-csv", csv, "Read the driving term from a `t,value` CSV instead of a family");
    app->add_option("--c", c, "Coefficient c for sqrt1mt (c - c sqrt(1 - t)) and sqrtt (c sqrt(t))")
        ->capture_default_str();
    app->add_option("--value", value, "Value of constant, base value of linear")->capture_default_str();
    app->add_option("--slope", slope, "Slope of linear, per unit time")->capture_default_str();
    app->add_option("--horizon", horizon,
                    "Time horizon T. Defaults: circle 1/8, sqrt1mt 1, everything else 1");
    app->add_option("--kappa", kappa, "brownian: drive sqrt(kappa) B_t")->capture_default_str();
    app->add_option("--resolution", resolution, "brownian: samples per unit time")->capture_default_str();
  }

  [[nodiscard]] Driving build(const Globals& g, std::optional<double> c_override = std::nullopt) const {
    lw_driving* d = nullptr;
    const double cc = c_override.value_or(c);
    if (!csv.empty()) {
      check(lw_driving_read_csv(csv.c_str(), &d));
      return Driving(d);
    }
    if (family == "constant") {
      check(lw_driving_constant(value, horizon.value_or(1.0), &d));
    } else if (family == "linear") {
      check(lw_driving_linear(value, slope, horizon.value_or(1.0), &d));
    } else if (family == "circle") {
      check(lw_driving_circle(horizon.value_or(0.125), &d));
    } else if (family == "sqrt1mt") {
      check(lw_driving_sqrt_one_minus_t(cc, horizon.value_or(1.0), &d));
    } else if (family == "sqrtt") {
      check(lw_driving_sqrt_t(cc, horizon.value_or(1.0), &d));
    } else if (family == "brownian") {
      if (!g.seed) throw UsageError{"brownian driving requires --seed"};
      check(lw_driving_brownian(kappa, *g.seed, horizon.value_or(1.0), resolution, &d));
    } else {
      throw UsageError{"unknown family " + family};
    }
    return Driving(d);
  }

  [[nodiscard]] bool c_family() const { return csv.empty() && (family == "sqrt1mt" || family == "sqrtt"); }
};

struct Sweep {
  double from = 0.0;
  double to = 0.0;
  double step = 0.1;

  [[nodiscard]] std::vector<double> values() const {
    if (!(step > 0.0) || !(to >= from)) throw UsageError{"sweep needs step > 0 and to >= from"};
    const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
    std::vector<double> v;
    for (std::size_t k = 0; k <= n; ++k) v.push_back(from + step * static_cast<double>(k));
    return v;
  }
};

// CLI-owned tables; `-` means standard output.
class Table {
 public:
  explicit Table(const std::string& path) {
    if (path == "-") return;
    file_.open(path);
    if (!file_) throw Failure{LW_IO, "cannot open " + path + " for writing"};
  }
  template <class T>
  Table& operator<<(const T& v) {
    stream() << v;
    return *this;
  }

 private:
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  std::ofstream file_;
};

// Runs fn over the grid concurrently; results come back in grid order.
template <class Fn>
auto fan_out(const std::vector<double>& grid, Fn fn) {
  using Row = decltype(fn(0.0));
  std::vector<std::future<Row>> jobs;
  for (double v : grid) jobs.push_back(std::async(std::launch::async, fn, v));
  std::vector<Row> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

double horizon_of(const lw_driving* d) {
  double T = 0.0;
  check(lw_driving_horizon(d, &T));
  return T;
}

double drive_at(const lw_driving* d, double t) {
  double v = 0.0;
  check(lw_driving_eval(d, t, &v));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loewner evolution experiments. All numeric output is decimal with 12 significant digits."};
  app.require_subcommand(1);

  Globals g;
  app.add_option("--dt", g.dt, "Largest integrator time step")->capture_default_str();
  app.add_option("--eps-sing", g.eps_sing, "Singularity guard, scaled by max(1, |x0|)")->capture_default_str();
  app.add_option("--max-steps", g.max_steps, "Step budget per integration")->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed, required for brownian driving terms");
  app.add_option("--out", g.out, "Output CSV path, `-` for standard output")->capture_default_str();
  app.add_option("--svg", g.svg, "Optional SVG figure path (trace only)");

  // trace
  auto* trace = app.add_subcommand("trace", "Trace gamma(t) sampled at t = kT/n. Writes `t,re,im`.");
  trace->fallthrough();
  FamilyArgs trace_family;
  trace_family.add_to(trace, "circle");
  std::size_t trace_n = 1000;
  std::string trace_scheme = "composition";
  double trace_lift = 0.0;
  double stroke = 2.0;
  std::string trace_report;
  trace->add_option("--n", trace_n, "Number of time steps")->capture_default_str();
  trace->add_option("--scheme", trace_scheme, "composition (slit maps) or flow (lifted forward flow)")
      ->check(CLI::IsMember({"composition", "flow"}))
      ->capture_default_str();
  trace->add_option("--lift", trace_lift, "flow scheme: lift above the tip; 0 selects sqrt(dt)/10")
      ->capture_default_str();
  trace->add_option("--stroke", stroke, "SVG stroke width in viewBox units")->capture_default_str();
  trace->add_option("--report", trace_report, "Write slit diagnostics as a one-row CSV");

  // flow
  auto* flow = app.add_subcommand("flow", "Integrate one point. Writes the trajectory `t,x` or `t,re,im`.");
  flow->fallthrough();
  FamilyArgs flow_family;
  flow_family.add_to(flow, "constant");
  std::string flow_mode = "bwr";
  double flow_x0 = 1.0, flow_y0 = 0.0;
  std::optional<double> flow_t_end;
  std::string flow_report;
  flow->add_option("--mode", flow_mode, "bwr, fwr (real) or bw, fw (complex)")
      ->check(CLI::IsMember({"bwr", "fwr", "bw", "fw"}))
      ->capture_default_str();
  flow->add_option("--x0", flow_x0, "Initial point, real part")->capture_default_str();
  flow->add_option("--y0", flow_y0, "Initial point, imaginary part (complex modes, > 0)")->capture_default_str();
  flow->add_option("--t-end", flow_t_end, "Final time. Default: the horizon");
  flow->add_option("--report", flow_report, "Write the outcome as a one-row CSV");

  // hitting
  auto* hitting = app.add_subcommand("hitting", "Hitting times of the forward real flow. Writes "
                                                "`x0,T_hit,terminal_value,resolution,past_horizon,T_over_r2`.");
  hitting->fallthrough();
  FamilyArgs hit_family;
  hit_family.add_to(hitting, "sqrtt");
  std::vector<double> hit_x0{0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  hitting->add_option("--x0", hit_x0, "Initial points, comma separated")->delimiter(',')->capture_default_str();

  // weld
  auto* weld = app.add_subcommand("weld", "Welding partners phi(x). Writes `x,phi_x,T_hit,residual`.");
  weld->fallthrough();
  FamilyArgs weld_family;
  weld_family.add_to(weld, "sqrtt");
  std::vector<double> weld_x{0.5, 1.0, 2.0};
  weld->add_option("--x", weld_x, "Points right of xi(0), comma separated")->delimiter(',')->capture_default_str();

  // qsweep
  auto* qsweep = app.add_subcommand(
      "qsweep", "Quasisymmetry and quasislit constants over a c grid. Writes "
                "`c,max_ratio,min_ratio,m_symmetry,m_triples,m,pass`.");
  qsweep->fallthrough();
  FamilyArgs q_family;
  q_family.add_to(qsweep, "sqrtt");
  Sweep q_sweep{0.5, 3.5, 0.5};
  double q_lo = 0.0, q_hi = 4.0, q_extent = 1.0, q_cap = 100.0;
  std::size_t q_intervals = 8, q_grid = 16;
  qsweep->add_option("--c-from", q_sweep.from, "First c")->capture_default_str();
  qsweep->add_option("--c-to", q_sweep.to, "Last c")->capture_default_str();
  qsweep->add_option("--step", q_sweep.step, "c increment")->capture_default_str();
  qsweep->add_option("--lo", q_lo, "Triple grid start (>= xi(0))")->capture_default_str();
  qsweep->add_option("--hi", q_hi, "Triple grid end")->capture_default_str();
  qsweep->add_option("--intervals", q_intervals, "Triple grid intervals")->capture_default_str();
  qsweep->add_option("--extent", q_extent, "Quasislit grid extent right of xi(0)")->capture_default_str();
  qsweep->add_option("--grid", q_grid, "Quasislit grid intervals")->capture_default_str();
  qsweep->add_option("--cap", q_cap, "Pass iff M < cap")->capture_default_str();

  // recursion
  auto* recursion = app.add_subcommand(
      "recursion", "h_n, x_n and e_n table `n,h_n,x_n,e_n` for one c, or `c,n_star,epsilon` over a c grid.");
  recursion->fallthrough();
  std::optional<double> rec_c;
  std::size_t rec_n = 20, rec_cap = 10'000;
  double rec_eps = 1e-3;
  std::optional<double> rec_from, rec_to;
  double rec_step = 0.1;
  recursion->add_option("--c", rec_c, "Constant c > 0 for the table");
  recursion->add_option("--n", rec_n, "Table rows")->capture_default_str();
  recursion->add_option("--eps", rec_eps, "epsilon used for the e_n column")->capture_default_str();
  recursion->add_option("--cap", rec_cap, "Largest n searched for h_n(c) <= 0")->capture_default_str();
  recursion->add_option("--c-from", rec_from, "Sweep mode: first c in (0, 4)");
  recursion->add_option("--c-to", rec_to, "Sweep mode: last c in (0, 4)");
  recursion->add_option("--step", rec_step, "Sweep mode: c increment")->capture_default_str();

  // threshold
  auto* threshold = app.add_subcommand(
      "threshold", "Backward real flow under c - c sqrt(1 - t) up to t = 1 over a c grid. Writes "
                   "`c,status,gap,t,catch_time`; gap is |x - lambda| at the last time reached (t = 1 unless caught).");
  threshold->fallthrough();
  std::string th_family = "sqrt1mt";
  Sweep th_sweep{3.0, 4.5, 0.1};
  double th_x0 = 1e-4;
  threshold->add_option("--family", th_family, "Catching family")
      ->check(CLI::IsMember({"sqrt1mt"}))
      ->capture_default_str();
  threshold->add_option("--c-from", th_sweep.from, "First c")->capture_default_str();
  threshold->add_option("--c-to", th_sweep.to, "Last c")->capture_default_str();
  threshold->add_option("--step", th_sweep.step, "c increment")->capture_default_str();
  threshold->add_option("--x0", th_x0, "Initial point, right of lambda(0) = 0")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const lw_solver_config cfg = g.config();

    if (*trace) {
      const Driving d = trace_family.build(g);
      lw_trace* raw = nullptr;
      if (trace_scheme == "composition")
        check(lw_compose_trace(d.get(), trace_n, &cfg, &raw));
      else
        check(lw_flow_trace(d.get(), trace_n, trace_lift, &cfg, &raw));
      const TraceHandle tr(raw);
      const OutputTarget target(g.out);
      check(lw_trace_write_csv(tr.get(), target.path()));
      target.flush();
      if (!g.svg.empty()) {
        const lw_trace* list[] = {tr.get()};
        check(lw_traces_write_svg(list, 1, g.svg.c_str(), stroke));
      }
      if (!trace_report.empty()) {
        lw_slit_report rep;
        check(lw_slit_diagnostics(tr.get(), &rep));
        Table os(trace_report);
        os << "min_nonadjacent_distance,min_imag,min_height_ratio,return_ratio,min_chord_arc,simple_curve_plausible\n"
           << num(rep.min_nonadjacent_distance) << ',' << num(rep.min_imag) << ',' << num(rep.min_height_ratio)
           << ',' << num(rep.return_ratio) << ',' << num(rep.min_chord_arc) << ',' << rep.simple_curve_plausible << '\n';
      }
    } else if (*flow) {
      const Driving d = flow_family.build(g);
      const double t_end = flow_t_end.value_or(horizon_of(d.get()));
      const OutputTarget target(g.out);
      const char* path = target.path();
      if (flow_mode == "bwr" || flow_mode == "fwr") {
        lw_real_outcome o;
        check(lw_advance_real(flow_mode == "bwr" ? LW_BACKWARD : LW_FORWARD, flow_x0, d.get(), t_end, &cfg,
                              path, &o));
        target.flush();
        if (!flow_report.empty()) {
          Table os(flow_report);
          os << "status,t,x,gap,catch_time,catch_value,steps\n"
             << (o.caught ? "caught" : "alive") << ',' << num(o.t) << ',' << num(o.x) << ',' << num(o.gap) << ','
             << num(o.catch_time) << ',' << num(o.catch_value) << ',' << o.steps << '\n';
        }
      } else {
        lw_complex_outcome o;
        check(lw_advance_complex(flow_mode == "bw" ? LW_BACKWARD : LW_FORWARD, flow_x0, flow_y0, d.get(), t_end,
                                 &cfg, path, &o));
        target.flush();
        if (!flow_report.empty()) {
          Table os(flow_report);
          os << "status,t,re,im,swallow_time,steps\n"
             << (o.swallowed ? "swallowed" : "alive") << ',' << num(o.t) << ',' << num(o.re) << ',' << num(o.im)
             << ',' << num(o.swallow_time) << ',' << o.steps << '\n';
        }
      }
    } else if (*hitting) {
      const Driving d = hit_family.build(g);
      const double xi0 = drive_at(d.get(), 0.0);
      std::vector<lw_hitting_record> rows(hit_x0.size());
      for (std::size_t i = 0; i < hit_x0.size(); ++i) check(lw_hitting_time(hit_x0[i], d.get(), &cfg, &rows[i]));
      Table os(g.out);
      os << "x0,T_hit,terminal_value,resolution,past_horizon,T_over_r2\n";
      for (const auto& r : rows) {
        const double dx = r.x0 - xi0;
        os << num(r.x0) << ',' << num(r.hit_time) << ',' << num(r.terminal_value) << ',' << num(r.resolution) << ','
           << r.past_horizon << ',' << num(r.hit_time / (dx * dx)) << '\n';
      }
    } else if (*weld) {
      const Driving d = weld_family.build(g);
      std::vector<lw_welding_pair> rows(weld_x.size());
      for (std::size_t i = 0; i < weld_x.size(); ++i) check(lw_welding_point(weld_x[i], d.get(), &cfg, &rows[i]));
      const OutputTarget target(g.out);
      check(lw_write_welding_csv(rows.data(), rows.size(), target.path()));
      target.flush();
    } else if (*qsweep) {
      if (!q_family.c_family()) throw UsageError{"qsweep needs a c-parametrized family (sqrtt or sqrt1mt)"};
      std::size_t count = 0;
      check(lw_equispaced_triples(q_lo, q_hi, q_intervals, nullptr, 0, &count));
      std::vector<double> xyz(3 * count);
      check(lw_equispaced_triples(q_lo, q_hi, q_intervals, xyz.data(), count, &count));
      const auto grid = q_sweep.values();
      struct Row {
        double max_ratio, min_ratio;
        lw_quasislit_result q;
      };
      const auto rows = fan_out(grid, [&](double c) {
        const Driving d = q_family.build(g, c);
        Row r{};
        check(lw_quasisymmetry_scan(d.get(), xyz.data(), count, &cfg, nullptr, &r.max_ratio, &r.min_ratio));
        check(lw_quasislit_conditions(d.get(), q_extent, q_grid, q_cap, &cfg, &r.q));
        return r;
      });
      Table os(g.out);
      os << "c,max_ratio,min_ratio,m_symmetry,m_triples,m,pass\n";
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& r = rows[i];
        os << num(grid[i]) << ',' << num(r.max_ratio) << ',' << num(r.min_ratio) << ',' << num(r.q.m_symmetry)
           << ',' << num(r.q.m_triples) << ',' << num(r.q.m) << ',' << r.q.pass << '\n';
      }
    } else if (*recursion) {
      if (rec_from || rec_to) {
        if (!rec_from || !rec_to) throw UsageError{"sweep mode needs both --c-from and --c-to"};
        const auto grid = Sweep{*rec_from, *rec_to, rec_step}.values();
        std::vector<lw_epsilon_certificate> rows(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) check(lw_epsilon_bound(grid[i], rec_cap, 1e-6, &rows[i]));
        const OutputTarget target(g.out);
        check(lw_write_epsilon_sweep_csv(rows.data(), rows.size(), target.path()));
        target.flush();
      } else {
        if (!rec_c) throw UsageError{"recursion needs --c, or --c-from and --c-to"};
        const OutputTarget target(g.out);
        check(lw_write_recursion_csv(*rec_c, rec_n, rec_eps, target.path()));
        target.flush();
      }
    } else if (*threshold) {
      const auto grid = th_sweep.values();
      const auto rows = fan_out(grid, [&](double c) {
        lw_driving* raw = nullptr;
        check(lw_driving_sqrt_one_minus_t(c, 1.0, &raw));
        const Driving d(raw);
        lw_real_outcome o{};
        check(lw_advance_real(LW_BACKWARD, th_x0, d.get(), 1.0, &cfg, nullptr, &o));
        return o;
      });
      Table os(g.out);
      os << "c,status,gap,t,catch_time\n";
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& o = rows[i];
        os << num(grid[i]) << ',' << (o.caught ? "caught" : "alive") << ',' << num(o.gap) << ',' << num(o.t) << ','
           << num(o.catch_time) << '\n';
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.message << '\n';
    return 1;
  } catch (const Failure& e) {
    std::cerr << "error: " << lw_status_name(e.status) << ": " << e.message << '\n';
    return e.status == LW_INVALID_ARGUMENT || e.status == LW_IO ? 1 : 2;
  }
  return 0;
}
