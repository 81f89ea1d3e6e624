#include "loewner/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "csv_util.hpp"
#include "loewner/errors.hpp"

namespace loewner {

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(eps_sing > 0.0) || !std::isfinite(eps_sing)) throw std::invalid_argument("eps_sing must be positive");
  if (!(gap_fraction > 0.0) || gap_fraction > 1.0) throw std::invalid_argument("gap_fraction must lie in (0, 1]");
  if (!(rtol > 0.0) || !std::isfinite(rtol)) throw std::invalid_argument("rtol must be positive");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

double magnitude(double v) { return std::abs(v); }
double magnitude(Complex v) { return std::abs(v); }
bool finite(double v) { return std::isfinite(v); }
bool finite(Complex v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

// Branch of sqrt(u) with nonnegative imaginary part; on the real axis the
// sign follows Re(ref) so that the maps behave like z near infinity.
Complex upper_root(Complex u, Complex ref) {
  Complex w = std::sqrt(u);
  if (w.imag() < 0.0) {
    w = -w;
  } else if (w.imag() == 0.0 && w.real() != 0.0 && (ref.real() < 0.0) != (w.real() < 0.0)) {
    w = -w;
  }
  return w;
}

// Walks [0, t_end] segment by segment. Inside a segment the current instant
// is kept both as elapsed-from-start and remaining-to-end; whichever is
// smaller anchors driving-term evaluations.
class Clock {
 public:
  Clock(std::span<const double> breakpoints, double t_end) : bps_(breakpoints), t_end_(t_end) {
    seg_start_ = 0.0;
    seg_end_ = next_boundary(0.0);
    remaining_ = seg_end_ - seg_start_;
  }

  [[nodiscard]] bool end_anchored() const { return remaining_ < elapsed_; }

  [[nodiscard]] TimePoint at(double dh) const {
    if (end_anchored()) return {seg_end_, -(remaining_ - dh)};
    return {seg_start_, elapsed_ + dh};
  }

  [[nodiscard]] double now() const { return end_anchored() ? seg_end_ - remaining_ : seg_start_ + elapsed_; }
  [[nodiscard]] double remaining() const { return remaining_; }
  [[nodiscard]] bool segment_done() const { return remaining_ <= 0.0; }
  [[nodiscard]] bool finished() const { return segment_done() && seg_end_ >= t_end_; }

  // Smallest step that still changes the represented time.
  [[nodiscard]] double resolution() const {
    return 4.0 * kEps * (end_anchored() ? remaining_ : std::max(elapsed_, 0.0)) + kTiny;
  }

  void advance(double h) {
    if (h >= remaining_) {
      elapsed_ = seg_end_ - seg_start_;
      remaining_ = 0.0;
    } else {
      elapsed_ += h;
      remaining_ -= h;
    }
  }

  void next_segment() {
    seg_start_ = seg_end_;
    seg_end_ = next_boundary(seg_start_);
    elapsed_ = 0.0;
    remaining_ = seg_end_ - seg_start_;
  }

 private:
  [[nodiscard]] double next_boundary(double from) const {
    auto it = std::upper_bound(bps_.begin(), bps_.end(), from);
    double b = it == bps_.end() ? std::numeric_limits<double>::infinity() : *it;
    return std::min(b, t_end_);
  }

  std::span<const double> bps_;
  double t_end_;
  double seg_start_ = 0.0;
  double seg_end_ = 0.0;
  double elapsed_ = 0.0;
  double remaining_ = 0.0;
};

template <class State>
struct Sample {
  double t;
  State y;
};

template <class State>
struct IntegrationResult {
  bool singular = false;
  double t = 0.0;
  double t_star = std::numeric_limits<double>::quiet_NaN();
  State y{};
  double gap = 0.0;
  std::int64_t steps = 0;
  std::vector<Sample<State>> trajectory;
};

// Integrates dy/dt = field_sign / (y - d(t)). `gap_of(y, lambda)` measures the
// distance to the singularity and turns nonpositive once a real solution has
// crossed it. `extra_singular(y)` lets the caller stop on further conditions.
template <class State, class GapFn, class ExtraFn>
IntegrationResult<State> integrate(State y0, const DrivingTerm& d, double t_end, double field_sign,
                                   const SolverConfig& cfg, double guard, GapFn gap_of, ExtraFn extra_singular,
                                   Trajectory record) {
  IntegrationResult<State> res;
  Clock clock(d.breakpoints(), t_end);
  State y = y0;
  if (record == Trajectory::Record) res.trajectory.push_back({0.0, y});

  auto field = [&](TimePoint tp, State s) { return State(field_sign) / (s - d.eval(tp)); };

  double h_err = cfg.dt;
  bool has_prev = false;
  double g_prev = 0.0;
  double h_last = 0.0;
  std::int64_t attempts = 0;

  auto stop_singular = [&](double g) {
    res.singular = true;
    res.t = clock.now();
    res.gap = g;
    res.t_star = res.t;
    if (has_prev && g_prev > g) {
      res.t_star = res.t + g * g * h_last / (g_prev * g_prev - g * g);
    }
    res.t_star = std::min(res.t_star, t_end);
    res.y = y;
  };

  while (true) {
    if (clock.segment_done()) {
      if (clock.finished()) break;
      clock.next_segment();
      continue;
    }
    const double lam = d.eval(clock.at(0.0));
    const double g = gap_of(y, lam);
    if (!(g > guard) || extra_singular(y)) {
      stop_singular(g);
      return res;
    }

    if (cfg.scheme == Scheme::ClosedFormPiecewise) {
      const double h = std::min(cfg.dt, clock.remaining());
      const double frozen = d.eval(clock.at(0.5 * h));
      const State rel = y - State(frozen);
      State next{};
      if constexpr (std::is_same_v<State, double>) {
        const double u = rel * rel + 2.0 * field_sign * h;
        if (u <= 0.0) {
          // Hits the frozen singularity inside this step.
          has_prev = false;
          res.singular = true;
          res.t = clock.now();
          res.t_star = std::min(res.t + rel * rel / (-2.0 * field_sign), t_end);
          res.y = frozen;
          res.gap = 0.0;
          return res;
        }
        next = frozen + std::copysign(std::sqrt(u), rel);
      } else {
        next = State(frozen) + upper_root(rel * rel + 2.0 * field_sign * h, rel);
      }
      if (!finite(next)) throw NumericalError(NumericalFailure::NonFiniteState, "closed-form step produced NaN");
      g_prev = g;
      h_last = h;
      has_prev = true;
      y = next;
      clock.advance(h);
      if (++res.steps > cfg.max_steps) {
        throw NumericalError(NumericalFailure::StepLimitExceeded,
                             "max_steps reached at t = " + std::to_string(clock.now()));
      }
      if (record == Trajectory::Record) res.trajectory.push_back({clock.now(), y});
      continue;
    }

    const double h_cap = std::min({cfg.dt, clock.remaining(), cfg.gap_fraction * g * g * 0.5});
    const double floor = clock.resolution();
    if (h_cap < floor) {
      // The gap closes faster than time can be resolved: treat as a hit.
      stop_singular(g);
      return res;
    }
    double h = std::min(h_err, h_cap);
    if (h < floor) {
      throw NumericalError(NumericalFailure::NonFiniteState,
                           "step size underflow at t = " + std::to_string(clock.now()));
    }
    if (++attempts > 4 * cfg.max_steps) {
      throw NumericalError(NumericalFailure::StepLimitExceeded, "too many rejected steps");
    }

    const State k1 = field(clock.at(0.0), y);
    auto rk4 = [&](double dh0, State s, State k, double step) {
      State k2 = field(clock.at(dh0 + 0.5 * step), s + (0.5 * step) * k);
      State k3 = field(clock.at(dh0 + 0.5 * step), s + (0.5 * step) * k2);
      State k4 = field(clock.at(dh0 + step), s + step * k3);
      return s + (step / 6.0) * (k + 2.0 * k2 + 2.0 * k3 + k4);
    };
    const State y_full = rk4(0.0, y, k1, h);
    const State y_half = rk4(0.0, y, k1, 0.5 * h);
    const State y_two = rk4(0.5 * h, y_half, field(clock.at(0.5 * h), y_half), 0.5 * h);

    const double g_half = gap_of(y_half, d.eval(clock.at(0.5 * h)));
    const double lam_new = d.eval(clock.at(h));
    const double g_new = gap_of(y_two, lam_new);
    if (!finite(y_full) || !finite(y_two) || !(g_half > 0.0) || !(g_new > 0.0)) {
      h_err = 0.25 * h;
      continue;
    }
    const State diff = y_two - y_full;
    const double err = magnitude(diff) / 15.0;
    const double tol = cfg.rtol * std::min(g, 1.0) + 4.0 * kEps * magnitude(y_two) + kTiny;
    if (err > tol) {
      h_err = h * std::max(0.1, 0.9 * std::pow(tol / err, 0.2));
      continue;
    }

    State next = y_two + diff / 15.0;
    if (!(gap_of(next, lam_new) > 0.0)) next = y_two;
    g_prev = g;
    h_last = h;
    has_prev = true;
    y = next;
    clock.advance(h);
    h_err = h * std::min(4.0, 0.9 * std::pow(tol / std::max(err, kTiny), 0.2));
    if (++res.steps > cfg.max_steps) {
      throw NumericalError(NumericalFailure::StepLimitExceeded,
                           "max_steps reached at t = " + std::to_string(clock.now()));
    }
    if (record == Trajectory::Record) res.trajectory.push_back({clock.now(), y});
  }

  res.t = t_end;
  res.y = y;
  res.gap = gap_of(y, d.eval({t_end, 0.0}));
  return res;
}

void check_time(double t_end) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be finite and >= 0");
}

RealFlowOutcome advance_real(double x0, const DrivingTerm& d, double t_end, const SolverConfig& cfg,
                             Trajectory record, double field_sign) {
  cfg.validate();
  check_time(t_end);
  if (!std::isfinite(x0)) throw std::invalid_argument("x0 must be finite");
  const double lam0 = d(0.0);
  if (x0 == lam0) throw std::invalid_argument("x0 must differ from the driving term at t = 0");
  const double side = x0 > lam0 ? 1.0 : -1.0;
  const double guard = cfg.eps_sing * std::max(1.0, std::abs(x0));

  auto res = integrate<double>(
      x0, d, t_end, field_sign, cfg, guard, [side](double y, double lam) { return side * (y - lam); },
      [](double) { return false; }, record);

  RealFlowOutcome out;
  out.t = res.t;
  out.x = res.y;
  out.gap = std::abs(res.gap);
  out.steps = res.steps;
  if (res.singular) {
    out.status = FlowStatus::Caught;
    out.catch_time = res.t_star;
    out.catch_value = d(res.t_star);
  } else {
    out.status = FlowStatus::Alive;
    out.catch_time = std::numeric_limits<double>::quiet_NaN();
    out.catch_value = std::numeric_limits<double>::quiet_NaN();
  }
  out.trajectory.reserve(res.trajectory.size());
  for (const auto& s : res.trajectory) out.trajectory.push_back({s.t, s.y});
  return out;
}

ComplexFlowOutcome advance_complex(Complex z0, const DrivingTerm& d, double t_end, const SolverConfig& cfg,
                                   Trajectory record, double field_sign) {
  cfg.validate();
  check_time(t_end);
  if (!(z0.imag() > 0.0) || !finite(z0)) throw std::invalid_argument("complex flows need Im z0 > 0");
  const double guard = cfg.eps_sing * std::max(1.0, std::abs(z0));
  const bool backward = field_sign > 0.0;

  auto res = integrate<Complex>(
      z0, d, t_end, field_sign, cfg, guard, [](Complex y, double lam) { return std::abs(y - lam); },
      [backward, guard](Complex y) { return backward && y.imag() < guard; }, record);

  ComplexFlowOutcome out;
  out.z = res.y;
  out.t = res.t;
  out.steps = res.steps;
  out.swallowed = res.singular;
  out.swallow_time = res.singular ? res.t_star : std::numeric_limits<double>::quiet_NaN();
  out.trajectory.reserve(res.trajectory.size());
  for (const auto& s : res.trajectory) out.trajectory.push_back({s.t, s.y});
  return out;
}

}  // namespace

RealFlowOutcome advance_bwr(double x0, const DrivingTerm& d, double t_end, const SolverConfig& cfg,
                            Trajectory record) {
  return advance_real(x0, d, t_end, cfg, record, 2.0);
}

RealFlowOutcome advance_fwr(double x0, const DrivingTerm& d, double t_end, const SolverConfig& cfg,
                            Trajectory record) {
  return advance_real(x0, d, t_end, cfg, record, -2.0);
}

ComplexFlowOutcome advance_bw(Complex z0, const DrivingTerm& d, double t_end, const SolverConfig& cfg,
                              Trajectory record) {
  return advance_complex(z0, d, t_end, cfg, record, 2.0);
}

ComplexFlowOutcome advance_fw(Complex z0, const DrivingTerm& d, double t_end, const SolverConfig& cfg,
                              Trajectory record) {
  auto out = advance_complex(z0, d, t_end, cfg, record, -2.0);
  if (out.swallowed) {
    throw NumericalError(NumericalFailure::NonFiniteState, "forward flow reached the singularity");
  }
  return out;
}

Complex vertical_slit_map(Complex z, double xi, double dt) {
  if (dt < 0.0) throw std::invalid_argument("slit time must be >= 0");
  if (dt == 0.0) return z;
  const Complex rel = z - xi;
  return xi + upper_root(rel * rel - 4.0 * dt, rel);
}

Complex vertical_slit_inverse(Complex z, double xi, double dt) {
  if (dt < 0.0) throw std::invalid_argument("slit time must be >= 0");
  if (dt == 0.0) return z;
  const Complex rel = z - xi;
  return xi + upper_root(rel * rel + 4.0 * dt, rel);
}

void write_trajectory_csv(const RealFlowOutcome& out, const std::string& path) {
  auto f = detail::open_for_write(path);
  f << "t,x\n";
  for (const auto& s : out.trajectory) f << detail::format_number(s.t) << ',' << detail::format_number(s.x) << '\n';
  if (!f) throw IoError("write failed: " + path);
}

void write_trajectory_csv(const ComplexFlowOutcome& out, const std::string& path) {
  auto f = detail::open_for_write(path);
  f << "t,re,im\n";
  for (const auto& s : out.trajectory) {
    f << detail::format_number(s.t) << ',' << detail::format_number(s.z.real()) << ','
      << detail::format_number(s.z.imag()) << '\n';
  }
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace loewner
