#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "loewner/driving.hpp"

namespace loewner {

using Complex = std::complex<double>;

enum class Scheme {
  Rk4Adaptive,          ///< classical RK4 with step-doubling error control
  ClosedFormPiecewise,  ///< exact flow of the midpoint-frozen driving term, step dt
};

struct SolverConfig {
  double dt = 1e-3;           ///< largest time step
  double eps_sing = 1e-8;     ///< singularity guard, multiplied by max(1, |initial point|)
  double gap_fraction = 0.02; ///< steps satisfy h <= gap_fraction * gap^2 / 2
  double rtol = 1e-10;        ///< local error tolerance relative to min(gap, 1)
  std::int64_t max_steps = 5'000'000;
  Scheme scheme = Scheme::Rk4Adaptive;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

enum class FlowStatus { Alive, Caught };

enum class Trajectory { Skip, Record };

struct RealSample {
  double t;
  double x;
};

struct RealFlowOutcome {
  FlowStatus status = FlowStatus::Alive;
  double t = 0.0;    ///< last time reached (t_end when alive)
  double x = 0.0;    ///< state at t
  double gap = 0.0;  ///< |x - drive(t)|
  /// Refined catching time t* from the square-root model gap ~ C sqrt(t* - t);
  /// NaN while alive.
  double catch_time = 0.0;
  double catch_value = 0.0;  ///< drive(t*)
  std::int64_t steps = 0;
  std::vector<RealSample> trajectory;

  [[nodiscard]] bool caught() const { return status == FlowStatus::Caught; }
};

struct ComplexSample {
  double t;
  Complex z;
};

struct ComplexFlowOutcome {
  Complex z;
  double t = 0.0;
  bool swallowed = false;
  double swallow_time = 0.0;  ///< NaN unless swallowed
  std::int64_t steps = 0;
  std::vector<ComplexSample> trajectory;
};

/// dx/dt = 2 / (x - drive(t)). Stops at t_end or when the driving term
/// catches x. Requires x0 != drive(0).
RealFlowOutcome advance_bwr(double x0, const DrivingTerm& d, double t_end, const SolverConfig& cfg,
                            Trajectory record = Trajectory::Skip);

/// dx/dt = -2 / (x - drive(t)). Stops at t_end or when x hits the singularity.
RealFlowOutcome advance_fwr(double x0, const DrivingTerm& d, double t_end, const SolverConfig& cfg,
                            Trajectory record = Trajectory::Skip);

/// dz/dt = 2 / (z - drive(t)), Im z0 > 0. Reports the swallow time when the
/// point reaches the real axis within the guard.
ComplexFlowOutcome advance_bw(Complex z0, const DrivingTerm& d, double t_end, const SolverConfig& cfg,
                              Trajectory record = Trajectory::Skip);

/// dz/dt = -2 / (z - drive(t)), Im z0 > 0. Exists for every t.
ComplexFlowOutcome advance_fw(Complex z0, const DrivingTerm& d, double t_end, const SolverConfig& cfg,
                              Trajectory record = Trajectory::Skip);

/// xi + sqrt((z - xi)^2 - 4 dt): the upper half-plane onto itself minus the
/// segment [xi, xi + 2i sqrt(dt)].
Complex vertical_slit_map(Complex z, double xi, double dt);

/// xi + sqrt((z - xi)^2 + 4 dt), the inverse of vertical_slit_map.
Complex vertical_slit_inverse(Complex z, double xi, double dt);

/// Writes `t,x`.
void write_trajectory_csv(const RealFlowOutcome& out, const std::string& path);
/// Writes `t,re,im`.
void write_trajectory_csv(const ComplexFlowOutcome& out, const std::string& path);

}  // namespace loewner
