#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "loewner/driving.hpp"
#include "loewner/flow.hpp"

namespace loewner {

enum class TraceScheme {
  Composition,  ///< nested vertical-slit maps of the midpoint-frozen driving term
  ForwardFlow,  ///< one lifted forward flow per sample time
};

struct TracePoint {
  double t;
  Complex z;
};

struct Trace {
  std::vector<TracePoint> samples;  ///< t = k T / n for k = 0..n
  std::size_t n_steps = 0;
  TraceScheme scheme = TraceScheme::Composition;
};

/// gamma(t_k) = phi_1 o ... o phi_{k-1} (lambda_k + 2i sqrt(dt)), where phi_j is
/// the vertical slit map at the midpoint value lambda_j of step j. O(n^2).
Trace compose_trace(const DrivingTerm& d, std::size_t n, const SolverConfig& cfg);

/// sqrt(dt) / 10
double default_tip_lift(const SolverConfig& cfg);

/// Forward flow of lambda(t) + i*lift under s -> lambda(t - s), up to time t.
Complex tip_by_flow(const DrivingTerm& d, double t, double lift, const SolverConfig& cfg);

/// tip_by_flow at t_k = k T / n.
Trace flow_trace(const DrivingTerm& d, std::size_t n, double lift, const SolverConfig& cfg);

struct DiagnosticThresholds {
  double min_height_ratio = 1e-2;  ///< Im gamma(t) / (2 sqrt t) below this flags a collapse onto the axis
  double min_return_ratio = 0.2;   ///< Im gamma after its peak, over the peak, below this flags a return to the axis
  double min_chord_arc = 1e-3;     ///< chord / arc length below this flags a near self-contact
  double skip_fraction = 0.02;     ///< ignore t < skip_fraction * T for the height test
  std::size_t max_points = 4000;   ///< pairwise scans use an evenly strided subset
};

struct SlitReport {
  double min_nonadjacent_distance = 0.0;
  double min_imag = 0.0;  ///< over t in (0, T]
  double min_height_ratio = 0.0;
  double return_ratio = 0.0;  ///< min of Im gamma(t) over t after the peak height, divided by the peak
  double min_chord_arc = 0.0;
  bool simple_curve_plausible = false;
};

SlitReport slit_diagnostics(const Trace& tr, const DiagnosticThresholds& th = {});

/// Re[(g_t(z) - z) z] averaged over |z| = radius at angles pi/4, pi/2, 3pi/4,
/// with g_t from advance_bw. Equals 2t for the hydrodynamic normalization.
double half_plane_capacity(const DrivingTerm& d, double t, const SolverConfig& cfg, double radius = 1e3);

void write_trace_csv(const Trace& tr, const std::string& path);

/// One polyline per trace plus the real axis, fixed 1000x600 viewBox.
void write_trace_svg(std::span<const Trace> traces, const std::string& path, double stroke_width = 2.0);

}  // namespace loewner
