#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace loewner {

/// An instant written as anchor + offset. Integrators anchor at the nearest
/// breakpoint so that the distance to it keeps full relative precision, which
/// matters for square-root driving terms whose derivative blows up there.
struct TimePoint {
  double anchor = 0.0;
  double offset = 0.0;

  [[nodiscard]] double value() const { return anchor + offset; }
};

struct Constant {
  double value = 0.0;
};

/// base + slope * (t - piece start)
struct LinearSegment {
  double slope = 0.0;
  double base = 0.0;
};

enum class SqrtSide {
  Forward,   ///< base + coeff * sqrt(t - center), center <= piece start
  Backward,  ///< base + coeff * sqrt(center - t), center >= piece end
};

struct SqrtSegment {
  double coeff = 0.0;
  double center = 0.0;
  double base = 0.0;
  SqrtSide side = SqrtSide::Backward;
};

/// Samples joined by straight lines. times.front() and times.back() coincide
/// with the enclosing piece's interval.
struct TabulatedSamples {
  std::vector<double> times;
  std::vector<double> values;
};

using PieceShape = std::variant<Constant, LinearSegment, SqrtSegment, TabulatedSamples>;

struct Piece {
  double start = 0.0;
  double end = 0.0;
  PieceShape shape;
};

/// Default jump allowed between closed-form pieces (scaled by max(1,|value|)).
inline constexpr double kClosedFormContinuity = 1e-9;

/// A real driving function on [0, T]. Evaluation past T returns the terminal
/// value. Instances are immutable once built.
class DrivingTerm {
 public:
  /// Validates and normalizes: zero-slope linear pieces become constants and
  /// adjacent equal constants merge. Throws std::invalid_argument.
  static DrivingTerm from_pieces(std::vector<Piece> pieces,
                                 double continuity_tolerance = kClosedFormContinuity);

  static DrivingTerm constant(double value, double horizon);
  static DrivingTerm linear(double base, double slope, double horizon);
  /// base + coeff * sqrt(center - t) on [0, horizon], center >= horizon.
  static DrivingTerm sqrt_backward(double base, double coeff, double center, double horizon);
  /// base + coeff * sqrt(t - center) on [0, horizon], center <= 0.
  static DrivingTerm sqrt_forward(double base, double coeff, double center, double horizon);
  /// Samples must start at t = 0 and be strictly increasing. The largest jump
  /// between consecutive samples is compared against the tolerance.
  static DrivingTerm tabulated(std::vector<double> times, std::vector<double> values,
                               double continuity_tolerance = std::numeric_limits<double>::infinity());

  [[nodiscard]] double horizon() const { return horizon_; }
  [[nodiscard]] const std::vector<Piece>& pieces() const { return pieces_; }

  /// Throws std::domain_error for t < 0.
  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] double eval(TimePoint tp) const;

  /// Ascending boundaries of the smooth segments, from 0 up to the horizon.
  /// Tabulated pieces contribute every sample time.
  [[nodiscard]] std::span<const double> breakpoints() const { return breakpoints_; }

  /// Largest |left limit - right limit| across piece boundaries.
  [[nodiscard]] double max_jump() const;
  /// Largest |v[i+1] - v[i]| across tabulated samples (0 when there are none).
  [[nodiscard]] double max_sample_jump() const;

  /// True when every piece has a closed form (no tabulated data).
  [[nodiscard]] bool is_closed_form() const;

 private:
  enum class SegmentKind : std::uint8_t { Constant, Linear, SqrtForward, SqrtBackward };
  struct Segment {
    double start;
    double end;
    SegmentKind kind;
    double base;
    double coeff;
    double center;
  };

  DrivingTerm() = default;
  void build_segments();
  [[nodiscard]] std::size_t locate(TimePoint tp) const;
  [[nodiscard]] static double eval_segment(const Segment& s, TimePoint tp);

  double horizon_ = 0.0;
  std::vector<Piece> pieces_;
  std::vector<Segment> segments_;
  std::vector<double> breakpoints_;
};

struct LipHalfEstimate {
  double norm = 0.0;
  bool exact = false;
  std::size_t grid = 0;  ///< sample count used (0 when exact)
};

/// Smallest c with |d(s) - d(t)| <= c sqrt|s - t| on [0, T]. Closed form for a
/// constant, a single linear piece, or a single square-root piece centred on
/// the domain boundary; otherwise the supremum over all sample pairs of a
/// uniform grid refined geometrically towards the breakpoints.
LipHalfEstimate lip_half_norm(const DrivingTerm& d, std::size_t grid);

/// (1/r) d(r^2 t) on [0, T/r^2].
DrivingTerm rescale(const DrivingTerm& d, double r);

/// d(T - t) on [0, T].
DrivingTerm reverse(const DrivingTerm& d);

/// The same term on [0, t_end]. Extends by the terminal value if t_end > T.
DrivingTerm restrict_to(const DrivingTerm& d, double t_end);

/// Piecewise linear through values[k] at t_k = k T / n, n = values.size() - 1.
DrivingTerm interpolate_linear(std::span<const double> values, double horizon);
DrivingTerm interpolate_linear(const DrivingTerm& d, std::size_t n);

/// On [t_k, t_{k+1}]: c_k sqrt(t_{k+1} - t) + v_{k+1}, c_k = (v_k - v_{k+1}) / sqrt(T/n).
DrivingTerm interpolate_sqrt(std::span<const double> values, double horizon);
DrivingTerm interpolate_sqrt(const DrivingTerm& d, std::size_t n);

/// sqrt(kappa) B_t sampled at ceil(resolution * T) steps with std::mt19937_64
/// seeded by `seed` and std::normal_distribution increments.
DrivingTerm brownian(double kappa, std::uint64_t seed, double horizon, double resolution);

/// Two-column `t,value` CSV with a header row.
DrivingTerm read_driving_csv(const std::string& path,
                             double continuity_tolerance = std::numeric_limits<double>::infinity());
/// Writes the native samples of a single tabulated term, or `samples` + 1
/// uniform samples of anything else.
void write_driving_csv(const DrivingTerm& d, const std::string& path, std::size_t samples = 1000);

// Families with their own names in the tools.
namespace family {
/// 3/2 - 3/2 sqrt(1 - 8t) on [0, 1/8]: traces the half circle |z - 1/2| = 1/2.
DrivingTerm circle(double horizon = 0.125);
/// c - c sqrt(1 - t) on [0, horizon <= 1].
DrivingTerm sqrt_one_minus_t(double c, double horizon = 1.0);
/// c sqrt(t) on [0, horizon].
DrivingTerm sqrt_t(double c, double horizon);
}  // namespace family

}  // namespace loewner
