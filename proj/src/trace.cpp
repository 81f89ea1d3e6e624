#include "loewner/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "csv_util.hpp"
#include "loewner/errors.hpp"
#include "parallel.hpp"

namespace loewner {

namespace {

double checked_horizon(const DrivingTerm& d) {
  const double T = d.horizon();
  if (!std::isfinite(T) || T <= 0.0) throw std::invalid_argument("trace: driving term needs a finite positive horizon");
  return T;
}

}  // namespace

Trace compose_trace(const DrivingTerm& d, std::size_t n, const SolverConfig& cfg) {
  cfg.validate();
  if (n == 0) throw std::invalid_argument("compose_trace: n must be >= 1");
  const double T = checked_horizon(d);
  const double dt = T / static_cast<double>(n);
  const double lift = 2.0 * std::sqrt(dt);

  std::vector<double> mid(n + 1);
  for (std::size_t j = 1; j <= n; ++j) mid[j] = d((static_cast<double>(j) - 0.5) * dt);

  Trace tr;
  tr.n_steps = n;
  tr.scheme = TraceScheme::Composition;
  tr.samples.resize(n + 1);
  tr.samples[0] = {0.0, Complex(d(0.0), 0.0)};

  detail::parallel_for(n, [&](std::size_t i) {
    const std::size_t k = i + 1;
    Complex w(mid[k], lift);
    for (std::size_t j = k - 1; j >= 1; --j) w = vertical_slit_map(w, mid[j], dt);
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      throw NumericalError(NumericalFailure::NonFiniteState, "compose_trace: non-finite sample");
    tr.samples[k] = {k == n ? T : static_cast<double>(k) * dt, w};
  });
  return tr;
}

double default_tip_lift(const SolverConfig& cfg) { return std::sqrt(cfg.dt) / 10.0; }

Complex tip_by_flow(const DrivingTerm& d, double t, double lift, const SolverConfig& cfg) {
  cfg.validate();
  if (!(lift > 0.0) || !std::isfinite(lift)) throw std::invalid_argument("tip_by_flow: lift must be positive");
  if (!(t >= 0.0) || t > d.horizon()) throw std::invalid_argument("tip_by_flow: t must lie in [0, horizon]");
  if (t == 0.0) return {d(0.0), 0.0};
  const DrivingTerm rev = reverse(restrict_to(d, t));
  return advance_fw(Complex(d(t), lift), rev, t, cfg).z;
}

Trace flow_trace(const DrivingTerm& d, std::size_t n, double lift, const SolverConfig& cfg) {
  cfg.validate();
  if (n == 0) throw std::invalid_argument("flow_trace: n must be >= 1");
  const double T = checked_horizon(d);
  Trace tr;
  tr.n_steps = n;
  tr.scheme = TraceScheme::ForwardFlow;
  tr.samples.resize(n + 1);
  tr.samples[0] = {0.0, Complex(d(0.0), 0.0)};
  detail::parallel_for(n, [&](std::size_t i) {
    const std::size_t k = i + 1;
    const double t = k == n ? T : T * static_cast<double>(k) / static_cast<double>(n);
    tr.samples[k] = {t, tip_by_flow(d, t, lift, cfg)};
  });
  return tr;
}

SlitReport slit_diagnostics(const Trace& tr, const DiagnosticThresholds& th) {
  const auto& s = tr.samples;
  if (s.size() < 3) throw std::invalid_argument("slit_diagnostics: need at least 3 samples");
  const double T = s.back().t;

  SlitReport rep;
  rep.min_imag = std::numeric_limits<double>::infinity();
  rep.min_height_ratio = std::numeric_limits<double>::infinity();
  for (const auto& p : s) {
    if (p.t <= 0.0) continue;
    rep.min_imag = std::min(rep.min_imag, p.z.imag());
    if (p.t >= th.skip_fraction * T) rep.min_height_ratio = std::min(rep.min_height_ratio, p.z.imag() / (2.0 * std::sqrt(p.t)));
  }

  // Descent from the highest point. The discrete trace lags near a singular
  // endpoint, so a curve that lands on the axis shows up as a deep descent
  // rather than a zero height.
  std::size_t peak = 0;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i].z.imag() > s[peak].z.imag()) peak = i;
  double low = s[peak].z.imag();
  for (std::size_t i = peak; i < s.size(); ++i) low = std::min(low, s[i].z.imag());
  rep.return_ratio = s[peak].z.imag() > 0.0 ? low / s[peak].z.imag() : 0.0;

  // Cumulative arc length on the full sample set, pairwise scans on a strided subset.
  std::vector<double> arc(s.size(), 0.0);
  for (std::size_t i = 1; i < s.size(); ++i) arc[i] = arc[i - 1] + std::abs(s[i].z - s[i - 1].z);
  const std::size_t stride = std::max<std::size_t>(1, (s.size() + th.max_points - 1) / std::max<std::size_t>(th.max_points, 1));
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < s.size(); i += stride) idx.push_back(i);
  if (idx.back() != s.size() - 1) idx.push_back(s.size() - 1);

  rep.min_nonadjacent_distance = std::numeric_limits<double>::infinity();
  rep.min_chord_arc = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 2; b < idx.size(); ++b) {
      const double chord = std::abs(s[idx[a]].z - s[idx[b]].z);
      rep.min_nonadjacent_distance = std::min(rep.min_nonadjacent_distance, chord);
      const double len = arc[idx[b]] - arc[idx[a]];
      if (len > 0.0) rep.min_chord_arc = std::min(rep.min_chord_arc, chord / len);
    }
  }
  if (!std::isfinite(rep.min_chord_arc)) rep.min_chord_arc = 1.0;
  rep.simple_curve_plausible = rep.min_height_ratio >= th.min_height_ratio &&
                               rep.return_ratio >= th.min_return_ratio && rep.min_chord_arc >= th.min_chord_arc;
  return rep;
}

double half_plane_capacity(const DrivingTerm& d, double t, const SolverConfig& cfg, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("half_plane_capacity: radius must be positive");
  constexpr double pi = std::numbers::pi;
  double acc = 0.0;
  for (double theta : {pi / 4.0, pi / 2.0, 3.0 * pi / 4.0}) {
    const Complex z = std::polar(radius, theta);
    const auto out = advance_bw(z, d, t, cfg);
    acc += ((out.z - z) * z).real();
  }
  return acc / 3.0;
}

void write_trace_csv(const Trace& tr, const std::string& path) {
  auto os = detail::open_for_write(path);
  os << "t,re,im\n";
  for (const auto& p : tr.samples)
    os << detail::format_number(p.t) << ',' << detail::format_number(p.z.real()) << ','
       << detail::format_number(p.z.imag()) << '\n';
}

void write_trace_svg(std::span<const Trace> traces, const std::string& path, double stroke_width) {
  if (!(stroke_width > 0.0)) throw std::invalid_argument("write_trace_svg: stroke width must be positive");
  constexpr double W = 1000.0, H = 600.0, margin = 40.0;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymax = 0.0;
  for (const auto& tr : traces)
    for (const auto& p : tr.samples) {
      xmin = std::min(xmin, p.z.real());
      xmax = std::max(xmax, p.z.real());
      ymax = std::max(ymax, p.z.imag());
    }
  if (!std::isfinite(xmin)) xmin = -1.0, xmax = 1.0;
  const double span_x = std::max(xmax - xmin, 1e-12), span_y = std::max(ymax, 1e-12);
  const double scale = std::min((W - 2 * margin) / span_x, (H - 2 * margin) / span_y);
  const double cx = 0.5 * (xmin + xmax);
  auto px = [&](double x) { return W / 2 + (x - cx) * scale; };
  auto py = [&](double y) { return H - margin - y * scale; };

  auto os = detail::open_for_write(path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 600\" width=\"1000\" height=\"600\">\n";
  os << "<rect width=\"1000\" height=\"600\" fill=\"white\"/>\n";
  os << "<line x1=\"0\" y1=\"" << detail::format_number(py(0.0), 6) << "\" x2=\"1000\" y2=\""
     << detail::format_number(py(0.0), 6) << "\" stroke=\"#888888\" stroke-width=\""
     << detail::format_number(stroke_width / 2, 6) << "\"/>\n";
  static constexpr const char* palette[] = {"#1f4e9c", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e"};
  for (std::size_t i = 0; i < traces.size(); ++i) {
    os << "<polyline fill=\"none\" stroke=\"" << palette[i % 5] << "\" stroke-width=\""
       << detail::format_number(stroke_width, 6) << "\" points=\"";
    bool first = true;
    for (const auto& p : traces[i].samples) {
      if (!first) os << ' ';
      first = false;
      os << detail::format_number(px(p.z.real()), 7) << ',' << detail::format_number(py(p.z.imag()), 7);
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace loewner
