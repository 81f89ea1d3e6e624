#include "loewner/driving.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "csv_util.hpp"
#include "loewner/errors.hpp"

namespace loewner {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double tabulated_value(const TabulatedSamples& tab, double t) {
  const auto& ts = tab.times;
  if (t <= ts.front()) return tab.values.front();
  if (t >= ts.back()) return tab.values.back();
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  auto i = static_cast<std::size_t>(it - ts.begin()) - 1;
  double w = (t - ts[i]) / (ts[i + 1] - ts[i]);
  return tab.values[i] + w * (tab.values[i + 1] - tab.values[i]);
}

double piece_value(const Piece& p, double t) {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return c.value; },
          [&](const LinearSegment& l) { return l.base + l.slope * (t - p.start); },
          [&](const SqrtSegment& s) {
            double u = s.side == SqrtSide::Forward ? t - s.center : s.center - t;
            return s.base + s.coeff * std::sqrt(std::max(u, 0.0));
          },
          [&](const TabulatedSamples& tab) { return tabulated_value(tab, t); },
      },
      p.shape);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double grid_time(std::size_t k, std::size_t n, double horizon) {
  if (k == n) return horizon;
  return horizon * static_cast<double>(k) / static_cast<double>(n);
}

std::vector<double> sample_uniform(const DrivingTerm& d, std::size_t n) {
  std::vector<double> v(n + 1);
  for (std::size_t k = 0; k <= n; ++k) v[k] = d(grid_time(k, n, d.horizon()));
  return v;
}

}  // namespace

DrivingTerm DrivingTerm::from_pieces(std::vector<Piece> pieces, double continuity_tolerance) {
  require(!pieces.empty(), "driving term needs at least one piece");
  require(continuity_tolerance >= 0.0, "continuity tolerance must be nonnegative");

  for (auto& p : pieces) {
    require(std::isfinite(p.start) && std::isfinite(p.end) && p.start < p.end,
            "piece interval must be finite with start < end");
    if (auto* l = std::get_if<LinearSegment>(&p.shape)) {
      require(std::isfinite(l->slope) && std::isfinite(l->base), "linear piece must be finite");
      if (l->slope == 0.0) p.shape = Constant{l->base};
    } else if (auto* s = std::get_if<SqrtSegment>(&p.shape)) {
      require(std::isfinite(s->coeff) && std::isfinite(s->base) && std::isfinite(s->center),
              "sqrt piece must be finite");
      if (s->side == SqrtSide::Forward) {
        require(s->center <= p.start, "forward sqrt piece needs center <= start");
      } else {
        require(s->center >= p.end, "backward sqrt piece needs center >= end");
      }
      if (s->coeff == 0.0) p.shape = Constant{s->base};
    } else if (auto* c = std::get_if<Constant>(&p.shape)) {
      require(std::isfinite(c->value), "constant piece must be finite");
    } else {
      const auto& tab = std::get<TabulatedSamples>(p.shape);
      require(tab.times.size() >= 2 && tab.times.size() == tab.values.size(),
              "tabulated piece needs >= 2 (time, value) samples");
      require(tab.times.front() == p.start && tab.times.back() == p.end,
              "tabulated samples must span the piece interval");
      for (std::size_t i = 0; i < tab.times.size(); ++i) {
        require(std::isfinite(tab.times[i]) && std::isfinite(tab.values[i]),
                "tabulated samples must be finite");
        if (i > 0) require(tab.times[i] > tab.times[i - 1], "sample times must be strictly increasing");
      }
    }
  }

  require(pieces.front().start == 0.0, "driving term must start at t = 0");
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    require(pieces[i].end == pieces[i + 1].start, "pieces must be contiguous");
    double left = piece_value(pieces[i], pieces[i].end);
    double right = piece_value(pieces[i + 1], pieces[i + 1].start);
    require(std::abs(left - right) <= continuity_tolerance * std::max(1.0, std::abs(left)),
            "driving term is discontinuous at t = " + std::to_string(pieces[i].end));
  }

  std::vector<Piece> merged;
  for (auto& p : pieces) {
    if (!merged.empty()) {
      auto* a = std::get_if<Constant>(&merged.back().shape);
      auto* b = std::get_if<Constant>(&p.shape);
      if (a && b && a->value == b->value) {
        merged.back().end = p.end;
        continue;
      }
    }
    merged.push_back(std::move(p));
  }

  DrivingTerm d;
  d.pieces_ = std::move(merged);
  d.horizon_ = d.pieces_.back().end;
  d.build_segments();
  return d;
}

void DrivingTerm::build_segments() {
  segments_.clear();
  for (const auto& p : pieces_) {
    std::visit(
        Overloaded{
            [&](const Constant& c) {
              segments_.push_back({p.start, p.end, SegmentKind::Constant, c.value, 0.0, 0.0});
            },
            [&](const LinearSegment& l) {
              segments_.push_back({p.start, p.end, SegmentKind::Linear, l.base, l.slope,
                                   l.base + l.slope * (p.end - p.start)});
            },
            [&](const SqrtSegment& s) {
              auto kind = s.side == SqrtSide::Forward ? SegmentKind::SqrtForward : SegmentKind::SqrtBackward;
              segments_.push_back({p.start, p.end, kind, s.base, s.coeff, s.center});
            },
            [&](const TabulatedSamples& tab) {
              for (std::size_t i = 0; i + 1 < tab.times.size(); ++i) {
                double slope = (tab.values[i + 1] - tab.values[i]) / (tab.times[i + 1] - tab.times[i]);
                // `center` holds the exact right-end sample for end-anchored evaluation.
                segments_.push_back({tab.times[i], tab.times[i + 1], SegmentKind::Linear, tab.values[i], slope,
                                     tab.values[i + 1]});
              }
            },
        },
        p.shape);
  }
  breakpoints_.clear();
  for (const auto& s : segments_) breakpoints_.push_back(s.start);
  breakpoints_.push_back(horizon_);

  double terminal = piece_value(pieces_.back(), horizon_);
  segments_.push_back({horizon_, std::numeric_limits<double>::infinity(), SegmentKind::Constant, terminal, 0.0, 0.0});
}

std::size_t DrivingTerm::locate(TimePoint tp) const {
  double t = tp.value();
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const Segment& s) { return v < s.start; });
  auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - segments_.begin() - 1, 0));
  // Approached from the left: stay on the segment that ends here.
  if (tp.offset < 0.0 && idx > 0 && t <= segments_[idx].start) --idx;
  return idx;
}

double DrivingTerm::eval_segment(const Segment& s, TimePoint tp) {
  switch (s.kind) {
    case SegmentKind::Constant:
      return s.base;
    case SegmentKind::Linear:
      if (tp.anchor == s.end) return s.center + s.coeff * tp.offset;
      return s.base + s.coeff * ((tp.anchor - s.start) + tp.offset);
    case SegmentKind::SqrtForward: {
      double u = (tp.anchor - s.center) + tp.offset;
      return s.base + s.coeff * std::sqrt(std::max(u, 0.0));
    }
    case SegmentKind::SqrtBackward: {
      double u = (s.center - tp.anchor) - tp.offset;
      return s.base + s.coeff * std::sqrt(std::max(u, 0.0));
    }
  }
  return s.base;
}

double DrivingTerm::eval(TimePoint tp) const { return eval_segment(segments_[locate(tp)], tp); }

double DrivingTerm::operator()(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("driving term evaluated at negative time");
  return eval({t, 0.0});
}

double DrivingTerm::max_jump() const {
  double jump = 0.0;
  for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
    jump = std::max(jump, std::abs(piece_value(pieces_[i], pieces_[i].end) -
                                   piece_value(pieces_[i + 1], pieces_[i + 1].start)));
  }
  return jump;
}

double DrivingTerm::max_sample_jump() const {
  double jump = 0.0;
  for (const auto& p : pieces_) {
    if (const auto* tab = std::get_if<TabulatedSamples>(&p.shape)) {
      for (std::size_t i = 0; i + 1 < tab->values.size(); ++i) {
        jump = std::max(jump, std::abs(tab->values[i + 1] - tab->values[i]));
      }
    }
  }
  return jump;
}

bool DrivingTerm::is_closed_form() const {
  return std::none_of(pieces_.begin(), pieces_.end(),
                      [](const Piece& p) { return std::holds_alternative<TabulatedSamples>(p.shape); });
}

DrivingTerm DrivingTerm::constant(double value, double horizon) {
  require(horizon > 0.0, "horizon must be positive");
  return from_pieces({Piece{0.0, horizon, Constant{value}}});
}

DrivingTerm DrivingTerm::linear(double base, double slope, double horizon) {
  require(horizon > 0.0, "horizon must be positive");
  return from_pieces({Piece{0.0, horizon, LinearSegment{slope, base}}});
}

DrivingTerm DrivingTerm::sqrt_backward(double base, double coeff, double center, double horizon) {
  require(horizon > 0.0, "horizon must be positive");
  return from_pieces({Piece{0.0, horizon, SqrtSegment{coeff, center, base, SqrtSide::Backward}}});
}

DrivingTerm DrivingTerm::sqrt_forward(double base, double coeff, double center, double horizon) {
  require(horizon > 0.0, "horizon must be positive");
  return from_pieces({Piece{0.0, horizon, SqrtSegment{coeff, center, base, SqrtSide::Forward}}});
}

DrivingTerm DrivingTerm::tabulated(std::vector<double> times, std::vector<double> values,
                                   double continuity_tolerance) {
  require(times.size() >= 2 && times.size() == values.size(), "need >= 2 samples of equal length");
  require(times.front() == 0.0, "samples must start at t = 0");
  double end = times.back();
  TabulatedSamples tab{std::move(times), std::move(values)};
  auto d = from_pieces({Piece{0.0, end, std::move(tab)}});
  require(d.max_sample_jump() <= continuity_tolerance, "sample jump exceeds continuity tolerance");
  return d;
}

LipHalfEstimate lip_half_norm(const DrivingTerm& d, std::size_t grid) {
  require(grid >= 2, "lip_half_norm needs grid >= 2");
  const auto& pieces = d.pieces();
  const double T = d.horizon();
  if (pieces.size() == 1) {
    const auto& p = pieces.front();
    if (std::holds_alternative<Constant>(p.shape)) return {0.0, true, 0};
    if (const auto* l = std::get_if<LinearSegment>(&p.shape)) return {std::abs(l->slope) * std::sqrt(T), true, 0};
    if (const auto* s = std::get_if<SqrtSegment>(&p.shape)) {
      bool boundary = s->side == SqrtSide::Forward ? s->center == 0.0 : s->center == T;
      if (boundary) return {std::abs(s->coeff), true, 0};
    }
  }

  std::vector<double> ts;
  ts.reserve(grid + 200);
  for (std::size_t j = 0; j < grid; ++j) ts.push_back(grid_time(j, grid - 1, T));
  auto bps = d.breakpoints();
  std::vector<double> refine_at;
  if (bps.size() <= 17) {
    refine_at.assign(bps.begin(), bps.end());
  } else {
    refine_at = {0.0, T};
  }
  for (double b : refine_at) {
    for (int k = 1; k <= 40; ++k) {
      double delta = std::ldexp(T, -k);
      if (b - delta >= 0.0) ts.push_back(b - delta);
      if (b + delta <= T) ts.push_back(b + delta);
    }
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  std::vector<double> vs(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) vs[i] = d(ts[i]);
  double best = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = i + 1; j < ts.size(); ++j) {
      double q = std::abs(vs[j] - vs[i]) / std::sqrt(ts[j] - ts[i]);
      best = std::max(best, q);
    }
  }
  return {best, false, ts.size()};
}

DrivingTerm rescale(const DrivingTerm& d, double r) {
  require(r > 0.0 && std::isfinite(r), "rescale factor must be positive");
  if (r == 1.0) return d;
  const double r2 = r * r;
  std::vector<Piece> out;
  for (const auto& p : d.pieces()) {
    Piece q{p.start / r2, p.end / r2, Constant{}};
    q.shape = std::visit(
        Overloaded{
            [&](const Constant& c) -> PieceShape { return Constant{c.value / r}; },
            [&](const LinearSegment& l) -> PieceShape { return LinearSegment{l.slope * r, l.base / r}; },
            [&](const SqrtSegment& s) -> PieceShape {
              return SqrtSegment{s.coeff, s.center / r2, s.base / r, s.side};
            },
            [&](const TabulatedSamples& tab) -> PieceShape {
              TabulatedSamples t2{tab.times, tab.values};
              for (auto& t : t2.times) t /= r2;
              for (auto& v : t2.values) v /= r;
              return t2;
            },
        },
        p.shape);
    out.push_back(std::move(q));
  }
  return DrivingTerm::from_pieces(std::move(out), std::numeric_limits<double>::infinity());
}

DrivingTerm reverse(const DrivingTerm& d) {
  const double T = d.horizon();
  std::vector<Piece> out;
  const auto& pieces = d.pieces();
  for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
    const auto& p = *it;
    Piece q{T - p.end, T - p.start, Constant{}};
    q.shape = std::visit(
        Overloaded{
            [&](const Constant& c) -> PieceShape { return c; },
            [&](const LinearSegment& l) -> PieceShape {
              return LinearSegment{-l.slope, l.base + l.slope * (p.end - p.start)};
            },
            [&](const SqrtSegment& s) -> PieceShape {
              auto side = s.side == SqrtSide::Forward ? SqrtSide::Backward : SqrtSide::Forward;
              return SqrtSegment{s.coeff, T - s.center, s.base, side};
            },
            [&](const TabulatedSamples& tab) -> PieceShape {
              TabulatedSamples t2;
              for (std::size_t i = tab.times.size(); i-- > 0;) {
                t2.times.push_back(T - tab.times[i]);
                t2.values.push_back(tab.values[i]);
              }
              return t2;
            },
        },
        p.shape);
    out.push_back(std::move(q));
  }
  return DrivingTerm::from_pieces(std::move(out), std::numeric_limits<double>::infinity());
}

DrivingTerm restrict_to(const DrivingTerm& d, double t_end) {
  require(t_end > 0.0 && std::isfinite(t_end), "restriction end must be positive");
  const double T = d.horizon();
  std::vector<Piece> out;
  if (t_end >= T) {
    out = d.pieces();
    if (t_end > T) out.push_back(Piece{T, t_end, Constant{d(T)}});
    return DrivingTerm::from_pieces(std::move(out), std::numeric_limits<double>::infinity());
  }
  for (const auto& p : d.pieces()) {
    if (p.start >= t_end) break;
    Piece q = p;
    if (q.end > t_end) {
      q.end = t_end;
      if (auto* tab = std::get_if<TabulatedSamples>(&q.shape)) {
        double v_end = tabulated_value(*tab, t_end);
        auto it = std::lower_bound(tab->times.begin(), tab->times.end(), t_end);
        auto keep = static_cast<std::size_t>(it - tab->times.begin());
        tab->times.resize(keep);
        tab->values.resize(keep);
        tab->times.push_back(t_end);
        tab->values.push_back(v_end);
      }
    }
    out.push_back(std::move(q));
  }
  return DrivingTerm::from_pieces(std::move(out), std::numeric_limits<double>::infinity());
}

DrivingTerm interpolate_linear(std::span<const double> values, double horizon) {
  require(values.size() >= 2, "interpolation needs n >= 1");
  require(horizon > 0.0, "horizon must be positive");
  const std::size_t n = values.size() - 1;
  std::vector<Piece> out;
  for (std::size_t k = 0; k < n; ++k) {
    double a = grid_time(k, n, horizon);
    double b = grid_time(k + 1, n, horizon);
    out.push_back(Piece{a, b, LinearSegment{(values[k + 1] - values[k]) / (b - a), values[k]}});
  }
  return DrivingTerm::from_pieces(std::move(out));
}

DrivingTerm interpolate_linear(const DrivingTerm& d, std::size_t n) {
  require(n >= 1, "interpolation needs n >= 1");
  auto v = sample_uniform(d, n);
  return interpolate_linear(v, d.horizon());
}

DrivingTerm interpolate_sqrt(std::span<const double> values, double horizon) {
  require(values.size() >= 2, "interpolation needs n >= 1");
  require(horizon > 0.0, "horizon must be positive");
  const std::size_t n = values.size() - 1;
  std::vector<Piece> out;
  for (std::size_t k = 0; k < n; ++k) {
    double a = grid_time(k, n, horizon);
    double b = grid_time(k + 1, n, horizon);
    double coeff = (values[k] - values[k + 1]) / std::sqrt(b - a);
    out.push_back(Piece{a, b, SqrtSegment{coeff, b, values[k + 1], SqrtSide::Backward}});
  }
  return DrivingTerm::from_pieces(std::move(out));
}

DrivingTerm interpolate_sqrt(const DrivingTerm& d, std::size_t n) {
  require(n >= 1, "interpolation needs n >= 1");
  auto v = sample_uniform(d, n);
  return interpolate_sqrt(v, d.horizon());
}

DrivingTerm brownian(double kappa, std::uint64_t seed, double horizon, double resolution) {
  require(kappa >= 0.0 && std::isfinite(kappa), "kappa must be nonnegative");
  require(horizon > 0.0 && std::isfinite(horizon), "horizon must be positive");
  require(resolution >= 1.0, "resolution must be >= 1 sample per unit time");
  if (kappa == 0.0) return DrivingTerm::constant(0.0, horizon);
  const auto n = static_cast<std::size_t>(std::ceil(resolution * horizon));
  const double dt = horizon / static_cast<double>(n);
  const double scale = std::sqrt(kappa * dt);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> ts(n + 1), vs(n + 1);
  vs[0] = 0.0;
  for (std::size_t k = 0; k <= n; ++k) ts[k] = grid_time(k, n, horizon);
  for (std::size_t k = 1; k <= n; ++k) vs[k] = vs[k - 1] + scale * normal(rng);
  return DrivingTerm::tabulated(std::move(ts), std::move(vs));
}

DrivingTerm read_driving_csv(const std::string& path, double continuity_tolerance) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open driving CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty driving CSV: " + path);
  if (detail::split_csv_line(line).size() != 2) throw std::invalid_argument("driving CSV needs header `t,value`");
  std::vector<double> ts, vs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != 2) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected two columns");
    }
    ts.push_back(detail::parse_double(fields[0]));
    vs.push_back(detail::parse_double(fields[1]));
  }
  return DrivingTerm::tabulated(std::move(ts), std::move(vs), continuity_tolerance);
}

void write_driving_csv(const DrivingTerm& d, const std::string& path, std::size_t samples) {
  auto out = detail::open_for_write(path);
  out << "t,value\n";
  const auto& pieces = d.pieces();
  if (pieces.size() == 1 && std::holds_alternative<TabulatedSamples>(pieces.front().shape)) {
    const auto& tab = std::get<TabulatedSamples>(pieces.front().shape);
    for (std::size_t i = 0; i < tab.times.size(); ++i) {
      out << detail::format_number(tab.times[i], 17) << ',' << detail::format_number(tab.values[i], 17) << '\n';
    }
  } else {
    require(samples >= 1, "need at least one sample interval");
    for (std::size_t k = 0; k <= samples; ++k) {
      double t = grid_time(k, samples, d.horizon());
      out << detail::format_number(t, 17) << ',' << detail::format_number(d(t), 17) << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

namespace family {

DrivingTerm circle(double horizon) {
  require(horizon > 0.0 && horizon <= 0.125, "circle family lives on [0, 1/8]");
  // 3/2 - 3/2 sqrt(1 - 8t) = 3/2 - 3 sqrt(2) sqrt(1/8 - t). The coefficient is
  // moved by a few ulps at most so that lambda(0) evaluates to exactly 0.
  double coeff = -3.0 * std::sqrt(2.0);
  const double root = std::sqrt(0.125);
  for (double toward : {-4.0, -5.0}) {
    double c = coeff;
    for (int i = 0; i < 4 && 1.5 + c * root != 0.0; ++i) c = std::nextafter(c, toward);
    if (1.5 + c * root == 0.0) {
      coeff = c;
      break;
    }
  }
  return DrivingTerm::sqrt_backward(1.5, coeff, 0.125, horizon);
}

DrivingTerm sqrt_one_minus_t(double c, double horizon) {
  require(horizon > 0.0 && horizon <= 1.0, "c - c sqrt(1 - t) lives on [0, 1]");
  return DrivingTerm::sqrt_backward(c, -c, 1.0, horizon);
}

DrivingTerm sqrt_t(double c, double horizon) { return DrivingTerm::sqrt_forward(0.0, c, 0.0, horizon); }

}  // namespace family

}  // namespace loewner
