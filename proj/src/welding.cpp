#include "loewner/welding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "csv_util.hpp"
#include "loewner/errors.hpp"
#include "parallel.hpp"

namespace loewner {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxExpansions = 60;
constexpr int kMaxBisections = 200;
constexpr double kBracketWidth = 1e-12;  // relative, on the distance from xi(0)

// A sampled estimate never exceeds the true norm, so an estimate >= 4 proves
// the term is outside the range where every point is eventually hit.
void require_subcritical(const DrivingTerm& d) {
  const auto est = lip_half_norm(d, 64);
  if (est.norm >= 4.0)
    throw std::invalid_argument("welding: driving term has Lip(1/2) norm " + detail::format_number(est.norm) +
                                " >= 4");
}

double hit(double x0, const DrivingTerm& d, const SolverConfig& cfg) { return hitting_time(x0, d, cfg).hit_time; }

// keys is sorted and contains x.
double lookup(const std::vector<double>& keys, const std::vector<double>& vals, double x) {
  auto it = std::lower_bound(keys.begin(), keys.end(), x);
  return vals[static_cast<std::size_t>(it - keys.begin())];
}

std::vector<double> weld_points(const DrivingTerm& d, const std::vector<double>& xs, const SolverConfig& cfg) {
  std::vector<double> phi(xs.size());
  detail::parallel_for(xs.size(), [&](std::size_t i) { phi[i] = welding_partner(xs[i], d, cfg); });
  return phi;
}

}  // namespace

HittingRecord hitting_time(double x0, const DrivingTerm& d, const SolverConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(x0)) throw std::invalid_argument("hitting_time: x0 must be finite");
  if (x0 == d(0.0)) throw std::invalid_argument("hitting_time: x0 equals xi(0)");
  require_subcritical(d);

  const double T = d.horizon();
  RealFlowOutcome out;
  try {
    out = advance_fwr(x0, d, T, cfg);
  } catch (const NumericalError& e) {
    if (e.kind() == NumericalFailure::StepLimitExceeded)
      throw NumericalError(NumericalFailure::NoHitWithinBudget, "hitting_time: no hit from x0 = " +
                                                                    detail::format_number(x0) + " within max_steps");
    throw;
  }

  HittingRecord rec;
  rec.x0 = x0;
  if (out.caught()) {
    rec.hit_time = out.catch_time;
    rec.resolution = std::max(std::abs(out.catch_time - out.t), 4.0 * kEps * out.catch_time);
  } else {
    const double g = out.x - d(T);
    rec.hit_time = T + g * g / 4.0;
    rec.past_horizon = true;
    rec.resolution = std::max(cfg.rtol, 4.0 * kEps) * rec.hit_time;
  }
  rec.terminal_value = d(rec.hit_time);
  return rec;
}

double welding_partner(double x, const DrivingTerm& d, const SolverConfig& cfg) {
  const double xi0 = d(0.0);
  if (!std::isfinite(x)) throw std::invalid_argument("welding: x must be finite");
  if (x == xi0) return xi0;

  const double side = x > xi0 ? 1.0 : -1.0;
  const double target = hit(x, d, cfg);
  auto other = [&](double r) { return hit(xi0 - side * r, d, cfg); };

  // T grows like r^2 on each side, so scale the mirror point by sqrt(T ratio)
  // and bracket by a factor 4 in T, expanding geometrically if needed.
  const double r0 = std::abs(x - xi0);
  const double guess = r0 * std::sqrt(target / other(r0));
  double lo = guess / 2.0, hi = guess * 2.0;
  for (int k = 0; other(lo) >= target; ++k) {
    if (k == kMaxExpansions) throw NumericalError(NumericalFailure::BracketFailure, "welding: lower bracket not found");
    lo /= 2.0;
  }
  for (int k = 0; other(hi) <= target; ++k) {
    if (k == kMaxExpansions) throw NumericalError(NumericalFailure::BracketFailure, "welding: upper bracket not found");
    hi *= 2.0;
  }
  for (int k = 0; k < kMaxBisections && hi - lo > kBracketWidth * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (other(mid) < target ? lo : hi) = mid;
  }
  return xi0 - side * 0.5 * (lo + hi);
}

WeldingPair welding_point(double x, const DrivingTerm& d, const SolverConfig& cfg) {
  if (!(x > d(0.0))) throw std::invalid_argument("welding_point: x must exceed xi(0)");
  WeldingPair p;
  p.x = x;
  p.phi_x = welding_partner(x, d, cfg);
  p.hit_time = hit(x, d, cfg);
  p.residual = std::abs(p.hit_time - hit(p.phi_x, d, cfg));
  return p;
}

std::vector<Triple> equispaced_triples(double lo, double hi, std::size_t intervals) {
  if (!(hi > lo) || intervals < 2) throw std::invalid_argument("equispaced_triples: need lo < hi and intervals >= 2");
  const double h = (hi - lo) / static_cast<double>(intervals);
  auto at = [&](std::size_t k) { return k == intervals ? hi : lo + h * static_cast<double>(k); };
  std::vector<Triple> out;
  for (std::size_t i = 0; i < intervals; ++i)
    for (std::size_t s = 1; i + 2 * s <= intervals; ++s) out.push_back({at(i), at(i + s), at(i + 2 * s)});
  return out;
}

QuasisymmetryReport quasisymmetry_scan(const DrivingTerm& d, std::span<const Triple> triples,
                                       const SolverConfig& cfg) {
  cfg.validate();
  if (triples.empty()) throw std::invalid_argument("quasisymmetry_scan: no triples");
  const double xi0 = d(0.0);
  std::vector<double> pts;
  for (const auto& t : triples) {
    if (!(t.x >= xi0 && t.x < t.y && t.y < t.z))
      throw std::invalid_argument("quasisymmetry_scan: triples need xi(0) <= x < y < z");
    if (std::abs((t.y - t.x) - (t.z - t.y)) > 1e-9 * (t.z - t.x))
      throw std::invalid_argument("quasisymmetry_scan: y must be the midpoint of x and z");
    pts.insert(pts.end(), {t.x, t.y, t.z});
  }
  require_subcritical(d);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const auto phi = weld_points(d, pts, cfg);

  QuasisymmetryReport rep;
  rep.max_ratio = 0.0;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& t : triples) {
    const double px = lookup(pts, phi, t.x), py = lookup(pts, phi, t.y), pz = lookup(pts, phi, t.z);
    const double q = (px - py) / (py - pz);
    if (!std::isfinite(q) || !(q > 0.0))
      throw NumericalError(NumericalFailure::NonFiniteState, "quasisymmetry_scan: ratio is not finite and positive");
    rep.rows.push_back({t, q});
    rep.max_ratio = std::max(rep.max_ratio, q);
    rep.min_ratio = std::min(rep.min_ratio, q);
  }
  return rep;
}

double ratio_check(const DrivingTerm& d, double alpha, double beta, const SolverConfig& cfg) {
  cfg.validate();
  const double xi0 = d(0.0);
  const double a = alpha - xi0, b = beta - xi0;
  if (a == 0.0 || b == 0.0) throw std::invalid_argument("ratio_check: alpha and beta must differ from xi(0)");
  if ((a > 0.0) != (b > 0.0)) throw std::invalid_argument("ratio_check: alpha and beta must be on the same side");
  if (!(b / a > 1.0)) throw std::invalid_argument("ratio_check: need beta / alpha > 1");
  require_subcritical(d);
  return (welding_partner(beta, d, cfg) - xi0) / (welding_partner(alpha, d, cfg) - xi0);
}

QuasislitResult quasislit_conditions(const DrivingTerm& d, const QuasislitGrid& grid, const SolverConfig& cfg) {
  cfg.validate();
  if (!(grid.extent > 0.0) || grid.intervals < 2 || !(grid.cap > 1.0))
    throw std::invalid_argument("quasislit_conditions: need extent > 0, intervals >= 2, cap > 1");
  require_subcritical(d);
  const double xi0 = d(0.0);
  const std::size_t n = grid.intervals;

  std::vector<double> xs(n + 1);
  for (std::size_t k = 0; k <= n; ++k) xs[k] = k == n ? xi0 + grid.extent : xi0 + grid.extent * static_cast<double>(k) / static_cast<double>(n);
  const auto phi = weld_points(d, xs, cfg);

  QuasislitResult res;
  for (std::size_t k = 1; k <= n; ++k) {
    const double r = (xs[k] - xi0) / (xi0 - phi[k]);
    res.m_symmetry = std::max({res.m_symmetry, r, 1.0 / r});
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 1; i + 2 * s <= n; ++s) {
      const double q = (phi[i] - phi[i + s]) / (phi[i + s] - phi[i + 2 * s]);
      res.m_triples = std::max({res.m_triples, q, 1.0 / q});
    }
  res.m = std::max(res.m_symmetry, res.m_triples);
  if (!std::isfinite(res.m)) throw NumericalError(NumericalFailure::NonFiniteState, "quasislit_conditions: M is not finite");
  res.pass = res.m < grid.cap;
  return res;
}

HittingConstants hitting_constants(const DrivingTerm& d, std::span<const double> x0s, const SolverConfig& cfg) {
  if (x0s.empty()) throw std::invalid_argument("hitting_constants: no points");
  const double xi0 = d(0.0);
  std::vector<double> k(x0s.size());
  detail::parallel_for(x0s.size(), [&](std::size_t i) {
    const double r = x0s[i] - xi0;
    k[i] = hit(x0s[i], d, cfg) / (r * r);
  });
  const auto [mn, mx] = std::minmax_element(k.begin(), k.end());
  return {*mn, *mx};
}

void write_welding_csv(std::span<const WeldingPair> rows, const std::string& path) {
  auto os = detail::open_for_write(path);
  os << "x,phi_x,T_hit,residual\n";
  for (const auto& r : rows)
    os << detail::format_number(r.x) << ',' << detail::format_number(r.phi_x) << ','
       << detail::format_number(r.hit_time) << ',' << detail::format_number(r.residual) << '\n';
}

void write_quasisymmetry_csv(const QuasisymmetryReport& rep, const std::string& path) {
  auto os = detail::open_for_write(path);
  os << "x,y,z,ratio\n";
  for (const auto& r : rep.rows)
    os << detail::format_number(r.triple.x) << ',' << detail::format_number(r.triple.y) << ','
       << detail::format_number(r.triple.z) << ',' << detail::format_number(r.ratio) << '\n';
}

}  // namespace loewner
