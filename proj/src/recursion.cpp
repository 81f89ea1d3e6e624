#include "loewner/recursion.hpp"

#include <cmath>
#include <stdexcept>

#include "csv_util.hpp"

namespace loewner {

namespace {

constexpr double kZeroTolerance = 1e-12;  // |h_n*(c)| below this counts as h_n*(c) = 0
constexpr double kLogEpsFloor = -690.0;   // ln(1e-300)

void require_positive(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("recursion: c must be positive and finite");
}

}  // namespace

std::optional<double> h_n(double c, std::size_t n) {
  require_positive(c);
  double h = c;
  for (std::size_t k = 1; k <= n; ++k) {
    if (h <= 0.0) return std::nullopt;
    h = c - 4.0 / h;
  }
  return h;
}

double x_n_root(std::size_t n, double tol) {
  if (n == 0) throw std::invalid_argument("x_n_root: n must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("x_n_root: tol must be positive");
  auto above = [n](double x) {
    const auto h = h_n(x, n);
    return h && *h > 0.0;
  };
  double lo = 0.0, hi = 4.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (above(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<std::size_t> first_nonpositive(double c, std::size_t cap) {
  require_positive(c);
  double h = c;
  for (std::size_t n = 1; n <= cap; ++n) {
    h = c - 4.0 / h;
    if (h <= 0.0) return n;
  }
  return std::nullopt;
}

std::optional<double> e_n(double c, double eps, std::size_t n) {
  require_positive(c);
  if (!(eps > 0.0)) throw std::invalid_argument("e_n: eps must be positive");
  double h = c, e = eps;
  for (std::size_t k = 1; k <= n; ++k) {
    if (h <= 0.0) return std::nullopt;
    e = eps + (4.0 * e / (h * h)) * std::log1p(h / e);
    h = c - 4.0 / h;
  }
  return e;
}

EpsilonCertificate epsilon_bound(double c, std::size_t cap, double tol) {
  if (!(c > 0.0 && c < 4.0)) throw std::invalid_argument("epsilon_bound: c must lie in (0, 4)");
  if (!(tol > 0.0)) throw std::invalid_argument("epsilon_bound: tol must be positive");
  EpsilonCertificate cert;
  cert.c = c;
  cert.c_used = c;
  const auto n_star = first_nonpositive(c, cap);
  if (!n_star) return cert;

  cert.n_star = *n_star;
  cert.n = *n_star;
  cert.h = *h_n(c, cert.n);
  if (std::abs(cert.h) <= kZeroTolerance) {
    cert.c_used = 0.5 * (x_n_root(cert.n) + x_n_root(cert.n + 1));
    cert.n += 1;
    const auto h = h_n(cert.c_used, cert.n);
    if (!h || !(*h < 0.0)) return cert;
    cert.h = *h;
  }

  auto holds = [&](double log_eps) {
    const auto e = e_n(cert.c_used, std::exp(log_eps), cert.n);
    return e && *e < -cert.h;
  };
  double lo = kLogEpsFloor, hi = std::log(-cert.h);
  if (!holds(lo)) return cert;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
  }
  cert.epsilon = std::exp(lo);
  cert.e = *e_n(cert.c_used, cert.epsilon, cert.n);
  cert.certified = cert.h + cert.e < 0.0;
  return cert;
}

RecursionReport recursion_report(double c, std::size_t n, double eps, std::size_t cap) {
  require_positive(c);
  if (n == 0) throw std::invalid_argument("recursion_report: n must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("recursion_report: eps must be positive");
  RecursionReport rep;
  rep.c = c;
  rep.eps = eps;
  double h = c, e = eps;
  bool defined = true;
  for (std::size_t k = 1; k <= n; ++k) {
    if (defined && h <= 0.0) defined = false;
    RecursionRow row{k, std::nullopt, x_n_root(k), std::nullopt};
    if (defined) {
      e = eps + (4.0 * e / (h * h)) * std::log1p(h / e);
      h = c - 4.0 / h;
      row.h = h;
      row.e = e;
    }
    rep.rows.push_back(row);
  }
  rep.n_star = first_nonpositive(c, cap);
  if (c < 4.0) rep.certificate = epsilon_bound(c, cap);
  return rep;
}

void write_recursion_csv(const RecursionReport& rep, const std::string& path) {
  auto os = detail::open_for_write(path);
  os << "n,h_n,x_n,e_n\n";
  for (const auto& r : rep.rows) {
    os << r.n << ',';
    if (r.h) os << detail::format_number(*r.h);
    os << ',' << detail::format_number(r.x) << ',';
    if (r.e) os << detail::format_number(*r.e);
    os << '\n';
  }
}

void write_epsilon_sweep_csv(std::span<const EpsilonCertificate> rows, const std::string& path) {
  auto os = detail::open_for_write(path);
  os << "c,n_star,epsilon\n";
  for (const auto& r : rows) {
    os << detail::format_number(r.c) << ',';
    if (r.n_star > 0) os << r.n_star;
    os << ',' << detail::format_number(r.epsilon) << '\n';
  }
}

}  // namespace loewner
