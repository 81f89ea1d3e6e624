#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace loewner {

inline constexpr std::size_t kDefaultRecursionCap = 10'000;

/// h_0 = c, h_n = c - 4 / h_{n-1}. Empty once some h_k with k < n is <= 0.
std::optional<double> h_n(double c, std::size_t n);

/// The zero of h_n, by bisection on (0, 4]. h_n(x) > 0 exactly when x > x_n.
double x_n_root(std::size_t n, double tol = 1e-14);

/// Minimal n <= cap with h_n(c) <= 0.
std::optional<std::size_t> first_nonpositive(double c, std::size_t cap = kDefaultRecursionCap);

/// e_0 = eps, e_n = eps + (4 e_{n-1} / h_{n-1}^2) ln(1 + h_{n-1} / e_{n-1}).
/// Empty unless h_k(c) > 0 for every k < n.
std::optional<double> e_n(double c, double eps, std::size_t n);

struct EpsilonCertificate {
  double c = 0.0;
  double c_used = 0.0;    ///< c, or the midpoint of (x_n*, x_n*+1) when h_n*(c) = 0
  std::size_t n_star = 0; ///< first index with h_n(c) <= 0; 0 if none within the cap
  std::size_t n = 0;      ///< index the certificate is evaluated at
  double h = 0.0;         ///< h_n(c_used) < 0
  double epsilon = 0.0;   ///< e_n(c_used, epsilon) < -h
  double e = 0.0;         ///< e_n(c_used, epsilon)
  bool certified = false; ///< h + e < 0 on re-evaluation
};

/// Largest epsilon on a log-bisection grid with e_n(c', eps) < -h_n(c').
/// Requires 0 < c < 4.
EpsilonCertificate epsilon_bound(double c, std::size_t cap = kDefaultRecursionCap, double tol = 1e-6);

struct RecursionRow {
  std::size_t n;
  std::optional<double> h;
  double x;
  std::optional<double> e;
};

struct RecursionReport {
  double c = 0.0;
  double eps = 0.0;
  std::vector<RecursionRow> rows;  ///< n = 1..N
  std::optional<std::size_t> n_star;
  std::optional<EpsilonCertificate> certificate;  ///< present for 0 < c < 4
};

RecursionReport recursion_report(double c, std::size_t n, double eps, std::size_t cap = kDefaultRecursionCap);

/// `n,h_n,x_n,e_n`; undefined entries are left empty.
void write_recursion_csv(const RecursionReport& rep, const std::string& path);
/// `c,n_star,epsilon`
void write_epsilon_sweep_csv(std::span<const EpsilonCertificate> rows, const std::string& path);

}  // namespace loewner
