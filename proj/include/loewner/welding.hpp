#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "loewner/driving.hpp"
#include "loewner/flow.hpp"

namespace loewner {

struct HittingRecord {
  double x0 = 0.0;
  double hit_time = 0.0;
  double terminal_value = 0.0;  ///< xi(hit_time)
  double resolution = 0.0;      ///< time uncertainty of hit_time
  bool past_horizon = false;    ///< hit after T, obtained in closed form
};

/// First time the forward real flow from x0 meets the singularity. After the
/// horizon the driving term is frozen at xi(T) and the remaining time is
/// (x(T) - xi(T))^2 / 4. Rejects terms whose norm is provably >= 4.
HittingRecord hitting_time(double x0, const DrivingTerm& d, const SolverConfig& cfg);

struct WeldingPair {
  double x = 0.0;
  double phi_x = 0.0;
  double hit_time = 0.0;
  double residual = 0.0;  ///< |T(x) - T(phi_x)|
};

/// The point on the other side of xi(0) with the same hitting time as x.
/// Returns xi(0) for x = xi(0).
double welding_partner(double x, const DrivingTerm& d, const SolverConfig& cfg);

/// welding_partner for x > xi(0), with the hitting time and residual.
WeldingPair welding_point(double x, const DrivingTerm& d, const SolverConfig& cfg);

struct Triple {
  double x, y, z;
};

struct TripleRatio {
  Triple triple;
  double ratio;  ///< (phi(x) - phi(y)) / (phi(y) - phi(z))
};

struct QuasisymmetryReport {
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  std::vector<TripleRatio> rows;
};

/// All triples x < y < z on lo + k (hi - lo) / intervals with y - x = z - y.
std::vector<Triple> equispaced_triples(double lo, double hi, std::size_t intervals);

/// Each distinct point is welded once; points are processed concurrently.
QuasisymmetryReport quasisymmetry_scan(const DrivingTerm& d, std::span<const Triple> triples,
                                       const SolverConfig& cfg);

/// phi(beta) / phi(alpha), both measured from xi(0). alpha and beta must be on
/// the same side with beta / alpha > 1.
double ratio_check(const DrivingTerm& d, double alpha, double beta, const SolverConfig& cfg);

struct QuasislitGrid {
  double extent = 1.0;          ///< points xi(0) + extent * k / intervals
  std::size_t intervals = 16;
  double cap = 100.0;
};

struct QuasislitResult {
  double m_symmetry = 1.0;  ///< max of r and 1/r, r = (x - xi(0)) / (xi(0) - phi(x))
  double m_triples = 1.0;   ///< max of q and 1/q over equispaced triple ratios q
  double m = 1.0;
  bool pass = false;        ///< m < cap
};

QuasislitResult quasislit_conditions(const DrivingTerm& d, const QuasislitGrid& grid, const SolverConfig& cfg);

struct HittingConstants {
  double k1 = 0.0;  ///< min T / (x0 - xi(0))^2
  double k2 = 0.0;  ///< max T / (x0 - xi(0))^2
};

HittingConstants hitting_constants(const DrivingTerm& d, std::span<const double> x0s, const SolverConfig& cfg);

/// `x,phi_x,T_hit,residual`
void write_welding_csv(std::span<const WeldingPair> rows, const std::string& path);
/// `x,y,z,ratio`
void write_quasisymmetry_csv(const QuasisymmetryReport& rep, const std::string& path);

}  // namespace loewner
