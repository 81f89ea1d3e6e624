#pragma once

// Reference solutions built from change of variables and fixed-step RK4.
// They share no code with the library integrators.

#include <cmath>
#include <functional>

namespace oracle {

// One classical RK4 step for y' = f(s, y).
inline double rk4(const std::function<double(double, double)>& f, double s, double y, double h) {
  const double k1 = f(s, y);
  const double k2 = f(s + h / 2, y + h / 2 * k1);
  const double k3 = f(s + h / 2, y + h / 2 * k2);
  const double k4 = f(s + h, y + h * k3);
  return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

// Forward flow towards xi(t) = c sqrt(t). With u = (x - xi)^2 and t = s^2,
//   du/ds = -8s - 2 c sign(x0) sqrt(u),
// which is smooth up to the hit u = 0. Returns the hitting time s*^2.
inline double sqrt_t_hit(double c, double x0, double ds = 1e-4) {
  const double sigma = x0 > 0 ? 1.0 : -1.0;
  auto f = [&](double s, double u) { return -8.0 * s - 2.0 * c * sigma * std::sqrt(std::max(u, 0.0)); };
  double s = 0.0, u = x0 * x0;
  ds *= std::abs(x0);
  for (;;) {
    const double next = rk4(f, s, u, ds);
    if (next > 0.0) {
      s += ds;
      u = next;
      continue;
    }
    double lo = 0.0, hi = ds;
    for (int i = 0; i < 200 && hi - lo > 1e-17 * (s + 1); ++i) {
      const double mid = 0.5 * (lo + hi);
      (rk4(f, s, u, mid) > 0.0 ? lo : hi) = mid;
    }
    const double sh = s + 0.5 * (lo + hi);
    return sh * sh;
  }
}

// Welding partner for c sqrt(t): T scales like x^2 on each side.
inline double sqrt_t_phi(double c, double x) {
  const double kp = sqrt_t_hit(c, 1.0), km = sqrt_t_hit(c, -1.0);
  return -x * std::sqrt(kp / km);
}

// Gap w = x - lambda for lambda(t) = c - c sqrt(1 - t) in tau = -ln(1 - t):
//   dw/dtau = 2 e^{-tau} / w - (c / 2) e^{-tau / 2}.
// Returns the gap at tau = 90, or -1 when w reaches 0 first. For c >= 4 the
// gap decays with tau and the returned value is far below any tolerance.
inline double catching_gap(double c, double x0) {
  auto f = [c](double tau, double w) { return 2.0 * std::exp(-tau) / w - 0.5 * c * std::exp(-tau / 2); };
  double tau = 0.0, w = x0;
  while (tau < 90.0) {
    const double h = std::min(1e-3, 0.01 * w * w * std::exp(tau));
    if (h < 1e-300) return -1.0;
    w = rk4(f, tau, w, h);
    if (!(w > 0.0)) return -1.0;
    tau += h;
  }
  return w;
}

// Backward flow of the circle driving term, in closed form.
inline double circle_x(double t) { return 1.5 - 0.5 * std::sqrt(1.0 - 8.0 * t); }

}  // namespace oracle
