#include "loewner/loewner.h"

#include <cmath>
#include <exception>
#include <limits>
#include <new>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "loewner/driving.hpp"
#include "loewner/errors.hpp"
#include "loewner/flow.hpp"
#include "loewner/recursion.hpp"
#include "loewner/trace.hpp"
#include "loewner/welding.hpp"

struct lw_driving {
  loewner::DrivingTerm term;
};

struct lw_trace {
  loewner::Trace trace;
};

namespace {

thread_local std::string g_last_error;

lw_status fail(lw_status s, const char* what) {
  g_last_error = what;
  return s;
}

lw_status from_numerical(loewner::NumericalFailure kind) {
  switch (kind) {
    case loewner::NumericalFailure::StepLimitExceeded: return LW_STEP_LIMIT;
    case loewner::NumericalFailure::NonFiniteState: return LW_NONFINITE;
    case loewner::NumericalFailure::NoHitWithinBudget: return LW_NO_HIT;
    case loewner::NumericalFailure::BracketFailure: return LW_BRACKET;
  }
  return LW_INTERNAL;
}

template <class Fn>
lw_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return LW_OK;
  } catch (const loewner::NumericalError& e) {
    return fail(from_numerical(e.kind()), e.what());
  } catch (const loewner::IoError& e) {
    return fail(LW_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(LW_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(LW_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(LW_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LW_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LW_INTERNAL, e.what());
  } catch (...) {
    return fail(LW_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

loewner::SolverConfig to_config(const lw_solver_config* c) {
  loewner::SolverConfig cfg;
  if (!c) return cfg;
  cfg.dt = c->dt;
  cfg.eps_sing = c->eps_sing;
  cfg.gap_fraction = c->gap_fraction;
  cfg.rtol = c->rtol;
  cfg.max_steps = c->max_steps;
  require(c->scheme == LW_SCHEME_RK4 || c->scheme == LW_SCHEME_CLOSED_FORM, "unknown scheme");
  cfg.scheme = c->scheme == LW_SCHEME_RK4 ? loewner::Scheme::Rk4Adaptive : loewner::Scheme::ClosedFormPiecewise;
  cfg.validate();
  return cfg;
}

const loewner::DrivingTerm& term(const lw_driving* d) {
  require(d != nullptr, "null driving term");
  return d->term;
}

lw_status make_driving(lw_driving** out, auto&& build) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = new lw_driving{build()};
  });
}

loewner::Trajectory want_trajectory(const char* path) {
  return path ? loewner::Trajectory::Record : loewner::Trajectory::Skip;
}

std::vector<loewner::Triple> to_triples(const double* xyz, std::size_t count) {
  require(xyz != nullptr || count == 0, "null triple array");
  std::vector<loewner::Triple> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = {xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]};
  return out;
}

loewner::EpsilonCertificate from_c(const lw_epsilon_certificate& c) {
  return {c.c, c.c_used, c.n_star, c.n, c.h, c.epsilon, c.e, c.certified != 0};
}

}  // namespace

extern "C" {

void lw_solver_config_default(lw_solver_config* cfg) {
  if (!cfg) return;
  const loewner::SolverConfig d;
  *cfg = {d.dt, d.eps_sing, d.gap_fraction, d.rtol, d.max_steps, LW_SCHEME_RK4};
}

const char* lw_last_error(void) { return g_last_error.c_str(); }

const char* lw_status_name(lw_status status) {
  switch (status) {
    case LW_OK: return "ok";
    case LW_INVALID_ARGUMENT: return "invalid argument";
    case LW_STEP_LIMIT: return "step limit exceeded";
    case LW_NONFINITE: return "non-finite state";
    case LW_NO_HIT: return "no hit within budget";
    case LW_BRACKET: return "bracket failure";
    case LW_IO: return "i/o error";
    case LW_INTERNAL: return "internal error";
  }
  return "unknown status";
}

lw_status lw_driving_constant(double value, double horizon, lw_driving** out) {
  return make_driving(out, [&] { return loewner::DrivingTerm::constant(value, horizon); });
}

lw_status lw_driving_linear(double base, double slope, double horizon, lw_driving** out) {
  return make_driving(out, [&] { return loewner::DrivingTerm::linear(base, slope, horizon); });
}

lw_status lw_driving_circle(double horizon, lw_driving** out) {
  return make_driving(out, [&] { return loewner::family::circle(horizon); });
}

lw_status lw_driving_sqrt_one_minus_t(double c, double horizon, lw_driving** out) {
  return make_driving(out, [&] { return loewner::family::sqrt_one_minus_t(c, horizon); });
}

lw_status lw_driving_sqrt_t(double c, double horizon, lw_driving** out) {
  return make_driving(out, [&] { return loewner::family::sqrt_t(c, horizon); });
}

lw_status lw_driving_brownian(double kappa, uint64_t seed, double horizon, double resolution, lw_driving** out) {
  return make_driving(out, [&] { return loewner::brownian(kappa, seed, horizon, resolution); });
}

lw_status lw_driving_tabulated(const double* times, const double* values, size_t count, lw_driving** out) {
  return make_driving(out, [&] {
    require(times && values, "null sample arrays");
    return loewner::DrivingTerm::tabulated({times, times + count}, {values, values + count});
  });
}

lw_status lw_driving_read_csv(const char* path, lw_driving** out) {
  return make_driving(out, [&] {
    require(path != nullptr, "null path");
    return loewner::read_driving_csv(path);
  });
}

lw_status lw_driving_write_csv(const lw_driving* d, const char* path, size_t samples) {
  return guarded([&] {
    require(path != nullptr, "null path");
    loewner::write_driving_csv(term(d), path, samples);
  });
}

lw_status lw_driving_rescale(const lw_driving* d, double r, lw_driving** out) {
  return make_driving(out, [&] { return loewner::rescale(term(d), r); });
}

lw_status lw_driving_reverse(const lw_driving* d, lw_driving** out) {
  return make_driving(out, [&] { return loewner::reverse(term(d)); });
}

lw_status lw_driving_restrict(const lw_driving* d, double t_end, lw_driving** out) {
  return make_driving(out, [&] { return loewner::restrict_to(term(d), t_end); });
}

lw_status lw_driving_eval(const lw_driving* d, double t, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = term(d)(t);
  });
}

lw_status lw_driving_horizon(const lw_driving* d, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = term(d).horizon();
  });
}

lw_status lw_driving_lip_half_norm(const lw_driving* d, size_t grid, double* norm, int* exact) {
  return guarded([&] {
    require(norm != nullptr, "null output pointer");
    const auto est = loewner::lip_half_norm(term(d), grid);
    *norm = est.norm;
    if (exact) *exact = est.exact ? 1 : 0;
  });
}

void lw_driving_free(lw_driving* d) { delete d; }

lw_status lw_advance_real(lw_direction dir, double x0, const lw_driving* d, double t_end,
                          const lw_solver_config* cfg, const char* trajectory_csv, lw_real_outcome* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    require(dir == LW_BACKWARD || dir == LW_FORWARD, "unknown direction");
    const auto c = to_config(cfg);
    const auto rec = want_trajectory(trajectory_csv);
    const auto r = dir == LW_BACKWARD ? loewner::advance_bwr(x0, term(d), t_end, c, rec)
                                      : loewner::advance_fwr(x0, term(d), t_end, c, rec);
    if (trajectory_csv) loewner::write_trajectory_csv(r, trajectory_csv);
    *out = {r.caught() ? 1 : 0, r.t, r.x, r.gap, r.catch_time, r.catch_value, r.steps};
  });
}

lw_status lw_advance_complex(lw_direction dir, double re, double im, const lw_driving* d, double t_end,
                             const lw_solver_config* cfg, const char* trajectory_csv, lw_complex_outcome* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    require(dir == LW_BACKWARD || dir == LW_FORWARD, "unknown direction");
    const auto c = to_config(cfg);
    const auto rec = want_trajectory(trajectory_csv);
    const loewner::Complex z0(re, im);
    const auto r = dir == LW_BACKWARD ? loewner::advance_bw(z0, term(d), t_end, c, rec)
                                      : loewner::advance_fw(z0, term(d), t_end, c, rec);
    if (trajectory_csv) loewner::write_trajectory_csv(r, trajectory_csv);
    *out = {r.z.real(), r.z.imag(), r.t, r.swallowed ? 1 : 0, r.swallow_time, r.steps};
  });
}

lw_status lw_vertical_slit_map(double re, double im, double xi, double dt, double* out_re, double* out_im) {
  return guarded([&] {
    require(out_re && out_im, "null output pointer");
    const auto w = loewner::vertical_slit_map({re, im}, xi, dt);
    *out_re = w.real();
    *out_im = w.imag();
  });
}

lw_status lw_compose_trace(const lw_driving* d, size_t n, const lw_solver_config* cfg, lw_trace** out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = new lw_trace{loewner::compose_trace(term(d), n, to_config(cfg))};
  });
}

lw_status lw_flow_trace(const lw_driving* d, size_t n, double lift, const lw_solver_config* cfg, lw_trace** out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    const auto c = to_config(cfg);
    *out = new lw_trace{loewner::flow_trace(term(d), n, lift > 0.0 ? lift : loewner::default_tip_lift(c), c)};
  });
}

lw_status lw_tip_by_flow(const lw_driving* d, double t, double lift, const lw_solver_config* cfg, double* re,
                         double* im) {
  return guarded([&] {
    require(re && im, "null output pointer");
    const auto c = to_config(cfg);
    const auto z = loewner::tip_by_flow(term(d), t, lift > 0.0 ? lift : loewner::default_tip_lift(c), c);
    *re = z.real();
    *im = z.imag();
  });
}

size_t lw_trace_size(const lw_trace* tr) { return tr ? tr->trace.samples.size() : 0; }

lw_status lw_trace_sample(const lw_trace* tr, size_t i, double* t, double* re, double* im) {
  return guarded([&] {
    require(tr != nullptr, "null trace");
    require(t && re && im, "null output pointer");
    require(i < tr->trace.samples.size(), "sample index out of range");
    const auto& s = tr->trace.samples[i];
    *t = s.t;
    *re = s.z.real();
    *im = s.z.imag();
  });
}

lw_status lw_slit_diagnostics(const lw_trace* tr, lw_slit_report* out) {
  return guarded([&] {
    require(tr && out, "null pointer");
    const auto r = loewner::slit_diagnostics(tr->trace);
    *out = {r.min_nonadjacent_distance, r.min_imag, r.min_height_ratio, r.return_ratio, r.min_chord_arc,
            r.simple_curve_plausible ? 1 : 0};
  });
}

lw_status lw_trace_write_csv(const lw_trace* tr, const char* path) {
  return guarded([&] {
    require(tr && path, "null pointer");
    loewner::write_trace_csv(tr->trace, path);
  });
}

lw_status lw_traces_write_svg(const lw_trace* const* traces, size_t count, const char* path, double stroke_width) {
  return guarded([&] {
    require(path != nullptr && (traces != nullptr || count == 0), "null pointer");
    std::vector<loewner::Trace> copy;
    copy.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      require(traces[i] != nullptr, "null trace");
      copy.push_back(traces[i]->trace);
    }
    loewner::write_trace_svg(copy, path, stroke_width);
  });
}

lw_status lw_half_plane_capacity(const lw_driving* d, double t, const lw_solver_config* cfg, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = loewner::half_plane_capacity(term(d), t, to_config(cfg));
  });
}

void lw_trace_free(lw_trace* tr) { delete tr; }

lw_status lw_hitting_time(double x0, const lw_driving* d, const lw_solver_config* cfg, lw_hitting_record* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    const auto r = loewner::hitting_time(x0, term(d), to_config(cfg));
    *out = {r.x0, r.hit_time, r.terminal_value, r.resolution, r.past_horizon ? 1 : 0};
  });
}

lw_status lw_welding_point(double x, const lw_driving* d, const lw_solver_config* cfg, lw_welding_pair* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    const auto p = loewner::welding_point(x, term(d), to_config(cfg));
    *out = {p.x, p.phi_x, p.hit_time, p.residual};
  });
}

lw_status lw_equispaced_triples(double lo, double hi, size_t intervals, double* xyz, size_t capacity,
                                size_t* count) {
  return guarded([&] {
    require(count != nullptr, "null output pointer");
    const auto t = loewner::equispaced_triples(lo, hi, intervals);
    if (xyz) {
      for (size_t i = 0; i < t.size() && i < capacity; ++i) {
        xyz[3 * i] = t[i].x;
        xyz[3 * i + 1] = t[i].y;
        xyz[3 * i + 2] = t[i].z;
      }
    }
    *count = t.size();
  });
}

lw_status lw_quasisymmetry_scan(const lw_driving* d, const double* xyz, size_t count, const lw_solver_config* cfg,
                                double* ratios, double* max_ratio, double* min_ratio) {
  return guarded([&] {
    require(max_ratio && min_ratio, "null output pointer");
    const auto triples = to_triples(xyz, count);
    const auto rep = loewner::quasisymmetry_scan(term(d), triples, to_config(cfg));
    if (ratios)
      for (size_t i = 0; i < rep.rows.size(); ++i) ratios[i] = rep.rows[i].ratio;
    *max_ratio = rep.max_ratio;
    *min_ratio = rep.min_ratio;
  });
}

lw_status lw_ratio_check(const lw_driving* d, double alpha, double beta, const lw_solver_config* cfg, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = loewner::ratio_check(term(d), alpha, beta, to_config(cfg));
  });
}

lw_status lw_quasislit_conditions(const lw_driving* d, double extent, size_t intervals, double cap,
                                  const lw_solver_config* cfg, lw_quasislit_result* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    const auto r = loewner::quasislit_conditions(term(d), {extent, intervals, cap}, to_config(cfg));
    *out = {r.m_symmetry, r.m_triples, r.m, r.pass ? 1 : 0};
  });
}

lw_status lw_write_welding_csv(const lw_welding_pair* rows, size_t count, const char* path) {
  return guarded([&] {
    require(path != nullptr && (rows != nullptr || count == 0), "null pointer");
    std::vector<loewner::WeldingPair> v(count);
    for (size_t i = 0; i < count; ++i) v[i] = {rows[i].x, rows[i].phi_x, rows[i].hit_time, rows[i].residual};
    loewner::write_welding_csv(v, path);
  });
}

lw_status lw_write_quasisymmetry_csv(const double* xyz, const double* ratios, size_t count, const char* path) {
  return guarded([&] {
    require(path != nullptr && (ratios != nullptr || count == 0), "null pointer");
    const auto triples = to_triples(xyz, count);
    loewner::QuasisymmetryReport rep;
    for (size_t i = 0; i < count; ++i) rep.rows.push_back({triples[i], ratios[i]});
    loewner::write_quasisymmetry_csv(rep, path);
  });
}

lw_status lw_h_n(double c, size_t n, double* out, int* defined) {
  return guarded([&] {
    require(out && defined, "null output pointer");
    const auto h = loewner::h_n(c, n);
    *defined = h ? 1 : 0;
    if (h) *out = *h;
  });
}

lw_status lw_x_n_root(size_t n, double tol, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    *out = loewner::x_n_root(n, tol);
  });
}

lw_status lw_first_nonpositive(double c, size_t cap, size_t* n, int* found) {
  return guarded([&] {
    require(n && found, "null output pointer");
    const auto r = loewner::first_nonpositive(c, cap);
    *found = r ? 1 : 0;
    *n = r.value_or(0);
  });
}

lw_status lw_e_n(double c, double eps, size_t n, double* out, int* defined) {
  return guarded([&] {
    require(out && defined, "null output pointer");
    const auto e = loewner::e_n(c, eps, n);
    *defined = e ? 1 : 0;
    if (e) *out = *e;
  });
}

lw_status lw_epsilon_bound(double c, size_t cap, double tol, lw_epsilon_certificate* out) {
  return guarded([&] {
    require(out != nullptr, "null output pointer");
    const auto r = loewner::epsilon_bound(c, cap, tol);
    *out = {r.c, r.c_used, r.n_star, r.n, r.h, r.epsilon, r.e, r.certified ? 1 : 0};
  });
}

lw_status lw_write_recursion_csv(double c, size_t rows, double eps, const char* path) {
  return guarded([&] {
    require(path != nullptr, "null path");
    loewner::write_recursion_csv(loewner::recursion_report(c, rows, eps), path);
  });
}

lw_status lw_write_epsilon_sweep_csv(const lw_epsilon_certificate* rows, size_t count, const char* path) {
  return guarded([&] {
    require(path != nullptr && (rows != nullptr || count == 0), "null pointer");
    std::vector<loewner::EpsilonCertificate> v;
    v.reserve(count);
    for (size_t i = 0; i < count; ++i) v.push_back(from_c(rows[i]));
    loewner::write_epsilon_sweep_csv(v, path);
  });
}

}  // extern "C"
