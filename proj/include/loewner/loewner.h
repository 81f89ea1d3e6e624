/* C interface to the Loewner evolution library.
 *
 * Every function returning lw_status leaves its outputs untouched on failure
 * and records a message retrievable with lw_last_error() on the same thread.
 * Handles are opaque, immutable after construction and safe to share between
 * threads for reading. */
#ifndef LOEWNER_H
#define LOEWNER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LW_API __declspec(dllexport)
#else
#define LW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lw_status {
  LW_OK = 0,
  LW_INVALID_ARGUMENT = 1,
  LW_STEP_LIMIT = 2,
  LW_NONFINITE = 3,
  LW_NO_HIT = 4,
  LW_BRACKET = 5,
  LW_IO = 6,
  LW_INTERNAL = 7
} lw_status;

typedef enum lw_scheme { LW_SCHEME_RK4 = 0, LW_SCHEME_CLOSED_FORM = 1 } lw_scheme;

typedef enum lw_direction {
  LW_BACKWARD = 0, /* dz/dt =  2 / (z - drive) */
  LW_FORWARD = 1   /* dz/dt = -2 / (z - drive) */
} lw_direction;

typedef struct lw_solver_config {
  double dt;
  double eps_sing;
  double gap_fraction;
  double rtol;
  int64_t max_steps;
  int scheme; /* lw_scheme */
} lw_solver_config;

typedef struct lw_driving lw_driving;
typedef struct lw_trace lw_trace;

LW_API void lw_solver_config_default(lw_solver_config* cfg);
LW_API const char* lw_last_error(void);
LW_API const char* lw_status_name(lw_status status);

/* Driving terms */
LW_API lw_status lw_driving_constant(double value, double horizon, lw_driving** out);
LW_API lw_status lw_driving_linear(double base, double slope, double horizon, lw_driving** out);
/* 3/2 - 3/2 sqrt(1 - 8t) on [0, horizon], horizon <= 1/8 */
LW_API lw_status lw_driving_circle(double horizon, lw_driving** out);
/* c - c sqrt(1 - t) on [0, horizon], horizon <= 1 */
LW_API lw_status lw_driving_sqrt_one_minus_t(double c, double horizon, lw_driving** out);
/* c sqrt(t) on [0, horizon] */
LW_API lw_status lw_driving_sqrt_t(double c, double horizon, lw_driving** out);
LW_API lw_status lw_driving_brownian(double kappa, uint64_t seed, double horizon, double resolution,
                                     lw_driving** out);
LW_API lw_status lw_driving_tabulated(const double* times, const double* values, size_t count, lw_driving** out);
LW_API lw_status lw_driving_read_csv(const char* path, lw_driving** out);
LW_API lw_status lw_driving_write_csv(const lw_driving* d, const char* path, size_t samples);
LW_API lw_status lw_driving_rescale(const lw_driving* d, double r, lw_driving** out);
LW_API lw_status lw_driving_reverse(const lw_driving* d, lw_driving** out);
LW_API lw_status lw_driving_restrict(const lw_driving* d, double t_end, lw_driving** out);
LW_API lw_status lw_driving_eval(const lw_driving* d, double t, double* out);
LW_API lw_status lw_driving_horizon(const lw_driving* d, double* out);
LW_API lw_status lw_driving_lip_half_norm(const lw_driving* d, size_t grid, double* norm, int* exact);
LW_API void lw_driving_free(lw_driving* d);

/* Flows */
typedef struct lw_real_outcome {
  int caught;
  double t;
  double x;
  double gap;
  double catch_time; /* NaN unless caught */
  double catch_value;
  int64_t steps;
} lw_real_outcome;

typedef struct lw_complex_outcome {
  double re;
  double im;
  double t;
  int swallowed;
  double swallow_time; /* NaN unless swallowed */
  int64_t steps;
} lw_complex_outcome;

/* trajectory_csv may be NULL; otherwise every accepted step is written there. */
LW_API lw_status lw_advance_real(lw_direction dir, double x0, const lw_driving* d, double t_end,
                                 const lw_solver_config* cfg, const char* trajectory_csv, lw_real_outcome* out);
LW_API lw_status lw_advance_complex(lw_direction dir, double re, double im, const lw_driving* d, double t_end,
                                    const lw_solver_config* cfg, const char* trajectory_csv,
                                    lw_complex_outcome* out);
LW_API lw_status lw_vertical_slit_map(double re, double im, double xi, double dt, double* out_re, double* out_im);

/* Traces */
typedef struct lw_slit_report {
  double min_nonadjacent_distance;
  double min_imag;
  double min_height_ratio;
  double return_ratio;
  double min_chord_arc;
  int simple_curve_plausible;
} lw_slit_report;

LW_API lw_status lw_compose_trace(const lw_driving* d, size_t n, const lw_solver_config* cfg, lw_trace** out);
/* lift <= 0 selects sqrt(dt) / 10 */
LW_API lw_status lw_flow_trace(const lw_driving* d, size_t n, double lift, const lw_solver_config* cfg,
                               lw_trace** out);
LW_API lw_status lw_tip_by_flow(const lw_driving* d, double t, double lift, const lw_solver_config* cfg,
                                double* re, double* im);
LW_API size_t lw_trace_size(const lw_trace* tr);
LW_API lw_status lw_trace_sample(const lw_trace* tr, size_t i, double* t, double* re, double* im);
LW_API lw_status lw_slit_diagnostics(const lw_trace* tr, lw_slit_report* out);
LW_API lw_status lw_trace_write_csv(const lw_trace* tr, const char* path);
LW_API lw_status lw_traces_write_svg(const lw_trace* const* traces, size_t count, const char* path,
                                     double stroke_width);
LW_API lw_status lw_half_plane_capacity(const lw_driving* d, double t, const lw_solver_config* cfg, double* out);
LW_API void lw_trace_free(lw_trace* tr);

/* Welding */
typedef struct lw_hitting_record {
  double x0;
  double hit_time;
  double terminal_value;
  double resolution;
  int past_horizon;
} lw_hitting_record;

typedef struct lw_welding_pair {
  double x;
  double phi_x;
  double hit_time;
  double residual;
} lw_welding_pair;

typedef struct lw_quasislit_result {
  double m_symmetry;
  double m_triples;
  double m;
  int pass;
} lw_quasislit_result;

LW_API lw_status lw_hitting_time(double x0, const lw_driving* d, const lw_solver_config* cfg,
                                 lw_hitting_record* out);
LW_API lw_status lw_welding_point(double x, const lw_driving* d, const lw_solver_config* cfg, lw_welding_pair* out);
/* Fills xyz with up to capacity triples (3 doubles each); count receives the
 * total number. xyz may be NULL to query the count. */
LW_API lw_status lw_equispaced_triples(double lo, double hi, size_t intervals, double* xyz, size_t capacity,
                                       size_t* count);
/* ratios receives one value per triple and may be NULL. */
LW_API lw_status lw_quasisymmetry_scan(const lw_driving* d, const double* xyz, size_t count,
                                       const lw_solver_config* cfg, double* ratios, double* max_ratio,
                                       double* min_ratio);
LW_API lw_status lw_ratio_check(const lw_driving* d, double alpha, double beta, const lw_solver_config* cfg,
                                double* out);
LW_API lw_status lw_quasislit_conditions(const lw_driving* d, double extent, size_t intervals, double cap,
                                         const lw_solver_config* cfg, lw_quasislit_result* out);
LW_API lw_status lw_write_welding_csv(const lw_welding_pair* rows, size_t count, const char* path);
LW_API lw_status lw_write_quasisymmetry_csv(const double* xyz, const double* ratios, size_t count,
                                            const char* path);

/* Recursion */
typedef struct lw_epsilon_certificate {
  double c;
  double c_used;
  size_t n_star; /* 0 when none within the cap */
  size_t n;
  double h;
  double epsilon;
  double e;
  int certified;
} lw_epsilon_certificate;

/* defined = 0 when some intermediate h_k <= 0; *out is then left untouched. */
LW_API lw_status lw_h_n(double c, size_t n, double* out, int* defined);
LW_API lw_status lw_x_n_root(size_t n, double tol, double* out);
LW_API lw_status lw_first_nonpositive(double c, size_t cap, size_t* n, int* found);
LW_API lw_status lw_e_n(double c, double eps, size_t n, double* out, int* defined);
LW_API lw_status lw_epsilon_bound(double c, size_t cap, double tol, lw_epsilon_certificate* out);
/* `n,h_n,x_n,e_n` for n = 1..rows. */
LW_API lw_status lw_write_recursion_csv(double c, size_t rows, double eps, const char* path);
LW_API lw_status lw_write_epsilon_sweep_csv(const lw_epsilon_certificate* rows, size_t count, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* LOEWNER_H */
