/* C interface to the boundary-map library: opaque handles plus status codes.
 * Every function returns BSLD_OK or an error code; on error the thread-local
 * message and error-class name are available from bsld_last_error /
 * bsld_last_error_name until the next call on the same thread. */
#ifndef BSLD_H
#define BSLD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct bsld_domain bsld_domain;       /* fundamental polygon + pairings */
typedef struct bsld_partition bsld_partition; /* boundary map + Markov cells */
typedef struct bsld_pressure bsld_pressure;   /* fitted pressure curve */
typedef struct bsld_spectrum bsld_spectrum;   /* Legendre spectrum grid */

typedef enum {
  BSLD_OK = 0,
  BSLD_ERR_ARGUMENT = 1,   /* null handle or out-of-range input */
  BSLD_ERR_DOMAIN = 2,     /* domain file or admissibility failure */
  BSLD_ERR_RANGE = 3,      /* quantity outside its computable range */
  BSLD_ERR_NUMERIC = 4,    /* iteration or enumeration failure */
  BSLD_ERR_UNKNOWN = 5
} bsld_status;

const char* bsld_last_error(void);      /* message text, "" when clear */
const char* bsld_last_error_name(void); /* error class name, "" when clear */

/* -- domains -------------------------------------------------------------- */
bsld_status bsld_domain_octagon(bsld_domain** out);
bsld_status bsld_domain_quadrilateral(bsld_domain** out);
bsld_status bsld_domain_load(const char* path, bsld_domain** out);
void bsld_domain_free(bsld_domain* dom);
bsld_status bsld_domain_validate(const bsld_domain* dom);
bsld_status bsld_domain_num_sides(const bsld_domain* dom, int* out);
bsld_status bsld_domain_has_cusps(const bsld_domain* dom, int* out);
/* JSON text of the domain; free with bsld_string_free. */
bsld_status bsld_domain_json(const bsld_domain* dom, char** out);

void bsld_string_free(char* s);

/* -- boundary map and partition ------------------------------------------- */
bsld_status bsld_partition_build(const bsld_domain* dom, bsld_partition** out);
void bsld_partition_free(bsld_partition* part);
bsld_status bsld_partition_size(const bsld_partition* part, int* out);
/* cell arc as start angle + anticlockwise length (radians) */
bsld_status bsld_partition_cell(const bsld_partition* part, int index,
                                double* lo, double* len);
bsld_status bsld_partition_json(const bsld_partition* part, char** out);
bsld_status bsld_map_num_branches(const bsld_partition* part, int* out);
/* branch arc, and its generator label as index + inverse flag */
bsld_status bsld_map_branch(const bsld_partition* part, int index, double* lo,
                            double* len, int* label_index, int* label_bar);
bsld_status bsld_map_apply(const bsld_partition* part, double theta,
                           double* image, double* log_deriv);

/* -- pressure and spectrum ------------------------------------------------ */
bsld_status bsld_pressure_compute(const bsld_partition* part,
                                  bsld_pressure** out);
void bsld_pressure_free(bsld_pressure* p);
/* fitted curve value (normalized so the value at 1 is 0) */
bsld_status bsld_pressure_eval(const bsld_pressure* p, double beta,
                               double* value);
bsld_status bsld_pressure_num_points(const bsld_pressure* p, int* out);
/* raw grid point; *has_bracket reports whether lo/hi are meaningful */
bsld_status bsld_pressure_point(const bsld_pressure* p, int index, double* beta,
                                double* p_hat, int* has_bracket, double* lo,
                                double* hi);
bsld_status bsld_spectrum_compute(const bsld_pressure* p, int grid_size,
                                  bsld_spectrum** out);
void bsld_spectrum_free(bsld_spectrum* s);
bsld_status bsld_spectrum_num_points(const bsld_spectrum* s, int* out);
bsld_status bsld_spectrum_point(const bsld_spectrum* s, int index, double* alpha,
                                double* beta, double* b, double* rate,
                                double* rate_prime);
bsld_status bsld_spectrum_alpha_typical(const bsld_spectrum* s, double* out);
/* dimension and rate at one growth rate alpha */
bsld_status bsld_legendre_eval(const bsld_pressure* p, double alpha,
                               double* beta, double* b, double* rate);

/* -- geodesics ------------------------------------------------------------ */
/* Draws `count` admissible geodesics; arrays receive endpoint angles. A
 * negative k_radius disables the near-origin constraint. */
bsld_status bsld_geodesic_sample(const bsld_domain* dom, uint64_t seed,
                                 double k_radius, int count, double* src_theta,
                                 double* dst_theta);
/* Cutting sequence and growth trace to depth n. Output arrays (lengths in
 * brackets) may be NULL to skip: sides[n], deformed[n] 0/1 flags,
 * t[n+1], s[n+1], u[n+1]. */
bsld_status bsld_geodesic_trace(const bsld_domain* dom, double src_theta,
                                double dst_theta, int n, int* sides,
                                int* deformed, double* t, double* s, double* u);
/* Windowed growth statistic over `count` sampled geodesics at depth n. */
bsld_status bsld_er_statistic(const bsld_domain* dom, uint64_t seed,
                              double k_radius, int count, int n,
                              double rate_alpha, double* stats);

/* -- deviation tails ------------------------------------------------------ */
/* Monte-Carlo tail measures at depths n_list[0..n_count); upper != 0 selects
 * the tail above alpha. m_hat/se have length n_count; slope_ok reports
 * whether enough depths were well-populated to fit the decay slope. */
bsld_status bsld_tail_mc(const bsld_partition* part, double alpha, int upper,
                         const int* n_list, int n_count, long long samples,
                         uint64_t seed, double* m_hat, double* se,
                         double* slope, int* slope_ok);
/* Exact tail mass of depth-n cylinders whose derivative supremum reaches
 * exp(alpha * n). */
bsld_status bsld_tail_cylinder(const bsld_partition* part, double alpha, int n,
                               double* mass);

#ifdef __cplusplus
}
#endif

#endif /* BSLD_H */
