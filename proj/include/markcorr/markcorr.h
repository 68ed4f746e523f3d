/* markcorr - mark correlation analysis for spatial point patterns.
 *
 * C interface over the C++ core: opaque handles, integer status codes, and a
 * thread-local error message. Every *_create / estimator call that yields a
 * handle must be released with the matching *_free.
 */
#ifndef MARKCORR_H
#define MARKCORR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MCF_API __declspec(dllexport)
#else
#define MCF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcf_status {
    MCF_OK = 0,
    MCF_ERR_INVALID = 1, /* bad argument */
    MCF_ERR_PARSE = 2,   /* malformed input file */
    MCF_ERR_IO = 3,      /* file system failure */
    MCF_ERR_DOMAIN = 4,  /* violated precondition (out of window, too few points, ...) */
    MCF_ERR_NUMERIC = 5, /* degenerate numerics (all-missing grid, non-PD covariance, ...) */
} mcf_status;

/* Message for the most recent failure on the calling thread. */
MCF_API const char* mcf_last_error(void);

typedef struct mcf_pattern mcf_pattern;
typedef struct mcf_intensity mcf_intensity;
typedef struct mcf_curve mcf_curve;
typedef struct mcf_envelope mcf_envelope;
typedef struct mcf_simulator mcf_simulator;

/* ---- patterns ----------------------------------------------------------- */

/* window is xmin, xmax, ymin, ymax */
MCF_API mcf_status mcf_pattern_create(const double window[4], const double* x, const double* y,
                                      const double* mark, size_t n, mcf_pattern** out);
/* CSV with header x,y,mark; lines starting with # are ignored. A NULL window
 * is inferred as the tight bounding box of the data. */
MCF_API mcf_status mcf_pattern_read_csv(const char* path, const double window[4],
                                        mcf_pattern** out);
MCF_API mcf_status mcf_pattern_write_csv(const mcf_pattern* pattern, const char* path);
MCF_API size_t mcf_pattern_size(const mcf_pattern* pattern);
MCF_API void mcf_pattern_window(const mcf_pattern* pattern, double window[4]);
/* copies into caller arrays of length mcf_pattern_size(); any may be NULL */
MCF_API mcf_status mcf_pattern_coords(const mcf_pattern* pattern, double* x, double* y,
                                      double* mark);
/* sample mean and variance (divisor n-1) of the marks; needs n >= 2 */
MCF_API mcf_status mcf_pattern_mark_summary(const mcf_pattern* pattern, double* mean,
                                            double* variance);
/* same locations, marks uniformly permuted; deterministic in seed */
MCF_API mcf_status mcf_pattern_permute_marks(const mcf_pattern* pattern, uint64_t seed,
                                             mcf_pattern** out);
/* number of ingestion warnings, and access to each message */
MCF_API size_t mcf_pattern_warning_count(const mcf_pattern* pattern);
MCF_API const char* mcf_pattern_warning(const mcf_pattern* pattern, size_t index);
MCF_API void mcf_pattern_free(mcf_pattern* pattern);

/* ---- intensity ---------------------------------------------------------- */

typedef enum mcf_intensity_kind {
    MCF_INTENSITY_UNIFORM = 0,         /* globally edge-corrected kernel estimator */
    MCF_INTENSITY_MASS_CONSERVING = 1, /* per-point edge correction; integrates to n */
} mcf_intensity_kind;

/* bandwidth <= 0 selects it by the Cronie-van Lieshout criterion */
MCF_API mcf_status mcf_intensity_kernel(const mcf_pattern* pattern, mcf_intensity_kind kind,
                                        double bandwidth, int grid_nx, int grid_ny,
                                        mcf_intensity** out);
MCF_API mcf_status mcf_intensity_voronoi(const mcf_pattern* pattern, double retention,
                                         int replicates, uint64_t seed, int grid_nx, int grid_ny,
                                         mcf_intensity** out);
MCF_API mcf_status mcf_intensity_constant(const mcf_pattern* pattern, mcf_intensity** out);
/* piecewise-constant surface from raster values (row-major, x fastest) */
MCF_API mcf_status mcf_intensity_from_raster(const mcf_pattern* pattern, int raster_nx,
                                             int raster_ny, const double* values, int grid_nx,
                                             int grid_ny, mcf_intensity** out);
/* NaN when the estimator has no bandwidth (voronoi, constant, raster) */
MCF_API double mcf_intensity_bandwidth(const mcf_intensity* intensity);
/* quadrature integral of the surface over the window */
MCF_API double mcf_intensity_grid_mass(const mcf_intensity* intensity);
/* either path may be NULL to skip that file */
MCF_API mcf_status mcf_intensity_write(const mcf_intensity* intensity, const char* csv_path,
                                       const char* json_path);
MCF_API void mcf_intensity_free(mcf_intensity* intensity);

/* Nadaraya-Watson smoothed mark mean (statistic 0) or variance (statistic 1);
 * bandwidth <= 0 selects by Cronie-van Lieshout; selected_bandwidth may be
 * NULL. */
MCF_API mcf_status mcf_mark_surface_write(const mcf_pattern* pattern, double bandwidth,
                                          int grid_nx, int grid_ny, int statistic,
                                          const char* csv_path, const char* json_path,
                                          double* selected_bandwidth);

/* ---- summary curves ----------------------------------------------------- */

typedef enum mcf_testfunction { MCF_TF_MM = 0, MCF_TF_VARIO = 1 } mcf_testfunction;
typedef enum mcf_edge { MCF_EDGE_TRANSLATION = 0, MCF_EDGE_RIPLEY = 1 } mcf_edge;
typedef enum mcf_flavor {
    MCF_FLAVOR_HOMOGENEOUS = 0,
    MCF_FLAVOR_INHOMOGENEOUS = 1,
} mcf_flavor;
typedef enum mcf_form {
    MCF_FORM_DENSITY = 0,    /* kernel-smoothed pair sums */
    MCF_FORM_CUMULATIVE = 1, /* indicator pair sums, cumulative in r */
} mcf_form;

typedef struct mcf_rgrid_spec {
    double r_max;          /* <= 0: shorter window side / 4 */
    int r_steps;           /* grid has r_steps + 1 values; <= 0: 100 */
    double pair_bandwidth; /* <= 0: 0.15 / sqrt(n / area) */
} mcf_rgrid_spec;

/* Normalised mark correlation (kappa for MM, normalised variogram for VARIO).
 * intensity == NULL uses the constant field (homogeneous estimator). */
MCF_API mcf_status mcf_curve_kappa(const mcf_pattern* pattern, const mcf_intensity* intensity,
                                   mcf_testfunction tf, mcf_form form, mcf_edge edge,
                                   const mcf_rgrid_spec* rgrid, mcf_curve** out);
/* Unnormalised version of the above. */
MCF_API mcf_status mcf_curve_unnormalised(const mcf_pattern* pattern,
                                          const mcf_intensity* intensity, mcf_testfunction tf,
                                          mcf_form form, mcf_edge edge,
                                          const mcf_rgrid_spec* rgrid, mcf_curve** out);
/* Intensity-reweighted pair correlation function of the ground process. */
MCF_API mcf_status mcf_curve_pcf(const mcf_pattern* pattern, const mcf_intensity* intensity,
                                 mcf_edge edge, const mcf_rgrid_spec* rgrid, mcf_curve** out);

MCF_API size_t mcf_curve_size(const mcf_curve* curve);
/* copies into caller arrays of length mcf_curve_size(); any may be NULL;
 * missing entries carry NaN values and missing = 1 */
MCF_API mcf_status mcf_curve_values(const mcf_curve* curve, double* r, double* value,
                                    int* missing);
MCF_API double mcf_curve_normalizer(const mcf_curve* curve);
MCF_API mcf_status mcf_curve_write(const mcf_curve* curve, const char* csv_path,
                                   const char* json_path);
MCF_API void mcf_curve_free(mcf_curve* curve);

/* ---- random labelling envelope test ------------------------------------- */

typedef struct mcf_statistic_spec {
    mcf_flavor flavor;
    mcf_testfunction tf;
    mcf_form form;
    mcf_edge edge;
    mcf_rgrid_spec rgrid;
    double intensity_bandwidth; /* <= 0: Cronie-van Lieshout */
    int grid_nx;                /* <= 0: 128 */
    int grid_ny;
} mcf_statistic_spec;

/* Sensible defaults: inhomogeneous kappa_mm, density form, translation. */
MCF_API void mcf_statistic_spec_default(mcf_statistic_spec* spec);

MCF_API mcf_status mcf_envelope_run(const mcf_pattern* pattern, const mcf_statistic_spec* spec,
                                    int permutations, double alpha, uint64_t seed,
                                    mcf_envelope** out);
MCF_API int mcf_envelope_reject(const mcf_envelope* envelope);
MCF_API void mcf_envelope_pvalues(const mcf_envelope* envelope, double* p_lower, double* p_upper);
MCF_API size_t mcf_envelope_size(const mcf_envelope* envelope);
/* copies; any output may be NULL */
MCF_API mcf_status mcf_envelope_values(const mcf_envelope* envelope, double* r, double* data,
                                       double* lo, double* hi, double* central, int* missing);
MCF_API mcf_status mcf_envelope_write(const mcf_envelope* envelope, const char* csv_path,
                                      const char* json_path);
MCF_API void mcf_envelope_free(mcf_envelope* envelope);

/* ---- scenario simulation ------------------------------------------------ */

/* presets: assoc-poisson, assoc-lgcp, vario-poisson, vario-lgcp */
MCF_API mcf_status mcf_simulator_create(const char* preset, mcf_simulator** out);
MCF_API mcf_status mcf_simulator_replicate(const mcf_simulator* simulator, uint64_t seed,
                                           uint64_t index, mcf_pattern** out);
MCF_API void mcf_simulator_free(mcf_simulator* simulator);

/* Thinning sampler for a raster intensity on the window (marks zero). */
MCF_API mcf_status mcf_simulate_poisson_raster(const double window[4], int raster_nx,
                                               int raster_ny, const double* values, uint64_t seed,
                                               mcf_pattern** out);

/* rules: sin-association, noisy-amplitude, iid-uniform */
MCF_API mcf_status mcf_assign_marks(const mcf_pattern* pattern, const char* rule, uint64_t seed,
                                    mcf_pattern** out);

/* ---- power study -------------------------------------------------------- */

typedef struct mcf_power_result {
    double power_inhomogeneous;
    double power_homogeneous;
    double type1_inhomogeneous;
    double type1_homogeneous;
    int completed_power;
    int completed_type1;
    int failures;
} mcf_power_result;

MCF_API mcf_status mcf_power_study(const char* preset, int n_patterns, int permutations,
                                   double alpha, uint64_t seed,
                                   const mcf_statistic_spec* statistic_or_null,
                                   mcf_power_result* out);

#ifdef __cplusplus
}
#endif

#endif /* MARKCORR_H */
