#pragma once

/// Plain C interface to the solver library. Every function returns a status
/// code; on failure nn_last_error() holds a message for the calling thread.
/// Handles are opaque and owned by the caller once created.

#include <stddef.h>
#include <stdint.h>

#if defined(NONNEG_BUILDING_LIBRARY)
#define NN_API __attribute__((visibility("default")))
#else
#define NN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nn_status {
    NN_OK = 0,
    NN_INVALID_ARGUMENT = 1,
    NN_NON_FINITE = 2,
    NN_SINGULAR = 3,
    NN_NOT_CONVERGED = 4,
    NN_DOMAIN = 5,
    NN_DIVERGED = 6,
    NN_IO = 7,
    NN_INTERNAL = 8,
} nn_status;

typedef struct nn_config nn_config;
typedef struct nn_report nn_report;

/// Message of the last failed call on this thread ("" when none).
NN_API const char* nn_last_error(void);
/// Stable lowercase name, e.g. "invalid_argument".
NN_API const char* nn_status_name(nn_status status);

/// Creates a configuration with the defaults of `experiment`: one of
/// "aniso-convergence", "aniso-run", "lub1d", "lub2d", "reg-compare",
/// "diagnostics".
NN_API nn_status nn_config_create(const char* experiment, nn_config** out);
NN_API void nn_config_destroy(nn_config* cfg);

NN_API nn_status nn_config_set_resolutions(nn_config* cfg, const int* cells, size_t count);
NN_API nn_status nn_config_set_dt(nn_config* cfg, double dt);
NN_API nn_status nn_config_set_t_end(nn_config* cfg, double t_end);
/// "off", "nonneg" or "delta" (delta = coefficient * dt * h^2).
NN_API nn_status nn_config_set_cutoff(nn_config* cfg, const char* mode);
NN_API nn_status nn_config_set_delta_coefficient(nn_config* cfg, double coefficient);
NN_API nn_status nn_config_set_epsilon(nn_config* cfg, double epsilon);
NN_API nn_status nn_config_set_convection(nn_config* cfg, double bx, double by);
/// "sdirk3", or "theta" with theta in [0, 1].
NN_API nn_status nn_config_set_integrator(nn_config* cfg, const char* name, double theta);
/// NULL or "" disables file output.
NN_API nn_status nn_config_set_output_dir(nn_config* cfg, const char* dir);
NN_API nn_status nn_config_set_snapshot_times(nn_config* cfg, const double* times, size_t count);
NN_API nn_status nn_config_set_seed(nn_config* cfg, uint64_t seed);
NN_API nn_status nn_config_set_samples(nn_config* cfg, long samples);
NN_API nn_status nn_config_set_threads(nn_config* cfg, unsigned threads);
/// Checks the whole configuration without running anything.
NN_API nn_status nn_config_validate(const nn_config* cfg);

/// Runs the configured experiment. On success *out receives a report.
NN_API nn_status nn_run(const nn_config* cfg, nn_report** out);
NN_API void nn_report_destroy(nn_report* report);

/// Named scalar results in insertion order.
NN_API size_t nn_report_size(const nn_report* report);
NN_API nn_status nn_report_entry(const nn_report* report, size_t index, const char** key, double* value);
/// NN_INVALID_ARGUMENT when the key is absent.
NN_API nn_status nn_report_get(const nn_report* report, const char* key, double* value);
/// Files written by the run.
NN_API size_t nn_report_file_count(const nn_report* report);
NN_API const char* nn_report_file(const nn_report* report, size_t index);

/// In-place max(v, delta) over an array. Rejects NaN/Inf and delta < 0.
NN_API nn_status nn_cutoff_apply(double* values, size_t count, double delta);

/// Checks the five cutoff inequalities on `samples` seeded random triples;
/// `violations` receives five counts.
NN_API nn_status nn_lemma_check(uint64_t seed, long samples, long violations[5]);

#ifdef __cplusplus
}
#endif
