/* C interface to the dsf library. Every function returns a dsf_status; on
 * failure dsf_last_error() describes the problem (thread-local, valid until
 * the next call on the same thread). Strings returned through char** are
 * owned by the caller and released with dsf_string_free. */
#pragma once

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define DSF_API __declspec(dllexport)
#else
#define DSF_API __attribute__((visibility("default")))
#endif

typedef enum dsf_status {
    DSF_OK = 0,
    DSF_ERR_INVALID_ARGUMENT = 1,
    DSF_ERR_CONFIG = 2,
    DSF_ERR_ABORTED = 3,     /* event ceiling reached; partial outputs were written */
    DSF_ERR_IO = 4,
    DSF_ERR_UNSUPPORTED = 5, /* parameter outside the stable range of an evaluator */
    DSF_ERR_INTERNAL = 6
} dsf_status;

DSF_API const char* dsf_version(void);
DSF_API const char* dsf_last_error(void);
DSF_API void dsf_string_free(char* s);

/* Graphs. spec_json is e.g. {"kind":"torus","d":2,"L":16}. */
typedef struct dsf_graph dsf_graph;
DSF_API dsf_status dsf_graph_create(const char* spec_json, dsf_graph** out);
DSF_API void dsf_graph_free(dsf_graph* graph);
DSF_API dsf_status dsf_graph_vertex_count(const dsf_graph* graph, uint64_t* out);
DSF_API dsf_status dsf_graph_degree(const dsf_graph* graph, uint32_t* out);
DSF_API dsf_status dsf_graph_neighbor(const dsf_graph* graph, uint32_t vertex, uint32_t k, uint32_t* out);

typedef struct dsf_halting_sample {
    double T;
    double t_last;
    uint64_t m0;
    uint64_t events;
    uint64_t seed;
} dsf_halting_sample;

/* One replica run to halting. localized != 0 starts all particles on
 * `vertex`; otherwise particles are dropped uniformly. max_events 0 means
 * the default ceiling. */
DSF_API dsf_status dsf_simulate_replica(const dsf_graph* graph, int localized, uint32_t vertex, uint64_t seed,
                                        uint64_t max_events, dsf_halting_sample* out);
/* Exact halting time on K_{N+1} from m0 empty vertices. */
DSF_API dsf_status dsf_sample_complete_fast(uint64_t N, uint64_t m0, uint64_t seed, dsf_halting_sample* out);

/* Analytic evaluators by name, parameters as a JSON object, result as JSON.
 * Names: pdf, cdf, mu, moment, mean-T, hypoexp-pdf, laplace-Q,
 * laplace-Q-finite, cumulants, occupancy-cumulants, last-step-pdf, joint-R,
 * joint-moment, joint-pdf, gaussian-pdf ('_' is accepted for '-'). */
DSF_API dsf_status dsf_analytic(const char* function, const char* params_json, char** out_json);

/* Experiments described by a JSON config. */
typedef struct dsf_experiment dsf_experiment;
DSF_API dsf_status dsf_experiment_load(const char* path, dsf_experiment** out);
DSF_API dsf_status dsf_experiment_parse(const char* json_text, dsf_experiment** out);
DSF_API dsf_status dsf_experiment_set_seed(dsf_experiment* exp, uint64_t seed);
DSF_API dsf_status dsf_experiment_set_workers(dsf_experiment* exp, unsigned workers);
/* mode is "simulate" or "scan". Writes the artifacts into out_dir and, if
 * report_json is non-null, returns the report. DSF_ERR_ABORTED still writes
 * partial outputs. */
DSF_API dsf_status dsf_experiment_run(dsf_experiment* exp, const char* mode, const char* out_dir, char** report_json);
DSF_API void dsf_experiment_free(dsf_experiment* exp);

/* Halting analysis of a halting.csv against the K_{N+1} references. out_dir
 * may be null; otherwise report.json is written there. */
DSF_API dsf_status dsf_compare_csv(const char* halting_csv, double N, int moments_p_max, const char* out_dir,
                                   char** report_json);

#ifdef __cplusplus
}
#endif
