#ifndef RDSDIAG_H
#define RDSDIAG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RDS_API __declspec(dllexport)
#else
#define RDS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes, one per error family. */
typedef enum rds_status {
  RDS_OK = 0,
  RDS_ERR_CONFIG = 1,
  RDS_ERR_INGESTION = 2,
  RDS_ERR_ANALYSIS = 3,
  RDS_ERR_SIMULATION = 4,
  RDS_ERR_RENDER = 5,
  RDS_ERR_IO = 6,
  RDS_ERR_INTERNAL = 10
} rds_status;

typedef struct rds_dataset rds_dataset;
typedef struct rds_pipeline rds_pipeline;

RDS_API const char* rds_version(void);

/* Last failure on the calling thread. The detail code is the fine-grained
   error number (e.g. 212 for a missing input file). */
RDS_API const char* rds_last_error_message(void);
RDS_API int rds_last_error_detail(void);
RDS_API const char* rds_status_name(int status);

/* Strings returned through char** out-parameters are owned by the caller. */
RDS_API void rds_string_free(char* s);

/* followup may be NULL; target < 0 means no target recorded. */
RDS_API int rds_dataset_load(const char* respondents, const char* followup, const char* traits, int strict,
                             const char* site, int target, int coupon_allotment, rds_dataset** out);
RDS_API size_t rds_dataset_size(const rds_dataset* ds);
RDS_API size_t rds_dataset_seed_count(const rds_dataset* ds);
RDS_API size_t rds_dataset_warning_count(const rds_dataset* ds);
RDS_API const char* rds_dataset_warning(const rds_dataset* ds, size_t i);
/* Validation report as JSON. */
RDS_API int rds_dataset_validate(const rds_dataset* ds, char** json_out);
/* Writes respondents.csv, followup.csv, traits.csv after validation repairs. */
RDS_API int rds_dataset_write_repaired(const rds_dataset* ds, const char* dir);
RDS_API void rds_dataset_free(rds_dataset* ds);

/* Pipeline keys are those of the key-value config format. Values loaded from
   a config file take precedence over values given with rds_pipeline_set. */
RDS_API int rds_pipeline_new(rds_pipeline** out);
/* Unknown keys and unparsable values fail here with RDS_ERR_CONFIG. */
RDS_API int rds_pipeline_set(rds_pipeline* p, const char* key, const char* value);
RDS_API int rds_pipeline_load_config(rds_pipeline* p, const char* path);
/* Runs and writes the bundle to out_dir. Nothing is written on failure. */
RDS_API int rds_pipeline_run(rds_pipeline* p);
/* Runs on an already loaded dataset; input keys are ignored. */
RDS_API int rds_pipeline_run_dataset(rds_pipeline* p, const rds_dataset* ds);
/* Loads the inputs named by the current keys, without running anything. */
RDS_API int rds_pipeline_load_dataset(const rds_pipeline* p, rds_dataset** out);
RDS_API const char* rds_pipeline_bundle_json(const rds_pipeline* p);
RDS_API const char* rds_pipeline_out_dir(const rds_pipeline* p);
RDS_API void rds_pipeline_free(rds_pipeline* p);

/* Scenario config text (network.*, trait.*, sim.* keys). Writes the dataset
   CSVs, report.conf and scenario.json into out_dir. */
RDS_API int rds_simulate_to_dir(const char* config_text, const char* out_dir, char** summary_json);

/* Primitives. */
RDS_API int rds_vh_estimate(const int* has_trait, const double* degree, size_t n, double* out);
RDS_API int rds_convergence_flag(const double* values, size_t n, size_t tau, double epsilon, int* flagged,
                                 double* max_deviation);
RDS_API int rds_wsd(const double* tree_estimates, const size_t* tree_sizes, size_t trees, double overall,
                    double* out);
RDS_API int rds_fisher_ci(int a, int b, int c, int d, double confidence, double* estimate, double* lower,
                          double* upper);
RDS_API int rds_spearman(const double* x, const double* y, size_t n, double* out);
RDS_API int rds_kendall(const double* x, const double* y, size_t n, double* out);
RDS_API int rds_theil_sen(const double* x, const double* y, size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif
