/* C interface to the adaptive surrogate inference library. All entry points
 * return an error code and never throw; failure details are copied into the
 * caller-provided message buffer when one is given. */
#ifndef APCS_APCS_H
#define APCS_APCS_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define APCS_OK 0
#define APCS_ERR_OTHER 1
#define APCS_ERR_CONFIG 2
#define APCS_ERR_NUMERICAL 3

typedef struct apcs_config apcs_config;
typedef struct apcs_surrogate apcs_surrogate;

const char* apcs_version(void);

/* Parse a sectioned key-value configuration file. */
int apcs_config_open(const char* path, apcs_config** out, char* err, size_t err_len);
/* Override one entry, e.g. a seed or output directory from the command line. */
int apcs_config_set(apcs_config* cfg, const char* section, const char* key,
                    const char* value, char* err, size_t err_len);
void apcs_config_close(apcs_config* cfg);

/* Run one pipeline stage: "synthesize-data", "build-surrogate", "adapt",
 * "sample" or "analyze". Outputs land in the configured output directory. */
int apcs_run_stage(const apcs_config* cfg, const char* stage, char* err, size_t err_len);

/* Load a saved polynomial surrogate and evaluate it pointwise. */
int apcs_surrogate_open(const char* path, apcs_surrogate** out, char* err,
                        size_t err_len);
int apcs_surrogate_dims(const apcs_surrogate* s, int* n_inputs, int* n_outputs);
/* y has n_inputs entries; out receives n_outputs entries. */
int apcs_surrogate_eval(const apcs_surrogate* s, const double* y, double* out,
                        char* err, size_t err_len);
void apcs_surrogate_close(apcs_surrogate* s);

#ifdef __cplusplus
}
#endif

#endif
