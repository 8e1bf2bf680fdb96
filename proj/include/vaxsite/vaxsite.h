#ifndef VAXSITE_VAXSITE_H
#define VAXSITE_VAXSITE_H

/* C interface to the vaxsite library: run configuration, plan models and the
 * command pipeline. Handles are opaque; every call that can fail returns a
 * vxs_status and leaves a message for vxs_last_error() on the calling thread. */

#include <stddef.h>

#if defined(_WIN32)
#define VXS_API __declspec(dllexport)
#else
#define VXS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vxs_status {
  VXS_OK = 0,
  VXS_INFEASIBLE = 2,     /* no plan satisfies the constraints */
  VXS_INPUT_ERROR = 3,    /* bad file, bad config value, bad argument */
  VXS_INTERNAL_ERROR = 4  /* an invariant of the library itself broke */
} vxs_status;

enum {
  VXS_RUN_WRITE_MPS = 1u << 0,          /* build/solve: also write model.mps */
  VXS_RUN_SYNTHETIC_OBSERVED = 1u << 1  /* simulate: also write observed.csv */
};

typedef struct vxs_config vxs_config;
typedef struct vxs_model vxs_model;
typedef struct vxs_result vxs_result;

VXS_API const char* vxs_version(void);
/* Message of the last failed call on this thread ("" if none). */
VXS_API const char* vxs_last_error(void);

/* --- configuration --- */
VXS_API vxs_status vxs_config_new(vxs_config** out);
VXS_API vxs_status vxs_config_load(const char* path, vxs_config** out);
VXS_API vxs_status vxs_config_set(vxs_config* config, const char* key, const char* value);
/* Copies the value into buf (NUL-terminated, truncated to cap) and stores
 * the full length in *length when length is non-null. */
VXS_API vxs_status vxs_config_get(const vxs_config* config, const char* key, char* buf,
                                  size_t cap, size_t* length);
VXS_API void vxs_config_free(vxs_config* config);

/* --- plan models --- */
/* Loads the configured inputs and builds the configured formulation. */
VXS_API vxs_status vxs_model_build(const vxs_config* config, vxs_model** out);
VXS_API size_t vxs_model_variable_count(const vxs_model* model);
VXS_API size_t vxs_model_constraint_count(const vxs_model* model);
VXS_API size_t vxs_model_district_count(const vxs_model* model);
/* Exact solve; on success *objective holds the optimum and open_sites[i]
 * (when non-null, length vxs_model_district_count) is 1 for open sites. */
VXS_API vxs_status vxs_model_solve(const vxs_model* model, double* objective, int* open_sites);
VXS_API vxs_status vxs_model_export_mps(const vxs_model* model, const char* path);
VXS_API void vxs_model_free(vxs_model* model);

/* --- commands --- */
VXS_API size_t vxs_command_count(void);
VXS_API const char* vxs_command_name(size_t index);
/* Runs one subcommand writing into out_dir. plan_path may be null. The
 * returned status equals the result's exit code; *out is set whenever the
 * command ran, even when it failed. */
VXS_API vxs_status vxs_run(const vxs_config* config, const char* command, const char* out_dir,
                           const char* plan_path, unsigned flags, vxs_result** out);
VXS_API int vxs_result_exit_code(const vxs_result* result);
VXS_API const char* vxs_result_summary(const vxs_result* result);
VXS_API size_t vxs_result_output_count(const vxs_result* result);
VXS_API const char* vxs_result_output(const vxs_result* result, size_t index);
VXS_API void vxs_result_free(vxs_result* result);

#ifdef __cplusplus
}
#endif

#endif /* VAXSITE_VAXSITE_H */
