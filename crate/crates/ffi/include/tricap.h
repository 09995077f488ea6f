/* C interface to the tricap simulator. Generated by cbindgen; do not edit. */

#ifndef TRICAP_H
#define TRICAP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TricapStatus {
  TRICAP_STATUS_OK = 0,
  TRICAP_STATUS_NULL_POINTER = 1,
  TRICAP_STATUS_INVALID_UTF8 = 2,
  // The handle belongs to the other kind of scenario (fluid vs solid).
  TRICAP_STATUS_WRONG_SCENARIO = 3,
  // A caller buffer is too small.
  TRICAP_STATUS_BUFFER_TOO_SMALL = 4,
  TRICAP_STATUS_TOTAL_SPREADING = 10,
  TRICAP_STATUS_INVALID_PARAMETER = 11,
  TRICAP_STATUS_LINEAR_SOLVE_FAILURE = 12,
  TRICAP_STATUS_POISSON_SOLVE_FAILURE = 13,
  TRICAP_STATUS_CFL_VIOLATION = 14,
  TRICAP_STATUS_INVERTED = 15,
  TRICAP_STATUS_PARSE_ERROR = 16,
  TRICAP_STATUS_UNKNOWN_KEY = 17,
  TRICAP_STATUS_CONTOUR_NOT_FOUND = 18,
  TRICAP_STATUS_INVARIANT_BREACH = 19,
  TRICAP_STATUS_IO_FAILURE = 20,
  // A Rust panic was caught at the boundary.
  TRICAP_STATUS_INTERNAL = 99,
} TricapStatus;

// Parsed scenario configuration.
typedef struct TricapConfig TricapConfig;

// Fluid simulation state.
typedef struct TricapFluid TricapFluid;

// Solid simulation state.
typedef struct TricapSolid TricapSolid;

// Energy ledger row; same columns as `energy.csv`.
typedef struct TricapEnergy {
  double time;
  double ke_fluid;
  double free_energy;
  double wall_energy;
  double ke_solid;
  double strain_solid;
  double d_chem;
  double d_visc;
  double residual;
  double residual_rel;
  double total;
} TricapEnergy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Description of the most recent failure on this thread. The pointer stays
// valid until the next failing call on the same thread. Never null.
const char *tricap_last_error(void);

// Static name of a status code, e.g. `"CflViolation"`.
const char *tricap_status_name(enum TricapStatus status);

// Parses and validates a configuration from NUL-terminated text.
//
// # Safety
// `text` must be a valid C string and `out` a valid pointer.
enum TricapStatus tricap_config_parse(const char *text, struct TricapConfig **out);

// Defaults for a scenario given by name, e.g. `"lens"`.
//
// # Safety
// `name` must be a valid C string and `out` a valid pointer.
enum TricapStatus tricap_config_defaults(const char *name, struct TricapConfig **out);

// # Safety
// `cfg` must come from this library and not be used afterwards. Null is a no-op.
void tricap_config_free(struct TricapConfig *cfg);

// Runs a whole scenario, writing outputs to `out_dir` (or the configured
// directory when null). `steps` overrides the end time when nonzero.
//
// # Safety
// `cfg` must be a valid handle; `out_dir` null or a valid C string.
enum TricapStatus tricap_run(const struct TricapConfig *cfg, const char *out_dir, uint64_t steps);

// Builds the initial fluid state of a fluid scenario.
//
// # Safety
// `cfg` must be a valid handle and `out` a valid pointer.
enum TricapStatus tricap_fluid_new(const struct TricapConfig *cfg, struct TricapFluid **out);

// # Safety
// `sim` must come from this library and not be used afterwards. Null is a no-op.
void tricap_fluid_free(struct TricapFluid *sim);

// Advances one step. `dt <= 0` uses the configured step (auto picks half
// the strictest stability bound).
//
// # Safety
// `sim` must be a valid handle.
enum TricapStatus tricap_fluid_step(struct TricapFluid *sim, double dt);

// Energy ledger of the current state.
//
// # Safety
// `sim` must be a valid handle and `out` a valid pointer.
enum TricapStatus tricap_fluid_energy(const struct TricapFluid *sim, struct TricapEnergy *out);

// Grid size, simulated time and completed steps. Any output may be null.
//
// # Safety
// `sim` must be a valid handle; non-null outputs must be valid.
enum TricapStatus tricap_fluid_info(const struct TricapFluid *sim,
                                    size_t *nx,
                                    size_t *ny,
                                    double *time,
                                    uint64_t *steps);

// Copies phase `phase` (0, 1 or 2) into `buf`, row-major with `x` fastest.
// `len` must be at least `nx * ny`.
//
// # Safety
// `sim` must be a valid handle and `buf` valid for `len` writes.
enum TricapStatus tricap_fluid_phase(const struct TricapFluid *sim,
                                     size_t phase,
                                     double *buf,
                                     size_t len);

// Builds the initial state of a solid scenario.
//
// # Safety
// `cfg` must be a valid handle and `out` a valid pointer.
enum TricapStatus tricap_solid_new(const struct TricapConfig *cfg, struct TricapSolid **out);

// # Safety
// `sim` must come from this library and not be used afterwards. Null is a no-op.
void tricap_solid_free(struct TricapSolid *sim);

// Advances one step. `dt <= 0` uses the configured step. The external work
// done during the step goes to `work` when it is not null.
//
// # Safety
// `sim` must be a valid handle; `work` null or valid.
enum TricapStatus tricap_solid_step(struct TricapSolid *sim, double dt, double *work);

// Energy ledger of the current solid state.
//
// # Safety
// `sim` must be a valid handle and `out` a valid pointer.
enum TricapStatus tricap_solid_energy(const struct TricapSolid *sim, struct TricapEnergy *out);

// Displacement of the loaded tip node, as `[ux, uy]`.
//
// # Safety
// `sim` must be a valid handle and `out` valid for two writes.
enum TricapStatus tricap_solid_tip(const struct TricapSolid *sim, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRICAP_H */
