#ifndef DKMHD_H
#define DKMHD_H

/* Generated by cbindgen from dk-mhd-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every fallible FFI call.
typedef enum {
  DK_STATUS_OK = 0,
  // A pointer argument was null.
  DK_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  DK_STATUS_INVALID_UTF8 = 2,
  // Geometry or parameter outside its domain.
  DK_STATUS_DOMAIN = 3,
  // Scenario configuration rejected.
  DK_STATUS_CONFIG = 4,
  // Integration failed (stiffness, blow-up, divergence).
  DK_STATUS_INTEGRATION = 5,
  // Filesystem failure.
  DK_STATUS_IO = 6,
  // Index out of range.
  DK_STATUS_OUT_OF_RANGE = 7,
} DkStatus;

// Classification of the aligned-equilibrium spectrum.
typedef enum {
  DK_STABILITY_CLASS_STABLE_OSCILLATORY = 0,
  DK_STABILITY_CLASS_MARGINAL = 1,
  DK_STABILITY_CLASS_UNSTABLE_DIRECT = 2,
  DK_STABILITY_CLASS_UNSTABLE_OSCILLATORY = 3,
} DkStabilityClass;

// Opaque ellipsoid geometry handle.
typedef struct DkGeometry DkGeometry;

// Opaque scenario handle.
typedef struct DkScenario DkScenario;

// Opaque completed-run handle (sampled trajectory plus report).
typedef struct DkTrajectory DkTrajectory;

// Invariants of a state for a geometry. `has_clebsch` is false when any
// shape ratio is degenerate, in which case `c` is zero-filled and
// meaningless.
typedef struct {
  double h0;
  double h1;
  double c0;
  bool has_clebsch;
  double c[3];
} DkInvariants;

// Aligned-equilibrium spectrum: quadratic coefficients, the two roots in
// `x = s^2`, the four mode exponents, classification and the `r2`
// threshold where the `beta` coefficient changes sign.
typedef struct {
  double beta;
  double constant;
  double x_re[2];
  double x_im[2];
  double s_re[4];
  double s_im[4];
  DkStabilityClass classification;
  double r2_threshold;
} DkAlignedSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the most recent failure on this thread, or null when no call
// has failed yet. The pointer stays valid until the next failing call on
// the same thread.
const char *dkmhd_last_error_message(void);

// Library version as a static string.
const char *dkmhd_version(void);

// Geometry from semi-axes.
//
// # Safety
// `out` must be a valid pointer to receive the handle.
DkStatus dkmhd_geometry_new_from_axes(double a1, double a2, double a3, DkGeometry **out);

// Geometry from moments `I_i = a_j^2 + a_k^2`.
//
// # Safety
// `out` must be a valid pointer to receive the handle.
DkStatus dkmhd_geometry_new_from_moments(double i1, double i2, double i3, DkGeometry **out);

// Geometry from two shape ratios; the moment scale is pinned at `I1 = 1`.
//
// # Safety
// `out` must be a valid pointer to receive the handle.
DkStatus dkmhd_geometry_new_from_ratios(double r1, double r2, DkGeometry **out);

// Release a geometry handle. Null is a no-op.
//
// # Safety
// `geometry` must be a handle from one of the constructors, not yet freed.
void dkmhd_geometry_free(DkGeometry *geometry);

// Copy the derived quantities out of a geometry. Any output pointer may be
// null to skip that field; `axes`, `moments` and `ratios` receive three
// values each.
//
// # Safety
// Non-null outputs must point to suitably sized writable memory.
DkStatus dkmhd_geometry_get(const DkGeometry *geometry,
                            double *axes,
                            double *moments,
                            double *ratios,
                            double *sqrt_g);

// Maximum deviation of the basis Lie-algebra structure constants and curl
// relations for this geometry.
//
// # Safety
// `geometry` must be a live handle; `out` must be a valid pointer.
DkStatus dkmhd_geometry_verify_algebra(const DkGeometry *geometry, double *out);

// Ideal right-hand side; `state` and `out` are `[w1,w2,w3,i1,i2,i3]`,
// `ratios` is `[r1,r2,r3]`.
//
// # Safety
// `state` and `ratios` must be readable for 6 and 3 doubles; `out`
// writable for 6.
DkStatus dkmhd_ideal_rhs(const double *state, const double *ratios, double *out);

// Resistive right-hand side with quadratic resistivity coefficient `eta2`.
//
// # Safety
// `state`, `ratios`, `axes` readable for 6/3/3 doubles; `out` writable
// for 6.
DkStatus dkmhd_resistive_rhs(const double *state,
                             const double *ratios,
                             const double *axes,
                             double eta2,
                             double *out);

// Compute all invariants of a state.
//
// # Safety
// `state` readable for 6 doubles; `geometry` a live handle; `out` valid.
DkStatus dkmhd_invariants(const double *state, const DkGeometry *geometry, DkInvariants *out);

// Spectrum of the aligned configuration (`w3 = W`, `iota3 = J`). Set
// `use_printed_constant` to replace the corrected constant term with the
// compatibility variant.
//
// # Safety
// `out` must be a valid pointer.
DkStatus dkmhd_aligned_spectrum(double w,
                                double j,
                                double r1,
                                double r2,
                                bool use_printed_constant,
                                DkAlignedSpectrum *out);

// Built-in preset scenario: `euler-flopl`, `dk-dz3ln` or `dk-dz5ln`.
//
// # Safety
// `name` must be NUL-terminated; `out` must be valid.
DkStatus dkmhd_scenario_new_preset(const char *name, DkScenario **out);

// Scenario from a TOML config file on disk.
//
// # Safety
// `path` must be NUL-terminated; `out` must be valid.
DkStatus dkmhd_scenario_new_from_file(const char *path, DkScenario **out);

// Scenario from TOML config text.
//
// # Safety
// `text` must be NUL-terminated; `out` must be valid.
DkStatus dkmhd_scenario_new_from_toml(const char *text, DkScenario **out);

// Override integration tolerances of a scenario.
//
// # Safety
// `scenario` must be a live handle.
DkStatus dkmhd_scenario_set_tolerances(DkScenario *scenario, double rtol, double atol);

// Override the final time and sample spacing of a scenario.
//
// # Safety
// `scenario` must be a live handle.
DkStatus dkmhd_scenario_set_window(DkScenario *scenario, double t_end, double sample_dt);

// Release a scenario handle. Null is a no-op.
//
// # Safety
// `scenario` must come from a scenario constructor, not yet freed.
void dkmhd_scenario_free(DkScenario *scenario);

// Integrate a scenario into a trajectory handle.
//
// # Safety
// `scenario` must be a live handle; `out` must be valid.
DkStatus dkmhd_scenario_run(const DkScenario *scenario, DkTrajectory **out);

// Number of samples in a trajectory; zero for a null handle.
//
// # Safety
// `trajectory` must be a live handle or null.
size_t dkmhd_trajectory_len(const DkTrajectory *trajectory);

// Borrow the sample-time array (length [`dkmhd_trajectory_len`]); valid
// while the handle lives.
//
// # Safety
// `trajectory` must be a live handle or null.
const double *dkmhd_trajectory_times(const DkTrajectory *trajectory);

// Copy sample `index` into `state` (`[w1,w2,w3,i1,i2,i3]`).
//
// # Safety
// `trajectory` live; `state` writable for 6 doubles.
DkStatus dkmhd_trajectory_state(const DkTrajectory *trajectory, size_t index, double *state);

// Invariants at sample `index`.
//
// # Safety
// `trajectory` live; `out` valid.
DkStatus dkmhd_trajectory_invariants(const DkTrajectory *trajectory,
                                     size_t index,
                                     DkInvariants *out);

// Shape ratios at sample `index`.
//
// # Safety
// `trajectory` live; `ratios` writable for 3 doubles.
DkStatus dkmhd_trajectory_ratios(const DkTrajectory *trajectory, size_t index, double *ratios);

// Earliest sign change of state component `component` (0..=5, vorticity
// then current) after time `after`. `*found` is set to whether a crossing
// exists; `*t_star` holds the refined time only when it does.
//
// # Safety
// `trajectory` live; `t_star` and `found` valid.
DkStatus dkmhd_trajectory_first_zero_crossing(const DkTrajectory *trajectory,
                                              size_t component,
                                              double after,
                                              double *t_star,
                                              bool *found);

// Write the trajectory as CSV
// (`t,w1,w2,w3,i1,i2,i3,H0,H1,C0,C1,C2,C3,r1,r2,r3`).
//
// # Safety
// `trajectory` live; `path` NUL-terminated.
DkStatus dkmhd_trajectory_write_csv(const DkTrajectory *trajectory, const char *path);

// Number of warnings attached to the run report (resistive growth and the
// like); zero for a null handle.
//
// # Safety
// `trajectory` must be a live handle or null.
size_t dkmhd_trajectory_warning_count(const DkTrajectory *trajectory);

// Release a trajectory handle. Null is a no-op.
//
// # Safety
// `trajectory` must come from [`dkmhd_scenario_run`], not yet freed.
void dkmhd_trajectory_free(DkTrajectory *trajectory);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DKMHD_H */
