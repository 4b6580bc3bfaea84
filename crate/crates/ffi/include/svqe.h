#ifndef SVQE_H
#define SVQE_H

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

/*
 Number of coefficients of a two-qubit Pauli vector.
 */
#define SVQE_PAULI_LEN 16

/*
 Cumulative noise levels accepted by [`svqe_noise_model_set_level`].
 */
typedef enum SvqeErrorLevel {
  SVQE_ERROR_LEVEL_IDEAL = 0,
  SVQE_ERROR_LEVEL_DEPHASING = 1,
  SVQE_ERROR_LEVEL_RELAXATION = 2,
  SVQE_ERROR_LEVEL_RESIDUAL = 3,
  SVQE_ERROR_LEVEL_GATE_DEPHASING = 4,
} SvqeErrorLevel;

/*
 Reconstruction pipelines accepted by [`svqe_evaluate_energy`].
 */
typedef enum SvqePipeline {
  SVQE_PIPELINE_SHOT_TOMOGRAPHY = 0,
  SVQE_PIPELINE_GAUSSIAN_SHORTCUT = 1,
} SvqePipeline;

typedef enum SvqeStatus {
  SVQE_STATUS_OK = 0,
  SVQE_STATUS_NULL_POINTER = 1,
  SVQE_STATUS_INVALID_ARGUMENT = 2,
  SVQE_STATUS_CONFIG = 3,
  SVQE_STATUS_NUMERICAL = 4,
  SVQE_STATUS_IO = 5,
  SVQE_STATUS_PANIC = 6,
} SvqeStatus;

typedef struct SvqeHamiltonian SvqeHamiltonian;

typedef struct SvqeNoiseModel SvqeNoiseModel;

typedef struct SvqeRunResult SvqeRunResult;

typedef struct SvqeMetrics {
  double bond_distance;
  double theta;
  double e_raw;
  double e_sv;
  double de_raw;
  double de_sv;
  double f_raw;
  double f_sv;
  size_t generations;
  bool converged;
} SvqeMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or NULL. The pointer stays
 valid until the next failing call on the same thread.
 */
const char *svqe_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *svqe_version(void);

/*
 Rows in the bundled H2 coefficient table.
 */
size_t svqe_bundled_table_len(void);

/*
 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum SvqeStatus svqe_hamiltonian_bundled(size_t row, struct SvqeHamiltonian **out);

/*
 Builds an H2 Hamiltonian from coefficients ordered II, ZI, IZ, XX, YY, ZZ.

 # Safety
 `coeffs` must point to 6 doubles; `out` to storage for one handle.
 */
enum SvqeStatus svqe_hamiltonian_h2(double bond_distance,
                                    const double *coeffs,
                                    struct SvqeHamiltonian **out);

/*
 # Safety
 `h` must be a live handle; `out` writable.
 */
enum SvqeStatus svqe_hamiltonian_bond_distance(const struct SvqeHamiltonian *h, double *out);

/*
 # Safety
 `h` must be NULL or a handle not yet freed.
 */
void svqe_hamiltonian_free(struct SvqeHamiltonian *h);

/*
 Exact ground energy (Hartree) and the ideal-ansatz optimal angle.

 # Safety
 `h` must be a live handle; output pointers writable.
 */
enum SvqeStatus svqe_exact_solution(const struct SvqeHamiltonian *h,
                                    double *ground_energy,
                                    double *optimal_theta);

/*
 # Safety
 `out` must be writable.
 */
enum SvqeStatus svqe_noise_model_device_default(struct SvqeNoiseModel **out);

/*
 # Safety
 `out` must be writable.
 */
enum SvqeStatus svqe_noise_model_ideal(struct SvqeNoiseModel **out);

/*
 Parses a noise model from its JSON form.

 # Safety
 `json` must be a NUL-terminated string; `out` writable.
 */
enum SvqeStatus svqe_noise_model_from_json(const char *json, struct SvqeNoiseModel **out);

/*
 `level` takes an [`SvqeErrorLevel`] value.

 # Safety
 `noise` must be a live handle.
 */
enum SvqeStatus svqe_noise_model_set_level(struct SvqeNoiseModel *noise, uint32_t level);

/*
 # Safety
 `noise` must be NULL or a handle not yet freed.
 */
void svqe_noise_model_free(struct SvqeNoiseModel *noise);

/*
 Exact Pauli vector of the simulated ansatz state.

 # Safety
 `noise` must be a live handle; `out` must hold 16 doubles.
 */
enum SvqeStatus svqe_prepare_ansatz(double theta, const struct SvqeNoiseModel *noise, double *out);

/*
 Symmetry verification onto ZZ = −1.

 # Safety
 `raw` and `out` must each hold 16 doubles; they may alias.
 */
enum SvqeStatus svqe_symmetry_verify(const double *raw, double *out);

/*
 Nearest physical state; `input_min_eigenvalue` may be NULL.

 # Safety
 `raw` and `out` must each hold 16 doubles.
 */
enum SvqeStatus svqe_project_physical(const double *raw, double *out, double *input_min_eigenvalue);

/*
 # Safety
 `h` must be a live handle; `coeffs` must hold 16 doubles.
 */
enum SvqeStatus svqe_energy(const struct SvqeHamiltonian *h, const double *coeffs, double *out);

/*
 One sampled energy; `n_meas = 0` reconstructs exactly. `pipeline` takes
 an [`SvqePipeline`] value. `coeffs` may be NULL.

 # Safety
 Handles must be live; `energy_out` writable; `coeffs` NULL or 16 doubles.
 */
enum SvqeStatus svqe_evaluate_energy(double theta,
                                     const struct SvqeHamiltonian *h,
                                     const struct SvqeNoiseModel *noise,
                                     uint64_t n_meas,
                                     uint64_t seed,
                                     uint32_t pipeline,
                                     double *energy_out,
                                     double *coeffs);

/*
 Full optimization. `optimizer_json` may be NULL for defaults; `seed`
 overrides the seed in it.

 # Safety
 Handles must be live; `optimizer_json` NULL or NUL-terminated; `out` writable.
 */
enum SvqeStatus svqe_optimize(const struct SvqeHamiltonian *h,
                              const struct SvqeNoiseModel *noise,
                              const char *optimizer_json,
                              uint64_t seed,
                              struct SvqeRunResult **out);

/*
 # Safety
 `run` must be a live handle; `out` writable.
 */
enum SvqeStatus svqe_run_result_metrics(const struct SvqeRunResult *run, struct SvqeMetrics *out);

/*
 Raw (`verified = false`) or verified final Pauli vector.

 # Safety
 `run` must be a live handle; `out` must hold 16 doubles.
 */
enum SvqeStatus svqe_run_result_vector(const struct SvqeRunResult *run, bool verified, double *out);

/*
 JSON form of the result; release with [`svqe_string_free`].

 # Safety
 `run` must be a live handle; `out` writable.
 */
enum SvqeStatus svqe_run_result_to_json(const struct SvqeRunResult *run, char **out);

/*
 # Safety
 `run` must be NULL or a handle not yet freed.
 */
void svqe_run_result_free(struct SvqeRunResult *run);

/*
 # Safety
 `s` must be NULL or a string returned by this library, not yet freed.
 */
void svqe_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SVQE_H */
