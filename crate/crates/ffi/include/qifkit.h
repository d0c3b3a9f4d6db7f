#ifndef QIFKIT_H
#define QIFKIT_H

/* Generated with cbindgen:0.27.0 */

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum QifStatus {
  QIF_STATUS_OK = 0,
  QIF_STATUS_NULL_POINTER = 1,
  QIF_STATUS_INVALID_DISTRIBUTION = 2,
  QIF_STATUS_DIMENSION_MISMATCH = 3,
  QIF_STATUS_OUT_OF_RANGE = 4,
  QIF_STATUS_INVALID_GAIN = 5,
  QIF_STATUS_INVALID_MEAN = 6,
  QIF_STATUS_UNSUPPORTED = 7,
  QIF_STATUS_PARSE = 8,
  /**
   * A buffer passed by the caller is too small.
   */
  QIF_STATUS_BUFFER_TOO_SMALL = 9,
  QIF_STATUS_PANIC = 99,
} QifStatus;

/**
 * Opaque row-stochastic channel.
 */
typedef struct QifChannel QifChannel;

/**
 * Opaque gain function.
 */
typedef struct QifGain QifGain;

/**
 * Opaque prior distribution.
 */
typedef struct QifPrior QifPrior;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *qif_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The string must
 * be released with [`qif_string_free`].
 */
char *qif_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void qif_string_free(char *s);

/**
 * # Safety
 * `probs` must point to `n` doubles; `out` must be writable.
 */
enum QifStatus qif_prior_new(const double *probs, size_t n, struct QifPrior **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum QifStatus qif_prior_uniform(size_t n, struct QifPrior **out);

/**
 * # Safety
 * `prior` must be NULL or a handle from this library, freed at most once.
 */
void qif_prior_free(struct QifPrior *prior);

/**
 * Size of the secret alphabet, or 0 for NULL.
 *
 * # Safety
 * `prior` must be NULL or a live handle.
 */
size_t qif_prior_len(const struct QifPrior *prior);

/**
 * Builds a channel from a row-major `rows × cols` matrix.
 *
 * # Safety
 * `data` must point to `rows * cols` doubles; `out` must be writable.
 */
enum QifStatus qif_channel_new(const double *data,
                               size_t rows,
                               size_t cols,
                               struct QifChannel **out);

/**
 * # Safety
 * `channel` must be NULL or a handle from this library, freed at most once.
 */
void qif_channel_free(struct QifChannel *channel);

/**
 * # Safety
 * `channel` must be NULL or a live handle.
 */
size_t qif_channel_n_inputs(const struct QifChannel *channel);

/**
 * # Safety
 * `channel` must be NULL or a live handle.
 */
size_t qif_channel_n_outputs(const struct QifChannel *channel);

/**
 * Identity gain: the adversary guesses the secret exactly.
 *
 * # Safety
 * `out` must be writable.
 */
enum QifStatus qif_gain_identity(struct QifGain **out);

/**
 * Simplex gain `g(w, x) = w_x` over soft guesses.
 *
 * # Safety
 * `out` must be writable.
 */
enum QifStatus qif_gain_simplex(struct QifGain **out);

/**
 * Gain matrix in row-major order, rows indexed by actions.
 *
 * # Safety
 * `data` must point to `n_actions * n_secrets` doubles; `out` must be writable.
 */
enum QifStatus qif_gain_matrix(const double *data,
                               size_t n_actions,
                               size_t n_secrets,
                               struct QifGain **out);

/**
 * # Safety
 * `gain` must be NULL or a handle from this library, freed at most once.
 */
void qif_gain_free(struct QifGain *gain);

/**
 * Bayes capacity `ln Σ_y max_x C[x,y]` in nats.
 *
 * # Safety
 * Pointers must be live handles / writable.
 */
enum QifStatus qif_bayes_capacity(const struct QifChannel *channel, double *out);

/**
 * Local differential privacy level of the channel (may be `INFINITY`).
 *
 * # Safety
 * Pointers must be live handles / writable.
 */
enum QifStatus qif_ldp_leakage(const struct QifChannel *channel, double *out);

/**
 * # Safety
 * Pointers must be live handles / writable.
 */
enum QifStatus qif_renyi_ldp(const struct QifChannel *channel, double alpha, double *out);

/**
 * # Safety
 * Pointers must be live handles / writable.
 */
enum QifStatus qif_renyi_entropy(const struct QifPrior *prior, double alpha, double *out);

/**
 * Rényi divergence `D_α(mu ‖ pi)`.
 *
 * # Safety
 * Pointers must be live handles / writable.
 */
enum QifStatus qif_renyi_divergence(const struct QifPrior *mu,
                                    const struct QifPrior *pi,
                                    double alpha,
                                    double *out);

/**
 * # Safety
 * Pointers must be live handles / writable.
 */
enum QifStatus qif_arimoto_mi(const struct QifPrior *prior,
                              const struct QifChannel *channel,
                              double alpha,
                              double *out);

/**
 * # Safety
 * Pointers must be live handles / writable.
 */
enum QifStatus qif_sibson_mi(const struct QifPrior *prior,
                             const struct QifChannel *channel,
                             double alpha,
                             double *out);

/**
 * Minimal expected α-loss; the minimizing soft guess is copied to
 * `minimizer` (capacity `minimizer_len`) unless it is NULL.
 *
 * # Safety
 * Pointers must be live handles / writable buffers of the stated size.
 */
enum QifStatus qif_min_expected_alpha_loss(const struct QifPrior *prior,
                                           double alpha,
                                           double *out,
                                           double *minimizer,
                                           size_t minimizer_len);

/**
 * (α, β)-leakage in nats.
 *
 * # Safety
 * Pointers must be live handles / writable.
 */
enum QifStatus qif_alpha_beta_leakage(const struct QifPrior *prior,
                                      const struct QifChannel *channel,
                                      double alpha,
                                      double beta,
                                      double *out);

/**
 * Generalized prior vulnerability for the mean identified by `f`
 * (e.g. `"affine"`, `"alpha:2"`, `"pow:0.5"`).
 *
 * # Safety
 * Pointers must be live handles, a NUL-terminated string, and writable.
 */
enum QifStatus qif_gen_prior_vulnerability(const struct QifPrior *prior,
                                           const struct QifGain *gain,
                                           const char *f,
                                           double *out);

/**
 * Generalized average-case leakage; multiplicative (nats) when
 * `multiplicative` is true, additive otherwise.
 *
 * # Safety
 * Pointers must be live handles, NUL-terminated strings, and writable.
 */
enum QifStatus qif_gen_leakage(const struct QifPrior *prior,
                               const struct QifChannel *channel,
                               const struct QifGain *gain,
                               const char *f,
                               const char *h,
                               bool multiplicative,
                               double *out);

/**
 * Capacity `ln f⁻¹(Σ_y max_x C[x,y])` for means with a multiplicative inverse.
 *
 * # Safety
 * Pointers must be live handles, a NUL-terminated string, and writable.
 */
enum QifStatus qif_multiplicative_f_capacity(const struct QifChannel *channel,
                                             const char *f,
                                             double *out);

/**
 * Maximal α-leakage (sup over priors of Arimoto mutual information) with the
 * default optimizer and the given seed. The best prior is copied to
 * `witness` (capacity `witness_len`) unless it is NULL.
 *
 * # Safety
 * Pointers must be live handles / writable buffers of the stated size.
 */
enum QifStatus qif_maximal_alpha_leakage(const struct QifChannel *channel,
                                         double alpha,
                                         uint64_t seed,
                                         double *out,
                                         double *witness,
                                         size_t witness_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QIFKIT_H */
