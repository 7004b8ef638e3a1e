#ifndef SCORERATE_H
#define SCORERATE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every entry point.
 */
typedef enum SrStatus {
  SR_STATUS_OK = 0,
  SR_STATUS_NULL_POINTER = 1,
  SR_STATUS_INVALID_ARGUMENT = 2,
  SR_STATUS_UNKNOWN_PLAYER = 3,
  SR_STATUS_MODEL_MISMATCH = 4,
  SR_STATUS_LOG_ORDER = 5,
  SR_STATUS_DEGENERATE_LIKELIHOOD = 6,
  SR_STATUS_SIZE_LIMIT = 7,
  SR_STATUS_PANIC = 99,
} SrStatus;

/*
 Values accepted for `model` arguments.
 */
typedef enum SrModel {
  SR_MODEL_WIN_LOSS = 0,
  SR_MODEL_MARGIN = 1,
  SR_MODEL_WIN_DRAW_LOSS = 2,
  SR_MODEL_RANKING = 3,
  SR_MODEL_ELO_CLASSIC = 4,
} SrModel;

/*
 Values accepted for `result` arguments, seen from player A.
 */
typedef enum SrResult {
  SR_RESULT_A_WINS = 0,
  SR_RESULT_DRAW = 1,
  SR_RESULT_B_WINS = 2,
} SrResult;

/*
 Opaque engine handle.
 */
typedef struct SrEngine SrEngine;

/*
 Model parameters: scale `alpha`, draw threshold `delta`, step `k` and the
 initial rating `r_init`.
 */
typedef struct SrParams {
  double alpha;
  double delta;
  double k;
  double r_init;
} SrParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Default parameters: alpha 1, delta 1, K 0.1, r_init 0.
 */
struct SrParams sr_params_default(void);

/*
 Parameters under which the win/loss model reproduces classical Elo.
 */
struct SrParams sr_params_elo(void);

/*
 Message of the last failed call on this thread, or NULL after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *sr_last_error_message(void);

/*
 Creates an engine over the `n` players in `ids` (NUL-terminated UTF-8).
 `params` may be NULL for the defaults.

 # Safety
 `ids` must point to `n` valid C strings, `params` must be NULL or valid,
 and `out` must be writable.
 */
enum SrStatus sr_engine_new(int32_t model,
                            const struct SrParams *params,
                            const char *const *ids,
                            size_t n,
                            struct SrEngine **out);

/*
 Releases an engine; NULL is ignored.

 # Safety
 `engine` must be NULL or a handle from [`sr_engine_new`] not yet freed.
 */
void sr_engine_free(struct SrEngine *engine);

/*
 Records a win of `winner` over `loser` at time index `t`.

 # Safety
 `engine` must be a live handle and the ids valid C strings.
 */
enum SrStatus sr_engine_record_win_loss(struct SrEngine *engine,
                                        uint64_t t,
                                        const char *winner,
                                        const char *loser);

/*
 Records a game with final points for both sides.

 # Safety
 `engine` must be a live handle and the ids valid C strings.
 */
enum SrStatus sr_engine_record_margin(struct SrEngine *engine,
                                      uint64_t t,
                                      const char *player_a,
                                      uint64_t points_a,
                                      const char *player_b,
                                      uint64_t points_b);

/*
 Records a win, draw or loss of `player_a` against `player_b`.

 # Safety
 `engine` must be a live handle and the ids valid C strings.
 */
enum SrStatus sr_engine_record_wdl(struct SrEngine *engine,
                                   uint64_t t,
                                   const char *player_a,
                                   const char *player_b,
                                   int32_t result);

/*
 Records a complete ranking of `m` players, best first.

 # Safety
 `engine` must be a live handle and `ranked` must point to `m` valid C strings.
 */
enum SrStatus sr_engine_record_ranking(struct SrEngine *engine,
                                       uint64_t t,
                                       const char *const *ranked,
                                       size_t m);

/*
 Current rating of `id`.

 # Safety
 `engine` must be a live handle, `id` a valid C string, `out` writable.
 */
enum SrStatus sr_engine_rating(const struct SrEngine *engine, const char *id, double *out);

/*
 Number of players in the pool.

 # Safety
 `engine` must be a live handle and `out` writable.
 */
enum SrStatus sr_engine_player_count(const struct SrEngine *engine, size_t *out);

/*
 Number of games recorded so far.

 # Safety
 `engine` must be a live handle and `out` writable.
 */
enum SrStatus sr_engine_games(const struct SrEngine *engine, size_t *out);

/*
 Score of the winner of a win/loss game, from `diff = r_winner - r_loser`.

 # Safety
 `out` must be writable.
 */
enum SrStatus sr_win_loss_score(double diff, double alpha, double *out);

/*
 Score of player A when the point difference is `d`, from
 `diff = r_a - r_b`.

 # Safety
 `out` must be writable.
 */
enum SrStatus sr_margin_score(int64_t d, double diff, double alpha, double *out);

/*
 Score of player A for a win/draw/loss `result`, from `diff = r_a - r_b`.

 # Safety
 `out` must be writable.
 */
enum SrStatus sr_wdl_score(int32_t result, double diff, double alpha, double delta, double *out);

/*
 Scores of a ranking: `ratings` holds the `m` ratings in finishing order
 (best first) and `out` receives the `m` scores in the same order.

 # Safety
 `ratings` must point to `m` readable values and `out` to `m` writable ones.
 */
enum SrStatus sr_ranking_scores(const double *ratings, size_t m, double alpha, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCORERATE_H */
