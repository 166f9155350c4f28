#ifndef SECGAME_H
#define SECGAME_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum SecgameStatus {
  SECGAME_STATUS_OK = 0,
  /**
   * The question has a negative answer (no feasible equilibrium,
   * unrealizable request).
   */
  SECGAME_STATUS_INFEASIBLE = 1,
  /**
   * Malformed document or a game that violates a model invariant.
   */
  SECGAME_STATUS_INVALID_INPUT = 2,
  SECGAME_STATUS_BUDGET_EXCEEDED = 3,
  SECGAME_STATUS_INTERNAL = 4,
  SECGAME_STATUS_NULL_ARGUMENT = 5,
  SECGAME_STATUS_INVALID_UTF8 = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  SECGAME_STATUS_PANIC = 7,
} SecgameStatus;

/**
 * Search mode for [`secgame_optimize_json`].
 */
typedef enum SecgameOptimizeMode {
  SECGAME_OPTIMIZE_MODE_PSEUDO = 0,
  SECGAME_OPTIMIZE_MODE_EXHAUSTIVE = 1,
} SecgameOptimizeMode;

/**
 * A computed equilibrium.
 */
typedef struct SecgameEquilibrium SecgameEquilibrium;

/**
 * A validated game.
 */
typedef struct SecgameGame SecgameGame;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *secgame_last_error(void);

/**
 * Library version as a static string.
 */
const char *secgame_version(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string returned through an `out` parameter of
 * this library, freed at most once.
 */
void secgame_string_free(char *s);

/**
 * Parses and validates a game document. `require_distinct` nonzero also
 * checks that parameters are pairwise distinct.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum SecgameStatus secgame_game_from_json(const char *json,
                                          int require_distinct,
                                          struct SecgameGame **out);

/**
 * # Safety
 * `game` must be null or a live handle; it is invalid afterwards.
 */
void secgame_game_free(struct SecgameGame *game);

/**
 * Number of targets, or 0 for a null handle.
 *
 * # Safety
 * `game` must be null or a live handle.
 */
size_t secgame_game_target_count(const struct SecgameGame *game);

/**
 * The game as a JSON document.
 *
 * # Safety
 * `game` must be a live handle; `out` must be writable.
 */
enum SecgameStatus secgame_game_to_json(const struct SecgameGame *game, char **out);

/**
 * Computes an equilibrium. `protective` nonzero uses the sweep for fully
 * protective games, which rejects other games.
 *
 * # Safety
 * `game` must be a live handle; `out` must be writable.
 */
enum SecgameStatus secgame_solve(const struct SecgameGame *game,
                                 int protective,
                                 struct SecgameEquilibrium **out);

/**
 * # Safety
 * `eq` must be null or a live handle; it is invalid afterwards.
 */
void secgame_equilibrium_free(struct SecgameEquilibrium *eq);

/**
 * The equilibrium as a JSON document (type, counts, constants, marginals,
 * values, multiplicity).
 *
 * # Safety
 * `eq` must be a live handle; `out` must be writable.
 */
enum SecgameStatus secgame_equilibrium_to_json(const struct SecgameEquilibrium *eq, char **out);

/**
 * Floating-point approximations of the attacker and defender values.
 * Exact values are in the JSON document.
 *
 * # Safety
 * `eq` must be a live handle; `v_a` and `v_d` must be writable.
 */
enum SecgameStatus secgame_equilibrium_values(const struct SecgameEquilibrium *eq,
                                              double *v_a,
                                              double *v_d);

/**
 * Checks a profile document against a game. Writes 1 to `is_equilibrium`
 * if it is an equilibrium, else 0; `out` (optional) receives the verdict
 * document with any deviation witness.
 *
 * # Safety
 * `game` must be a live handle, `profile_json` a NUL-terminated string,
 * `is_equilibrium` writable, and `out` null or writable.
 */
enum SecgameStatus secgame_verify_json(const struct SecgameGame *game,
                                       const char *profile_json,
                                       int *is_equilibrium,
                                       char **out);

/**
 * Optimizes attacker payoffs within intervals. `game_json` supplies the
 * defender payoffs and resources; `budget` caps the exhaustive mode.
 *
 * # Safety
 * Both inputs must be NUL-terminated strings; `out` must be writable.
 */
enum SecgameStatus secgame_optimize_json(const char *game_json,
                                         const char *intervals_json,
                                         enum SecgameOptimizeMode mode,
                                         uint64_t budget,
                                         char **out);

/**
 * Nearest additive function of a set-function document.
 *
 * # Safety
 * `table_json` must be a NUL-terminated string; `out` must be writable.
 */
enum SecgameStatus secgame_project_json(const char *table_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SECGAME_H */
