#ifndef FORKDELTA_H
#define FORKDELTA_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum FdStatus {
  FD_STATUS_OK = 0,
  FD_STATUS_NULL_ARGUMENT = 1,
  FD_STATUS_INVALID_UTF8 = 2,
  FD_STATUS_INVALID_ARGUMENT = 3,
  FD_STATUS_CONFIG = 4,
  FD_STATUS_IO = 5,
  FD_STATUS_ANALYSIS = 6,
  FD_STATUS_PANIC = 7,
} FdStatus;

typedef enum FdVerdict {
  FD_VERDICT_GREEN = 0,
  FD_VERDICT_YELLOW = 1,
  FD_VERDICT_RED = 2,
} FdVerdict;

typedef enum FdVersion {
  FD_VERSION_AO = 0,
  FD_VERSION_AN = 1,
  FD_VERSION_CM = 2,
} FdVersion;

typedef enum FdDirection {
  FD_DIRECTION_AO_TO_AN = 0,
  FD_DIRECTION_AO_TO_CM = 1,
} FdDirection;

// Change set of one direction.
typedef struct FdChangeSet FdChangeSet;

// Method inventory of one source tree.
typedef struct FdInventory FdInventory;

// Result of analyzing one scenario.
typedef struct FdScenario FdScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *fd_version(void);

// Message of the last failure on this thread; empty after a success.
// Valid until the next call on this thread.
const char *fd_last_error_message(void);

// # Safety
// `s` must come from this library or be null.
void fd_string_free(char *s);

// Feasibility verdict for an upstream and a variant change kind, given by label
// (for example `"Method Rename"`).
//
// # Safety
// Strings must be NUL-terminated; `out` must be writable.
enum FdStatus fd_verdict(const char *an_kind, const char *cm_kind, enum FdVerdict *out);

// The feasibility matrix as comma-separated text with a tally footer.
//
// # Safety
// `out` must be writable.
enum FdStatus fd_matrix_grid(char **out);

// Inventory of every source file with extension `ext` (for example `".java"`)
// below `root`; `version` is an [`FdVersion`].
//
// # Safety
// Strings must be NUL-terminated; `out` must be writable.
enum FdStatus fd_inventory_from_dir(const char *root,
                                    const char *ext,
                                    int version,
                                    struct FdInventory **out);

// Inventory of a single in-memory source file.
//
// # Safety
// Strings must be NUL-terminated; `out` must be writable.
enum FdStatus fd_inventory_from_source(const char *path,
                                       const char *text,
                                       int version,
                                       struct FdInventory **out);

// Number of uniquely keyed methods; 0 for null.
//
// # Safety
// `inv` must be a live handle or null.
uintptr_t fd_inventory_len(const struct FdInventory *inv);

// Number of files skipped while building the inventory; 0 for null.
//
// # Safety
// `inv` must be a live handle or null.
uintptr_t fd_inventory_skipped(const struct FdInventory *inv);

// # Safety
// `inv` must come from this library or be null, and is invalid afterwards.
void fd_inventory_free(struct FdInventory *inv);

// Classify every method of `ao` against `derived` (`direction` is an [`FdDirection`]). Thresholds must lie in (0, 1].
//
// # Safety
// Handles must be live; `out` must be writable.
enum FdStatus fd_changeset_build(const struct FdInventory *ao,
                                 const struct FdInventory *derived,
                                 int direction,
                                 double sim_threshold,
                                 double inline_threshold,
                                 struct FdChangeSet **out);

// Per-kind counts in table order (Identical first, Unmatched last) written to `counts[0..12]`.
//
// # Safety
// `cs` must be live; `counts` must hold 12 values.
enum FdStatus fd_changeset_kind_counts(const struct FdChangeSet *cs, uint64_t *counts);

// JSON document of the change set.
//
// # Safety
// `cs` must be live; `out` must be writable.
enum FdStatus fd_changeset_to_json(const struct FdChangeSet *cs, char **out);

// # Safety
// `cs` must come from this library or be null, and is invalid afterwards.
void fd_changeset_free(struct FdChangeSet *cs);

// Analyze the scenario described by a config file on `jobs` threads (0 means 1).
//
// # Safety
// `config_path` must be NUL-terminated; `out` must be writable.
enum FdStatus fd_scenario_analyze(const char *config_path,
                                  bool refine_yellow,
                                  uintptr_t jobs,
                                  struct FdScenario **out);

// 1 when files or subsystems were skipped, 0 otherwise, -1 for null.
//
// # Safety
// `sc` must be live or null.
int fd_scenario_is_partial(const struct FdScenario *sc);

// Render the scenario report as `report`, `grid` or `text`.
//
// # Safety
// `sc` must be live; `format` NUL-terminated; `out` writable.
enum FdStatus fd_scenario_render(const struct FdScenario *sc, const char *format, char **out);

// Write every report file of the scenario below `out_dir`, as the command line does.
//
// # Safety
// `sc` must be live; `out_dir` NUL-terminated.
enum FdStatus fd_scenario_write(const struct FdScenario *sc, const char *out_dir);

// # Safety
// `sc` must come from this library or be null, and is invalid afterwards.
void fd_scenario_free(struct FdScenario *sc);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FORKDELTA_H */
