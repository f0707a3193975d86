#ifndef A11Y_AUDIT_H
#define A11Y_AUDIT_H

#include <stddef.h>
#include <stdint.h>

typedef enum A11yStatus {
  A11Y_STATUS_OK = 0,
  A11Y_STATUS_NULL_ARGUMENT = 1,
  A11Y_STATUS_INVALID_UTF8 = 2,
  A11Y_STATUS_IO = 3,
  A11Y_STATUS_PARSE = 4,
  A11Y_STATUS_CONFIG = 5,
  A11Y_STATUS_INTERNAL = 6,
} A11yStatus;

// Opaque audit configuration.
typedef struct A11yConfig A11yConfig;

// Opaque audit snapshot.
typedef struct A11ySnapshot A11ySnapshot;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call into this library on the same thread.
const char *a11y_last_error(void);

// # Safety
// `out` must be a valid pointer.
enum A11yStatus a11y_config_new_default(struct A11yConfig **out);

// # Safety
// `json` must be a NUL-terminated string; `out` a valid pointer.
enum A11yStatus a11y_config_from_json(const char *json, struct A11yConfig **out);

// # Safety
// `config` must come from this library or be null.
void a11y_config_free(struct A11yConfig *config);

// Audit the directory at `root`. A null `config` loads
// `<root>/a11y.config.json` if present; a null `timestamp` uses the
// current time.
//
// # Safety
// String arguments must be NUL-terminated or null where allowed; `out`
// must be a valid pointer.
enum A11yStatus a11y_audit_dir(const char *root,
                               const struct A11yConfig *config,
                               const char *timestamp,
                               struct A11ySnapshot **out);

// # Safety
// `json` must be a NUL-terminated string; `out` a valid pointer.
enum A11yStatus a11y_snapshot_from_json(const char *json, struct A11ySnapshot **out);

// # Safety
// `snapshot` must come from this library or be null.
void a11y_snapshot_free(struct A11ySnapshot *snapshot);

// Canonical snapshot JSON.
//
// # Safety
// `snapshot` must be a live handle; `out` a valid pointer.
enum A11yStatus a11y_snapshot_to_json(const struct A11ySnapshot *snapshot, char **out);

// Render as `"json"`, `"csv"` or `"markdown"`.
//
// # Safety
// `snapshot` must be a live handle, `format` NUL-terminated, `out` valid.
enum A11yStatus a11y_snapshot_render(const struct A11ySnapshot *snapshot,
                                     const char *format,
                                     char **out);

// # Safety
// `snapshot` must be a live handle; `out` a valid pointer.
enum A11yStatus a11y_snapshot_issue_count(const struct A11ySnapshot *snapshot, size_t *out);

// Issues that would fail the gate. `baseline_json` (a JSON list of
// fingerprints) may be null; `fail_on` is `"error"` or `"warning"`.
//
// # Safety
// `snapshot` must be a live handle, strings NUL-terminated or null where
// allowed, `out` valid.
enum A11yStatus a11y_snapshot_gate_count(const struct A11ySnapshot *snapshot,
                                         const char *baseline_json,
                                         const char *fail_on,
                                         size_t *out);

// Diff two snapshots, rendered as `"json"`, `"csv"` or `"markdown"`.
//
// # Safety
// Handles must be live, `format` NUL-terminated, `out` valid.
enum A11yStatus a11y_diff(const struct A11ySnapshot *old,
                          const struct A11ySnapshot *new_,
                          const char *format,
                          char **out);

// Contrast ratio between two `0xRRGGBB` colors. Bits above 24 are ignored.
double a11y_contrast_ratio(uint32_t foreground, uint32_t background);

// The rule catalog as JSON.
//
// # Safety
// `out` must be a valid pointer.
enum A11yStatus a11y_rules_json(char **out);

// # Safety
// `s` must be a string returned by this library, or null.
void a11y_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* A11Y_AUDIT_H */
