#ifndef PISEN_H
#define PISEN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every exported function.
typedef enum PisenStatus {
  PISEN_STATUS_OK = 0,
  PISEN_STATUS_NULL_POINTER = 1,
  PISEN_STATUS_INVALID_UTF8 = 2,
  PISEN_STATUS_INPUT_ERROR = 3,
  PISEN_STATUS_BUILD_ERROR = 4,
  PISEN_STATUS_CHECK_FAILED = 5,
  PISEN_STATUS_PANIC = 6,
} PisenStatus;

// A built differential module.
typedef struct PisenModule PisenModule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a module from an input document. `slack < 0` selects the default.
//
// # Safety
// `json` must be a valid nul-terminated string and `out` a writable pointer.
enum PisenStatus pisen_module_from_json(const char *json, int64_t slack, struct PisenModule **out);

// Releases a module handle. Null is ignored.
//
// # Safety
// `module` must come from `pisen_module_from_json` and not be freed twice.
void pisen_module_free(struct PisenModule *module);

// Dimension of the module, or 0 for a null handle.
//
// # Safety
// `module` must be null or a live handle.
uintptr_t pisen_module_dim(const struct PisenModule *module);

// Serializes operators, weights and bigrading as JSON.
//
// # Safety
// `module` must be a live handle and `out` a writable pointer.
enum PisenStatus pisen_module_to_json(const struct PisenModule *module, char **out);

// Runs every structural check and writes the report as JSON.
// Returns `CheckFailed` (with the report still written) if any check fails.
//
// # Safety
// `module` must be a live handle and `out` a writable pointer.
enum PisenStatus pisen_module_verify(const struct PisenModule *module, int64_t slack, char **out);

// Validates the `phin` section of a document and writes
// `{"valid": bool, "issues": [...]}`. Returns `CheckFailed` when invalid.
//
// # Safety
// `json` must be a valid nul-terminated string and `out` a writable pointer.
enum PisenStatus pisen_validate_json(const char *json, char **out);

// Writes a built-in input document. `prime == 0` and `precision <= 0`
// select the defaults 5 and 24.
//
// # Safety
// `name` must be a valid nul-terminated string and `out` a writable pointer.
enum PisenStatus pisen_example_json(const char *name,
                                    uint64_t prime,
                                    int64_t precision,
                                    char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void pisen_string_free(char *s);

// Message for the last failure on this thread, or null. Valid until the
// next call into the library from the same thread.
const char *pisen_last_error(void);

// Library version as a static string.
const char *pisen_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PISEN_H */
