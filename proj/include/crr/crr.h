#ifndef CRR_CRR_H
#define CRR_CRR_H

/* C interface to the color range reporting library.
 *
 * Every function returns a crr_status. On failure, crr_last_error() gives a
 * message for the calling thread that stays valid until its next call into
 * the library. Handles are opaque. Queries on one handle may run from
 * several threads at once; updates need exclusive access. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CRR_BUILDING_LIBRARY)
#    define CRR_API __declspec(dllexport)
#  else
#    define CRR_API __declspec(dllimport)
#  endif
#elif defined(CRR_BUILDING_LIBRARY)
#  define CRR_API __attribute__((visibility("default")))
#else
#  define CRR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum crr_status {
  CRR_OK = 0,
  CRR_E_INVALID_ARGUMENT = 1,
  CRR_E_INVALID_RANGE = 2,
  CRR_E_DUPLICATE = 3,
  CRR_E_NOT_FOUND = 5,
  CRR_E_IO = 6,
  CRR_E_FORMAT = 7,
  CRR_E_UNSUPPORTED = 8,   /* operation not offered by this index kind */
  CRR_E_BUFFER_TOO_SMALL = 9,
  CRR_E_INTERNAL = 10
} crr_status;

typedef enum crr_kind {
  CRR_STATIC = 0,   /* O(locate + k) static index */
  CRR_DYNAMIC = 1,  /* fully dynamic index */
  CRR_SLOW = 2,     /* dynamic, also answers k-leftmost selection */
  CRR_EM = 3,       /* external-memory static index on a block store */
  CRR_ORACLE = 4    /* linear scan, for cross-checking */
} crr_kind;

typedef struct crr_point {
  uint64_t value; /* at least 1 */
  uint32_t color; /* dense id */
} crr_point;

/* Counters of one call. block_reads and locate_reads are only charged by
 * CRR_EM. */
typedef struct crr_cost {
  uint64_t touches;
  uint64_t locate_ops;
  uint64_t block_reads;
  uint64_t locate_reads;
  int fallback; /* nonzero when the query used the slow fallback path */
} crr_cost;

typedef struct crr_info {
  crr_kind kind;
  uint64_t size;
  uint64_t colors;     /* distinct colors at build time (CRR_EM) or now */
  uint32_t block_size; /* CRR_EM only, otherwise 0 */
} crr_info;

typedef struct crr_index crr_index;
typedef struct crr_dataset crr_dataset;

CRR_API const char* crr_last_error(void);
CRR_API const char* crr_status_name(crr_status s);

/* Points may come in any order; values must be distinct and nonzero.
 * block_size is read by CRR_EM only. */
CRR_API crr_status crr_build(crr_kind kind, const crr_point* points, size_t n,
                             uint32_t block_size, crr_index** out);
CRR_API void crr_free(crr_index* index);
CRR_API crr_status crr_info_get(const crr_index* index, crr_info* out);

/* Writes the distinct colors of [a,b] to out. If more than cap colors are
 * present, *count receives the full answer size and the call returns
 * CRR_E_BUFFER_TOO_SMALL. cost may be NULL. */
CRR_API crr_status crr_query(const crr_index* index, uint64_t a, uint64_t b, uint32_t* out,
                             size_t cap, size_t* count, crr_cost* cost);

/* CRR_DYNAMIC, CRR_SLOW and CRR_ORACLE only. */
CRR_API crr_status crr_insert(crr_index* index, uint64_t value, uint32_t color);
CRR_API crr_status crr_delete(crr_index* index, uint64_t value);

/* The k colors whose first occurrence in [a,b] is leftmost, in that order.
 * CRR_SLOW and CRR_ORACLE only. */
CRR_API crr_status crr_k_leftmost(const crr_index* index, uint64_t a, uint64_t b, size_t k,
                                  uint32_t* out, size_t* count);

/* Index files. CRR_EM only. */
CRR_API crr_status crr_save(const crr_index* index, const char* path);
CRR_API crr_status crr_load(const char* path, crr_index** out);

/* Dataset CSV files of `value,label` lines. Labels get dense ids in order
 * of first appearance; points come back sorted by value. */
CRR_API crr_status crr_dataset_read(const char* path, crr_dataset** out);
CRR_API void crr_dataset_free(crr_dataset* ds);
CRR_API size_t crr_dataset_size(const crr_dataset* ds);
CRR_API const crr_point* crr_dataset_points(const crr_dataset* ds);
CRR_API size_t crr_dataset_colors(const crr_dataset* ds);
CRR_API const char* crr_dataset_label(const crr_dataset* ds, uint32_t color);

#ifdef __cplusplus
}
#endif

#endif
