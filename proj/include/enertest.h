/* Copyright 2026 The enertest Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API for the enertest library: staged power traces, energy-issue
 * detection, and campaign orchestration over a simulated app fleet.
 *
 * Conventions:
 *  - Every fallible function returns et_status; ET_OK is 0.
 *  - On failure, et_last_error() returns a thread-local message describing
 *    the most recent failing call on the calling thread.
 *  - Objects are opaque handles created by et_*_ functions and released
 *    with the matching et_*_free. Passing NULL to a free is a no-op.
 *  - Distinct handles may be used concurrently from distinct threads; a
 *    single handle is not internally synchronized.
 */

#ifndef ENERTEST_H_
#define ENERTEST_H_

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__)
#define ET_API __attribute__((visibility("default")))
#else
#define ET_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum et_status {
  ET_OK = 0,
  ET_ERR_IO = 1,
  ET_ERR_PARSE = 2,
  ET_ERR_CONFIG = 3,
  ET_ERR_BOUNDS = 4,
  ET_ERR_ORDER = 5,
  ET_ERR_STAGE_MISSING = 6,
  ET_ERR_DEGENERATE_BASELINE = 7,
  ET_ERR_INSUFFICIENT_CORPUS = 8,
  ET_ERR_PATH = 9,
  ET_ERR_INDEX = 10,
  ET_ERR_INVALID_ARGUMENT = 11,
  ET_ERR_INTERNAL = 100
} et_status;

/* Message for the most recent failing call on this thread. Never NULL; the
 * pointer stays valid until the next failing call on the same thread. */
ET_API const char* et_last_error(void);

/* --- staged power traces --------------------------------------------------
 *
 * A trace file holds '# stage <label> <start_ms>' header lines followed by
 * 'timestamp_ms,power_mw' sample lines. Reading validates stage structure:
 * canonical order, in-bounds markers, and at least 10 samples per stage.
 */

typedef struct et_trace et_trace;

ET_API et_status et_trace_read_file(const char* path, et_trace** out);
ET_API et_status et_trace_write_file(const et_trace* trace, const char* path);
ET_API void et_trace_free(et_trace* trace);

ET_API et_status et_trace_sample_count(const et_trace* trace, size_t* out);
ET_API et_status et_trace_stage_count(const et_trace* trace, size_t* out);

/* stage is one of "PRE-OFF", "IDLE", "EXECUTION", "BACKGROUND",
 * "SCREEN-OFF". Fails with ET_ERR_STAGE_MISSING if the trace lacks it. */
ET_API et_status et_trace_stage_mean(const et_trace* trace, const char* stage,
                                     double* out_mw);

/* EXECUTION-stage feature vector: out[0] = total CHPP length in ms,
 * out[1] = CHPP count, out[2] = CHPP mean power in mW, out[3] = stage mean
 * power in mW. A CHPP is a maximal run of samples strictly above
 * threshold_mw lasting at least min_duration_ms. */
ET_API et_status et_trace_features(const et_trace* trace, double threshold_mw,
                                   int64_t min_duration_ms, double out[4]);

/* --- scalar helpers ------------------------------------------------------- */

/* Wasted energy of e_x_mw against baseline e_n_mw, as a percentage. */
ET_API et_status et_energy_waste(double e_x_mw, double e_n_mw,
                                 double* out_percent);

/* One-sided relative increase of e_a_mw over baseline e_b_mw, clamped at 0. */
ET_API et_status et_dissimilarity(double e_a_mw, double e_b_mw, double* out);

/* Weight of a sequence with s screen changes and c interaction events:
 * alpha*s + beta*c. alpha and beta must be positive and sum to 1. */
ET_API et_status et_sequence_weight(int64_t s, int64_t c, double alpha,
                                    double beta, double* out);

/* --- campaigns ------------------------------------------------------------ */

typedef struct et_campaign_result et_campaign_result;

/* Runs a testing campaign described by the JSON config file at config_path
 * and writes the database into out_dir. seed, budget_cases, workers, and
 * emit_plots override any values from the file. budget_cases must be >= 0
 * (0 runs nothing and writes an empty database); workers must be >= 1. */
ET_API et_status et_campaign_run(const char* config_path, uint64_t seed,
                                 int64_t budget_cases, const char* out_dir,
                                 int workers, int emit_plots,
                                 et_campaign_result** out);
ET_API et_status et_campaign_cases_run(const et_campaign_result* result,
                                       int64_t* out);
ET_API et_status et_campaign_issue_count(const et_campaign_result* result,
                                         size_t* out);
ET_API et_status et_campaign_detection_events(const et_campaign_result* result,
                                              int64_t* out);
ET_API void et_campaign_result_free(et_campaign_result* result);

/* Renders report/report.md plus per-issue JSON under db_dir/report. */
ET_API et_status et_report_generate(const char* db_dir);

/* --- scoring -------------------------------------------------------------- */

typedef struct et_score et_score;

/* Issue kind selectors for et_score accessors. */
#define ET_KIND_EXECUTION 0
#define ET_KIND_BACKGROUND 1
#define ET_KIND_NOSLEEP 2

/* Scores the database in db_dir against the ground truth regenerated from
 * the fleet spec at fleet_path, and writes db_dir/score.json. Fails with
 * ET_ERR_CONFIG if the fleet spec does not match the database. */
ET_API et_status et_score_compute(const char* db_dir, const char* fleet_path,
                                  et_score** out);
ET_API et_status et_score_precision(const et_score* score, int kind,
                                    double* out);
ET_API et_status et_score_recall(const et_score* score, int kind, double* out);
ET_API et_status et_score_counts(const et_score* score, int kind, int64_t* tp,
                                 int64_t* fp, int64_t* fn);
ET_API void et_score_free(et_score* score);

#ifdef __cplusplus
}
#endif

#endif /* ENERTEST_H_ */
