/* C interface to the haphazard-input benchmark core.
 *
 * Conventions:
 *  - Every fallible call returns an hz_status; HZ_OK is 0.
 *  - On failure, hz_last_error() describes the problem (thread-local).
 *  - All returned strings are heap buffers owned by the caller; release them
 *    with hz_free(). JSON in, JSON out.
 *  - Instances use the stream line form {"t":int,"x":{"<id>":value,...},"y":0|1}.
 */
#ifndef HAPHAZARD_H
#define HAPHAZARD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int hz_status;

#define HZ_OK 0
#define HZ_ERR_INVALID_INPUT 1
#define HZ_ERR_PARSE 2
#define HZ_ERR_FORMAT 3
#define HZ_ERR_ORDERING 4
#define HZ_ERR_ENCODING 5
#define HZ_ERR_UNDEFINED_METRIC 6
#define HZ_ERR_CAPACITY 7
#define HZ_ERR_SEARCH 8
#define HZ_ERR_DIVERGED 9
#define HZ_ERR_IO 10
#define HZ_ERR_UNKNOWN 99

const char* hz_version(void);

/* Message for the most recent failure on this thread; empty after success. */
const char* hz_last_error(void);

void hz_free(char* buf);

/* JSON array of supported model names. */
hz_status hz_models(char** out_json);

/* Masks a dataset into a haphazard stream.
 * Request: {"dataset","loader","label_column","missing_markers","delimiter",
 *           "header","p","seed","out"}; all but dataset optional. When "out"
 * is set the stream is written as JSON lines to that path.
 * Response: {"instances":n,"features":m,"path":out-or-null}. */
hz_status hz_simulate(const char* request_json, char** out_json);

/* Runs one experiment (model, dataset, p, seeds) and returns the full run
 * record. Request: experiment fields plus optional "out_dir" to persist the
 * record. Response: the record, plus "saved_path" when persisted. */
hz_status hz_run(const char* request_json, char** out_json);

/* Grid search at p = 0.5.
 * Request: {"model","grid":{name:[values...],...},"base":{experiment fields},
 *           "jobs"}. Response: {"best_config","best_score","cells":[...]}. */
hz_status hz_grid(const char* request_json, char** out_json);

/* Summarizes persisted run records.
 * Request: {"records_dir","grouping":{...},"out_csv","out_json"} (outputs
 * optional). Response: {"report":{...},"csv":"..."}. */
hz_status hz_report(const char* request_json, char** out_json);

/* Energy/carbon estimate for a wall time under a hardware profile.
 * Request: {"time_s", "profile":{...}} or {"time_s","profile_path":path}.
 * Response: {"energy_kwh","carbon_kg"}. */
hz_status hz_carbon(const char* request_json, char** out_json);

/* --- Incremental learner handles ------------------------------------- */

typedef struct hz_learner hz_learner;

hz_status hz_learner_new(const char* model, const char* config_json, uint64_t seed,
                         hz_learner** out);

/* Prequential contract: each instance must be predicted before it is used
 * for an update, once, in non-decreasing t order. */
hz_status hz_learner_predict(hz_learner* h, const char* instance_json, int* out_label,
                             double* out_score);
hz_status hz_learner_update(hz_learner* h, const char* instance_json, int label);
void hz_learner_free(hz_learner* h);

/* --- Materialized stream handles -------------------------------------- */

typedef struct hz_stream hz_stream;

/* Request: same fields as hz_simulate minus "out". */
hz_status hz_stream_open(const char* request_json, hz_stream** out);
hz_status hz_stream_size(const hz_stream* h, size_t* out_size);
hz_status hz_stream_instance(const hz_stream* h, size_t index, char** out_json);
void hz_stream_free(hz_stream* h);

#ifdef __cplusplus
}
#endif

#endif /* HAPHAZARD_H */
