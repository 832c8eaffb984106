/*   Copyright 2026 The tdlog authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
 */

/* C API of the tdlog reasoning engine.
 *
 * All state hangs off a tdlog_ctx: programs and datasets parsed against the
 * same context share one symbol space and may be combined freely. Handles are
 * opaque; every fallible call returns a tdlog_status and reports details via
 * tdlog_last_error(ctx). A context and the objects created from it must be
 * used from one thread at a time and freed before the context.
 */
#ifndef TDLOG_TDLOG_H
#define TDLOG_TDLOG_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct tdlog_ctx tdlog_ctx;
typedef struct tdlog_program tdlog_program;
typedef struct tdlog_dataset tdlog_dataset;
typedef struct tdlog_result tdlog_result;  /* chase / stratified evaluation */
typedef struct tdlog_report tdlog_report;  /* check / selftest reports */

typedef enum tdlog_status {
    TDLOG_OK = 0,
    TDLOG_ERR_PARSE = 1,      /* diagnostics in tdlog_last_error */
    TDLOG_ERR_CONFIG = 2,     /* invalid configuration or unsupported input */
    TDLOG_ERR_STEP_LIMIT = 3, /* chase did not complete; answer undecided */
    TDLOG_ERR_BAD_ARGUMENT = 4,
    TDLOG_ERR_INTERNAL = 5
} tdlog_status;

enum {
    TDLOG_ACTIVITY_SEMI_OBLIVIOUS = 0,
    TDLOG_ACTIVITY_RESTRICTED = 1
};

enum {
    TDLOG_ORDER_GREEDY = 0,
    TDLOG_ORDER_FIFO = 1
};

enum {
    TDLOG_FORMAT_TABLE = 0,      /* degrees with 6 decimal places */
    TDLOG_FORMAT_STRUCTURED = 1  /* JSON, shortest round-trip degrees */
};

/* max_steps: > 0 explicit bound, TDLOG_STEPS_AUTO derives a bound from the
 * instance (requires a weakly acyclic program), TDLOG_STEPS_UNBOUNDED never
 * stops early. */
#define TDLOG_STEPS_AUTO (-1)
#define TDLOG_STEPS_UNBOUNDED (-2)

typedef struct tdlog_chase_config {
    int activity;       /* TDLOG_ACTIVITY_* */
    int order;          /* TDLOG_ORDER_* */
    double k;           /* satisfaction parameter K in [0,1] */
    int64_t max_steps;  /* see above */
    int record_trace;   /* nonzero to record a trace */
} tdlog_chase_config;

/* Defaults: restricted greedy, K = 1, auto step limit, trace recording on. */
void tdlog_chase_config_init(tdlog_chase_config* config);

const char* tdlog_version(void);

tdlog_ctx* tdlog_ctx_new(void);
void tdlog_ctx_free(tdlog_ctx* ctx);

/* Message of the most recent failure on this context; empty string if none.
 * The pointer stays valid until the next API call on the context. */
const char* tdlog_last_error(const tdlog_ctx* ctx);

/* ---- parsing ---------------------------------------------------------- */

tdlog_status tdlog_program_parse(tdlog_ctx* ctx, const char* text, tdlog_program** out);
void tdlog_program_free(tdlog_program* program);
int tdlog_program_rule_count(const tdlog_program* program);
int tdlog_program_uses_existentials(const tdlog_program* program);
int tdlog_program_uses_unary_ops(const tdlog_program* program);

tdlog_status tdlog_dataset_parse(tdlog_ctx* ctx, const char* text, tdlog_dataset** out);
/* Union of two datasets parsed against the same context; a duplicate atom is
 * an error (datasets are partial functions). */
tdlog_status tdlog_dataset_union(tdlog_ctx* ctx, tdlog_dataset* dst, const tdlog_dataset* src);
void tdlog_dataset_free(tdlog_dataset* dataset);
size_t tdlog_dataset_size(const tdlog_dataset* dataset);

/* ---- static analysis --------------------------------------------------- */

/* Fragment classification, weak-acyclicity verdict (with a witness cycle
 * when negative), and stratifiability (with strata or a witness cycle). */
tdlog_status tdlog_program_check(tdlog_ctx* ctx, const tdlog_program* program, int format,
                                 tdlog_report** out);

int tdlog_report_ok(const tdlog_report* report);
const char* tdlog_report_text(const tdlog_report* report);
/* Failing selftest instances as program/dataset text pairs, ready to write
 * out as .tdl/.tdf reproducer files. Zero for check reports. */
size_t tdlog_report_reproducer_count(const tdlog_report* report);
const char* tdlog_report_reproducer_program(const tdlog_report* report, size_t index);
const char* tdlog_report_reproducer_dataset(const tdlog_report* report, size_t index);
void tdlog_report_free(tdlog_report* report);

/* ---- chase and stratified evaluation ----------------------------------- */

/* Runs the configured chase from the dataset's minimal interpretation. A
 * step-limited run still returns TDLOG_OK; inspect tdlog_result_completed. */
tdlog_status tdlog_chase_run(tdlog_ctx* ctx, const tdlog_program* program,
                             const tdlog_dataset* dataset, const tdlog_chase_config* config,
                             tdlog_result** out);

/* Stratified semantics for programs with unary operators (K = 1, greedy
 * order per stratum). Also accepts plain programs. */
tdlog_status tdlog_eval_stratified(tdlog_ctx* ctx, const tdlog_program* program,
                                   const tdlog_dataset* dataset, tdlog_result** out);

int tdlog_result_completed(const tdlog_result* result);
uint64_t tdlog_result_steps(const tdlog_result* result);
/* Interpretation dump: `DEGREE :: Atom.` lines sorted by (predicate, args),
 * or a JSON object in structured format. Pointer valid while the result
 * lives. */
const char* tdlog_result_interpretation(tdlog_result* result, int format);
/* Deterministic trace serialization (empty when tracing was off). */
const char* tdlog_result_trace(tdlog_result* result);
/* Exact degree of a ground atom (0 when unsupported). */
tdlog_status tdlog_result_degree(tdlog_ctx* ctx, const tdlog_result* result,
                                 const char* ground_atom, double* out);
void tdlog_result_free(tdlog_result* result);

/* ---- entailment --------------------------------------------------------- */

/* K-entailment of a ground goal at threshold c through the chase (or
 * stratified evaluation for unary-operator programs). On TDLOG_OK, *answer
 * is 1 (yes) or 0 (no) and *degree is the exact goal degree in the universal
 * model. A step-limited chase yields TDLOG_ERR_STEP_LIMIT and leaves the
 * outputs untouched: the answer is undecided, never guessed. */
tdlog_status tdlog_entail(tdlog_ctx* ctx, const tdlog_program* program,
                          const tdlog_dataset* dataset, const char* goal, double threshold,
                          const tdlog_chase_config* config, int* answer, double* degree);

/* ---- selftest ----------------------------------------------------------- */

typedef struct tdlog_selftest_config {
    uint64_t seed;
    int tdatalog_instances;
    int existential_instances;
    int stratified_instances;
    uint64_t law_samples;
    int negative_control; /* nonzero injects a broken connective; the run
                             must flag it and the report then counts a
                             failure by design */
} tdlog_selftest_config;

void tdlog_selftest_config_init(tdlog_selftest_config* config);

tdlog_status tdlog_selftest(tdlog_ctx* ctx, const tdlog_selftest_config* config,
                            tdlog_report** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TDLOG_TDLOG_H */
