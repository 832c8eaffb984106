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
#include "tdlog/tdlog.h"

#include <json.hpp>

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "chase.hpp"
#include "lang.hpp"
#include "model.hpp"
#include "oracle.hpp"
#include "reason.hpp"
#include "term.hpp"

using nlohmann::json;

struct tdlog_ctx {
    std::shared_ptr<tdlog::Universe> universe = std::make_shared<tdlog::Universe>();
    std::string last_error;
};

struct tdlog_program {
    tdlog::Program program;
};

struct tdlog_dataset {
    tdlog::FuzzyDataset dataset;
};

struct tdlog_result {
    bool completed = true;
    uint64_t steps = 0;
    tdlog::FuzzyInterpretation interpretation;
    std::string trace;
    // Lazily rendered dumps, one per format.
    std::string table_dump;
    std::string structured_dump;

    explicit tdlog_result(tdlog::FuzzyInterpretation interp)
        : interpretation(std::move(interp)) {}
};

struct tdlog_report {
    bool ok = true;
    std::string text;
    std::vector<std::pair<std::string, std::string>> reproducers;
};

namespace {

tdlog_status fail(tdlog_ctx* ctx, tdlog_status status, const std::string& message) {
    if (ctx) ctx->last_error = message;
    return status;
}

// Runs fn, translating engine exceptions into status codes.
template <typename Fn>
tdlog_status guarded(tdlog_ctx* ctx, Fn&& fn) {
    try {
        return fn();
    } catch (const tdlog::ConfigError& e) {
        return fail(ctx, TDLOG_ERR_CONFIG, e.what());
    } catch (const tdlog::ContractViolation& e) {
        return fail(ctx, TDLOG_ERR_BAD_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(ctx, TDLOG_ERR_INTERNAL, e.what());
    }
}

tdlog_status convert_config(tdlog_ctx* ctx, const tdlog_chase_config* in,
                            tdlog::StrategyConfig* out) {
    tdlog_chase_config defaults;
    tdlog_chase_config_init(&defaults);
    if (!in) in = &defaults;
    if (in->activity != TDLOG_ACTIVITY_SEMI_OBLIVIOUS && in->activity != TDLOG_ACTIVITY_RESTRICTED)
        return fail(ctx, TDLOG_ERR_BAD_ARGUMENT, "invalid activity");
    if (in->order != TDLOG_ORDER_GREEDY && in->order != TDLOG_ORDER_FIFO)
        return fail(ctx, TDLOG_ERR_BAD_ARGUMENT, "invalid order");
    if (!(in->k >= 0.0 && in->k <= 1.0))
        return fail(ctx, TDLOG_ERR_BAD_ARGUMENT, "K must lie in [0,1]");
    out->activity = in->activity == TDLOG_ACTIVITY_SEMI_OBLIVIOUS
                        ? tdlog::Activity::SemiOblivious
                        : tdlog::Activity::Restricted;
    out->order = in->order == TDLOG_ORDER_GREEDY ? tdlog::ChaseOrder::Greedy
                                                 : tdlog::ChaseOrder::Fifo;
    out->k = tdlog::TruthDegree(in->k);
    if (in->max_steps == TDLOG_STEPS_AUTO)
        out->max_steps = tdlog::StepLimit::automatic();
    else if (in->max_steps == TDLOG_STEPS_UNBOUNDED)
        out->max_steps = tdlog::StepLimit::unbounded();
    else if (in->max_steps > 0)
        out->max_steps = tdlog::StepLimit::exactly(static_cast<uint64_t>(in->max_steps));
    else
        return fail(ctx, TDLOG_ERR_BAD_ARGUMENT, "invalid max_steps");
    out->record_trace = in->record_trace != 0;
    return TDLOG_OK;
}

std::string structured_interpretation(const tdlog::FuzzyInterpretation& interp) {
    // Same ordering as the table dump, exact degrees as JSON numbers.
    const tdlog::Universe& u = *interp.universe();
    std::vector<const tdlog::Atom*> atoms;
    atoms.reserve(interp.support().size());
    for (const auto& [atom, _] : interp.support()) atoms.push_back(&atom);
    std::sort(atoms.begin(), atoms.end(),
              [&](const tdlog::Atom* a, const tdlog::Atom* b) { return u.atom_less(*a, *b); });
    json out = json::array();
    for (const tdlog::Atom* a : atoms)
        out.push_back({{"atom", u.atom_text(*a)}, {"degree", interp.degree(*a).value()}});
    return json{{"atoms", out}}.dump(2) + "\n";
}

}  // namespace

extern "C" {

void tdlog_chase_config_init(tdlog_chase_config* config) {
    if (!config) return;
    config->activity = TDLOG_ACTIVITY_RESTRICTED;
    config->order = TDLOG_ORDER_GREEDY;
    config->k = 1.0;
    config->max_steps = TDLOG_STEPS_AUTO;
    config->record_trace = 1;
}

const char* tdlog_version(void) { return "0.1.0"; }

tdlog_ctx* tdlog_ctx_new(void) {
    try {
        return new tdlog_ctx;
    } catch (...) {
        return nullptr;
    }
}

void tdlog_ctx_free(tdlog_ctx* ctx) { delete ctx; }

const char* tdlog_last_error(const tdlog_ctx* ctx) {
    return ctx ? ctx->last_error.c_str() : "";
}

tdlog_status tdlog_program_parse(tdlog_ctx* ctx, const char* text, tdlog_program** out) {
    if (!ctx || !text || !out) return fail(ctx, TDLOG_ERR_BAD_ARGUMENT, "null argument");
    return guarded(ctx, [&]() -> tdlog_status {
        tdlog::ParseResult<tdlog::Program> parsed = tdlog::parse_program(text, ctx->universe);
        if (!parsed.ok()) return fail(ctx, TDLOG_ERR_PARSE, parsed.diagnostics_text());
        *out = new tdlog_program{std::move(*parsed.value)};
        return TDLOG_OK;
    });
}

void tdlog_program_free(tdlog_program* program) { delete program; }

int tdlog_program_rule_count(const tdlog_program* program) {
    return program ? static_cast<int>(program->program.rules().size()) : 0;
}

int tdlog_program_uses_existentials(const tdlog_program* program) {
    return program && program->program.uses_existentials() ? 1 : 0;
}

int tdlog_program_uses_unary_ops(const tdlog_program* program) {
    return program && program->program.uses_unary_ops() ? 1 : 0;
}

tdlog_status tdlog_dataset_parse(tdlog_ctx* ctx, const char* text, tdlog_dataset** out) {
    if (!ctx || !text || !out) return fail(ctx, TDLOG_ERR_BAD_ARGUMENT, "null argument");
    return guarded(ctx, [&]() -> tdlog_status {
        tdlog::ParseResult<tdlog::FuzzyDataset> parsed = tdlog::parse_dataset(text, ctx->universe);
        if (!parsed.ok()) return fail(ctx, TDLOG_ERR_PARSE, parsed.diagnostics_text());
        *out = new tdlog_dataset{std::move(*parsed.value)};
        return TDLOG_OK;
    });
}

tdlog_status tdlog_dataset_union(tdlog_ctx* ctx, tdlog_dataset* dst, const tdlog_dataset* src) {
    if (!ctx || !dst || !src) return fail(ctx, TDLOG_ERR_BAD_ARGUMENT, "null argument");
    return guarded(ctx, [&]() -> tdlog_status {
        for (const auto& [atom, degree] : src->dataset.facts())
            if (!dst->dataset.insert(atom, degree))
                return fail(ctx, TDLOG_ERR_PARSE,
                            "duplicate fact across datasets: " +
                                ctx->universe->atom_text(atom));
        return TDLOG_OK;
    });
}

void tdlog_dataset_free(tdlog_dataset* dataset) { delete dataset; }

size_t tdlog_dataset_size(const tdlog_dataset* dataset) {
    return dataset ? dataset->dataset.size() : 0;
}

tdlog_status tdlog_program_check(tdlog_ctx* ctx, const tdlog_program* program, int format,
                                 tdlog_report** out) {
    if (!ctx || !program || !out) return fail(ctx, TDLOG_ERR_BAD_ARGUMENT, "null argument");
    return guarded(ctx, [&]() -> tdlog_status {
        const tdlog::Program& p = program->program;
        const tdlog::Universe& u = *p.universe();

        tdlog::WeakAcyclicityResult wa = tdlog::check_weak_acyclicity(p);

        bool strat_applicable = !p.uses_existentials();
        tdlog::StratificationResult strat;
        if (strat_applicable) strat = tdlog::compute_stratification(p);

        auto report = std::make_unique<tdlog_report>();
        if (format == TDLOG_FORMAT_STRUCTURED) {
            json j;
            j["fragment"] = p.fragment_name();
            j["rules"] = p.rules().size();
            j["weakly_acyclic"] = wa.weakly_acyclic;
            if (!wa.weakly_acyclic) j["weak_acyclicity_witness"] = wa.witness_text(u);
            if (!strat_applicable) {
                j["stratifiable"] = nullptr;
            } else if (strat.stratifiable()) {
                j["stratifiable"] = true;
                j["strata"] = strat.stratification->stratum_count();
                json levels = json::object();
                for (const auto& [pred, level] : strat.stratification->levels)
                    levels[u.predicate_name(pred)] = level;
                j["levels"] = levels;
            } else {
                j["stratifiable"] = false;
                j["stratification_witness"] = strat.witness;
            }
            report->text = j.dump(2) + "\n";
        } else {
            std::string& t = report->text;
            t += "fragment: " + p.fragment_name() + "\n";
            t += "rules: " + std::to_string(p.rules().size()) + "\n";
            t += "weak acyclicity: " + wa.witness_text(u) + "\n";
            if (!strat_applicable) {
                t += "stratification: not applicable (existential rules)\n";
            } else if (strat.stratifiable()) {
                t += "stratification: stratifiable (" +
                     std::to_string(strat.stratification->stratum_count()) +
                     (strat.stratification->stratum_count() == 1 ? " stratum)\n" : " strata)\n");
                for (const auto& [pred, level] : strat.stratification->levels)
                    t += "  level " + std::to_string(level) + ": " + u.predicate_name(pred) + "\n";
            } else {
                t += "stratification: " + strat.witness + "\n";
            }
        }
        *out = report.release();
        return TDLOG_OK;
    });
}

int tdlog_report_ok(const tdlog_report* report) { return report && report->ok ? 1 : 0; }

const char* tdlog_report_text(const tdlog_report* report) {
    return report ? report->text.c_str() : "";
}

size_t tdlog_report_reproducer_count(const tdlog_report* report) {
    return report ? report->reproducers.size() : 0;
}

const char* tdlog_report_reproducer_program(const tdlog_report* report, size_t index) {
    if (!report || index >= report->reproducers.size()) return "";
    return report->reproducers[index].first.c_str();
}

const char* tdlog_report_reproducer_dataset(const tdlog_report* report, size_t index) {
    if (!report || index >= report->reproducers.size()) return "";
    return report->reproducers[index].second.c_str();
}

void tdlog_report_free(tdlog_report* report) { delete report; }

tdlog_status tdlog_chase_run(tdlog_ctx* ctx, const tdlog_program* program,
                             const tdlog_dataset* dataset, const tdlog_chase_config* config,
                             tdlog_result** out) {
    if (!ctx || !program || !dataset || !out)
        return fail(ctx, TDLOG_ERR_BAD_ARGUMENT, "null argument");
    tdlog::StrategyConfig cfg;
    tdlog_status status = convert_config(ctx, config, &cfg);
    if (status != TDLOG_OK) return status;
    return guarded(ctx, [&]() -> tdlog_status {
        tdlog::ChaseResult chased = tdlog::run_chase(program->program, dataset->dataset, cfg);
        auto result = std::make_unique<tdlog_result>(std::move(chased.interpretation));
        result->completed = chased.status == tdlog::ChaseStatus::Completed;
        result->steps = chased.steps;
        if (cfg.record_trace)
            result->trace = tdlog::trace_text(program->program, cfg, chased.trace);
        *out = result.release();
        return TDLOG_OK;
    });
}

tdlog_status tdlog_eval_stratified(tdlog_ctx* ctx, const tdlog_program* program,
                                   const tdlog_dataset* dataset, tdlog_result** out) {
    if (!ctx || !program || !dataset || !out)
        return fail(ctx, TDLOG_ERR_BAD_ARGUMENT, "null argument");
    return guarded(ctx, [&]() -> tdlog_status {
        tdlog::StratifiedResult evaluated =
            tdlog::evaluate_stratified(program->program, dataset->dataset);
        auto result = std::make_unique<tdlog_result>(std::move(evaluated.interpretation));
        result->completed = true;
        result->steps = evaluated.steps;
        tdlog::StrategyConfig cfg;  // stratified evaluation runs r-greedy at K = 1
        result->trace = tdlog::trace_text(program->program, cfg, evaluated.trace);
        *out = result.release();
        return TDLOG_OK;
    });
}

int tdlog_result_completed(const tdlog_result* result) {
    return result && result->completed ? 1 : 0;
}

uint64_t tdlog_result_steps(const tdlog_result* result) { return result ? result->steps : 0; }

const char* tdlog_result_interpretation(tdlog_result* result, int format) {
    if (!result) return "";
    if (format == TDLOG_FORMAT_STRUCTURED) {
        if (result->structured_dump.empty())
            result->structured_dump = structured_interpretation(result->interpretation);
        return result->structured_dump.c_str();
    }
    if (result->table_dump.empty())
        result->table_dump = result->interpretation.dump(tdlog::DumpStyle::Table);
    return result->table_dump.c_str();
}

const char* tdlog_result_trace(tdlog_result* result) {
    return result ? result->trace.c_str() : "";
}

tdlog_status tdlog_result_degree(tdlog_ctx* ctx, const tdlog_result* result,
                                 const char* ground_atom, double* out) {
    if (!ctx || !result || !ground_atom || !out)
        return fail(ctx, TDLOG_ERR_BAD_ARGUMENT, "null argument");
    return guarded(ctx, [&]() -> tdlog_status {
        tdlog::ParseResult<tdlog::Atom> parsed =
            tdlog::parse_ground_atom(ground_atom, result->interpretation.universe());
        if (!parsed.ok()) return fail(ctx, TDLOG_ERR_PARSE, parsed.diagnostics_text());
        *out = result->interpretation.degree(*parsed.value).value();
        return TDLOG_OK;
    });
}

void tdlog_result_free(tdlog_result* result) { delete result; }

tdlog_status tdlog_entail(tdlog_ctx* ctx, const tdlog_program* program,
                          const tdlog_dataset* dataset, const char* goal, double threshold,
                          const tdlog_chase_config* config, int* answer, double* degree) {
    if (!ctx || !program || !dataset || !goal || !answer || !degree)
        return fail(ctx, TDLOG_ERR_BAD_ARGUMENT, "null argument");
    if (!(threshold >= 0.0 && threshold <= 1.0))
        return fail(ctx, TDLOG_ERR_BAD_ARGUMENT, "threshold must lie in [0,1]");
    tdlog::StrategyConfig cfg;
    tdlog_status status = convert_config(ctx, config, &cfg);
    if (status != TDLOG_OK) return status;
    return guarded(ctx, [&]() -> tdlog_status {
        tdlog::ParseResult<tdlog::Atom> parsed = tdlog::parse_ground_atom(goal, ctx->universe);
        if (!parsed.ok()) return fail(ctx, TDLOG_ERR_PARSE, parsed.diagnostics_text());
        tdlog::EntailmentQuery query{*parsed.value, tdlog::TruthDegree(threshold), cfg.k};
        tdlog::EntailResult res =
            tdlog::entails(program->program, dataset->dataset, query, cfg);
        if (!res.decided())
            return fail(ctx, TDLOG_ERR_STEP_LIMIT,
                        "chase hit its step limit; entailment undecided");
        *answer = res.yes() ? 1 : 0;
        *degree = res.degree.value();
        return TDLOG_OK;
    });
}

void tdlog_selftest_config_init(tdlog_selftest_config* config) {
    if (!config) return;
    config->seed = 20260808;
    config->tdatalog_instances = 120;
    config->existential_instances = 60;
    config->stratified_instances = 30;
    config->law_samples = 20000;
    config->negative_control = 0;
}

tdlog_status tdlog_selftest(tdlog_ctx* ctx, const tdlog_selftest_config* config,
                            tdlog_report** out) {
    if (!ctx || !out) return fail(ctx, TDLOG_ERR_BAD_ARGUMENT, "null argument");
    return guarded(ctx, [&]() -> tdlog_status {
        tdlog_selftest_config defaults;
        tdlog_selftest_config_init(&defaults);
        if (!config) config = &defaults;
        tdlog::SelftestConfig cfg;
        cfg.seed = config->seed;
        cfg.tdatalog_instances = config->tdatalog_instances;
        cfg.existential_instances = config->existential_instances;
        cfg.stratified_instances = config->stratified_instances;
        cfg.law_samples = config->law_samples;
        cfg.negative_control = config->negative_control != 0;
        tdlog::SelftestReport rep = tdlog::run_selftest(cfg);
        auto report = std::make_unique<tdlog_report>();
        report->ok = rep.passed;
        report->text = rep.text;
        report->reproducers = std::move(rep.reproducers);
        *out = report.release();
        return TDLOG_OK;
    });
}

}  // extern "C"
