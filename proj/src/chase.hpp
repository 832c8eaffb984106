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
#ifndef TDLOG_CHASE_HPP
#define TDLOG_CHASE_HPP

#include <span>
#include <string>
#include <vector>

#include "lang.hpp"
#include "model.hpp"

namespace tdlog {

// Semi-oblivious activity compares the trigger's target degree against its
// own head; restricted activity compares against every completion of the
// head's existential positions (the supremum the rule's existential head
// quantifies over), so a trigger whose application cannot raise that
// supremum is skipped.
enum class Activity : uint8_t { SemiOblivious, Restricted };

enum class ChaseOrder : uint8_t { Greedy, Fifo };

struct StepLimit {
    enum class Mode : uint8_t { Auto, Unbounded, Explicit };
    Mode mode = Mode::Auto;
    uint64_t count = 0;

    static StepLimit automatic() { return {}; }
    static StepLimit unbounded() { return {Mode::Unbounded, 0}; }
    static StepLimit exactly(uint64_t n) { return {Mode::Explicit, n}; }
};

struct StrategyConfig {
    Activity activity = Activity::Restricted;
    ChaseOrder order = ChaseOrder::Greedy;
    TruthDegree k = TruthDegree(1.0);
    StepLimit max_steps;
    bool record_trace = true;

    std::string strategy_name() const {
        std::string out = activity == Activity::SemiOblivious ? "so" : "r";
        out += order == ChaseOrder::Greedy ? "-greedy" : "-fifo";
        return out;
    }
};

// A rule plus a grounding of its body variables (parallel to
// rule.body_vars). The head is fully determined: frontier variables through
// the grounding, existential variables through deterministic nulls.
struct Trigger {
    uint32_t rule_index = 0;
    std::vector<Term> grounding;

    bool operator==(const Trigger&) const = default;
};

struct TriggerHash {
    size_t operator()(const Trigger& t) const {
        size_t h = t.rule_index;
        for (const Term& x : t.grounding) h = hash_combine(h, TermHash{}(x));
        return h;
    }
};

struct TraceStep {
    uint32_t index = 0;  // 1-based position in the chase
    uint32_t rule_index = 0;
    std::vector<Term> grounding;
    Atom head;
    TruthDegree before;
    TruthDegree after;
};

enum class ChaseStatus : uint8_t { Completed, StepLimitExceeded };

struct ChaseResult {
    ChaseStatus status = ChaseStatus::Completed;
    FuzzyInterpretation interpretation;
    std::vector<TraceStep> trace;
    uint64_t steps = 0;
    // Greedy-run observations; asserted at K = 1, recorded otherwise.
    bool greedy_degrees_nonincreasing = true;
    bool greedy_heads_unique = true;

    explicit ChaseResult(FuzzyInterpretation interp) : interpretation(std::move(interp)) {}
};

// Grounds a rule head under a body grounding; existential variables become
// interned nulls keyed by (rule, variable, frontier restriction of the
// grounding). This naming is shared by the fuzzy engine and the crisp
// reference chase.
Atom ground_head(Universe& universe, const Rule& rule, std::span<const Term> grounding);

// Ground head of the trigger.
Atom trigger_head(const Program& program, const Trigger& trigger);

// max{0, body + K - 1}; exactly the body degree at K = 1.
TruthDegree trigger_target_degree(const FuzzyInterpretation& interp, const Program& program,
                                  const Trigger& trigger, TruthDegree k);

bool is_active(const FuzzyInterpretation& interp, const Program& program, const Trigger& trigger,
               Activity activity, TruthDegree k);

// All active triggers whose groundings draw values from the support of the
// interpretation, sorted by the deterministic tie-break (rule index, then
// lexicographic grounding). Complete: a grounding outside the support gives
// some plain body atom degree 0, hence target 0, hence inactive.
std::vector<Trigger> enumerate_active_triggers(const FuzzyInterpretation& interp,
                                               const Program& program,
                                               const StrategyConfig& config);

// Functional single-step application; requires the trigger to be
// semi-obliviously active (contract violation otherwise).
FuzzyInterpretation apply_trigger(const FuzzyInterpretation& interp, const Program& program,
                                  const Trigger& trigger, TruthDegree k);

// Runs the configured chase from I_D (or an explicit start interpretation).
// Greedy order picks a maximal-target trigger (ties by the deterministic
// order); fifo order applies the oldest-activated trigger and re-enqueues on
// reactivation, which realizes fairness. Auto step limits require a weakly
// acyclic program; non-weakly-acyclic inputs must set an explicit limit or
// run unbounded.
ChaseResult run_chase(const Program& program, const FuzzyDataset& dataset,
                      const StrategyConfig& config);
ChaseResult run_chase_from(const Program& program, FuzzyInterpretation start,
                           const StrategyConfig& config);

// K-satisfaction of every rule over the active domain of the interpretation,
// under Lukasiewicz implication; existential heads take the supremum over
// matching support atoms.
bool check_k_model(const FuzzyInterpretation& interp, const Program& program, TruthDegree k);

// Deterministic text serialization of a trace, one record per step.
std::string trace_text(const Program& program, const StrategyConfig& config,
                       std::span<const TraceStep> trace);

}  // namespace tdlog

#endif
