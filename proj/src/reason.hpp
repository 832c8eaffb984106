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
#ifndef TDLOG_REASON_HPP
#define TDLOG_REASON_HPP

#include "chase.hpp"
#include "lang.hpp"
#include "model.hpp"

namespace tdlog {

struct EntailmentQuery {
    Atom goal;  // ground, over constants
    TruthDegree threshold;
    TruthDegree k = TruthDegree(1.0);
};

enum class EntailStatus : uint8_t { Yes, No, Undecided };

struct EntailResult {
    EntailStatus status = EntailStatus::Undecided;
    TruthDegree degree;  // exact goal degree in the universal model, when decided

    bool decided() const { return status != EntailStatus::Undecided; }
    bool yes() const { return status == EntailStatus::Yes; }
};

// Decides K-entailment through the chase (greedy restricted by default):
// yes iff the goal's degree in the universal model reaches the threshold.
// A step-limited chase yields Undecided, never a wrong boolean. Programs
// with unary operators route through stratified evaluation (K must be 1).
EntailResult entails(const Program& program, const FuzzyDataset& dataset,
                     const EntailmentQuery& query, const StrategyConfig& base = {});

// Test-mode bridge: on an all-degrees-1 dataset, fuzzy entailment at
// c = K = 1 must agree with classical chase membership. Throws
// InternalError on disagreement (that is an engine bug, not an input error).
bool entails_all_ones_classical_agreement(const Program& program, const FuzzyDataset& dataset,
                                          const Atom& goal);

// Conjunctive-query entailment through goal rewriting: extends the program
// with `cq_body -> Goal` for a fresh 0-ary predicate and decides entailment
// of Goal.
EntailResult cq_entails(const Program& program, const FuzzyDataset& dataset,
                        const std::vector<Atom>& cq_body, const TNorm& connective,
                        TruthDegree threshold, TruthDegree k, const StrategyConfig& base = {});

struct StratifiedResult {
    FuzzyInterpretation interpretation;
    std::vector<TraceStep> trace;  // concatenated per-stratum greedy traces
    uint64_t steps = 0;

    explicit StratifiedResult(FuzzyInterpretation interp) : interpretation(std::move(interp)) {}
};

// Stratified semantics for programs with unary operators (K fixed at 1):
// computes a stratification and runs the greedy chase per stratum on the
// accumulated interpretation, unary operators reading the frozen lower
// strata. Also accepts plain programs (single stratum).
StratifiedResult evaluate_stratified(const Program& program, const FuzzyDataset& dataset);
StratifiedResult evaluate_stratified_with(const Program& program, const FuzzyDataset& dataset,
                                          const Stratification& stratification);

}  // namespace tdlog

#endif
