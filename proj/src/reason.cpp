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
#include "reason.hpp"

#include <algorithm>

#include "oracle.hpp"

namespace tdlog {

namespace {

void validate_goal(const Universe& u, const Atom& goal) {
    if (!goal.ground() || goal.mentions_null())
        throw ContractViolation("entailment goals must be ground atoms over constants, got " +
                                u.atom_text(goal));
}

}  // namespace

EntailResult entails(const Program& program, const FuzzyDataset& dataset,
                     const EntailmentQuery& query, const StrategyConfig& base) {
    validate_goal(*program.universe(), query.goal);
    if (!(query.k.value() >= 0.0 && query.k.value() <= 1.0))
        throw ConfigError("K must lie in [0,1]");

    TruthDegree degree;
    if (program.uses_unary_ops()) {
        if (query.k.value() != 1.0)
            throw ConfigError("stratified evaluation is defined for K = 1 only");
        degree = evaluate_stratified(program, dataset).interpretation.degree(query.goal);
    } else {
        StrategyConfig config = base;
        config.k = query.k;
        ChaseResult result = run_chase(program, dataset, config);
        if (result.status != ChaseStatus::Completed) return EntailResult{};
        degree = result.interpretation.degree(query.goal);
    }
    EntailResult out;
    out.degree = degree;
    out.status = degree >= query.threshold ? EntailStatus::Yes : EntailStatus::No;
    return out;
}

bool entails_all_ones_classical_agreement(const Program& program, const FuzzyDataset& dataset,
                                          const Atom& goal) {
    for (const auto& [atom, degree] : dataset.facts())
        if (degree.value() != 1.0)
            throw ConfigError("classical agreement check requires an all-degrees-1 dataset");

    EntailmentQuery query{goal, TruthDegree(1.0), TruthDegree(1.0)};
    EntailResult fuzzy = entails(program, dataset, query);
    if (!fuzzy.decided()) throw ConfigError("fuzzy entailment undecided at the step cap");

    ClassicalChaseResult classical = classical_chase(program, dataset, 200000);
    if (!classical.completed) throw ConfigError("classical chase undecided at the step cap");
    bool classical_yes = classical.atoms.count(goal) > 0;

    if (fuzzy.yes() != classical_yes)
        throw InternalError("fuzzy/classical entailment disagreement on goal " +
                            program.universe()->atom_text(goal) + ": fuzzy=" +
                            (fuzzy.yes() ? "yes" : "no") + " classical=" +
                            (classical_yes ? "yes" : "no"));
    return fuzzy.yes();
}

EntailResult cq_entails(const Program& program, const FuzzyDataset& dataset,
                        const std::vector<Atom>& cq_body, const TNorm& connective,
                        TruthDegree threshold, TruthDegree k, const StrategyConfig& base) {
    if (cq_body.empty()) throw ContractViolation("conjunctive query body must not be empty");
    Universe& u = *program.universe();

    std::string goal_name = "Goal";
    for (int suffix = 2; u.has_predicate(goal_name); ++suffix)
        goal_name = "Goal_" + std::to_string(suffix);

    Program extended = program;
    Rule goal_rule;
    for (const Atom& a : cq_body) goal_rule.body.push_back(BodyAtom{std::nullopt, a});
    goal_rule.connective = connective;
    goal_rule.head = Atom{u.predicate(goal_name, 0), {}};
    extended.add_rule(std::move(goal_rule));

    EntailmentQuery query{extended.rules().back().head, threshold, k};
    return entails(extended, dataset, query, base);
}

namespace {

StratifiedResult evaluate_strata(const Program& program, const FuzzyDataset& dataset,
                                 const Stratification& strat) {
    if (program.universe() != dataset.universe())
        throw ContractViolation("program and dataset must share a universe");

    StratifiedResult out(minimal_interpretation(dataset));
    for (const std::vector<uint32_t>& stratum : strat.strata) {
        std::vector<uint32_t> ordered = stratum;
        std::sort(ordered.begin(), ordered.end());

        Program sub(program.universe());
        for (uint32_t ri : ordered) sub.add_rule(program.rules()[ri]);

        StrategyConfig config;  // restricted greedy at K = 1
        ChaseResult result = run_chase_from(sub, std::move(out.interpretation), config);
        if (result.status != ChaseStatus::Completed)
            throw InternalError("stratum chase exceeded its step limit");
        out.interpretation = std::move(result.interpretation);
        for (TraceStep& step : result.trace) {
            step.rule_index = ordered[step.rule_index];  // back to original rule ids
            step.index = static_cast<uint32_t>(out.steps + step.index);
            out.trace.push_back(std::move(step));
        }
        out.steps += result.steps;
    }
    return out;
}

}  // namespace

StratifiedResult evaluate_stratified(const Program& program, const FuzzyDataset& dataset) {
    StratificationResult res = compute_stratification(program);
    if (!res.stratifiable()) throw ConfigError(res.witness);
    return evaluate_strata(program, dataset, *res.stratification);
}

StratifiedResult evaluate_stratified_with(const Program& program, const FuzzyDataset& dataset,
                                          const Stratification& stratification) {
    return evaluate_strata(program, dataset, stratification);
}

}  // namespace tdlog
