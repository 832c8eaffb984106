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
#include "chase.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <unordered_set>

namespace tdlog {

namespace {

void require_same_universe(const Program& program, const FuzzyInterpretation& interp) {
    if (program.universe() != interp.universe())
        throw ContractViolation("program and interpretation must share a universe");
}

NullKey frontier_key(const Rule& rule, std::span<const Term> grounding, Term exist_var) {
    NullKey key;
    key.rule_index = rule.index;
    key.variable = exist_var;
    key.frontier.reserve(rule.frontier_vars.size());
    for (const Term& fv : rule.frontier_vars)
        key.frontier.emplace_back(fv, resolve_term(rule, grounding, fv));
    std::sort(key.frontier.begin(), key.frontier.end(),
              [](const auto& a, const auto& b) { return a.first.id < b.first.id; });
    return key;
}

}  // namespace

Atom ground_head(Universe& universe, const Rule& rule, std::span<const Term> grounding) {
    Atom out;
    out.predicate = rule.head.predicate;
    out.args.reserve(rule.head.args.size());
    for (const Term& t : rule.head.args) {
        bool existential =
            t.is_variable() && std::find(rule.existential_vars.begin(),
                                         rule.existential_vars.end(),
                                         t) != rule.existential_vars.end();
        if (existential)
            out.args.push_back(universe.null_for(frontier_key(rule, grounding, t)));
        else
            out.args.push_back(resolve_term(rule, grounding, t));
    }
    return out;
}

namespace {

// Supremum of the interpretation over completions of the grounded head: the
// existential variables range over Dom and Nulls (consistently per
// variable), every other position is fixed by the grounding. Completions
// outside the support contribute 0, so the returned maximum over support
// atoms is the supremum. This is the comparison set of restricted activity
// and the existential-head semantics of K-satisfaction.
double head_completion_sup(const FuzzyInterpretation& interp, const Rule& rule,
                           std::span<const Term> grounding) {
    std::vector<Term> pattern;
    pattern.reserve(rule.head.args.size());
    for (const Term& t : rule.head.args) {
        bool existential =
            t.is_variable() && std::find(rule.existential_vars.begin(),
                                         rule.existential_vars.end(),
                                         t) != rule.existential_vars.end();
        pattern.push_back(existential ? t : resolve_term(rule, grounding, t));
    }
    double best = 0.0;
    for (const Atom& cand : interp.atoms_of(rule.head.predicate)) {
        std::unordered_map<uint32_t, Term> bind;
        bool ok = true;
        for (size_t i = 0; i < pattern.size() && ok; ++i) {
            if (pattern[i].is_variable()) {
                auto [it, inserted] = bind.try_emplace(pattern[i].id, cand.args[i]);
                if (!inserted && !(it->second == cand.args[i])) ok = false;
            } else if (!(pattern[i] == cand.args[i])) {
                ok = false;
            }
        }
        if (ok) best = std::max(best, interp.degree(cand).value());
    }
    return best;
}

bool trigger_active(const FuzzyInterpretation& interp, const Program& program, const Rule& rule,
                    std::span<const Term> grounding, Activity activity, TruthDegree k,
                    TruthDegree* target_out, Atom* head_out) {
    TruthDegree target = TruthDegree(bounded_sum_minus_one(
        body_degree(interp, rule, grounding).value(), k.value()));
    if (target_out) *target_out = target;
    Atom head = ground_head(*program.universe(), rule, grounding);
    if (head_out) *head_out = head;
    if (!(target > interp.degree(head))) return false;  // semi-oblivious test
    if (activity == Activity::SemiOblivious) return true;
    if (rule.existential_vars.empty()) return true;  // r == so without existentials
    if (!(target.value() > 0.0)) return false;
    return head_completion_sup(interp, rule, grounding) < target.value();
}

bool trigger_less(const Universe& u, const Trigger& a, const Trigger& b) {
    if (a.rule_index != b.rule_index) return a.rule_index < b.rule_index;
    for (size_t i = 0; i < a.grounding.size() && i < b.grounding.size(); ++i) {
        if (a.grounding[i] == b.grounding[i]) continue;
        return u.term_less(a.grounding[i], b.grounding[i]);
    }
    return a.grounding.size() < b.grounding.size();
}

// Backtracking join of a rule's plain body atoms over the support index.
// Unary-operator atoms contribute no bindings (safety keeps their variables
// covered by plain atoms); rules whose plain atoms are all matched emit one
// grounding per consistent assignment.
class Joiner {
public:
    Joiner(const FuzzyInterpretation& interp, const Rule& rule) : interp_(interp), rule_(rule) {
        for (size_t i = 0; i < rule.body.size(); ++i)
            if (!rule.body[i].op) plain_.push_back(i);
    }

    const std::vector<size_t>& plain_positions() const { return plain_; }

    // pin_slot indexes into plain_positions(); -1 joins unpinned.
    template <typename Fn>
    void for_each_grounding(int pin_slot, const Atom* pin_atom, Fn&& fn) {
        binding_.assign(rule_.body_vars.size(), Term{TermKind::Variable, 0});
        bound_.assign(rule_.body_vars.size(), 0);
        recurse(0, pin_slot, pin_atom, fn);
    }

private:
    int slot_of(Term v) {
        for (size_t i = 0; i < rule_.body_vars.size(); ++i)
            if (rule_.body_vars[i] == v) return static_cast<int>(i);
        throw InternalError("body variable without slot");
    }

    bool match(const Atom& pattern, const Atom& candidate, std::vector<int>& newly_bound) {
        for (size_t i = 0; i < pattern.args.size(); ++i) {
            const Term& p = pattern.args[i];
            const Term& c = candidate.args[i];
            if (!p.is_variable()) {
                if (!(p == c)) return false;
                continue;
            }
            int slot = slot_of(p);
            if (bound_[slot]) {
                if (!(binding_[slot] == c)) return false;
            } else {
                bound_[slot] = 1;
                binding_[slot] = c;
                newly_bound.push_back(slot);
            }
        }
        return true;
    }

    template <typename Fn>
    void recurse(size_t k, int pin_slot, const Atom* pin_atom, Fn&& fn) {
        if (k == plain_.size()) {
            fn(std::span<const Term>(binding_));
            return;
        }
        const Atom& pattern = rule_.body[plain_[k]].atom;
        auto try_candidate = [&](const Atom& cand) {
            std::vector<int> newly_bound;
            if (match(pattern, cand, newly_bound)) recurse(k + 1, pin_slot, pin_atom, fn);
            for (int slot : newly_bound) bound_[slot] = 0;
        };
        if (pin_slot == static_cast<int>(k)) {
            try_candidate(*pin_atom);
            return;
        }
        for (const Atom& cand : interp_.atoms_of(pattern.predicate)) try_candidate(cand);
    }

    const FuzzyInterpretation& interp_;
    const Rule& rule_;
    std::vector<size_t> plain_;
    std::vector<Term> binding_;
    std::vector<char> bound_;
};

}  // namespace

Atom trigger_head(const Program& program, const Trigger& trigger) {
    const Rule& rule = program.rules().at(trigger.rule_index);
    return ground_head(*program.universe(), rule, trigger.grounding);
}

TruthDegree trigger_target_degree(const FuzzyInterpretation& interp, const Program& program,
                                  const Trigger& trigger, TruthDegree k) {
    require_same_universe(program, interp);
    const Rule& rule = program.rules().at(trigger.rule_index);
    return TruthDegree(bounded_sum_minus_one(
        body_degree(interp, rule, trigger.grounding).value(), k.value()));
}

bool is_active(const FuzzyInterpretation& interp, const Program& program, const Trigger& trigger,
               Activity activity, TruthDegree k) {
    require_same_universe(program, interp);
    const Rule& rule = program.rules().at(trigger.rule_index);
    return trigger_active(interp, program, rule, trigger.grounding, activity, k, nullptr, nullptr);
}

std::vector<Trigger> enumerate_active_triggers(const FuzzyInterpretation& interp,
                                               const Program& program,
                                               const StrategyConfig& config) {
    require_same_universe(program, interp);
    std::vector<Trigger> out;
    for (const Rule& rule : program.rules()) {
        Joiner joiner(interp, rule);
        joiner.for_each_grounding(-1, nullptr, [&](std::span<const Term> grounding) {
            if (trigger_active(interp, program, rule, grounding, config.activity, config.k,
                               nullptr, nullptr))
                out.push_back(Trigger{rule.index, {grounding.begin(), grounding.end()}});
        });
    }
    const Universe& u = *program.universe();
    std::sort(out.begin(), out.end(),
              [&](const Trigger& a, const Trigger& b) { return trigger_less(u, a, b); });
    return out;
}

FuzzyInterpretation apply_trigger(const FuzzyInterpretation& interp, const Program& program,
                                  const Trigger& trigger, TruthDegree k) {
    require_same_universe(program, interp);
    const Rule& rule = program.rules().at(trigger.rule_index);
    TruthDegree target = TruthDegree(bounded_sum_minus_one(
        body_degree(interp, rule, trigger.grounding).value(), k.value()));
    Atom head = ground_head(*program.universe(), rule, trigger.grounding);
    TruthDegree current = interp.degree(head);
    if (!(target > current))
        throw ContractViolation("apply_trigger on an inactive trigger (target " +
                                degree_text_exact(target.value()) + " vs head " +
                                degree_text_exact(current.value()) + ")");
    FuzzyInterpretation out = interp;
    out.set(head, target);
    return out;
}

// ---------------------------------------------------------------------
// Chase engine
// ---------------------------------------------------------------------

namespace {

class ChaseEngine {
public:
    ChaseEngine(const Program& program, FuzzyInterpretation start, const StrategyConfig& config)
        : program_(program),
          universe_(*program.universe()),
          config_(config),
          result_(std::move(start)) {
        // Pinned-join index: predicate -> (rule, plain-atom slot).
        for (const Rule& rule : program_.rules()) {
            size_t plain_slot = 0;
            for (size_t i = 0; i < rule.body.size(); ++i) {
                if (rule.body[i].op) continue;
                by_pred_[rule.body[i].atom.predicate].push_back({rule.index, plain_slot});
                ++plain_slot;
            }
        }
        initial_support_ = result_.interpretation.size();
    }

    ChaseResult run() {
        seed_candidates();
        if (config_.order == ChaseOrder::Greedy)
            run_greedy();
        else
            run_fifo();
        if (result_.status == ChaseStatus::Completed) {
            // Engine self-check: a completed chase must leave no active
            // trigger under the configured activity.
            if (!enumerate_active_triggers(result_.interpretation, program_, config_).empty())
                throw InternalError("chase reported completion with active triggers left");
        }
        return std::move(result_);
    }

private:
    struct Entry {
        double target;
        Trigger trigger;
    };
    struct EntryLess {
        const ChaseEngine* engine;
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.target != b.target) return a.target < b.target;
            // Max-heap: the tie-break minimum must surface first.
            return trigger_less(engine->universe_, b.trigger, a.trigger);
        }
    };

    void seed_candidates() {
        std::vector<Trigger> initial =
            enumerate_active_triggers(result_.interpretation, program_, config_);
        for (Trigger& t : initial) {
            if (config_.order == ChaseOrder::Greedy) {
                TruthDegree target = trigger_target_degree(result_.interpretation, program_,
                                                           t, config_.k);
                heap_.push(Entry{target.value(), std::move(t)});
            } else {
                enqueue(std::move(t));
            }
        }
    }

    void enqueue(Trigger t) {
        if (queued_.insert(t).second) queue_.push_back(std::move(t));
    }

    uint64_t current_limit() const {
        switch (config_.max_steps.mode) {
            case StepLimit::Mode::Explicit: return config_.max_steps.count;
            case StepLimit::Mode::Unbounded: return UINT64_MAX;
            case StepLimit::Mode::Auto:
                return 1000 + 10 * (initial_support_ + written_heads_.size());
        }
        return 0;
    }

    // Applies a validated trigger and feeds the affected candidates back in.
    void apply(const Trigger& trigger, TruthDegree target, const Atom& head) {
        TruthDegree before = result_.interpretation.degree(head);
        bool was_new = result_.interpretation.set(head, target);
        ++result_.steps;
        if (config_.record_trace)
            result_.trace.push_back(TraceStep{static_cast<uint32_t>(result_.steps),
                                              trigger.rule_index, trigger.grounding, head, before,
                                              target});

        if (config_.order == ChaseOrder::Greedy) {
            bool k_is_one = config_.k.value() == 1.0;
            if (have_last_target_ && target.value() > last_target_) {
                result_.greedy_degrees_nonincreasing = false;
                if (k_is_one)
                    throw InternalError("greedy chase applied an increasing target degree");
            }
            last_target_ = target.value();
            have_last_target_ = true;
            if (!written_heads_.insert(head).second) {
                result_.greedy_heads_unique = false;
                if (k_is_one) throw InternalError("greedy chase wrote the same head twice");
            }
        } else {
            written_heads_.insert(head);
        }
        on_updated(head, was_new);
    }

    void on_updated(const Atom& atom, bool /*was_new*/) {
        auto hit = by_pred_.find(atom.predicate);
        if (hit == by_pred_.end()) return;
        std::vector<Trigger> batch;  // fifo only
        for (const auto& [rule_index, plain_slot] : hit->second) {
            const Rule& rule = program_.rules()[rule_index];
            Joiner joiner(result_.interpretation, rule);
            joiner.for_each_grounding(
                static_cast<int>(plain_slot), &atom, [&](std::span<const Term> grounding) {
                    TruthDegree target;
                    if (!trigger_active(result_.interpretation, program_, rule, grounding,
                                        config_.activity, config_.k, &target, nullptr))
                        return;
                    Trigger t{rule.index, {grounding.begin(), grounding.end()}};
                    if (config_.order == ChaseOrder::Greedy)
                        heap_.push(Entry{target.value(), std::move(t)});
                    else if (!queued_.count(t))
                        batch.push_back(std::move(t));
                });
        }
        if (!batch.empty()) {
            std::sort(batch.begin(), batch.end(), [&](const Trigger& a, const Trigger& b) {
                return trigger_less(universe_, a, b);
            });
            for (Trigger& t : batch) enqueue(std::move(t));
        }
    }

    void run_greedy() {
        while (!heap_.empty()) {
            Entry entry = heap_.top();
            heap_.pop();
            const Rule& rule = program_.rules()[entry.trigger.rule_index];
            TruthDegree target;
            Atom head;
            if (!trigger_active(result_.interpretation, program_, rule, entry.trigger.grounding,
                                config_.activity, config_.k, &target, &head))
                continue;
            // A fresher entry with the current target exists whenever the
            // body changed after this push; skip the stale one.
            if (target.value() != entry.target) continue;
            if (result_.steps >= current_limit()) {
                result_.status = ChaseStatus::StepLimitExceeded;
                return;
            }
            apply(entry.trigger, target, head);
        }
    }

    void run_fifo() {
        while (!queue_.empty()) {
            Trigger trigger = std::move(queue_.front());
            queue_.pop_front();
            queued_.erase(trigger);
            const Rule& rule = program_.rules()[trigger.rule_index];
            TruthDegree target;
            Atom head;
            if (!trigger_active(result_.interpretation, program_, rule, trigger.grounding,
                                config_.activity, config_.k, &target, &head))
                continue;
            if (result_.steps >= current_limit()) {
                result_.status = ChaseStatus::StepLimitExceeded;
                return;
            }
            apply(trigger, target, head);
        }
    }

    const Program& program_;
    const Universe& universe_;
    StrategyConfig config_;
    ChaseResult result_;
    size_t initial_support_ = 0;

    std::unordered_map<PredicateId, std::vector<std::pair<uint32_t, size_t>>> by_pred_;
    std::priority_queue<Entry, std::vector<Entry>, EntryLess> heap_{EntryLess{this}};
    std::deque<Trigger> queue_;
    std::unordered_set<Trigger, TriggerHash> queued_;
    std::unordered_set<Atom, AtomHash> written_heads_;
    double last_target_ = 1.0;
    bool have_last_target_ = false;
};

}  // namespace

ChaseResult run_chase(const Program& program, const FuzzyDataset& dataset,
                      const StrategyConfig& config) {
    if (program.universe() != dataset.universe())
        throw ContractViolation("program and dataset must share a universe");
    return run_chase_from(program, minimal_interpretation(dataset), config);
}

ChaseResult run_chase_from(const Program& program, FuzzyInterpretation start,
                           const StrategyConfig& config) {
    require_same_universe(program, start);
    if (!(config.k.value() >= 0.0 && config.k.value() <= 1.0))
        throw ConfigError("K must lie in [0,1]");
    if (program.uses_unary_ops()) {
        // Directly chasing a unary-operator program is sound only when the
        // operators read predicates this program never writes (the stratified
        // evaluator arranges exactly that per stratum).
        for (const Rule& rule : program.rules())
            for (const BodyAtom& b : rule.body)
                if (b.op && program.is_intensional(b.atom.predicate))
                    throw ConfigError(
                        "unary operator on an intensional predicate; use stratified evaluation");
    }
    if (config.max_steps.mode == StepLimit::Mode::Auto &&
        !check_weak_acyclicity(program).weakly_acyclic)
        throw ConfigError(
            "program is not weakly acyclic; set an explicit step limit (or run unbounded)");
    return ChaseEngine(program, std::move(start), config).run();
}

bool check_k_model(const FuzzyInterpretation& interp, const Program& program, TruthDegree k) {
    require_same_universe(program, interp);
    std::vector<Term> adom = interp.active_domain();
    for (const Rule& rule : program.rules()) {
        size_t nvars = rule.body_vars.size();
        if (nvars > 0 && adom.empty()) continue;
        double combos = 1;
        for (size_t i = 0; i < nvars; ++i) {
            combos *= static_cast<double>(adom.size());
            if (combos > 2e7)
                throw ConfigError("check_k_model: grounding space too large for this oracle");
        }
        std::vector<size_t> odo(nvars, 0);
        std::vector<Term> grounding(nvars);
        while (true) {
            for (size_t i = 0; i < nvars; ++i) grounding[i] = adom[odo[i]];
            double body = body_degree(interp, rule, grounding).value();
            double required = bounded_sum_minus_one(body, k.value());
            if (required > 0.0) {
                double head_degree;
                if (rule.has_existentials()) {
                    head_degree = head_completion_sup(interp, rule, grounding);
                } else {
                    Atom head;
                    head.predicate = rule.head.predicate;
                    head.args.reserve(rule.head.args.size());
                    for (const Term& t : rule.head.args)
                        head.args.push_back(resolve_term(rule, grounding, t));
                    head_degree = interp.degree(head).value();
                }
                if (head_degree < required) return false;
            }
            // odometer
            size_t i = 0;
            for (; i < nvars; ++i) {
                if (++odo[i] < adom.size()) break;
                odo[i] = 0;
            }
            if (nvars == 0 || i == nvars) break;
        }
    }
    return true;
}

std::string trace_text(const Program& program, const StrategyConfig& config,
                       std::span<const TraceStep> trace) {
    const Universe& u = *program.universe();
    std::string out;
    for (const TraceStep& step : trace) {
        const Rule& rule = program.rules()[step.rule_index];
        out += "step=" + std::to_string(step.index);
        out += " rule=r" + std::to_string(step.rule_index + 1);
        out += " grounding={";
        std::vector<std::pair<std::string, Term>> pairs;
        pairs.reserve(rule.body_vars.size());
        for (size_t i = 0; i < rule.body_vars.size(); ++i)
            pairs.emplace_back(u.variable_name(rule.body_vars[i].id), step.grounding[i]);
        std::sort(pairs.begin(), pairs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (size_t i = 0; i < pairs.size(); ++i) {
            if (i) out += ",";
            out += pairs[i].first + "=" + u.term_text(pairs[i].second);
        }
        out += "} head=" + u.atom_text(step.head);
        out += " before=" + degree_text_exact(step.before.value());
        out += " after=" + degree_text_exact(step.after.value());
        out += " strategy=" + config.strategy_name();
        out += " K=" + degree_text_exact(config.k.value());
        out += "\n";
    }
    return out;
}

}  // namespace tdlog
