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
#ifndef TDLOG_LANG_HPP
#define TDLOG_LANG_HPP

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "degrees.hpp"
#include "model.hpp"
#include "term.hpp"

namespace tdlog {

struct BodyAtom {
    std::optional<UnaryOp> op;
    Atom atom;
};

// One rule: body atoms joined by a single t-norm connective, a head atom over
// frontier plus existential variables. Constants may appear in rule atoms
// (needed for goal rewriting); identifiers in rule files always parse as
// variables, constants must be quoted there.
struct Rule {
    uint32_t index = 0;
    std::vector<BodyAtom> body;
    TNorm connective = TNorm::minimum();
    Atom head;
    std::vector<Term> existential_vars;
    std::vector<Term> frontier_vars;  // head variables that are not existential
    std::vector<Term> body_vars;      // all body variables, first-occurrence order

    bool has_existentials() const { return !existential_vars.empty(); }
    bool has_unary_ops() const {
        for (const BodyAtom& b : body)
            if (b.op) return true;
        return false;
    }
};

class Program {
public:
    explicit Program(std::shared_ptr<Universe> u) : universe_(std::move(u)) {}

    const std::vector<Rule>& rules() const { return rules_; }
    const std::shared_ptr<Universe>& universe() const { return universe_; }
    bool uses_existentials() const { return uses_existentials_; }
    bool uses_unary_ops() const { return uses_unary_ops_; }

    // Predicates occurring in some rule head.
    const std::set<PredicateId>& intensional() const { return intensional_; }
    bool is_intensional(PredicateId p) const { return intensional_.count(p) > 0; }
    const std::set<PredicateId>& predicates() const { return predicates_; }

    // Validates rule invariants (frontier coverage, existential/body
    // disjointness, unary-op safety, no unary ops together with
    // existentials) and appends. Throws ConfigError on violation; the parser
    // performs the same checks with positioned diagnostics instead.
    void add_rule(Rule rule);

    // "t-Datalog", "t-Datalog with existential rules", or
    // "t-Datalog with unary operators".
    std::string fragment_name() const;

private:
    std::shared_ptr<Universe> universe_;
    std::vector<Rule> rules_;
    std::set<PredicateId> intensional_;
    std::set<PredicateId> predicates_;
    bool uses_existentials_ = false;
    bool uses_unary_ops_ = false;
};

struct Diagnostic {
    int line = 0;
    int column = 0;
    std::string message;

    std::string text() const;
};

template <typename T>
struct ParseResult {
    std::optional<T> value;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return value.has_value() && diagnostics.empty(); }
    std::string diagnostics_text() const {
        std::string out;
        for (const Diagnostic& d : diagnostics) {
            out += d.text();
            out += '\n';
        }
        return out;
    }
};

// Program files: `Body -> Head.` rules, `%` comments, `&min`/`&luk`/`&prod`/
// `&ss(p)` connectives, `!`/`~`/`delta[T]` unary prefixes, optional
// `exists v1, v2 .` head quantifier. Identifiers in argument position are
// variables; constants must be quoted.
ParseResult<Program> parse_program(std::string_view text, std::shared_ptr<Universe> universe,
                                   const ConnectiveRegistry& registry = ConnectiveRegistry::standard());

// Dataset files: `DEGREE :: Atom.` or `Atom.` lines; a missing degree means
// 1; degrees must lie in (0,1]; duplicate atoms are an error. Identifiers in
// argument position are constants and must be lowercase or quoted.
ParseResult<FuzzyDataset> parse_dataset(std::string_view text, std::shared_ptr<Universe> universe);

// A single ground atom over constants (goal syntax).
ParseResult<Atom> parse_ground_atom(std::string_view text, std::shared_ptr<Universe> universe);

// Canonical re-print; parse_program(print_program(p)) is structurally equal
// to p.
std::string print_program(const Program& program);
std::string print_rule(const Universe& universe, const Rule& rule);

// ---- static analysis -------------------------------------------------

struct PositionEdge {
    PredicateId from_pred;
    size_t from_pos;  // 0-based
    PredicateId to_pred;
    size_t to_pos;
    bool special;  // edge into an existential position
    uint32_t rule_index;
};

struct WeakAcyclicityResult {
    bool weakly_acyclic = true;
    std::vector<PositionEdge> witness_cycle;  // nonempty iff not weakly acyclic

    std::string witness_text(const Universe& u) const;
};

// Position dependency graph check: weakly acyclic iff no cycle goes through
// a special edge.
WeakAcyclicityResult check_weak_acyclicity(const Program& program);

struct Stratification {
    // strata[i] holds the rule indices of stratum i+1.
    std::vector<std::vector<uint32_t>> strata;
    // 1-based stratum per intensional predicate; extensional predicates are
    // absent (conceptually level 0).
    std::map<PredicateId, int> levels;

    size_t stratum_count() const { return strata.size(); }
};

struct StratificationResult {
    std::optional<Stratification> stratification;
    std::string witness;  // cycle through a unary-operator edge, when not stratifiable

    bool stratifiable() const { return stratification.has_value(); }
};

// Minimal-levels stratification from the predicate dependency graph, or a
// witnessing cycle through a unary-operator edge. Requires a program without
// existential variables.
StratificationResult compute_stratification(const Program& program);

// Further valid stratifications obtained by following different topological
// orders of the dependency condensation (level = position of the component
// in the chosen linear extension). Returns up to max_count distinct results,
// the minimal-levels one first.
std::vector<Stratification> alternative_stratifications(const Program& program, size_t max_count);

}  // namespace tdlog

#endif
