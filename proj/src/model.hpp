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
#ifndef TDLOG_MODEL_HPP
#define TDLOG_MODEL_HPP

#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "degrees.hpp"
#include "term.hpp"

namespace tdlog {

struct Rule;  // lang.hpp

// A finite partial map from ground atoms over constants to degrees in (0,1].
// Never stores degree 0 and never mentions nulls.
class FuzzyDataset {
public:
    explicit FuzzyDataset(std::shared_ptr<Universe> u) : universe_(std::move(u)) {}

    // Rejects duplicates (returns false), atoms with nulls or variables, and
    // degrees outside (0,1].
    bool insert(const Atom& atom, TruthDegree degree);

    const std::unordered_map<Atom, TruthDegree, AtomHash>& facts() const { return facts_; }
    size_t size() const { return facts_.size(); }
    const std::shared_ptr<Universe>& universe() const { return universe_; }

    // Same atoms, all degrees raised to 1.
    FuzzyDataset crispified() const;

    // Canonical `DEGREE :: Atom.` text, sorted.
    std::string text() const;

private:
    std::shared_ptr<Universe> universe_;
    std::unordered_map<Atom, TruthDegree, AtomHash> facts_;
};

enum class DumpStyle : uint8_t {
    Table,  // degrees with 6 decimal places
    Exact,  // shortest round-trip representation
};

// Total map from ground atoms (over constants and nulls) to degrees, with
// finite support; every atom outside the support has degree 0. Keeps a
// per-predicate index for trigger matching.
class FuzzyInterpretation {
public:
    explicit FuzzyInterpretation(std::shared_ptr<Universe> u) : universe_(std::move(u)) {}

    TruthDegree degree(const Atom& atom) const {
        auto it = support_.find(atom);
        return it == support_.end() ? TruthDegree() : it->second;
    }

    // Stores a positive degree; degree 0 for a new atom is ignored (support
    // never stores 0). Returns true when the atom is new to the support.
    bool set(const Atom& atom, TruthDegree degree);

    const std::unordered_map<Atom, TruthDegree, AtomHash>& support() const { return support_; }
    size_t size() const { return support_.size(); }
    const std::shared_ptr<Universe>& universe() const { return universe_; }

    // All support atoms of one predicate, in insertion order.
    const std::vector<Atom>& atoms_of(PredicateId p) const;

    // Every constant and null occurring in the support.
    std::vector<Term> active_domain() const;

    // Exact pointwise equality (identical supports, identical degrees).
    bool operator==(const FuzzyInterpretation& other) const { return support_ == other.support_; }

    std::string dump(DumpStyle style) const;

private:
    std::shared_ptr<Universe> universe_;
    std::unordered_map<Atom, TruthDegree, AtomHash> support_;
    std::unordered_map<PredicateId, std::vector<Atom>> index_;
};

// I_D: support equals the dataset's entries, everything else 0.
FuzzyInterpretation minimal_interpretation(const FuzzyDataset& dataset);

// Deterministic interned null for (rule, existential variable, frontier
// binding); repeated calls with equal keys return the identical term.
Term allocate_null(Universe& universe, const NullKey& key);

// Resolves a rule term under a grounding parallel to rule.body_vars;
// constants and nulls pass through.
Term resolve_term(const Rule& rule, std::span<const Term> grounding, Term t);
Atom substitute_body_atom(const Rule& rule, std::span<const Term> grounding, const Atom& atom);

// Truth degree of a grounded rule body: the rule's connective folded left to
// right over per-atom degrees, where an atom with a unary operator U
// contributes U(I(atom)) and a plain atom contributes I(atom). The grounding
// is parallel to the rule's body variable list.
TruthDegree body_degree(const FuzzyInterpretation& interp, const Rule& rule,
                        std::span<const Term> grounding);

// Shortest decimal text that round-trips to the same double.
std::string degree_text_exact(double v);
std::string degree_text_table(double v);  // fixed 6 decimals

}  // namespace tdlog

#endif
