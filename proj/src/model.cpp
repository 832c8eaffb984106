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
#include "model.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "lang.hpp"

namespace tdlog {

bool FuzzyDataset::insert(const Atom& atom, TruthDegree degree) {
    if (!atom.ground() || atom.mentions_null())
        throw ContractViolation("dataset atoms must be ground over constants");
    if (atom.args.size() != universe_->arity(atom.predicate))
        throw ContractViolation("atom arity does not match its predicate");
    if (!(degree.value() > 0.0))
        throw ConfigError("dataset degrees must lie in (0,1]");
    return facts_.emplace(atom, degree).second;
}

FuzzyDataset FuzzyDataset::crispified() const {
    FuzzyDataset out(universe_);
    for (const auto& [atom, _] : facts_) out.insert(atom, TruthDegree(1.0));
    return out;
}

std::string FuzzyDataset::text() const {
    std::vector<const Atom*> atoms;
    atoms.reserve(facts_.size());
    for (const auto& [atom, _] : facts_) atoms.push_back(&atom);
    std::sort(atoms.begin(), atoms.end(),
              [&](const Atom* a, const Atom* b) { return universe_->atom_less(*a, *b); });
    std::string out;
    for (const Atom* a : atoms) {
        out += degree_text_exact(facts_.at(*a).value());
        out += " :: ";
        out += universe_->atom_text(*a);
        out += ".\n";
    }
    return out;
}

bool FuzzyInterpretation::set(const Atom& atom, TruthDegree degree) {
    if (!atom.ground()) throw ContractViolation("interpretations map ground atoms only");
    if (atom.args.size() != universe_->arity(atom.predicate))
        throw ContractViolation("atom arity does not match its predicate");
    auto it = support_.find(atom);
    if (it != support_.end()) {
        // Support never stores 0; lowering to 0 removes the entry (the
        // index may keep a residue, which matching treats as degree 0).
        if (degree.value() == 0.0)
            support_.erase(it);
        else
            it->second = degree;
        return false;
    }
    if (degree.value() == 0.0) return false;
    support_.emplace(atom, degree);
    index_[atom.predicate].push_back(atom);
    return true;
}

const std::vector<Atom>& FuzzyInterpretation::atoms_of(PredicateId p) const {
    static const std::vector<Atom> empty;
    auto it = index_.find(p);
    return it == index_.end() ? empty : it->second;
}

std::vector<Term> FuzzyInterpretation::active_domain() const {
    std::unordered_set<Term, TermHash> seen;
    std::vector<Term> out;
    for (const auto& [atom, _] : support_)
        for (const Term& t : atom.args)
            if (seen.insert(t).second) out.push_back(t);
    std::sort(out.begin(), out.end(),
              [&](Term a, Term b) { return universe_->term_less(a, b); });
    return out;
}

std::string FuzzyInterpretation::dump(DumpStyle style) const {
    std::vector<const Atom*> atoms;
    atoms.reserve(support_.size());
    for (const auto& [atom, _] : support_) atoms.push_back(&atom);
    std::sort(atoms.begin(), atoms.end(),
              [&](const Atom* a, const Atom* b) { return universe_->atom_less(*a, *b); });
    std::string out;
    for (const Atom* a : atoms) {
        double v = support_.at(*a).value();
        out += style == DumpStyle::Table ? degree_text_table(v) : degree_text_exact(v);
        out += " :: ";
        out += universe_->atom_text(*a);
        out += ".\n";
    }
    return out;
}

FuzzyInterpretation minimal_interpretation(const FuzzyDataset& dataset) {
    FuzzyInterpretation interp(dataset.universe());
    for (const auto& [atom, degree] : dataset.facts()) interp.set(atom, degree);
    return interp;
}

Term allocate_null(Universe& universe, const NullKey& key) { return universe.null_for(key); }

Term resolve_term(const Rule& rule, std::span<const Term> grounding, Term t) {
    if (!t.is_variable()) return t;
    for (size_t i = 0; i < rule.body_vars.size(); ++i)
        if (rule.body_vars[i] == t) return grounding[i];
    throw ContractViolation("grounding does not bind variable '" + std::to_string(t.id) + "'");
}

Atom substitute_body_atom(const Rule& rule, std::span<const Term> grounding, const Atom& atom) {
    Atom out;
    out.predicate = atom.predicate;
    out.args.reserve(atom.args.size());
    for (const Term& t : atom.args) out.args.push_back(resolve_term(rule, grounding, t));
    return out;
}

TruthDegree body_degree(const FuzzyInterpretation& interp, const Rule& rule,
                        std::span<const Term> grounding) {
    std::vector<TruthDegree> degrees;
    degrees.reserve(rule.body.size());
    for (const BodyAtom& b : rule.body) {
        Atom ground = substitute_body_atom(rule, grounding, b.atom);
        TruthDegree d = interp.degree(ground);
        degrees.push_back(b.op ? b.op->apply(d) : d);
    }
    return rule.connective.fold(degrees);
}

std::string degree_text_exact(double v) { return shortest_double_text(v); }

std::string degree_text_table(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace tdlog
