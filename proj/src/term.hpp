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
#ifndef TDLOG_TERM_HPP
#define TDLOG_TERM_HPP

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tdlog {

// Error categories used across the engine. Parse problems are reported as
// diagnostics, not exceptions; these cover configuration mistakes, broken
// caller contracts, and internal invariant violations.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

enum class TermKind : uint8_t { Constant = 0, Variable = 1, Null = 2 };

// Constants, variables, and nulls live in disjoint id spaces; a Term is a
// (kind, id) pair and only meaningful together with the Universe that
// interned it.
struct Term {
    TermKind kind = TermKind::Constant;
    uint32_t id = 0;

    bool operator==(const Term&) const = default;
    bool is_constant() const { return kind == TermKind::Constant; }
    bool is_variable() const { return kind == TermKind::Variable; }
    bool is_null() const { return kind == TermKind::Null; }
};

using PredicateId = uint32_t;

struct Atom {
    PredicateId predicate = 0;
    std::vector<Term> args;

    bool operator==(const Atom&) const = default;
    bool ground() const {
        for (const Term& t : args)
            if (t.is_variable()) return false;
        return true;
    }
    bool mentions_null() const {
        for (const Term& t : args)
            if (t.is_null()) return true;
        return false;
    }
};

inline size_t hash_combine(size_t seed, size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

struct TermHash {
    size_t operator()(const Term& t) const {
        return hash_combine(static_cast<size_t>(t.kind), t.id);
    }
};

struct AtomHash {
    size_t operator()(const Atom& a) const {
        size_t h = a.predicate;
        for (const Term& t : a.args) h = hash_combine(h, TermHash{}(t));
        return h;
    }
};

// Identity of a labelled null: the rule, the existential variable, and the
// grounding of the rule's frontier variables. Equal keys intern to the same
// null term.
struct NullKey {
    uint32_t rule_index = 0;
    Term variable;                                   // the existential variable
    std::vector<std::pair<Term, Term>> frontier;     // (frontier var, value), sorted by var id

    bool operator==(const NullKey&) const = default;
};

struct NullKeyHash {
    size_t operator()(const NullKey& k) const {
        size_t h = hash_combine(k.rule_index, TermHash{}(k.variable));
        for (const auto& [v, t] : k.frontier)
            h = hash_combine(h, hash_combine(TermHash{}(v), TermHash{}(t)));
        return h;
    }
};

// Interning tables for one reasoning session. Programs, datasets and
// interpretations that interact must share a Universe. Interning is
// append-only, so ids handed out earlier stay valid. A Universe and the
// objects built on it are confined to one thread at a time.
class Universe {
public:
    Term constant(std::string_view name);
    Term variable(std::string_view name);

    // Declares the predicate on first use and fixes its arity; later uses
    // must match (checked by callers that can produce diagnostics).
    PredicateId predicate(std::string_view name, size_t arity);
    bool has_predicate(std::string_view name) const;
    PredicateId find_predicate(std::string_view name) const;  // throws if absent

    size_t arity(PredicateId p) const { return preds_[p].arity; }
    const std::string& predicate_name(PredicateId p) const { return preds_[p].name; }
    size_t predicate_count() const { return preds_.size(); }

    const std::string& constant_name(uint32_t id) const { return constants_[id]; }
    const std::string& variable_name(uint32_t id) const { return variables_[id]; }
    size_t constant_count() const { return constants_.size(); }

    // Deterministic null allocation: equal keys yield the identical term.
    Term null_for(const NullKey& key);
    const NullKey& null_key(uint32_t null_id) const { return nulls_[null_id].key; }
    size_t null_count() const { return nulls_.size(); }

    // Canonical text of a term: constant name, variable name, or the stable
    // `_:r{rule}.{var}.{digest}` encoding for nulls.
    const std::string& term_text(Term t) const;
    std::string atom_text(const Atom& a) const;

    // Total order used for tie-breaking and canonical sorting: constants
    // before nulls, then by canonical text. Variables sort after both.
    bool term_less(Term a, Term b) const;
    bool atom_less(const Atom& a, const Atom& b) const;

private:
    struct PredInfo {
        std::string name;
        size_t arity;
    };
    struct NullInfo {
        NullKey key;
        std::string text;
    };

    std::vector<std::string> constants_;
    std::unordered_map<std::string, uint32_t> constant_ids_;
    std::vector<std::string> variables_;
    std::unordered_map<std::string, uint32_t> variable_ids_;
    std::vector<PredInfo> preds_;
    std::unordered_map<std::string, PredicateId> pred_ids_;
    std::vector<NullInfo> nulls_;
    std::unordered_map<NullKey, uint32_t, NullKeyHash> null_ids_;
};

// True when `name` can be written bare in dataset/goal position
// (constants are lowercase identifiers or quoted strings).
bool is_plain_constant_name(std::string_view name);

// Quotes and escapes a constant for contexts where it cannot appear bare.
std::string quoted(std::string_view raw);

}  // namespace tdlog

#endif
