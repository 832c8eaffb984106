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
#include "term.hpp"

#include <algorithm>

namespace tdlog {

namespace {

uint32_t intern(std::string_view name, std::vector<std::string>& names,
                std::unordered_map<std::string, uint32_t>& ids) {
    auto it = ids.find(std::string(name));
    if (it != ids.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(names.size());
    names.emplace_back(name);
    ids.emplace(names.back(), id);
    return id;
}

uint64_t fnv1a(std::string_view s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

const char* kHexDigits = "0123456789abcdef";

std::string hex64(uint64_t v) {
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = kHexDigits[v & 0xf];
        v >>= 4;
    }
    return out;
}

}  // namespace

Term Universe::constant(std::string_view name) {
    return Term{TermKind::Constant, intern(name, constants_, constant_ids_)};
}

Term Universe::variable(std::string_view name) {
    return Term{TermKind::Variable, intern(name, variables_, variable_ids_)};
}

PredicateId Universe::predicate(std::string_view name, size_t arity) {
    auto it = pred_ids_.find(std::string(name));
    if (it != pred_ids_.end()) {
        if (preds_[it->second].arity != arity)
            throw ConfigError("predicate '" + std::string(name) + "' used with arity " +
                              std::to_string(arity) + " but declared with arity " +
                              std::to_string(preds_[it->second].arity));
        return it->second;
    }
    PredicateId id = static_cast<PredicateId>(preds_.size());
    preds_.push_back(PredInfo{std::string(name), arity});
    pred_ids_.emplace(preds_.back().name, id);
    return id;
}

bool Universe::has_predicate(std::string_view name) const {
    return pred_ids_.count(std::string(name)) > 0;
}

PredicateId Universe::find_predicate(std::string_view name) const {
    auto it = pred_ids_.find(std::string(name));
    if (it == pred_ids_.end())
        throw ConfigError("unknown predicate '" + std::string(name) + "'");
    return it->second;
}

Term Universe::null_for(const NullKey& key) {
    auto it = null_ids_.find(key);
    if (it != null_ids_.end()) return Term{TermKind::Null, it->second};

    // Canonical digest over the frontier binding, sorted by variable name so
    // the encoding depends only on the input text, never on interning order.
    std::vector<std::pair<std::string, std::string>> parts;
    parts.reserve(key.frontier.size());
    for (const auto& [var, value] : key.frontier)
        parts.emplace_back(variable_name(var.id), term_text(value));
    std::sort(parts.begin(), parts.end());
    std::string canon;
    for (const auto& [v, t] : parts) {
        canon += v;
        canon += '=';
        canon += t;
        canon += ';';
    }

    uint32_t id = static_cast<uint32_t>(nulls_.size());
    std::string text = "_:r" + std::to_string(key.rule_index + 1) + "." +
                       variable_name(key.variable.id) + "." + hex64(fnv1a(canon));
    nulls_.push_back(NullInfo{key, std::move(text)});
    null_ids_.emplace(nulls_.back().key, id);
    return Term{TermKind::Null, id};
}

const std::string& Universe::term_text(Term t) const {
    switch (t.kind) {
        case TermKind::Constant: return constants_[t.id];
        case TermKind::Variable: return variables_[t.id];
        case TermKind::Null: return nulls_[t.id].text;
    }
    throw InternalError("corrupt term kind");
}

std::string Universe::atom_text(const Atom& a) const {
    std::string out = preds_[a.predicate].name;
    out += '(';
    for (size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ',';
        const Term& t = a.args[i];
        if (t.is_constant() && !is_plain_constant_name(constants_[t.id]))
            out += quoted(constants_[t.id]);
        else
            out += term_text(t);
    }
    out += ')';
    return out;
}

bool Universe::term_less(Term a, Term b) const {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.id == b.id) return false;
    return term_text(a) < term_text(b);
}

bool Universe::atom_less(const Atom& a, const Atom& b) const {
    if (a.predicate != b.predicate)
        return preds_[a.predicate].name < preds_[b.predicate].name;
    for (size_t i = 0; i < a.args.size() && i < b.args.size(); ++i) {
        if (a.args[i] == b.args[i]) continue;
        return term_less(a.args[i], b.args[i]);
    }
    return a.args.size() < b.args.size();
}

bool is_plain_constant_name(std::string_view name) {
    if (name.empty()) return false;
    if (!(name[0] == '_' || (name[0] >= 'a' && name[0] <= 'z'))) return false;
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

std::string quoted(std::string_view raw) {
    std::string out = "\"";
    for (char c : raw) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace tdlog
