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
#include "lang.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <functional>
#include <map>
#include <unordered_set>

namespace tdlog {

std::string Diagnostic::text() const {
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
}

// ---------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------

namespace {

enum class Tok : uint8_t {
    Ident,
    Number,
    String,
    Arrow,       // ->
    DoubleColon, // ::
    Amp,
    Bang,
    Tilde,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    End,
    Error,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_ws();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) {
            t.kind = Tok::End;
            return t;
        }
        char c = src_[pos_];
        if (is_ident_start(c)) {
            size_t start = pos_;
            while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
            t.kind = Tok::Ident;
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        if ((c >= '0' && c <= '9') || (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] != '>')) {
            return lex_number(t);
        }
        switch (c) {
            case '"': return lex_string(t);
            case '-':
                advance();
                if (pos_ < src_.size() && src_[pos_] == '>') {
                    advance();
                    t.kind = Tok::Arrow;
                    return t;
                }
                t.kind = Tok::Error;
                t.text = "stray '-'";
                return t;
            case ':':
                advance();
                if (pos_ < src_.size() && src_[pos_] == ':') {
                    advance();
                    t.kind = Tok::DoubleColon;
                    return t;
                }
                t.kind = Tok::Error;
                t.text = "single ':' (note: null terms are engine-internal and cannot be written in input)";
                return t;
            case '&': advance(); t.kind = Tok::Amp; return t;
            case '!': advance(); t.kind = Tok::Bang; return t;
            case '~': advance(); t.kind = Tok::Tilde; return t;
            case '(': advance(); t.kind = Tok::LParen; return t;
            case ')': advance(); t.kind = Tok::RParen; return t;
            case '[': advance(); t.kind = Tok::LBracket; return t;
            case ']': advance(); t.kind = Tok::RBracket; return t;
            case ',': advance(); t.kind = Tok::Comma; return t;
            case '.': advance(); t.kind = Tok::Dot; return t;
            default:
                advance();
                t.kind = Tok::Error;
                t.text = std::string("unexpected character '") + c + "'";
                return t;
        }
    }

private:
    static bool is_ident_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    Token lex_number(Token t) {
        size_t start = pos_;
        if (src_[pos_] == '-') advance();
        while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') advance();
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' && src_[pos_ + 1] >= '0' &&
            src_[pos_ + 1] <= '9') {
            advance();
            while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') advance();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            size_t mark = pos_;
            advance();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
            if (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') {
                while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') advance();
            } else {
                pos_ = mark;  // not an exponent after all
            }
        }
        std::string_view body = src_.substr(start, pos_ - start);
        double value = 0.0;
        auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
        if (ec != std::errc() || p != body.data() + body.size()) {
            t.kind = Tok::Error;
            t.text = "malformed number '" + std::string(body) + "'";
            return t;
        }
        t.kind = Tok::Number;
        t.text = std::string(body);
        t.number = value;
        return t;
    }

    Token lex_string(Token t) {
        advance();  // opening quote
        std::string out;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '"') {
                advance();
                t.kind = Tok::String;
                t.text = std::move(out);
                return t;
            }
            if (c == '\\' && pos_ + 1 < src_.size()) {
                advance();
                out += src_[pos_];
                advance();
                continue;
            }
            if (c == '\n') break;
            out += c;
            advance();
        }
        t.kind = Tok::Error;
        t.text = "unterminated string literal";
        return t;
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------

class Parser {
public:
    Parser(std::string_view text, std::shared_ptr<Universe> universe,
           const ConnectiveRegistry& registry)
        : lexer_(text), universe_(std::move(universe)), registry_(registry) {
        cur_ = lexer_.next();
    }

    ParseResult<Program> program() {
        ParseResult<Program> result;
        Program prog(universe_);
        while (cur_.kind != Tok::End) {
            if (!rule(prog, result.diagnostics)) sync_to_dot();
        }
        // Program-level invariant: unary operators and existential rules do
        // not mix.
        if (prog.uses_unary_ops() && prog.uses_existentials())
            result.diagnostics.push_back(
                {1, 1, "programs cannot combine unary operators with existential rules"});
        if (result.diagnostics.empty()) result.value = std::move(prog);
        return result;
    }

    ParseResult<FuzzyDataset> dataset() {
        ParseResult<FuzzyDataset> result;
        FuzzyDataset data(universe_);
        while (cur_.kind != Tok::End) {
            if (!fact(data, result.diagnostics)) sync_to_dot();
        }
        if (result.diagnostics.empty()) result.value = std::move(data);
        return result;
    }

    ParseResult<Atom> ground_atom() {
        ParseResult<Atom> result;
        std::optional<Atom> a = data_atom(result.diagnostics);
        if (a && cur_.kind != Tok::End && cur_.kind != Tok::Dot)
            error(result.diagnostics, "unexpected input after atom");
        if (result.diagnostics.empty()) result.value = std::move(*a);
        return result;
    }

private:
    void bump() { cur_ = lexer_.next(); }

    void error(std::vector<Diagnostic>& out, const std::string& msg) {
        out.push_back({cur_.line, cur_.col, msg});
    }
    void error_at(std::vector<Diagnostic>& out, const Token& t, const std::string& msg) {
        out.push_back({t.line, t.col, msg});
    }

    void sync_to_dot() {
        while (cur_.kind != Tok::End) {
            bool stop = cur_.kind == Tok::Dot;
            bump();
            if (stop) break;
        }
    }

    bool expect(Tok kind, const char* what, std::vector<Diagnostic>& out) {
        if (cur_.kind != kind) {
            error(out, std::string("expected ") + what);
            return false;
        }
        bump();
        return true;
    }

    // An atom inside a rule: identifiers are variables, constants are quoted.
    std::optional<Atom> rule_atom(std::vector<Diagnostic>& out) {
        if (cur_.kind != Tok::Ident) {
            error(out, "expected a predicate name");
            return std::nullopt;
        }
        if (cur_.text == "exists") {
            error(out, "'exists' is a reserved word");
            return std::nullopt;
        }
        Token name = cur_;
        bump();
        std::vector<Term> args;
        if (cur_.kind == Tok::LParen) {
            bump();
            if (cur_.kind != Tok::RParen) {
                while (true) {
                    if (cur_.kind == Tok::Ident) {
                        args.push_back(universe_->variable(cur_.text));
                        bump();
                    } else if (cur_.kind == Tok::String) {
                        args.push_back(universe_->constant(cur_.text));
                        bump();
                    } else {
                        error(out, "expected a variable or quoted constant");
                        return std::nullopt;
                    }
                    if (cur_.kind == Tok::Comma) {
                        bump();
                        continue;
                    }
                    break;
                }
            }
            if (!expect(Tok::RParen, "')'", out)) return std::nullopt;
        }
        return make_atom(name, std::move(args), out);
    }

    // An atom in a dataset or goal: identifiers are constants and must be
    // lowercase (or quoted).
    std::optional<Atom> data_atom(std::vector<Diagnostic>& out) {
        if (cur_.kind != Tok::Ident) {
            error(out, "expected a predicate name");
            return std::nullopt;
        }
        Token name = cur_;
        bump();
        std::vector<Term> args;
        if (cur_.kind == Tok::LParen) {
            bump();
            if (cur_.kind != Tok::RParen) {
                while (true) {
                    if (cur_.kind == Tok::Ident) {
                        if (!is_plain_constant_name(cur_.text)) {
                            error(out, "constants must be lowercase identifiers or quoted strings");
                            return std::nullopt;
                        }
                        args.push_back(universe_->constant(cur_.text));
                        bump();
                    } else if (cur_.kind == Tok::String) {
                        args.push_back(universe_->constant(cur_.text));
                        bump();
                    } else {
                        error(out, "expected a constant");
                        return std::nullopt;
                    }
                    if (cur_.kind == Tok::Comma) {
                        bump();
                        continue;
                    }
                    break;
                }
            }
            if (!expect(Tok::RParen, "')'", out)) return std::nullopt;
        }
        return make_atom(name, std::move(args), out);
    }

    std::optional<Atom> make_atom(const Token& name, std::vector<Term> args,
                                  std::vector<Diagnostic>& out) {
        try {
            PredicateId pred = universe_->predicate(name.text, args.size());
            return Atom{pred, std::move(args)};
        } catch (const ConfigError& e) {
            error_at(out, name, e.what());
            return std::nullopt;
        }
    }

    std::optional<BodyAtom> body_atom(std::vector<Diagnostic>& out) {
        std::optional<UnaryOp> op;
        if (cur_.kind == Tok::Bang || cur_.kind == Tok::Tilde) {
            std::string name = cur_.kind == Tok::Bang ? "!" : "~";
            Token at = cur_;
            bump();
            op = make_unary(at, name, std::nullopt, out);
            if (!op) return std::nullopt;
        } else if (cur_.kind == Tok::Ident && registry_.has_unary(cur_.text)) {
            // `delta[T] Atom`; only treated as an operator when the bracket
            // follows, so a predicate may still share the name.
            Token at = cur_;
            Lexer peek_state = lexer_;
            Token saved = cur_;
            bump();
            if (cur_.kind == Tok::LBracket) {
                bump();
                if (cur_.kind != Tok::Number) {
                    error(out, "expected a numeric parameter");
                    return std::nullopt;
                }
                double param = cur_.number;
                bump();
                if (!expect(Tok::RBracket, "']'", out)) return std::nullopt;
                op = make_unary(at, at.text, param, out);
                if (!op) return std::nullopt;
            } else {
                lexer_ = peek_state;  // roll back; it was a predicate
                cur_ = saved;
                bump();
                // re-parse as atom below, starting from the identifier we
                // already consumed
                std::optional<Atom> atom = finish_atom_from(saved, out);
                if (!atom) return std::nullopt;
                return BodyAtom{std::nullopt, std::move(*atom)};
            }
        }
        std::optional<Atom> atom = rule_atom(out);
        if (!atom) return std::nullopt;
        return BodyAtom{std::move(op), std::move(*atom)};
    }

    // Helper for the operator/predicate ambiguity: the identifier token was
    // consumed already.
    std::optional<Atom> finish_atom_from(const Token& name, std::vector<Diagnostic>& out) {
        std::vector<Term> args;
        if (cur_.kind == Tok::LParen) {
            bump();
            if (cur_.kind != Tok::RParen) {
                while (true) {
                    if (cur_.kind == Tok::Ident) {
                        args.push_back(universe_->variable(cur_.text));
                        bump();
                    } else if (cur_.kind == Tok::String) {
                        args.push_back(universe_->constant(cur_.text));
                        bump();
                    } else {
                        error(out, "expected a variable or quoted constant");
                        return std::nullopt;
                    }
                    if (cur_.kind == Tok::Comma) {
                        bump();
                        continue;
                    }
                    break;
                }
            }
            if (!expect(Tok::RParen, "')'", out)) return std::nullopt;
        }
        return make_atom(name, std::move(args), out);
    }

    std::optional<UnaryOp> make_unary(const Token& at, const std::string& name,
                                      std::optional<double> param,
                                      std::vector<Diagnostic>& out) {
        try {
            return registry_.make_unary(name, param);
        } catch (const ConfigError& e) {
            error_at(out, at, e.what());
            return std::nullopt;
        }
    }

    bool rule(Program& prog, std::vector<Diagnostic>& out) {
        Rule r;
        std::optional<BodyAtom> first = body_atom(out);
        if (!first) return false;
        r.body.push_back(std::move(*first));

        std::optional<TNorm> connective;
        while (cur_.kind == Tok::Amp) {
            Token amp = cur_;
            bump();
            if (cur_.kind != Tok::Ident) {
                error(out, "expected a connective name after '&'");
                return false;
            }
            std::string cname = cur_.text;
            Token ctok = cur_;
            bump();
            std::optional<double> param;
            if (cur_.kind == Tok::LParen) {
                bump();
                if (cur_.kind != Tok::Number) {
                    error(out, "expected a numeric connective parameter");
                    return false;
                }
                param = cur_.number;
                bump();
                if (!expect(Tok::RParen, "')'", out)) return false;
            }
            TNorm t = TNorm::minimum();
            try {
                t = registry_.make_tnorm(cname, param);
            } catch (const ConfigError& e) {
                error_at(out, ctok, e.what());
                return false;
            }
            if (connective && !(*connective == t)) {
                error_at(out, amp,
                         "mixed connectives in one rule ('" + connective->name() + "' vs '" +
                             t.name() + "')");
                return false;
            }
            connective = t;
            std::optional<BodyAtom> next = body_atom(out);
            if (!next) return false;
            r.body.push_back(std::move(*next));
        }
        r.connective = connective ? *connective : TNorm::minimum();

        if (!expect(Tok::Arrow, "'->'", out)) return false;

        Token head_tok = cur_;
        if (cur_.kind == Tok::Ident && cur_.text == "exists") {
            bump();
            while (true) {
                if (cur_.kind != Tok::Ident) {
                    error(out, "expected an existential variable name");
                    return false;
                }
                Term v = universe_->variable(cur_.text);
                if (std::find(r.existential_vars.begin(), r.existential_vars.end(), v) !=
                    r.existential_vars.end()) {
                    error(out, "duplicate existential variable '" + cur_.text + "'");
                    return false;
                }
                r.existential_vars.push_back(v);
                bump();
                if (cur_.kind == Tok::Comma) {
                    bump();
                    continue;
                }
                break;
            }
            if (!expect(Tok::Dot, "'.' after the existential variable list", out)) return false;
        }
        std::optional<Atom> head = rule_atom(out);
        if (!head) return false;
        r.head = std::move(*head);
        if (!expect(Tok::Dot, "'.' at the end of the rule", out)) return false;

        try {
            prog.add_rule(std::move(r));
        } catch (const ConfigError& e) {
            error_at(out, head_tok, e.what());
            return false;
        }
        return true;
    }

    bool fact(FuzzyDataset& data, std::vector<Diagnostic>& out) {
        Token start = cur_;
        double degree = 1.0;
        if (cur_.kind == Tok::Number) {
            degree = cur_.number;
            bump();
            if (!expect(Tok::DoubleColon, "'::' after the degree", out)) return false;
        }
        if (!(degree > 0.0 && degree <= 1.0)) {
            error_at(out, start, "degree must be in (0,1], got " + shortest_double_text(degree));
            return false;
        }
        std::optional<Atom> atom = data_atom(out);
        if (!atom) return false;
        Token dot = cur_;
        if (!expect(Tok::Dot, "'.' at the end of the fact", out)) return false;
        if (!data.insert(*atom, TruthDegree(degree))) {
            error_at(out, start,
                     "duplicate fact " + data.universe()->atom_text(*atom));
            return false;
        }
        (void)dot;
        return true;
    }

    Lexer lexer_;
    Token cur_;
    std::shared_ptr<Universe> universe_;
    const ConnectiveRegistry& registry_;
};

}  // namespace

// ---------------------------------------------------------------------
// Program construction and validation
// ---------------------------------------------------------------------

void Program::add_rule(Rule rule) {
    const Universe& u = *universe_;
    if (rule.body.empty()) throw ConfigError("rule body must not be empty");

    auto check_arity = [&](const Atom& a) {
        if (a.args.size() != u.arity(a.predicate))
            throw ConfigError("atom arity does not match predicate '" +
                              u.predicate_name(a.predicate) + "'");
    };
    for (const BodyAtom& b : rule.body) check_arity(b.atom);
    check_arity(rule.head);

    std::vector<Term> body_vars;
    std::unordered_set<uint32_t> body_var_ids;
    std::unordered_set<uint32_t> plain_var_ids;
    for (const BodyAtom& b : rule.body) {
        for (const Term& t : b.atom.args) {
            if (!t.is_variable()) continue;
            if (body_var_ids.insert(t.id).second) body_vars.push_back(t);
            if (!b.op) plain_var_ids.insert(t.id);
        }
    }
    rule.body_vars = std::move(body_vars);

    std::unordered_set<uint32_t> existential_ids;
    for (const Term& v : rule.existential_vars) {
        existential_ids.insert(v.id);
        if (body_var_ids.count(v.id))
            throw ConfigError("existential variable '" + u.variable_name(v.id) +
                              "' also occurs in the body");
        bool in_head = std::find(rule.head.args.begin(), rule.head.args.end(), v) !=
                       rule.head.args.end();
        if (!in_head)
            throw ConfigError("existential variable '" + u.variable_name(v.id) +
                              "' does not occur in the head");
    }

    rule.frontier_vars.clear();
    std::unordered_set<uint32_t> seen_frontier;
    for (const Term& t : rule.head.args) {
        if (!t.is_variable() || existential_ids.count(t.id)) continue;
        if (!body_var_ids.count(t.id))
            throw ConfigError("frontier variable '" + u.variable_name(t.id) +
                              "' does not occur in the body");
        if (seen_frontier.insert(t.id).second) rule.frontier_vars.push_back(t);
    }

    // Safety: a variable of a unary-operator atom must also occur in a plain
    // body atom, so trigger enumeration stays within the active domain.
    for (const BodyAtom& b : rule.body) {
        if (!b.op) continue;
        for (const Term& t : b.atom.args)
            if (t.is_variable() && !plain_var_ids.count(t.id))
                throw ConfigError("variable '" + u.variable_name(t.id) +
                                  "' occurs only under a unary operator; it must also occur "
                                  "in a plain body atom");
    }

    if (!rule.existential_vars.empty() && rule.has_unary_ops())
        throw ConfigError("a rule cannot combine unary operators with existential variables");

    rule.index = static_cast<uint32_t>(rules_.size());
    uses_existentials_ = uses_existentials_ || !rule.existential_vars.empty();
    uses_unary_ops_ = uses_unary_ops_ || rule.has_unary_ops();
    intensional_.insert(rule.head.predicate);
    predicates_.insert(rule.head.predicate);
    for (const BodyAtom& b : rule.body) predicates_.insert(b.atom.predicate);
    rules_.push_back(std::move(rule));
}

std::string Program::fragment_name() const {
    if (uses_unary_ops_) return "t-Datalog with unary operators";
    if (uses_existentials_) return "t-Datalog with existential rules";
    return "t-Datalog";
}

// ---------------------------------------------------------------------
// Entry points and printer
// ---------------------------------------------------------------------

ParseResult<Program> parse_program(std::string_view text, std::shared_ptr<Universe> universe,
                                   const ConnectiveRegistry& registry) {
    return Parser(text, std::move(universe), registry).program();
}

ParseResult<FuzzyDataset> parse_dataset(std::string_view text, std::shared_ptr<Universe> universe) {
    return Parser(text, std::move(universe), ConnectiveRegistry::standard()).dataset();
}

ParseResult<Atom> parse_ground_atom(std::string_view text, std::shared_ptr<Universe> universe) {
    return Parser(text, std::move(universe), ConnectiveRegistry::standard()).ground_atom();
}

namespace {

std::string rule_atom_text(const Universe& u, const Atom& a) {
    std::string out = u.predicate_name(a.predicate);
    if (a.args.empty()) return out;
    out += '(';
    for (size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ',';
        const Term& t = a.args[i];
        if (t.is_constant())
            out += quoted(u.constant_name(t.id));  // always quoted inside rules
        else
            out += u.term_text(t);
    }
    out += ')';
    return out;
}

}  // namespace

std::string print_rule(const Universe& u, const Rule& rule) {
    std::string out;
    for (size_t i = 0; i < rule.body.size(); ++i) {
        if (i) out += " &" + rule.connective.name() + " ";
        const BodyAtom& b = rule.body[i];
        if (b.op) {
            const std::string& n = b.op->name();
            out += n;
            if (n.size() > 1) out += ' ';  // `delta[T] Atom`, but `!Atom`
        }
        out += rule_atom_text(u, b.atom);
    }
    out += " -> ";
    if (!rule.existential_vars.empty()) {
        out += "exists ";
        for (size_t i = 0; i < rule.existential_vars.size(); ++i) {
            if (i) out += ", ";
            out += u.variable_name(rule.existential_vars[i].id);
        }
        out += " . ";
    }
    out += rule_atom_text(u, rule.head);
    out += '.';
    return out;
}

std::string print_program(const Program& program) {
    std::string out;
    for (const Rule& r : program.rules()) {
        out += print_rule(*program.universe(), r);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------
// Weak acyclicity
// ---------------------------------------------------------------------

namespace {

struct PositionGraph {
    // node = (predicate, position), densely numbered
    std::map<std::pair<PredicateId, size_t>, int> ids;
    std::vector<std::pair<PredicateId, size_t>> nodes;
    struct Edge {
        int to;
        bool special;
        uint32_t rule;
    };
    std::vector<std::vector<Edge>> adj;

    int node(PredicateId p, size_t pos) {
        auto [it, inserted] = ids.try_emplace({p, pos}, static_cast<int>(nodes.size()));
        if (inserted) {
            nodes.push_back({p, pos});
            adj.emplace_back();
        }
        return it->second;
    }
};

}  // namespace

WeakAcyclicityResult check_weak_acyclicity(const Program& program) {
    PositionGraph g;
    for (const Rule& r : program.rules()) {
        // Body positions of each frontier variable.
        std::map<uint32_t, std::vector<int>> body_positions;
        for (const BodyAtom& b : r.body)
            for (size_t i = 0; i < b.atom.args.size(); ++i)
                if (b.atom.args[i].is_variable())
                    body_positions[b.atom.args[i].id].push_back(
                        g.node(b.atom.predicate, i));

        std::unordered_set<uint32_t> existential;
        for (const Term& v : r.existential_vars) existential.insert(v.id);

        std::vector<int> special_targets;
        for (size_t i = 0; i < r.head.args.size(); ++i) {
            const Term& t = r.head.args[i];
            if (t.is_variable() && existential.count(t.id))
                special_targets.push_back(g.node(r.head.predicate, i));
        }

        for (const Term& fv : r.frontier_vars) {
            auto bp = body_positions.find(fv.id);
            if (bp == body_positions.end()) continue;
            std::vector<int> head_positions;
            for (size_t i = 0; i < r.head.args.size(); ++i)
                if (r.head.args[i] == fv) head_positions.push_back(g.node(r.head.predicate, i));
            for (int from : bp->second) {
                for (int to : head_positions) g.adj[from].push_back({to, false, r.index});
                for (int to : special_targets) g.adj[from].push_back({to, true, r.index});
            }
        }
    }

    // A cycle through a special edge u=>v exists iff u is reachable from v.
    for (size_t u = 0; u < g.adj.size(); ++u) {
        for (const auto& e : g.adj[u]) {
            if (!e.special) continue;
            // BFS from e.to back to u, remembering parents to reconstruct the
            // witness path.
            std::vector<int> parent(g.adj.size(), -1);
            std::vector<std::pair<int, int>> parent_edge(g.adj.size(), {-1, -1});
            std::deque<int> queue{e.to};
            std::vector<char> seen(g.adj.size(), 0);
            seen[e.to] = 1;
            bool found = e.to == static_cast<int>(u);
            while (!queue.empty() && !found) {
                int n = queue.front();
                queue.pop_front();
                for (size_t k = 0; k < g.adj[n].size(); ++k) {
                    int m = g.adj[n][k].to;
                    if (seen[m]) continue;
                    seen[m] = 1;
                    parent[m] = n;
                    parent_edge[m] = {n, static_cast<int>(k)};
                    if (m == static_cast<int>(u)) {
                        found = true;
                        break;
                    }
                    queue.push_back(m);
                }
            }
            if (!found) continue;

            WeakAcyclicityResult result;
            result.weakly_acyclic = false;
            auto mk_edge = [&](int from, const PositionGraph::Edge& edge) {
                return PositionEdge{g.nodes[from].first, g.nodes[from].second,
                                    g.nodes[edge.to].first, g.nodes[edge.to].second,
                                    edge.special, edge.rule};
            };
            result.witness_cycle.push_back(mk_edge(static_cast<int>(u), e));
            // Path edges from e.to to u, reconstructed backwards.
            std::vector<PositionEdge> path;
            int n = static_cast<int>(u);
            while (n != e.to && parent[n] != -1) {
                auto [pn, pk] = parent_edge[n];
                path.push_back(mk_edge(pn, g.adj[pn][pk]));
                n = pn;
            }
            std::reverse(path.begin(), path.end());
            for (auto& pe : path) result.witness_cycle.push_back(pe);
            return result;
        }
    }
    return WeakAcyclicityResult{};
}

std::string WeakAcyclicityResult::witness_text(const Universe& u) const {
    if (weakly_acyclic) return "weakly acyclic";
    std::string out = "not weakly acyclic; cycle:";
    for (const PositionEdge& e : witness_cycle) {
        out += " (" + u.predicate_name(e.from_pred) + "," + std::to_string(e.from_pos + 1) + ")";
        out += e.special ? " =>" : " ->";
        out += " (" + u.predicate_name(e.to_pred) + "," + std::to_string(e.to_pos + 1) + ")";
        out += " [r" + std::to_string(e.rule_index + 1) + "]";
    }
    return out;
}

// ---------------------------------------------------------------------
// Stratification
// ---------------------------------------------------------------------

namespace {

struct PredGraph {
    std::vector<PredicateId> preds;                 // dense -> predicate
    std::map<PredicateId, int> index;               // predicate -> dense
    struct Edge {
        int to;
        bool strict;
    };
    std::vector<std::vector<Edge>> adj;             // head -> body edges

    int node(PredicateId p) {
        auto [it, inserted] = index.try_emplace(p, static_cast<int>(preds.size()));
        if (inserted) {
            preds.push_back(p);
            adj.emplace_back();
        }
        return it->second;
    }
};

PredGraph build_pred_graph(const Program& program) {
    PredGraph g;
    for (PredicateId p : program.predicates()) g.node(p);
    for (const Rule& r : program.rules()) {
        int h = g.node(r.head.predicate);
        for (const BodyAtom& b : r.body)
            g.adj[h].push_back({g.node(b.atom.predicate), b.op.has_value()});
    }
    return g;
}

// Iterative Tarjan SCC; returns component id per node, components numbered in
// reverse topological order of the head->body edges (a component's
// dependencies get smaller ids).
std::vector<int> tarjan_scc(const PredGraph& g, int& comp_count) {
    int n = static_cast<int>(g.adj.size());
    std::vector<int> idx(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    int next_index = 0;
    comp_count = 0;

    struct Frame {
        int node;
        size_t edge;
    };
    for (int root = 0; root < n; ++root) {
        if (idx[root] != -1) continue;
        std::vector<Frame> frames{{root, 0}};
        idx[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.edge < g.adj[f.node].size()) {
                int m = g.adj[f.node][f.edge++].to;
                if (idx[m] == -1) {
                    idx[m] = low[m] = next_index++;
                    stack.push_back(m);
                    on_stack[m] = 1;
                    frames.push_back({m, 0});
                } else if (on_stack[m]) {
                    low[f.node] = std::min(low[f.node], idx[m]);
                }
            } else {
                if (low[f.node] == idx[f.node]) {
                    while (true) {
                        int m = stack.back();
                        stack.pop_back();
                        on_stack[m] = 0;
                        comp[m] = comp_count;
                        if (m == f.node) break;
                    }
                    ++comp_count;
                }
                int done = f.node;
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().node] = std::min(low[frames.back().node], low[done]);
            }
        }
    }
    return comp;
}

std::string cycle_witness(const PredGraph& g, const Universe& u, const std::vector<int>& comp,
                          int from, int to) {
    // Path within the SCC from `to` back to `from`, then the strict edge.
    std::vector<int> parent(g.adj.size(), -1);
    std::deque<int> queue{to};
    while (!queue.empty()) {
        int n = queue.front();
        queue.pop_front();
        if (n == from) break;
        for (const auto& e : g.adj[n]) {
            if (comp[e.to] != comp[from] || parent[e.to] != -1 || e.to == to) continue;
            parent[e.to] = n;
            queue.push_back(e.to);
        }
    }
    std::vector<int> path{from};
    while (path.back() != to && parent[path.back()] != -1) path.push_back(parent[path.back()]);
    std::reverse(path.begin(), path.end());
    std::string out = "not stratifiable; cycle through a unary operator:";
    for (int n : path) out += " " + u.predicate_name(g.preds[n]) + " ->";
    out += " " + u.predicate_name(g.preds[from]) + " (unary edge " +
           u.predicate_name(g.preds[from]) + " -> " + u.predicate_name(g.preds[to]) + ")";
    return out;
}

Stratification strata_from_levels(const Program& program, const std::map<PredicateId, int>& levels) {
    Stratification s;
    s.levels = levels;
    int max_level = 0;
    for (const auto& [p, l] : levels) max_level = std::max(max_level, l);
    s.strata.assign(static_cast<size_t>(max_level), {});
    for (const Rule& r : program.rules()) {
        int l = levels.at(r.head.predicate);
        s.strata[static_cast<size_t>(l - 1)].push_back(r.index);
    }
    return s;
}

}  // namespace

StratificationResult compute_stratification(const Program& program) {
    if (program.uses_existentials())
        throw ConfigError("stratification is defined for programs without existential variables");

    PredGraph g = build_pred_graph(program);
    int comp_count = 0;
    std::vector<int> comp = tarjan_scc(g, comp_count);

    // A strict edge inside a component is a cycle through a unary operator.
    for (size_t n = 0; n < g.adj.size(); ++n)
        for (const auto& e : g.adj[n])
            if (e.strict && comp[n] == comp[e.to]) {
                StratificationResult res;
                res.witness = cycle_witness(g, *program.universe(), comp,
                                            static_cast<int>(n), e.to);
                return res;
            }

    // Minimal levels on the condensation: level(H) >= level(B) (+1 when
    // strict), floor 1 for intensional components. Tarjan numbers components
    // so that dependencies have smaller ids; process in id order.
    std::vector<int> comp_level(comp_count, 0);
    std::vector<char> comp_intensional(comp_count, 0);
    for (size_t n = 0; n < g.adj.size(); ++n)
        if (program.is_intensional(g.preds[n])) comp_intensional[comp[n]] = 1;
    for (int c = 0; c < comp_count; ++c)
        if (comp_intensional[c]) comp_level[c] = 1;
    for (int c = 0; c < comp_count; ++c) {
        for (size_t n = 0; n < g.adj.size(); ++n) {
            if (comp[n] != c) continue;
            for (const auto& e : g.adj[n]) {
                if (comp[e.to] == c) continue;
                int need = comp_level[comp[e.to]] + (e.strict ? 1 : 0);
                comp_level[c] = std::max(comp_level[c], need);
            }
        }
    }

    std::map<PredicateId, int> levels;
    for (size_t n = 0; n < g.adj.size(); ++n)
        if (program.is_intensional(g.preds[n])) levels[g.preds[n]] = comp_level[comp[n]];

    StratificationResult res;
    res.stratification = strata_from_levels(program, levels);
    return res;
}

std::vector<Stratification> alternative_stratifications(const Program& program, size_t max_count) {
    std::vector<Stratification> out;
    StratificationResult base = compute_stratification(program);
    if (!base.stratifiable()) return out;
    out.push_back(*base.stratification);
    if (max_count <= 1) return out;

    PredGraph g = build_pred_graph(program);
    int comp_count = 0;
    std::vector<int> comp = tarjan_scc(g, comp_count);

    // Condensation edges between intensional components (dependencies of a
    // component must be placed before it in a linear extension).
    std::vector<char> intensional(comp_count, 0);
    for (size_t n = 0; n < g.adj.size(); ++n)
        if (program.is_intensional(g.preds[n])) intensional[comp[n]] = 1;
    std::vector<std::set<int>> deps(comp_count);
    for (size_t n = 0; n < g.adj.size(); ++n)
        for (const auto& e : g.adj[n])
            if (comp[n] != comp[e.to] && intensional[comp[n]] && intensional[comp[e.to]])
                deps[comp[n]].insert(comp[e.to]);

    std::vector<int> order;
    std::vector<char> placed(comp_count, 0);
    std::function<void()> enumerate = [&]() {
        if (out.size() >= max_count) return;
        bool any = false;
        for (int c = 0; c < comp_count && out.size() < max_count; ++c) {
            if (placed[c] || !intensional[c]) continue;
            bool ready = true;
            for (int d : deps[c])
                if (!placed[d]) {
                    ready = false;
                    break;
                }
            if (!ready) continue;
            any = true;
            placed[c] = 1;
            order.push_back(c);
            enumerate();
            order.pop_back();
            placed[c] = 0;
        }
        if (!any) {
            // complete extension: level = position + 1
            std::map<PredicateId, int> levels;
            for (size_t n = 0; n < g.adj.size(); ++n) {
                if (!program.is_intensional(g.preds[n])) continue;
                auto it = std::find(order.begin(), order.end(), comp[n]);
                levels[g.preds[n]] = static_cast<int>(it - order.begin()) + 1;
            }
            Stratification s = strata_from_levels(program, levels);
            for (const Stratification& prev : out)
                if (prev.levels == s.levels) return;
            out.push_back(std::move(s));
        }
    };
    enumerate();
    return out;
}

}  // namespace tdlog
