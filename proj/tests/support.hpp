// Shared helpers for the unit and acceptance suites.
#ifndef TDLOG_TESTS_SUPPORT_HPP
#define TDLOG_TESTS_SUPPORT_HPP

#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lang.hpp"
#include "model.hpp"

namespace tdlog::testing {

struct Parsed {
    std::shared_ptr<Universe> universe;
    Program program;
    FuzzyDataset dataset;
};

inline Parsed parse_instance(const std::string& program_text, const std::string& dataset_text) {
    auto universe = std::make_shared<Universe>();
    ParseResult<Program> prog = parse_program(program_text, universe);
    if (!prog.ok()) throw std::runtime_error("test program does not parse:\n" +
                                             prog.diagnostics_text());
    ParseResult<FuzzyDataset> data = parse_dataset(dataset_text, universe);
    if (!data.ok()) throw std::runtime_error("test dataset does not parse:\n" +
                                             data.diagnostics_text());
    return Parsed{universe, std::move(*prog.value), std::move(*data.value)};
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Parsed fig1() {
    const std::string dir = TDLOG_DATA_DIR;
    return parse_instance(read_file(dir + "/fig1.tdl"), read_file(dir + "/fig1.tdf"));
}

// Independent stratification validity checker, straight from the definition:
// (i) strata partition the rules, (ii) all rules with head P sit in stratum
// level(P), (iii) positive intensional dependencies never go up, (iv)
// unary-operator dependencies go strictly down.
inline bool valid_stratification(const Program& program, const Stratification& s) {
    std::vector<int> rule_stratum(program.rules().size(), -1);
    for (size_t i = 0; i < s.strata.size(); ++i)
        for (uint32_t ri : s.strata[i]) {
            if (ri >= program.rules().size()) return false;
            if (rule_stratum[ri] != -1) return false;  // not a partition
            rule_stratum[ri] = static_cast<int>(i) + 1;
        }
    for (int st : rule_stratum)
        if (st == -1) return false;

    auto level_of = [&](PredicateId p) -> int {
        auto it = s.levels.find(p);
        return it == s.levels.end() ? 0 : it->second;  // extensional: level 0
    };
    for (const Rule& r : program.rules()) {
        int head_level = level_of(r.head.predicate);
        if (head_level < 1) return false;
        if (rule_stratum[r.index] != head_level) return false;
        for (const BodyAtom& b : r.body) {
            int body_level = level_of(b.atom.predicate);
            if (b.op) {
                if (!(body_level < head_level)) return false;
            } else if (program.is_intensional(b.atom.predicate)) {
                if (!(body_level <= head_level)) return false;
            }
        }
    }
    return true;
}

}  // namespace tdlog::testing

#endif
