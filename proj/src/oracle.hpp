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
#ifndef TDLOG_ORACLE_HPP
#define TDLOG_ORACLE_HPP

#include <optional>
#include <unordered_set>

#include "chase.hpp"
#include "lang.hpp"
#include "model.hpp"

// Reference implementations kept deliberately naive and scheduling-free, for
// differential testing against the chase engine. None of them reuse the
// engine's trigger machinery.

namespace tdlog {

// Round-based least fixpoint for programs without existential variables
// (unary operators allowed only on predicates the program never derives).
// Each round evaluates every grounding over the active domain against the
// round-start snapshot and raises heads to the maximum of current and target.
// The round count is bounded by the number of derivable ground atoms plus
// one; exceeding the bound is an internal error.
FuzzyInterpretation naive_fixpoint(const Program& program, const FuzzyDataset& dataset,
                                   TruthDegree k);

struct ClassicalChaseResult {
    bool completed = false;
    std::unordered_set<Atom, AtomHash> atoms;
};

// Standard boolean semi-oblivious chase over the dataset's atom set (degrees
// ignored), with the same deterministic null naming as the fuzzy engine.
ClassicalChaseResult classical_chase(const Program& program, const FuzzyDataset& dataset,
                                     uint64_t step_cap);

enum class SearchStatus : uint8_t { Found, NotFound, Undecided };

struct NullMapping {
    std::vector<std::pair<Term, Term>> entries;  // null of `from` -> element of `to`
};

// Brute-force search for a non-decreasing homomorphism: constants fixed,
// nulls of `from` mapped into the active domain of `to`, and
// from(A) <= to(h(A)) on every atom. Undecided once the candidate budget is
// spent.
SearchStatus find_ndf_homomorphism(const FuzzyInterpretation& from,
                                   const FuzzyInterpretation& to, uint64_t candidate_cap,
                                   NullMapping* witness);

// ---- differential harness --------------------------------------------

struct DifferentialEntry {
    enum class Verdict : uint8_t { Pass, Fail, NotApplicable };
    std::string check;
    Verdict verdict = Verdict::Pass;
    std::string detail;
};

struct DifferentialReport {
    std::vector<DifferentialEntry> entries;
    std::string program_text;  // reproducer
    std::string dataset_text;

    bool all_passed() const;
    size_t failures() const;
    std::string text() const;
};

struct DifferentialConfig {
    TruthDegree k = TruthDegree(1.0);
    uint64_t step_cap = 50000;
    uint64_t hom_cap = 200000;
    size_t law_samples = 500;
    uint64_t seed = 1;
    bool check_universality = false;
    int universality_models = 3;
};

// Runs every applicable cross-check on one instance: connective laws, the
// four chase strategies, greedy trace invariants, K-model property, strategy
// agreement on null-free atoms, naive-fixpoint agreement, crisp-chase
// containment, classical agreement on all-1 data, trace replay, and
// (optionally) universality against sampled models.
DifferentialReport differential_check(const Program& program, const FuzzyDataset& dataset,
                                      const DifferentialConfig& config);

// ---- random desk-scale instances ---------------------------------------

struct GenOptions {
    int max_constants = 6;
    int max_predicates = 4;
    int max_rules = 6;
    int max_arity = 3;
    int max_body_atoms = 2;
    int max_facts = 12;
    bool existentials = false;    // weakly acyclic by rejection sampling
    bool all_one_degrees = false;
    bool unary_ops = false;       // stratifiable by layered construction
    bool want_multiple_strata_orders = false;
};

struct Instance {
    std::shared_ptr<Universe> universe;
    std::optional<Program> program;
    std::optional<FuzzyDataset> dataset;
    std::string program_text;
    std::string dataset_text;
};

Instance random_instance(uint64_t seed, const GenOptions& options);

// Sampled fuzzy models of the instance, derived from the universal model by
// collapsing nulls and raising degrees, then closing under the chase; used
// for universality checks.
std::vector<FuzzyInterpretation> candidate_models(const Program& program,
                                                  const FuzzyDataset& dataset,
                                                  const FuzzyInterpretation& universal,
                                                  uint64_t seed, int count);

// All ground atoms over the instance's constants (the goal space for
// classical-agreement checks).
std::vector<Atom> active_domain_goals(const Program& program, const FuzzyDataset& dataset);

// ---- selftest -----------------------------------------------------------

struct SelftestConfig {
    uint64_t seed = 20260808;
    int tdatalog_instances = 120;
    int existential_instances = 60;
    int stratified_instances = 30;
    size_t law_samples = 20000;
    bool negative_control = false;
};

struct SelftestReport {
    bool passed = false;
    int checks = 0;
    int failures = 0;
    std::string text;
    // Program/dataset text of each failing instance, for writing out as
    // .tdl/.tdf reproducer pairs.
    std::vector<std::pair<std::string, std::string>> reproducers;
};

// Randomized differential suite over generated instances plus the t-norm law
// audit; with negative_control a deliberately non-monotone connective is
// injected and the run must flag it (the report then counts that failure).
SelftestReport run_selftest(const SelftestConfig& config);

// Stratification equivalence on one instance: evaluates every admissible
// stratification order (up to a small bound) and demands pointwise-identical
// results plus the per-stratum fixpoint property.
DifferentialReport stratified_equivalence_check(const Program& program,
                                                const FuzzyDataset& dataset);

}  // namespace tdlog

#endif
