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
#ifndef TDLOG_DEGREES_HPP
#define TDLOG_DEGREES_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "term.hpp"

namespace tdlog {

// A truth degree in [0,1], stored as a binary64 float. Construction rejects
// out-of-range values; comparisons are exact float comparisons.
class TruthDegree {
public:
    TruthDegree() = default;
    explicit TruthDegree(double v) : v_(v) {
        if (!(v >= 0.0 && v <= 1.0))
            throw ConfigError("truth degree out of [0,1]: " + std::to_string(v));
    }

    // Clamps instead of rejecting; for connective outputs that may stray a
    // rounding error outside the interval.
    static TruthDegree clamped(double v) {
        TruthDegree d;
        d.v_ = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        return d;
    }

    double value() const { return v_; }
    bool operator==(const TruthDegree&) const = default;
    auto operator<=>(const TruthDegree&) const = default;

private:
    double v_ = 0.0;
};

inline TruthDegree deg(double v) { return TruthDegree(v); }

// Exact max{0, a+b-1} for a,b in [0,1]. The error-free transform keeps the
// result correctly rounded, which for operands on the [0,1] grid means exact:
// a+b-1 is always representable when it is the result (it is bounded by
// min(a,b) and lies on the coarser operand grid).
double bounded_sum_minus_one(double a, double b);

enum class TNormKind : uint8_t { Minimum, Lukasiewicz, Product, SchweizerSklar, Custom };

// A t-norm: commutative, associative, monotone, identity 1. Builtins are the
// minimum, Lukasiewicz, product, and Schweizer-Sklar (p < 0) families; custom
// connectives carry a user function and are trusted to satisfy the laws
// (check_tnorm_laws can audit them).
class TNorm {
public:
    static TNorm minimum();
    static TNorm lukasiewicz();
    static TNorm product();
    static TNorm schweizer_sklar(double p);  // requires p < 0
    static TNorm custom(std::string name, std::function<double(double, double)> fn);

    TruthDegree apply(TruthDegree a, TruthDegree b) const;
    // Left-to-right fold; a singleton folds to itself. Empty input is a
    // contract violation.
    TruthDegree fold(std::span<const TruthDegree> degrees) const;

    // Left-to-right fold with a possibly different connective at each
    // position: connectives[i] joins the accumulator with degrees[i+1].
    // Rule files keep one connective per rule; this entry point exists for
    // programmatic mixed-connective bodies under a fixed evaluation order.
    static TruthDegree fold_mixed(std::span<const TruthDegree> degrees,
                                  std::span<const TNorm> connectives);

    TNormKind kind() const { return kind_; }
    double parameter() const { return param_; }
    const std::string& name() const { return name_; }
    bool operator==(const TNorm& other) const;

private:
    TNorm(TNormKind k, double p, std::string name) : kind_(k), param_(p), name_(std::move(name)) {}

    TNormKind kind_ = TNormKind::Minimum;
    double param_ = 0.0;
    std::string name_ = "min";
    std::shared_ptr<std::function<double(double, double)>> fn_;
};

enum class UnaryOpKind : uint8_t { Negation, StrictNegation, Threshold, Custom };

// A unary operator [0,1] -> [0,1]: involutive negation 1-a, strict negation
// (1 iff a = 0), and the threshold family (1 iff a >= T). Custom operators
// are clamped to [0,1].
class UnaryOp {
public:
    static UnaryOp negation();
    static UnaryOp strict_negation();
    static UnaryOp threshold(double t);  // requires t in [0,1]
    static UnaryOp custom(std::string name, std::function<double(double)> fn);

    TruthDegree apply(TruthDegree a) const;

    UnaryOpKind kind() const { return kind_; }
    double parameter() const { return param_; }
    const std::string& name() const { return name_; }
    bool operator==(const UnaryOp& other) const;

private:
    UnaryOp(UnaryOpKind k, double p, std::string name) : kind_(k), param_(p), name_(std::move(name)) {}

    UnaryOpKind kind_ = UnaryOpKind::Negation;
    double param_ = 0.0;
    std::string name_ = "!";
    std::shared_ptr<std::function<double(double)>> fn_;
};

// Named-connective registry consulted by the parser. The default instance
// carries min/luk/prod/ss and !/~/delta; user code may register additional
// connectives under fresh names.
class ConnectiveRegistry {
public:
    ConnectiveRegistry();  // builtins pre-registered

    static const ConnectiveRegistry& standard();

    // Factory takes the optional numeric parameter from the surface syntax
    // (`&ss(-1)`), or nullopt when none was written.
    using TNormFactory = std::function<TNorm(std::optional<double>)>;
    using UnaryFactory = std::function<UnaryOp(std::optional<double>)>;

    void register_tnorm(const std::string& name, TNormFactory factory);
    void register_unary(const std::string& name, UnaryFactory factory);

    bool has_tnorm(const std::string& name) const { return tnorms_.count(name) > 0; }
    bool has_unary(const std::string& name) const { return unaries_.count(name) > 0; }
    TNorm make_tnorm(const std::string& name, std::optional<double> param) const;
    UnaryOp make_unary(const std::string& name, std::optional<double> param) const;

private:
    std::map<std::string, TNormFactory> tnorms_;
    std::map<std::string, UnaryFactory> unaries_;
};

// Property audit of a t-norm: commutativity, associativity, monotonicity in
// each argument, identity 1, and the <= min bound, over a deterministic
// boundary grid plus seeded random samples.
struct TNormLawReport {
    bool commutative = true;
    bool associative = true;
    bool monotone = true;
    bool identity = true;
    bool below_min = true;
    std::string counterexample;  // first violation of each broken law, one per line

    bool passed() const { return commutative && associative && monotone && identity && below_min; }
};

TNormLawReport check_tnorm_laws(const TNorm& t, size_t random_samples, uint64_t seed,
                                double tolerance);

// Exact for min/luk (their arithmetic is error-free here), 1e-12 otherwise.
double default_law_tolerance(const TNorm& t);

// Shortest decimal text that parses back to the same double.
std::string shortest_double_text(double v);

}  // namespace tdlog

#endif
