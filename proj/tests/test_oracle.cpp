#include <doctest.h>

#include "oracle.hpp"
#include "reason.hpp"
#include "support.hpp"

using namespace tdlog;
using tdlog::testing::parse_instance;

TEST_CASE("naive fixpoint agrees with the chase on the worked example") {
    auto fig = tdlog::testing::fig1();
    FuzzyInterpretation naive = naive_fixpoint(fig.program, fig.dataset, TruthDegree(1.0));
    ChaseResult chased = run_chase(fig.program, fig.dataset, StrategyConfig{});
    CHECK(naive == chased.interpretation);

    ParseResult<Atom> goal = parse_ground_atom("CommonClass(img1,img2,fish)", fig.universe);
    CHECK(naive.degree(*goal.value).value() == doctest::Approx(0.720).epsilon(1e-12));
    CHECK(check_k_model(naive, fig.program, TruthDegree(1.0)));
}

TEST_CASE("naive fixpoint boundary behavior") {
    auto empty = parse_instance("", "0.4 :: P(a).\n");
    FuzzyInterpretation naive = naive_fixpoint(empty.program, empty.dataset, TruthDegree(1.0));
    CHECK(naive == minimal_interpretation(empty.dataset));

    auto exist = parse_instance("P(x) -> exists z . Q(x,z).", "0.5 :: P(a).\n");
    CHECK_THROWS_AS(naive_fixpoint(exist.program, exist.dataset, TruthDegree(1.0)), ConfigError);
}

TEST_CASE("classical chase") {
    auto fig = tdlog::testing::fig1();
    FuzzyDataset crisp = fig.dataset.crispified();
    ClassicalChaseResult res = classical_chase(fig.program, crisp, 100000);
    REQUIRE(res.completed);

    ParseResult<Atom> target = parse_ground_atom("CommonClass(img1,img2,fish)", fig.universe);
    CHECK(res.atoms.count(*target.value) == 1);
    ParseResult<Atom> absent = parse_ground_atom("CommonClass(img1,img2,impala)", fig.universe);
    CHECK(res.atoms.count(*absent.value) == 0);

    // non-terminating input stops at the cap
    auto guarded = parse_instance("R(x,y) -> exists z . R(y,z).", "R(a,b).");
    ClassicalChaseResult capped = classical_chase(guarded.program, guarded.dataset, 50);
    CHECK_FALSE(capped.completed);

    // empty program returns the input atoms
    auto flat = parse_instance("", "P(a).\nQ(b).\n");
    ClassicalChaseResult base = classical_chase(flat.program, flat.dataset, 100);
    CHECK(base.completed);
    CHECK(base.atoms.size() == 2);
}

TEST_CASE("non-decreasing homomorphism search") {
    SUBCASE("identity works for null-free dominated interpretations") {
        auto inst = parse_instance("", "0.4 :: P(a).\n0.6 :: Q(a,b).\n");
        FuzzyInterpretation lo = minimal_interpretation(inst.dataset);
        FuzzyInterpretation hi = lo;
        Atom p{inst.universe->find_predicate("P"), {inst.universe->constant("a")}};
        hi.set(p, TruthDegree(0.9));
        NullMapping witness;
        CHECK(find_ndf_homomorphism(lo, hi, 1000, &witness) == SearchStatus::Found);
        CHECK(witness.entries.empty());
        CHECK(find_ndf_homomorphism(hi, lo, 1000, nullptr) == SearchStatus::NotFound);
    }

    SUBCASE("nulls collapse onto a dominating witness") {
        auto inst = parse_instance(
            "NeuralLabel(x,y) &luk NeuralLabel(u,w) -> exists z . CommonClass(x,u,z).",
            "0.8 :: NeuralLabel(img1, tiger_shark).\n0.9 :: NeuralLabel(img2, tench).\n");
        ChaseResult chased = run_chase(inst.program, inst.dataset, StrategyConfig{});
        REQUIRE(chased.status == ChaseStatus::Completed);

        // a model that sends all four nulls to the constant fish at 0.8
        Universe& u = *inst.universe;
        FuzzyInterpretation model(inst.universe);
        for (const auto& [atom, degree] : inst.dataset.facts()) model.set(atom, degree);
        PredicateId cc = u.find_predicate("CommonClass");
        for (const char* a : {"img1", "img2"})
            for (const char* b : {"img1", "img2"})
                model.set(Atom{cc, {u.constant(a), u.constant(b), u.constant("fish")}},
                          TruthDegree(0.8));
        REQUIRE(check_k_model(model, inst.program, TruthDegree(1.0)));

        NullMapping witness;
        CHECK(find_ndf_homomorphism(chased.interpretation, model, 100000, &witness) ==
              SearchStatus::Found);
        CHECK(witness.entries.size() == 4);
        for (const auto& [null_term, image] : witness.entries)
            CHECK(u.term_text(image) == "fish");
    }

    SUBCASE("degree excess admits no homomorphism") {
        auto inst = parse_instance("", "0.9 :: P(a).\n");
        FuzzyInterpretation hi = minimal_interpretation(inst.dataset);
        FuzzyInterpretation lo(inst.universe);
        Atom p{inst.universe->find_predicate("P"), {inst.universe->constant("a")}};
        lo.set(p, TruthDegree(0.5));
        CHECK(find_ndf_homomorphism(hi, lo, 1000, nullptr) == SearchStatus::NotFound);
    }
}

TEST_CASE("differential harness passes on the worked example") {
    auto fig = tdlog::testing::fig1();
    DifferentialConfig cfg;
    cfg.check_universality = true;
    DifferentialReport rep = differential_check(fig.program, fig.dataset, cfg);
    INFO(rep.text());
    CHECK(rep.all_passed());
}

TEST_CASE("differential harness flags a broken connective") {
    ConnectiveRegistry registry;
    registry.register_tnorm("broken", [](std::optional<double>) {
        return TNorm::custom("broken", [](double a, double b) {
            if (a >= 0.4 && a <= 0.6 && b >= 0.4 && b <= 0.6) return 0.1;
            return a * b;
        });
    });
    auto universe = std::make_shared<Universe>();
    ParseResult<Program> prog = parse_program("P(x) &broken Q(x) -> R(x).", universe, registry);
    REQUIRE(prog.ok());

    // a repeated custom connective is one connective, not a mix
    ParseResult<Program> twice =
        parse_program("P(x) &broken Q(x) &broken P(x) -> S(x).", universe, registry);
    CHECK(twice.ok());
    ParseResult<FuzzyDataset> data = parse_dataset("0.5 :: P(c1).\n0.5 :: Q(c1).\n", universe);
    REQUIRE(data.ok());

    DifferentialConfig cfg;
    DifferentialReport rep = differential_check(*prog.value, *data.value, cfg);
    bool law_failed = false;
    for (const DifferentialEntry& e : rep.entries)
        if (e.check == "tnorm-laws" && e.verdict == DifferentialEntry::Verdict::Fail) {
            law_failed = true;
            CHECK(e.detail.find("monotonicity") != std::string::npos);
        }
    CHECK(law_failed);
    CHECK_FALSE(rep.all_passed());
    CHECK(rep.text().find("reproducer") != std::string::npos);
}

TEST_CASE("random instances pass the differential suite (small batch)") {
    SUBCASE("plain instances") {
        GenOptions opt;
        for (int i = 0; i < 20; ++i) {
            Instance inst = random_instance(100 + i, opt);
            DifferentialConfig cfg;
            cfg.seed = i;
            cfg.law_samples = 50;
            cfg.check_universality = (i % 5 == 0);
            DifferentialReport rep = differential_check(*inst.program, *inst.dataset, cfg);
            INFO(rep.text());
            CHECK(rep.all_passed());
        }
    }
    SUBCASE("existential instances") {
        GenOptions opt;
        opt.existentials = true;
        for (int i = 0; i < 15; ++i) {
            Instance inst = random_instance(200 + i, opt);
            CHECK(check_weak_acyclicity(*inst.program).weakly_acyclic);
            DifferentialConfig cfg;
            cfg.seed = i;
            cfg.law_samples = 50;
            DifferentialReport rep = differential_check(*inst.program, *inst.dataset, cfg);
            INFO(rep.text());
            CHECK(rep.all_passed());
        }
    }
    SUBCASE("all-ones instances") {
        GenOptions opt;
        opt.existentials = true;
        opt.all_one_degrees = true;
        for (int i = 0; i < 10; ++i) {
            Instance inst = random_instance(300 + i, opt);
            DifferentialConfig cfg;
            cfg.seed = i;
            cfg.law_samples = 50;
            DifferentialReport rep = differential_check(*inst.program, *inst.dataset, cfg);
            INFO(rep.text());
            CHECK(rep.all_passed());
        }
    }
    SUBCASE("stratified instances") {
        GenOptions opt;
        opt.unary_ops = true;
        opt.want_multiple_strata_orders = true;
        for (int i = 0; i < 10; ++i) {
            Instance inst = random_instance(400 + i, opt);
            DifferentialReport rep = stratified_equivalence_check(*inst.program, *inst.dataset);
            INFO(rep.text());
            CHECK(rep.all_passed());
        }
    }
}

TEST_CASE("selftest aggregates and reports") {
    SelftestConfig cfg;
    cfg.seed = 7;
    cfg.tdatalog_instances = 6;
    cfg.existential_instances = 4;
    cfg.stratified_instances = 2;
    cfg.law_samples = 500;
    SelftestReport rep = run_selftest(cfg);
    INFO(rep.text);
    CHECK(rep.passed);
    CHECK(rep.failures == 0);
    CHECK(rep.checks > 10);

    cfg.negative_control = true;
    SelftestReport control = run_selftest(cfg);
    CHECK_FALSE(control.passed);
    CHECK(control.text.find("negative-control") != std::string::npos);
}
