// End-to-end tests of the tdlog binary: spawn it, capture stdout, check exit
// codes. TDLOG_CLI_PATH and TDLOG_DATA_DIR come from the build.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunOutput {
    int exit_code = -1;
    std::string out;
};

RunOutput run_cli(const std::string& args) {
    std::string cmd = std::string(TDLOG_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    RunOutput result;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) result.out.append(buf, n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string data(const std::string& name) { return std::string(TDLOG_DATA_DIR) + "/" + name; }

}  // namespace

TEST_CASE("run reproduces the bundled example") {
    RunOutput r = run_cli("run " + data("fig1.tdl") + " --data " + data("fig1.tdf"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("0.900000 :: Class(img2,fish).") != std::string::npos);
    CHECK(r.out.find("0.800000 :: Class(img1,fish).") != std::string::npos);
    CHECK(r.out.find("0.720000 :: CommonClass(img1,img2,fish).") != std::string::npos);
    CHECK(r.out.find("0.016000 :: CommonClass(img1,img2,tiger_shark).") != std::string::npos);

    // byte-identical on a second run
    RunOutput again = run_cli("run " + data("fig1.tdl") + " --data " + data("fig1.tdf"));
    CHECK(again.out == r.out);

    // structured output carries exact degrees
    RunOutput json = run_cli("run " + data("fig1.tdl") + " --data " + data("fig1.tdf") +
                             " --format structured");
    CHECK(json.exit_code == 0);
    CHECK(json.out.find("\"atom\": \"CommonClass(img1,img2,fish)\"") != std::string::npos);
}

TEST_CASE("run output matches the golden dump byte for byte") {
    RunOutput r = run_cli("run " + data("fig1.tdl") + " --data " + data("fig1.tdf"));
    REQUIRE(r.exit_code == 0);
    std::ifstream in(std::string(TDLOG_GOLDEN_DIR) + "/fig1_run.txt", std::ios::binary);
    REQUIRE(in.good());
    std::stringstream golden;
    golden << in.rdbuf();
    CHECK(r.out == golden.str());
}

TEST_CASE("run writes a trace file") {
    std::string trace_path = "cli_test_trace.txt";
    RunOutput r = run_cli("run " + data("fig1.tdl") + " --data " + data("fig1.tdf") +
                          " --trace " + trace_path);
    CHECK(r.exit_code == 0);
    std::ifstream in(trace_path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("step=1") != std::string::npos);
    CHECK(ss.str().find("strategy=r-greedy") != std::string::npos);
    std::remove(trace_path.c_str());
}

TEST_CASE("entail answers with degree and exit code") {
    std::string base = data("fig1.tdl") + " --data " + data("fig1.tdf");
    RunOutput yes = run_cli("entail " + base + " --goal 'CommonClass(img1,img2,fish)' --c 0.72");
    CHECK(yes.exit_code == 0);
    CHECK(yes.out == "yes 0.720000\n");

    RunOutput no =
        run_cli("entail " + base + " --goal 'CommonClass(img1,img2,tiger_shark)' --c 0.02");
    CHECK(no.exit_code == 3);
    CHECK(no.out == "no 0.016000\n");

    RunOutput trivial = run_cli("entail " + base + " --goal 'Class(img1,pufferfish)' --c 0");
    CHECK(trivial.exit_code == 0);
    CHECK(trivial.out == "yes 0.000000\n");

    RunOutput structured = run_cli("entail " + base +
                                   " --goal 'CommonClass(img1,img2,fish)' --c 0.72 "
                                   "--format structured");
    CHECK(structured.exit_code == 0);
    CHECK(structured.out.find("\"answer\": \"yes\"") != std::string::npos);
    CHECK(structured.out.find("\"degree\": 0.72") != std::string::npos);
}

TEST_CASE("check classifies programs") {
    RunOutput r = run_cli("check " + data("fig1.tdl"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("fragment: t-Datalog") != std::string::npos);
    CHECK(r.out.find("weakly acyclic") != std::string::npos);
    CHECK(r.out.find("stratifiable (1 stratum)") != std::string::npos);

    RunOutput g = run_cli("check " + data("nonterminating.tdl"));
    CHECK(g.exit_code == 0);
    CHECK(g.out.find("not weakly acyclic") != std::string::npos);
}

TEST_CASE("invalid inputs exit with code 1") {
    std::string bad = "cli_test_bad.tdl";
    {
        std::ofstream out(bad);
        out << "P(x -> Q(x).\n";
    }
    RunOutput r = run_cli("check " + bad);
    CHECK(r.exit_code == 1);
    std::remove(bad.c_str());

    RunOutput missing = run_cli("run no_such_file.tdl --data also_missing.tdf");
    CHECK(missing.exit_code == 1);
}

TEST_CASE("step limits exit with code 2") {
    RunOutput r = run_cli("run " + data("nonterminating.tdl") + " --data " +
                          data("nonterminating.tdf") + " --max-steps 100");
    CHECK(r.exit_code == 2);

    // without an explicit limit the program is rejected as not weakly acyclic
    RunOutput refused =
        run_cli("run " + data("nonterminating.tdl") + " --data " + data("nonterminating.tdf"));
    CHECK(refused.exit_code == 1);

    RunOutput undecided = run_cli("entail " + data("nonterminating.tdl") + " --data " +
                                  data("nonterminating.tdf") + " --goal 'R(b,a)' --c 0.5 " +
                                  "--max-steps 100");
    CHECK(undecided.exit_code == 2);
}

TEST_CASE("strategies and K are selectable") {
    std::string base = data("fig1.tdl") + " --data " + data("fig1.tdf");
    for (const char* strategy : {"so-greedy", "so-fifo", "r-greedy", "r-fifo"}) {
        RunOutput r = run_cli("run " + base + " --strategy " + strategy);
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("0.720000 :: CommonClass(img1,img2,fish).") != std::string::npos);
    }
    RunOutput k = run_cli("run " + base + " --K 0.9");
    CHECK(k.exit_code == 0);
    // each application shifts down by 0.1: 0.8 -> 0.7 (label rule), then
    // 0.7 (x)luk 1 - 0.1 = 0.6 (propagation rule)
    CHECK(k.out.find("0.700000 :: Class(img1,tiger_shark).") != std::string::npos);
    CHECK(k.out.find("0.600000 :: Class(img1,fish).") != std::string::npos);
}

TEST_CASE("multiple data files are unioned, duplicates rejected") {
    std::string a = "cli_test_a.tdf", b = "cli_test_b.tdf", dup = "cli_test_dup.tdf";
    {
        std::ofstream out(a);
        out << "0.8 :: NeuralLabel(img9, carp).\n";
    }
    {
        std::ofstream out(b);
        out << "Hypernym(carp, fish).\n";
    }
    {
        std::ofstream out(dup);
        out << "0.5 :: NeuralLabel(img9, carp).\n";
    }
    RunOutput merged = run_cli("run " + data("fig1.tdl") + " --data " + a + " --data " + b);
    CHECK(merged.exit_code == 0);
    CHECK(merged.out.find("0.800000 :: Class(img9,fish).") != std::string::npos);

    RunOutput conflict = run_cli("run " + data("fig1.tdl") + " --data " + a + " --data " + dup);
    CHECK(conflict.exit_code == 1);

    std::remove(a.c_str());
    std::remove(b.c_str());
    std::remove(dup.c_str());
}

TEST_CASE("selftest tiny suite passes and the negative control fails") {
    RunOutput ok = run_cli("selftest --caps tiny --seed 11");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("PASS") != std::string::npos);

    RunOutput control = run_cli("selftest --caps tiny --seed 11 --negative-control");
    CHECK(control.exit_code != 0);
    CHECK(control.out.find("negative-control") != std::string::npos);

    // the failing instance is written out as a .tdl/.tdf reproducer pair
    std::ifstream prog("tdlog-repro-1.tdl"), data("tdlog-repro-1.tdf");
    CHECK(prog.good());
    CHECK(data.good());
    std::stringstream ss;
    ss << prog.rdbuf();
    CHECK(ss.str().find("&broken") != std::string::npos);
    std::remove("tdlog-repro-1.tdl");
    std::remove("tdlog-repro-1.tdf");
}
