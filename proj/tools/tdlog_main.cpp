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

// tdlog command line front end. Talks to the engine exclusively through the
// C API in tdlog/tdlog.h.

#include <CLI11.hpp>
#include <tdlog/tdlog.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

// Exit codes: 0 success/yes, 1 invalid input or configuration, 2 step limit
// or undecided, 3 entailment answer "no".
constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitNo = 3;

struct CtxDeleter {
    void operator()(tdlog_ctx* c) const { tdlog_ctx_free(c); }
};
struct ProgramDeleter {
    void operator()(tdlog_program* p) const { tdlog_program_free(p); }
};
struct DatasetDeleter {
    void operator()(tdlog_dataset* d) const { tdlog_dataset_free(d); }
};
struct ResultDeleter {
    void operator()(tdlog_result* r) const { tdlog_result_free(r); }
};
struct ReportDeleter {
    void operator()(tdlog_report* r) const { tdlog_report_free(r); }
};

using CtxPtr = std::unique_ptr<tdlog_ctx, CtxDeleter>;
using ProgramPtr = std::unique_ptr<tdlog_program, ProgramDeleter>;
using DatasetPtr = std::unique_ptr<tdlog_dataset, DatasetDeleter>;
using ResultPtr = std::unique_ptr<tdlog_result, ResultDeleter>;
using ReportPtr = std::unique_ptr<tdlog_report, ReportDeleter>;

bool read_file(const std::string& path, std::string* out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
    return true;
}

std::string shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

ProgramPtr load_program(tdlog_ctx* ctx, const std::string& path, int* exit_code) {
    std::string text;
    if (!read_file(path, &text)) {
        std::cerr << "error: cannot read program file '" << path << "'\n";
        *exit_code = kExitInputError;
        return nullptr;
    }
    tdlog_program* program = nullptr;
    if (tdlog_program_parse(ctx, text.c_str(), &program) != TDLOG_OK) {
        std::cerr << path << ": " << tdlog_last_error(ctx);
        *exit_code = kExitInputError;
        return nullptr;
    }
    return ProgramPtr(program);
}

DatasetPtr load_datasets(tdlog_ctx* ctx, const std::vector<std::string>& paths, int* exit_code) {
    DatasetPtr merged;
    for (const std::string& path : paths) {
        std::string text;
        if (!read_file(path, &text)) {
            std::cerr << "error: cannot read data file '" << path << "'\n";
            *exit_code = kExitInputError;
            return nullptr;
        }
        tdlog_dataset* dataset = nullptr;
        if (tdlog_dataset_parse(ctx, text.c_str(), &dataset) != TDLOG_OK) {
            std::cerr << path << ": " << tdlog_last_error(ctx);
            *exit_code = kExitInputError;
            return nullptr;
        }
        DatasetPtr parsed(dataset);
        if (!merged) {
            merged = std::move(parsed);
        } else if (tdlog_dataset_union(ctx, merged.get(), parsed.get()) != TDLOG_OK) {
            std::cerr << path << ": " << tdlog_last_error(ctx) << "\n";
            *exit_code = kExitInputError;
            return nullptr;
        }
    }
    return merged;
}

struct StrategyOption {
    std::string name = "r-greedy";

    bool apply(tdlog_chase_config* config) const {
        if (name == "so-greedy") {
            config->activity = TDLOG_ACTIVITY_SEMI_OBLIVIOUS;
            config->order = TDLOG_ORDER_GREEDY;
        } else if (name == "so-fifo") {
            config->activity = TDLOG_ACTIVITY_SEMI_OBLIVIOUS;
            config->order = TDLOG_ORDER_FIFO;
        } else if (name == "r-greedy") {
            config->activity = TDLOG_ACTIVITY_RESTRICTED;
            config->order = TDLOG_ORDER_GREEDY;
        } else if (name == "r-fifo") {
            config->activity = TDLOG_ACTIVITY_RESTRICTED;
            config->order = TDLOG_ORDER_FIFO;
        } else {
            return false;
        }
        return true;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tdlog - a reasoning engine for Datalog with existential rules over fuzzy "
                 "data, with t-norm connectives"};
    app.require_subcommand(1);

    std::string program_path;
    std::vector<std::string> data_paths;
    StrategyOption strategy;
    double k = 1.0;
    double threshold = 1.0;
    std::string goal;
    std::string trace_path;
    std::string format = "table";
    int64_t max_steps = 0;
    bool unbounded = false;
    uint64_t seed = 20260808;
    std::string caps = "default";
    bool negative_control = false;

    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "Output format")
            ->check(CLI::IsMember({"table", "structured"}));
    };

    CLI::App* check = app.add_subcommand("check", "Parse and classify a program");
    check->add_option("program", program_path, "Program file (.tdl)")->required();
    add_format(check);

    CLI::App* run = app.add_subcommand("run", "Run a chase and print the result");
    run->add_option("program", program_path, "Program file (.tdl)")->required();
    run->add_option("--data", data_paths, "Dataset file (.tdf); repeatable")->required();
    run->add_option("--strategy", strategy.name,
                    "Chase strategy: so-greedy|so-fifo|r-greedy|r-fifo");
    run->add_option("--K", k, "Satisfaction parameter K in [0,1]");
    run->add_option("--max-steps", max_steps, "Explicit step limit");
    run->add_flag("--unbounded", unbounded, "Run without a step limit");
    run->add_option("--trace", trace_path, "Write the chase trace to this file");
    add_format(run);

    CLI::App* entail = app.add_subcommand("entail", "Decide entailment of a ground goal");
    entail->add_option("program", program_path, "Program file (.tdl)")->required();
    entail->add_option("--data", data_paths, "Dataset file (.tdf); repeatable")->required();
    entail->add_option("--goal", goal, "Ground goal atom, e.g. 'Class(img1,fish)'")->required();
    entail->add_option("--c", threshold, "Entailment threshold c in [0,1]");
    entail->add_option("--K", k, "Satisfaction parameter K in [0,1]");
    entail->add_option("--strategy", strategy.name,
                       "Chase strategy: so-greedy|so-fifo|r-greedy|r-fifo");
    entail->add_option("--max-steps", max_steps, "Explicit step limit");
    entail->add_flag("--unbounded", unbounded, "Run without a step limit");
    add_format(entail);

    CLI::App* selftest = app.add_subcommand("selftest", "Run the randomized differential suite");
    selftest->add_option("--seed", seed, "Random seed");
    selftest->add_option("--caps", caps, "Suite size: tiny|default|full")
        ->check(CLI::IsMember({"tiny", "default", "full"}));
    selftest->add_flag("--negative-control", negative_control,
                       "Inject a broken connective; the suite must flag it and fail");

    CLI11_PARSE(app, argc, argv);

    CtxPtr ctx(tdlog_ctx_new());
    if (!ctx) {
        std::cerr << "error: cannot initialize engine\n";
        return kExitInputError;
    }

    int exit_code = kExitOk;
    bool structured = format == "structured";

    if (check->parsed()) {
        ProgramPtr program = load_program(ctx.get(), program_path, &exit_code);
        if (!program) return exit_code;
        tdlog_report* report = nullptr;
        if (tdlog_program_check(ctx.get(), program.get(),
                                structured ? TDLOG_FORMAT_STRUCTURED : TDLOG_FORMAT_TABLE,
                                &report) != TDLOG_OK) {
            std::cerr << "error: " << tdlog_last_error(ctx.get()) << "\n";
            return kExitInputError;
        }
        ReportPtr owned(report);
        std::cout << tdlog_report_text(report);
        return kExitOk;
    }

    if (run->parsed() || entail->parsed()) {
        ProgramPtr program = load_program(ctx.get(), program_path, &exit_code);
        if (!program) return exit_code;
        DatasetPtr dataset = load_datasets(ctx.get(), data_paths, &exit_code);
        if (!dataset) return exit_code;

        tdlog_chase_config config;
        tdlog_chase_config_init(&config);
        if (!strategy.apply(&config)) {
            std::cerr << "error: unknown strategy '" << strategy.name << "'\n";
            return kExitInputError;
        }
        config.k = k;
        if (unbounded)
            config.max_steps = TDLOG_STEPS_UNBOUNDED;
        else if (max_steps > 0)
            config.max_steps = max_steps;
        else if (max_steps < 0) {
            std::cerr << "error: --max-steps must be positive\n";
            return kExitInputError;
        }

        if (run->parsed()) {
            tdlog_result* result = nullptr;
            tdlog_status status;
            if (tdlog_program_uses_unary_ops(program.get())) {
                if (k != 1.0) {
                    std::cerr << "error: programs with unary operators evaluate at K = 1\n";
                    return kExitInputError;
                }
                status = tdlog_eval_stratified(ctx.get(), program.get(), dataset.get(), &result);
            } else {
                status = tdlog_chase_run(ctx.get(), program.get(), dataset.get(), &config,
                                         &result);
            }
            if (status != TDLOG_OK) {
                std::cerr << "error: " << tdlog_last_error(ctx.get()) << "\n";
                return status == TDLOG_ERR_STEP_LIMIT ? kExitUndecided : kExitInputError;
            }
            ResultPtr owned(result);
            if (!trace_path.empty()) {
                std::ofstream out(trace_path, std::ios::binary);
                if (!out) {
                    std::cerr << "error: cannot write trace file '" << trace_path << "'\n";
                    return kExitInputError;
                }
                out << tdlog_result_trace(result);
            }
            std::cout << tdlog_result_interpretation(
                result, structured ? TDLOG_FORMAT_STRUCTURED : TDLOG_FORMAT_TABLE);
            if (!tdlog_result_completed(result)) {
                std::cerr << "chase stopped at the step limit after "
                          << tdlog_result_steps(result) << " steps\n";
                return kExitUndecided;
            }
            return kExitOk;
        }

        int answer = 0;
        double degree = 0.0;
        tdlog_status status = tdlog_entail(ctx.get(), program.get(), dataset.get(), goal.c_str(),
                                           threshold, &config, &answer, &degree);
        if (status == TDLOG_ERR_STEP_LIMIT) {
            std::cerr << "undecided: " << tdlog_last_error(ctx.get()) << "\n";
            return kExitUndecided;
        }
        if (status != TDLOG_OK) {
            std::cerr << "error: " << tdlog_last_error(ctx.get()) << "\n";
            return kExitInputError;
        }
        if (structured) {
            std::cout << "{\"answer\": \"" << (answer ? "yes" : "no")
                      << "\", \"degree\": " << shortest(degree)
                      << ", \"threshold\": " << shortest(threshold) << "}\n";
        } else {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6f", degree);
            std::cout << (answer ? "yes" : "no") << " " << buf << "\n";
        }
        return answer ? kExitOk : kExitNo;
    }

    if (selftest->parsed()) {
        tdlog_selftest_config config;
        tdlog_selftest_config_init(&config);
        config.seed = seed;
        config.negative_control = negative_control ? 1 : 0;
        if (caps == "tiny") {
            config.tdatalog_instances = 30;
            config.existential_instances = 15;
            config.stratified_instances = 8;
            config.law_samples = 5000;
        } else if (caps == "full") {
            config.tdatalog_instances = 1000;
            config.existential_instances = 500;
            config.stratified_instances = 200;
            config.law_samples = 100000;
        }
        tdlog_report* report = nullptr;
        if (tdlog_selftest(ctx.get(), &config, &report) != TDLOG_OK) {
            std::cerr << "error: " << tdlog_last_error(ctx.get()) << "\n";
            return kExitInputError;
        }
        ReportPtr owned(report);
        std::cout << tdlog_report_text(report);
        // failing instances land next to the caller as reproducer pairs
        size_t repro = tdlog_report_reproducer_count(report);
        for (size_t i = 0; i < repro; ++i) {
            std::string base = "tdlog-repro-" + std::to_string(i + 1);
            std::ofstream prog_out(base + ".tdl", std::ios::binary);
            prog_out << tdlog_report_reproducer_program(report, i);
            std::ofstream data_out(base + ".tdf", std::ios::binary);
            data_out << tdlog_report_reproducer_dataset(report, i);
            std::cerr << "reproducer written: " << base << ".tdl / " << base << ".tdf\n";
        }
        return tdlog_report_ok(report) ? kExitOk : kExitInputError;
    }

    return kExitInputError;
}
