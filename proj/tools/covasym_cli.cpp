#include "covasym/parallel.hpp"
#include "covasym/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Covariant interconversion toolkit"};
    app.require_subcommand(1);

    std::string scenario_path;
    covasym::RunOptions opts;
    int threads = 0;
    uint64_t seed = 0;
    std::string out, format;

    const std::vector<std::pair<std::string, std::string>> cmds = {
        {"hmin", "Phi and conditional min-entropy of a reference/state pair"},
        {"feasible", "Covariant interconversion test (Choi SDP or reference surface)"},
        {"smoothed", "Epsilon-net classification of an interconversion"},
        {"depol-threshold", "Minimal depolarization from the closed sufficient conditions"},
        {"modes", "Modes of asymmetry of the input state"},
        {"region-scan", "Bloch-plane grid scans (T_eta, accessible region, Phi map)"},
        {"net", "Epsilon net of reference states"},
    };
    for (const auto& [name, help] : cmds) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output path (default: scenario output.path, else stdout)");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--threads", threads, "Worker threads (default: COVASYM_THREADS or logical processors)")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "Seed for random samplers and net shuffles");
        sub->add_flag("--fail-on-infeasible", opts.fail_on_infeasible, "Exit with status 2 on an Infeasible verdict");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    const std::string task = app.get_subcommands().front()->get_name();
    const CLI::App* sub = app.get_subcommands().front();
    try {
        const covasym::Scenario sc = covasym::load_scenario(scenario_path);
        if (sc.task != task) throw covasym::ScenarioError("task: scenario declares \"" + sc.task + "\" but the subcommand is \"" + task + "\"");
        opts.threads = sub->count("--threads") ? threads : covasym::default_thread_count();
        if (sub->count("--seed")) opts.seed = seed;
        if (!out.empty()) opts.out = out;
        if (!format.empty()) opts.format = format;
        return covasym::run(sc, opts);
    } catch (const std::exception& e) {
        std::cerr << "covasym: " << scenario_path << ": " << e.what() << "\n";
        return 1;
    }
}
