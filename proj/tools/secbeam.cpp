#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "secbeam/experiments.hpp"

using namespace secbeam;

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"secure rate-splitting beamforming"};
    app.require_subcommand(1);

    ExperimentPlan plan;
    std::string algorithms = "two_stage";
    std::string values;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", plan.scenario_path, "scenario file")->required();
        sub->add_option("--algorithm", algorithms,
                        "two_stage, two_stage_sum, minimax, mrt, noan_rs or upper_bound (comma list for sweep)");
        sub->add_option("--trials", plan.trials, "Eve draws per sweep point");
        sub->add_option("--seed", plan.seed, "random seed");
        sub->add_option("--out", plan.out_dir, "output directory");
    };
    CLI::App* solve = app.add_subcommand("solve", "solve one scenario");
    CLI::App* pattern = app.add_subcommand("beampattern", "received SINR versus angle");
    CLI::App* sweep = app.add_subcommand("sweep", "system SSR over a parameter sweep");
    CLI::App* lemma = app.add_subcommand("lemma1-check", "Monte-Carlo check of the eavesdropping guarantee");
    for (CLI::App* s : {solve, pattern, sweep, lemma}) add_common(s);
    sweep->add_option("--var", plan.sweep_var, "n_antennas, power_dbm or sinr_db")->required();
    sweep->add_option("--values", values, "comma-separated sweep values")->required();
    lemma->add_option("--draws", plan.draws, "Eve channel draws");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        plan.algorithms.clear();
        for (const auto& a : split_list(algorithms)) plan.algorithms.push_back(parse_algorithm(a));
        for (const auto& v : split_list(values)) plan.values.push_back(std::stod(v));
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    }

    if (solve->parsed()) return plan.command = "solve", cmd_solve(plan);
    if (pattern->parsed()) return plan.command = "beampattern", cmd_beampattern(plan);
    if (sweep->parsed()) return plan.command = "sweep", cmd_sweep(plan);
    plan.command = "lemma1-check";
    return cmd_montecarlo_lemma1(plan);
}
