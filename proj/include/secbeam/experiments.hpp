#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "secbeam/channel.hpp"
#include "secbeam/metrics.hpp"
#include "secbeam/scenario.hpp"

namespace secbeam {

enum class Algorithm { TwoStage, TwoStageSum, Minimax, Mrt, NoAnRs, UpperBound };

Algorithm parse_algorithm(const std::string& name);  // InputError on unknown names
const char* algorithm_name(Algorithm a);

struct ExperimentPlan {
    std::string command;
    std::string scenario_path;
    std::vector<Algorithm> algorithms{Algorithm::TwoStage};
    std::string sweep_var;             // n_antennas | power_dbm | sinr_db
    std::vector<double> values;
    int trials = 200;
    int draws = 100000;                // Eve draws for the outage-guarantee check
    std::uint64_t seed = 1;
    std::string out_dir = ".";
};

std::vector<std::string> validate_plan(const ExperimentPlan& plan);

// SECBEAM_THREADS if set and positive, else the hardware concurrency.
int thread_count();
// Runs fn(0..n-1) on up to thread_count() workers. The first exception is rethrown.
void parallel_for(int n, const std::function<void(int)>& fn);

// Fixed per-seed Eve draws shared by every algorithm (common random numbers).
std::vector<std::vector<CVec>> eve_draws(std::uint64_t seed, int trials, int q, int n);

struct SolveOutcome {
    Algorithm algorithm = Algorithm::TwoStage;
    BeamformingSolution sol;
    std::vector<ConvergenceRecord> records;
    double gamma_e = 0.0;
    double fssr = 0.0;
    double bound = 0.0;    // upper_bound only
};

// Minimax runs at the Gamma_e reached by the two-stage algorithm. Beams are
// rank-one restored when a feasible candidate exists.
SolveOutcome solve_scenario(const Scenario& sc, Algorithm alg, std::uint64_t seed,
                            const std::vector<std::vector<CVec>>& eves = {});

// Applies a sweep value to a copy of the scenario.
Scenario apply_sweep(const Scenario& sc, const std::string& var, double value);

struct SweepPoint {
    std::string var;
    double value = 0.0;
    Algorithm algorithm = Algorithm::TwoStage;
    SsrStats ssr;
    int n_fail = 0;
    std::string error;
};

std::vector<SweepPoint> run_sweep(const Scenario& sc, const std::string& var, const std::vector<double>& values,
                                  const std::vector<Algorithm>& algorithms, int trials, std::uint64_t seed);
void write_sweep_csv(const std::vector<SweepPoint>& pts, const std::string& path);

struct BeampatternRow {
    double theta_deg = 0.0;
    double common_db = 0.0;
    std::vector<double> private_db;
};
// theta from -90 to 90 in 0.5 degree steps at the given range; SINRs clamped at -100 dB.
std::vector<BeampatternRow> beampattern(const BeamformingSolution& sol, const SystemConfig& cfg, double range_m);
void write_beampattern_csv(const std::vector<BeampatternRow>& rows, const std::string& path);

void write_convergence_csv(const std::vector<SolveOutcome>& runs, const std::string& path);

struct Lemma1Report {
    int draws = 0;
    double kappa = 0.0;
    double gamma_e = 0.0;
    std::vector<double> prob;    // per private stream
    std::vector<double> sigma;   // binomial standard deviation at kappa
    bool ok = false;             // prob >= kappa - 3 sigma for every stream
};
Lemma1Report lemma1_check(const BeamformingSolution& sol, const SystemConfig& cfg, int draws, std::uint64_t seed);

// Commands behind the CLI. Each returns the process exit code.
int cmd_solve(const ExperimentPlan& plan);
int cmd_beampattern(const ExperimentPlan& plan);
int cmd_sweep(const ExperimentPlan& plan);
int cmd_montecarlo_lemma1(const ExperimentPlan& plan);

}  // namespace secbeam
