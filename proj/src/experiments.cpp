#include "secbeam/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <thread>

#include "secbeam/baselines.hpp"
#include "secbeam/minimax_barrier.hpp"
#include "secbeam/stage1_mm.hpp"
#include "secbeam/stage2_dual.hpp"

namespace secbeam {

namespace {

struct AlgoName {
    Algorithm a;
    const char* name;
};
constexpr AlgoName kAlgoNames[] = {
    {Algorithm::TwoStage, "two_stage"}, {Algorithm::TwoStageSum, "two_stage_sum"},
    {Algorithm::Minimax, "minimax"},    {Algorithm::Mrt, "mrt"},
    {Algorithm::NoAnRs, "noan_rs"},     {Algorithm::UpperBound, "upper_bound"},
};

double quad(const CVec& h, const CMat& W) { return (h.adjoint() * W * h)(0, 0).real(); }

double clamp_db(double x) { return x > 1e-10 ? linear_to_db(x) : -100.0; }

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << std::setprecision(10);
    return out;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

Scenario load_checked(const ExperimentPlan& plan) {
    const auto problems = validate_plan(plan);
    if (!problems.empty()) {
        std::string msg = "invalid plan:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw InputError(msg);
    }
    return load_scenario(plan.scenario_path);
}

template <class F>
int guarded(F&& body) {
    try {
        body();
        return 0;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
    for (const auto& a : kAlgoNames)
        if (name == a.name) return a.a;
    throw InputError("unknown algorithm '" + name + "'");
}

const char* algorithm_name(Algorithm a) {
    for (const auto& x : kAlgoNames)
        if (x.a == a) return x.name;
    return "?";
}

std::vector<std::string> validate_plan(const ExperimentPlan& plan) {
    std::vector<std::string> v;
    if (plan.scenario_path.empty()) v.push_back("--scenario is required");
    if (plan.trials < 1) v.push_back("trials must be >= 1");
    if (plan.draws < 1) v.push_back("draws must be >= 1");
    if (plan.algorithms.empty()) v.push_back("at least one algorithm is required");
    if (plan.command == "sweep") {
        if (plan.values.empty()) v.push_back("sweep values must be non-empty");
        if (plan.sweep_var != "n_antennas" && plan.sweep_var != "power_dbm" && plan.sweep_var != "sinr_db")
            v.push_back("sweep variable must be n_antennas, power_dbm or sinr_db");
    }
    return v;
}

int thread_count() {
    if (const char* s = std::getenv("SECBEAM_THREADS")) {
        const int n = std::atoi(s);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    const int workers = std::min(n, thread_count());
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

std::vector<std::vector<CVec>> eve_draws(std::uint64_t seed, int trials, int q, int n) {
    Rng rng(seed);
    std::vector<std::vector<CVec>> out;
    out.reserve(trials);
    for (int t = 0; t < trials; ++t) out.push_back(sample_eve_channels(rng, q, n));
    return out;
}

SolveOutcome solve_scenario(const Scenario& sc, Algorithm alg, std::uint64_t seed,
                            const std::vector<std::vector<CVec>>& eves) {
    SystemConfig cfg = sc.cfg;
    if (alg == Algorithm::TwoStageSum) cfg.sum_power = true;
    const ChannelSet ch = build_channels(cfg, sc.geom);
    SolveOutcome out;
    out.algorithm = alg;
    Rng rng(seed);
    switch (alg) {
        case Algorithm::TwoStage:
        case Algorithm::TwoStageSum:
        case Algorithm::NoAnRs: {
            if (alg == Algorithm::TwoStageSum) {
                // the per-antenna optimum is feasible here; start the Gamma_e sequence from it
                const Stage2Result per = run_algorithm2(ch, sc.cfg);
                cfg.gamma_e_init = std::min(cfg.gamma_e_init, per.sol.gamma_e);
            }
            const Stage2Result r = alg == Algorithm::NoAnRs ? no_an_rs_solution(ch, cfg) : run_algorithm2(ch, cfg);
            out.sol = r.sol;
            out.records = r.records;
            break;
        }
        case Algorithm::Minimax: {
            const Stage2Result r = run_algorithm2(ch, cfg);
            const MinimaxResult m = run_algorithm3(ch, cfg, r.sol.gamma_e, minimax_options_from(cfg));
            out.sol = m.sol;
            out.records = m.records;
            break;
        }
        case Algorithm::Mrt: {
            const auto draws = eves.empty() ? eve_draws(seed, 200, cfg.n_eves, cfg.n_antennas) : eves;
            out.sol = mrt_solution(ch, cfg, draws).sol;
            out.sol.gamma_e = std::numeric_limits<double>::infinity();
            break;
        }
        case Algorithm::UpperBound: {
            const Stage1Result r = run_algorithm1(ch, cfg, ConvexSubproblem::kNoSecrecy);
            out.sol = r.sol;
            out.bound = sum_common_rate(r.sol, ch, cfg.noise_iod);
            for (std::size_t i = 0; i < r.state.objective_history.size(); ++i)
                out.records.push_back({static_cast<int>(i + 1), r.state.objective_history[i],
                                       r.state.residual_history[i]});
            break;
        }
    }
    if (alg != Algorithm::Mrt && alg != Algorithm::UpperBound) restore_rank_one(out.sol, ch, cfg, rng);
    out.gamma_e = out.sol.gamma_e;
    out.fssr = std::isfinite(out.gamma_e) ? fssr_objective(out.sol, ch, cfg.noise_iod, out.gamma_e)
                                          : sum_common_rate(out.sol, ch, cfg.noise_iod);
    return out;
}

Scenario apply_sweep(const Scenario& sc, const std::string& var, double value) {
    Scenario s = sc;
    SystemConfig& c = s.cfg;
    if (var == "n_antennas") {
        const double total = c.total_power();
        c.n_antennas = static_cast<int>(std::lround(value));
        if (c.n_antennas <= c.n_iods) throw InputError("n_antennas sweep value must exceed the number of IoDs");
        c.per_antenna_power.assign(c.n_antennas, total / c.n_antennas);
    } else if (var == "power_dbm") {
        c.per_antenna_power.assign(c.n_antennas, dbm_to_watts(value) / c.n_antennas);
    } else if (var == "sinr_db") {
        c.sinr_targets.assign(c.n_iods, db_to_linear(value));
    } else {
        throw InputError("unknown sweep variable '" + var + "'");
    }
    return s;
}

std::vector<SweepPoint> run_sweep(const Scenario& sc, const std::string& var, const std::vector<double>& values,
                                  const std::vector<Algorithm>& algorithms, int trials, std::uint64_t seed) {
    const int na = static_cast<int>(algorithms.size());
    std::vector<SweepPoint> pts(values.size() * na);
    parallel_for(static_cast<int>(pts.size()), [&](int i) {
        SweepPoint& p = pts[i];
        p.var = var;
        p.value = values[i / na];
        p.algorithm = algorithms[i % na];
        const Scenario s = apply_sweep(sc, var, p.value);
        const auto eves = eve_draws(seed, trials, s.cfg.n_eves, s.cfg.n_antennas);
        try {
            const SolveOutcome o = solve_scenario(s, p.algorithm, seed, eves);
            SystemConfig cfg = s.cfg;
            if (p.algorithm == Algorithm::TwoStageSum) cfg.sum_power = true;
            const ChannelSet ch = build_channels(cfg, s.geom);
            if (p.algorithm == Algorithm::UpperBound) {
                p.ssr.samples.assign(trials, o.bound);
            } else {
                for (const auto& e : eves) p.ssr.samples.push_back(ssr_single_draw(o.sol, ch, cfg, e));
                if (!private_targets_met(o.sol, ch, cfg)) p.n_fail = trials;
            }
        } catch (const std::exception& e) {
            p.error = e.what();
            p.ssr.samples.assign(trials, 0.0);
            p.n_fail = trials;
        }
        double m = 0.0;
        for (double x : p.ssr.samples) m += x;
        m /= trials;
        double v = 0.0;
        for (double x : p.ssr.samples) v += (x - m) * (x - m);
        p.ssr.mean = m;
        p.ssr.se = trials > 1 ? std::sqrt(v / (trials - 1) / trials) : 0.0;
    });
    return pts;
}

void write_sweep_csv(const std::vector<SweepPoint>& pts, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "sweep_var,value,algorithm,ssr_mean,ssr_se,n_fail\n";
    for (const auto& p : pts)
        out << p.var << ',' << p.value << ',' << algorithm_name(p.algorithm) << ',' << p.ssr.mean << ','
            << p.ssr.se << ',' << p.n_fail << '\n';
}

std::vector<BeampatternRow> beampattern(const BeamformingSolution& sol, const SystemConfig& cfg, double range_m) {
    const CMat an = sol.an_covariance();
    std::vector<BeampatternRow> rows;
    for (int i = 0; i <= 360; ++i) {
        BeampatternRow r;
        r.theta_deg = -90.0 + 0.5 * i;
        const CVec h = steering(r.theta_deg, range_m, cfg);
        const double base = quad(h, an) + cfg.noise_iod;
        double sum_priv = 0.0;
        std::vector<double> p;
        for (const auto& W : sol.Wp) sum_priv += p.emplace_back(std::max(0.0, quad(h, W)));
        r.common_db = clamp_db(std::max(0.0, quad(h, sol.Wc)) / (sum_priv + base));
        for (double pk : p) r.private_db.push_back(clamp_db(pk / (sum_priv - pk + base)));
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_beampattern_csv(const std::vector<BeampatternRow>& rows, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "theta_deg,sinr_common_db";
    const std::size_t K = rows.empty() ? 0 : rows.front().private_db.size();
    for (std::size_t k = 0; k < K; ++k) out << ",sinr_private_k" << k + 1 << "_db";
    out << '\n';
    for (const auto& r : rows) {
        out << r.theta_deg << ',' << r.common_db;
        for (double v : r.private_db) out << ',' << v;
        out << '\n';
    }
}

void write_convergence_csv(const std::vector<SolveOutcome>& runs, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "algorithm,iter,objective,residual\n";
    for (const auto& r : runs)
        for (const auto& c : r.records)
            out << algorithm_name(r.algorithm) << ',' << c.iter << ',' << c.objective << ',' << c.residual << '\n';
}

Lemma1Report lemma1_check(const BeamformingSolution& sol, const SystemConfig& cfg, int draws, std::uint64_t seed) {
    constexpr int kChunk = 10000;
    const int K = sol.k();
    const int chunks = (draws + kChunk - 1) / kChunk;
    std::vector<std::vector<int>> hits(chunks, std::vector<int>(K, 0));
    parallel_for(chunks, [&](int c) {
        std::seed_seq ss{seed, static_cast<std::uint64_t>(c)};
        Rng rng(ss);
        const int n = std::min(kChunk, draws - c * kChunk);
        for (int t = 0; t < n; ++t) {
            const EveSinr e = eve_sinrs(sol, sample_eve_channels(rng, cfg.n_eves, sol.n()), cfg.noise_eve);
            for (int k = 0; k < K; ++k)
                if (e.priv.col(k).maxCoeff() <= sol.gamma_e) ++hits[c][k];
        }
    });
    Lemma1Report r;
    r.draws = draws;
    r.kappa = cfg.secrecy_prob;
    r.gamma_e = sol.gamma_e;
    r.ok = true;
    const double sigma = std::sqrt(r.kappa * (1.0 - r.kappa) / draws);
    for (int k = 0; k < K; ++k) {
        int h = 0;
        for (const auto& c : hits) h += c[k];
        r.prob.push_back(static_cast<double>(h) / draws);
        r.sigma.push_back(sigma);
        if (r.prob.back() < r.kappa - 3.0 * sigma) r.ok = false;
    }
    return r;
}

int cmd_solve(const ExperimentPlan& plan) {
    return guarded([&] {
        const Scenario sc = load_checked(plan);
        ensure_dir(plan.out_dir);
        std::vector<SolveOutcome> runs;
        for (Algorithm a : plan.algorithms) {
            runs.push_back(solve_scenario(sc, a, plan.seed));
            const SolveOutcome& o = runs.back();
            SystemConfig cfg = sc.cfg;
            if (a == Algorithm::TwoStageSum) cfg.sum_power = true;
            const ChannelSet ch = build_channels(cfg, sc.geom);
            const IodSinr s = iod_sinrs(o.sol, ch, cfg.noise_iod);
            const RVec pw = antenna_powers(o.sol);
            std::ofstream sum = open_out(join(plan.out_dir, std::string("solution_") + algorithm_name(a) + ".txt"));
            sum << "algorithm = " << algorithm_name(a) << "\n";
            sum << "gamma_e = " << o.gamma_e << "\n";
            sum << "fssr = " << o.fssr << "\n";
            if (a == Algorithm::UpperBound) sum << "upper_bound = " << o.bound << "\n";
            sum << "randomized = " << (o.sol.randomized ? "true" : "false") << "\n";
            for (int k = 0; k < ch.k(); ++k)
                sum << "iod" << k + 1 << " sinr_common_db = " << clamp_db(s.common(k))
                    << " sinr_private_db = " << clamp_db(s.priv(k)) << "\n";
            for (int n = 0; n < pw.size(); ++n) sum << "antenna" << n + 1 << " power_w = " << pw(n) << "\n";
            std::ofstream bf = open_out(join(plan.out_dir, std::string("beamformers_") + algorithm_name(a) + ".csv"));
            bf << "stream,antenna,re,im\n";
            auto dump = [&](const std::string& name, const CVec& w) {
                for (int n = 0; n < w.size(); ++n)
                    bf << name << ',' << n + 1 << ',' << w(n).real() << ',' << w(n).imag() << '\n';
            };
            dump("common", o.sol.wc.size() ? o.sol.wc : extract_rank1(o.sol.Wc).w);
            for (int k = 0; k < o.sol.k(); ++k)
                dump("private" + std::to_string(k + 1),
                     static_cast<int>(o.sol.wp.size()) > k ? o.sol.wp[k] : extract_rank1(o.sol.Wp[k]).w);
            std::cout << algorithm_name(a) << ": gamma_e " << o.gamma_e << ", fssr " << o.fssr << "\n";
        }
        write_convergence_csv(runs, join(plan.out_dir, "convergence.csv"));
    });
}

int cmd_beampattern(const ExperimentPlan& plan) {
    return guarded([&] {
        const Scenario sc = load_checked(plan);
        ensure_dir(plan.out_dir);
        const SolveOutcome o = solve_scenario(sc, plan.algorithms.front(), plan.seed);
        const double range = sc.geom.iod_polar.front().range_m;
        write_beampattern_csv(beampattern(o.sol, sc.cfg, range), join(plan.out_dir, "beampattern.csv"));
        write_convergence_csv({o}, join(plan.out_dir, "convergence.csv"));
    });
}

int cmd_sweep(const ExperimentPlan& plan) {
    return guarded([&] {
        const Scenario sc = load_checked(plan);
        ensure_dir(plan.out_dir);
        const auto pts = run_sweep(sc, plan.sweep_var, plan.values, plan.algorithms, plan.trials, plan.seed);
        write_sweep_csv(pts, join(plan.out_dir, "sweep.csv"));
        for (const auto& p : pts)
            if (!p.error.empty())
                std::cerr << "point " << p.var << "=" << p.value << " " << algorithm_name(p.algorithm)
                          << " failed: " << p.error << "\n";
    });
}

int cmd_montecarlo_lemma1(const ExperimentPlan& plan) {
    int verdict = 0;
    const int rc = guarded([&] {
        const Scenario sc = load_checked(plan);
        ensure_dir(plan.out_dir);
        const SolveOutcome o = solve_scenario(sc, plan.algorithms.front(), plan.seed);
        const Lemma1Report r = lemma1_check(o.sol, sc.cfg, plan.draws, plan.seed);
        std::ofstream out = open_out(join(plan.out_dir, "lemma1.csv"));
        out << "stream,draws,kappa,gamma_e,prob,sigma,ci_low,ci_high\n";
        for (std::size_t k = 0; k < r.prob.size(); ++k) {
            const double s = std::sqrt(r.prob[k] * (1.0 - r.prob[k]) / r.draws);
            out << k + 1 << ',' << r.draws << ',' << r.kappa << ',' << r.gamma_e << ',' << r.prob[k] << ','
                << r.sigma[k] << ',' << r.prob[k] - 1.96 * s << ',' << r.prob[k] + 1.96 * s << '\n';
            std::cout << "stream " << k + 1 << ": Pr(max_q SINR <= gamma_e) = " << r.prob[k] << " (kappa "
                      << r.kappa << ", 3 sigma " << 3.0 * r.sigma[k] << ")\n";
        }
        std::cout << (r.ok ? "guarantee met\n" : "guarantee violated\n");
        verdict = r.ok ? 0 : 1;
    });
    return rc != 0 ? rc : verdict;
}

}  // namespace secbeam
