#pragma once

#include <limits>
#include <vector>

#include "secbeam/barrier_sdp.hpp"
#include "secbeam/channel.hpp"
#include "secbeam/metrics.hpp"
#include "secbeam/scenario.hpp"

namespace secbeam {

// -chi*zeta/ln2 + log2(chi) + 1/ln2; maximized at chi = 1/zeta with value -log2(zeta).
double surrogate_value(double chi, double zeta);

// chi_k = 1 / (sum_{i in K} h_k^H W_i h_k + sigma_u^2).
RVec update_chi(const BeamformingSolution& sol, const ChannelSet& ch, double noise_iod);

// Which convex program to assemble over (Wc, W_1..W_K, B).
enum class SubproblemKind {
    MM,          // concave surrogate at fixed chi
    P7,          // sum_k log2(1 + h_k^H Wc h_k / sigma_u^2) with the interference cap
};

// The convex subproblem in normalized units: powers relative to the total
// budget, noise relative to sigma_u^2.
class ConvexSubproblem {
public:
    ConvexSubproblem(const ChannelSet& ch, const SystemConfig& cfg, double gamma_e, SubproblemKind kind);

    // Infinite gamma_e drops the secrecy LMIs (Eve-free bound).
    static constexpr double kNoSecrecy = std::numeric_limits<double>::infinity();

    void set_chi(const RVec& chi_physical);
    const BarrierProblem& problem() const { return prob_; }

    RVec to_vars(const BeamformingSolution& sol) const;
    BeamformingSolution to_solution(const RVec& x) const;

    // Surrogate objective (MM) or P7 objective, in bits, at x.
    double objective(const RVec& x) const;
    // A simple interior-ish start for phase I.
    RVec default_start() const;

    double p_ref() const { return p_ref_; }
    double gamma_e() const { return gamma_e_; }

private:
    const ChannelSet& ch_;
    SystemConfig cfg_;
    double gamma_e_;
    SubproblemKind kind_;
    double p_ref_;
    std::vector<RVec> hh_;  // hvec(h_k h_k^H) in normalized units
    RVec chi_;              // normalized chi
    double constant_ = 0.0;
    BarrierProblem prob_;

    int blk_wc() const { return 0; }
    int blk_wp(int k) const { return 1 + k; }
    int blk_b() const { return 1 + ch_.k(); }
    void rebuild_objective();
};

struct Stage1Options {
    int max_iter = 100;
    double eps1 = 1e-6;
    BarrierOptions barrier;
    ConvexSolver solver = default_convex_solver;
};

struct MMState {
    RVec chi;
    BeamformingSolution sol;
    std::vector<double> objective_history;   // true sum common rate, bits
    std::vector<double> surrogate_history;   // subproblem optimum, bits
    std::vector<double> residual_history;    // barrier KKT residual
    int iterations = 0;
    int newton_iterations = 0;
};

struct Stage1Result {
    BeamformingSolution sol;
    MMState state;
};

// Solves one convex subproblem; throws SolverError on infeasible/max-iter/breakdown.
BarrierResult solve_subproblem(const ConvexSubproblem& sub, const RVec& start, const Stage1Options& opt = {});

// MM loop at fixed gamma_e. Starts from chi computed at W = I.
Stage1Result run_algorithm1(const ChannelSet& ch, const SystemConfig& cfg, double gamma_e,
                            const Stage1Options& opt = {});

// Sum common rate sum_k log2(1 + gamma_c,k).
double sum_common_rate(const BeamformingSolution& sol, const ChannelSet& ch, double noise_iod);

// P7 solved directly by the barrier engine; reference for the mini-max solver.
struct P7Result {
    BeamformingSolution sol;
    double objective = 0.0;  // sum_k log2(1 + h^H Wc h / sigma_u^2)
    double kkt_residual = 0.0;
};
P7Result solve_p7_reference(const ChannelSet& ch, const SystemConfig& cfg, double gamma_e,
                            const Stage1Options& opt = {});
double p7_objective(const BeamformingSolution& sol, const ChannelSet& ch, double noise_iod);

}  // namespace secbeam
