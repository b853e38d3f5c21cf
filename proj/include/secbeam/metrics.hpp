#pragma once

#include <vector>

#include "secbeam/channel.hpp"
#include "secbeam/scenario.hpp"
#include "secbeam/types.hpp"

namespace secbeam {

struct BeamformingSolution {
    CMat Wc;                  // N x N
    std::vector<CMat> Wp;     // K of N x N
    CMat B;                   // (N-K) x (N-K)
    CMat V0;                  // N x (N-K)
    CVec wc;                  // extracted beamformers (empty until extracted)
    std::vector<CVec> wp;
    double gamma_e = 0.0;
    std::vector<double> objective_trace;
    std::vector<double> gamma_e_trace;
    std::vector<double> rank_gap;  // Wc first, then W_1..W_K
    bool randomized = false;

    int n() const { return static_cast<int>(Wc.rows()); }
    int k() const { return static_cast<int>(Wp.size()); }
    CMat an_covariance() const { return V0 * B * V0.adjoint(); }
};

BeamformingSolution zero_solution(const ChannelSet& ch);

// One row of a convergence trace.
struct ConvergenceRecord {
    int iter = 0;
    double objective = 0.0;
    double residual = 0.0;
};

struct IodSinr {
    RVec common;   // gamma_{c,k}^u
    RVec priv;     // gamma_{p,k}^u
};

struct EveSinr {
    RVec common;   // gamma_{c,q}^e, length Q
    RMat priv;     // gamma_{p,q,k}^e, Q x K
};

IodSinr iod_sinrs(const BeamformingSolution& sol, const ChannelSet& ch, double noise_iod);
EveSinr eve_sinrs(const BeamformingSolution& sol, const std::vector<CVec>& eves, double noise_eve);

double fssr_objective(const BeamformingSolution& sol, const ChannelSet& ch, double noise_iod, double gamma_e);

// Per-antenna transmit powers sum_i [W_i]_nn + [V0 B V0^H]_nn.
RVec antenna_powers(const BeamformingSolution& sol);
// Max relative violation of the active power constraint (<= 0 when met).
double power_violation(const BeamformingSolution& sol, const SystemConfig& cfg);
bool private_targets_met(const BeamformingSolution& sol, const ChannelSet& ch, const SystemConfig& cfg,
                         double rel_tol = 1e-6);

// Secrecy sum-rate for one set of Eve channels (zero if a private target fails).
double ssr_single_draw(const BeamformingSolution& sol, const ChannelSet& ch, const SystemConfig& cfg,
                       const std::vector<CVec>& eves);

struct SsrStats {
    double mean = 0.0;
    double se = 0.0;
    std::vector<double> samples;
};

SsrStats system_ssr(const BeamformingSolution& sol, const ChannelSet& ch, const SystemConfig& cfg, Rng& rng,
                    int trials);

struct Rank1 {
    CVec w;
    double gap = 0.0;
};
Rank1 extract_rank1(const CMat& W);

// Replaces covariances by rank-one beams. Streams whose rank gap exceeds
// gap_tol trigger Gaussian randomization over n_candidates draws, filtered
// by power, private-SINR and secrecy-LMI feasibility.
void restore_rank_one(BeamformingSolution& sol, const ChannelSet& ch, const SystemConfig& cfg, Rng& rng,
                      double gap_tol = 1e-3, int n_candidates = 100);

}  // namespace secbeam
