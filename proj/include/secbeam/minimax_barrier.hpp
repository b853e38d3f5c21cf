#pragma once

#include <vector>

#include "secbeam/channel.hpp"
#include "secbeam/metrics.hpp"
#include "secbeam/scenario.hpp"

namespace secbeam {

// P7 data in normalized units (powers over p_ref, noise over sigma_u^2).
struct MinimaxData {
    int n = 0, k = 0;
    std::vector<CVec> h;
    std::vector<RVec> hh;   // hvec(h_k h_k^H)
    CMat V0;
    RVec p;                 // per-antenna budgets
    RVec sinr;              // Gamma_p,k
    double xi = 0.0;
    double gamma_e = 0.0;
    double sigma_p = 0.0;   // interference cap
    double p_ref = 1.0;
    double noise = 1.0;     // physical sigma_u^2
    bool sum_power = false;
};

MinimaxData make_minimax_data(const ChannelSet& ch, const SystemConfig& cfg, double gamma_e);

struct DualMatrices {
    CMat Sigma;                 // diag(lambda) - Gamma_e sum D_k
    std::vector<CMat> Omega;    // coefficient of W_k
    CMat Phi;                   // V0^H Sigma V0
    RVec g;                     // [p; -d; -b]
};

// lambda has N entries (one per antenna), or one under a sum-power budget.
DualMatrices build_dual_matrices(const std::vector<CMat>& D, const RVec& lambda, const RVec& mu, const RVec& upsilon,
                                 const MinimaxData& data);

// sum_k log2(|S + h_k w h_k^H| / |S|).
double log_det_ratio(const CMat& S, double omega, const std::vector<CVec>& h);

// Scaled-variable barrier objective. DomainError on a non-positive barrier
// argument or a non-PD S.
struct ScaledPoint {
    double omega = 1.0;
    std::vector<CMat> W_hat;
    CMat B_hat;
    std::vector<CMat> D_tilde;
    RVec eta;
};
double barrier_objective(const ScaledPoint& s, const CMat& S_tilde, const std::vector<CVec>& h, double varsigma);

// omega-row of the Newton system: approximate first-order form, and the same
// row evaluated exactly (both multiplied through by -omega^2).
double omega_row_approx(const CMat& S, double omega, double tau1, const CMat& dS, double domega, double dtau1,
                        const std::vector<CVec>& h, double varsigma);
double omega_row_exact(const CMat& S, double omega, double tau1, const CMat& dS, double domega, double dtau1,
                       const std::vector<CVec>& h, double varsigma);

// Division of every variable (and S) by z > 0.
struct UnscaledPoint {
    double omega = 0.0;
    std::vector<CMat> W;
    CMat B;
    std::vector<CMat> D;
    RVec eta;
    CMat S;
};
UnscaledPoint scale_down(const UnscaledPoint& u, double z);
// omega + sum Tr(Omega_k W_k) + Tr(Phi B)
double budget_lhs(double omega, const std::vector<CMat>& W, const CMat& B, const DualMatrices& dm);

// Saddle point of the barrier-augmented partial Lagrangian of P7:
// max over (Wc, W_k, B) > 0, min over (D_k > 0, lambda, mu, upsilon > 0).
struct MinimaxState {
    CMat Wc;
    std::vector<CMat> W;
    CMat B;
    std::vector<CMat> D;
    RVec lambda, mu, upsilon;
    double varsigma = 20.0;
};

MinimaxState initial_state(const MinimaxData& data, double varsigma);
// Primal part from a strictly feasible P7 point, multipliers centered on its slacks
// (the y-part of the residual vanishes). Falls back to initial_state when P7 has no interior.
MinimaxState feasible_state(const MinimaxData& data, const ChannelSet& ch, const SystemConfig& cfg, double varsigma);
int saddle_dim(const MinimaxData& data);
int barrier_terms(const MinimaxData& data);
RVec pack_state(const MinimaxState& s);
MinimaxState unpack_state(const RVec& z, const MinimaxData& data, double varsigma);
bool in_domain(const MinimaxState& s);

// Barrier-augmented Lagrangian (natural-log barriers, weight 1/varsigma).
double saddle_lagrangian(const MinimaxState& s, const MinimaxData& data);
// Full gradient over the packed coordinates; its norm is the residual r.
RVec kkt_residual(const MinimaxState& s, const MinimaxData& data);
RMat saddle_jacobian(const MinimaxState& s, const MinimaxData& data);
// Solves J d = -r; singular systems get a 1e-10 shift and one retry.
RVec newton_step(const MinimaxState& s, const MinimaxData& data);
// Largest s = beta^m keeping the domain with r(z + s d) <= (1 - alpha s) r(z);
// throws SolverError(Stall) when s < 1e-12.
double line_search(const MinimaxState& s, const RVec& dir, const MinimaxData& data, double alpha, double beta);

struct MinimaxOptions {
    double varsigma0 = 20.0;
    double growth = 2.0;
    double eps3 = 1e-6;
    double gap_tol = 1e-6;
    int max_newton = 5000;
    double ls_alpha = 0.1;
    double ls_beta = 0.5;
    bool feasible_start = true;
};

struct WcCandidate {
    CMat Wc;              // physical units
    double objective = 0.0;
    bool feasible = false;
    int source = -1;      // k for the rank-one candidates, -1 for the solver's own
};

struct MinimaxResult {
    BeamformingSolution sol;
    double objective = 0.0;       // P7 objective of the returned solution
    double kkt_residual = 0.0;    // at exit of the last inner loop
    int newton_iterations = 0;
    int outer_iterations = 0;
    std::vector<ConvergenceRecord> records;
    std::vector<WcCandidate> candidates;
    double duality_gap = 0.0;     // primal objective vs Lagrangian at the saddle
    MinimaxState state;
};

// Rank-one candidates from each k plus the solver's own Wc, feasibility-checked against P7.
std::vector<WcCandidate> recover_wc(const MinimaxState& s, const MinimaxData& data, const ChannelSet& ch,
                                    const SystemConfig& cfg);

MinimaxResult run_algorithm3(const ChannelSet& ch, const SystemConfig& cfg, double gamma_e,
                             const MinimaxOptions& opt = {});
MinimaxOptions minimax_options_from(const SystemConfig& cfg);

}  // namespace secbeam
