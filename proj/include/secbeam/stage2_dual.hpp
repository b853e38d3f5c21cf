#pragma once

#include <functional>
#include <vector>

#include "secbeam/channel.hpp"
#include "secbeam/metrics.hpp"
#include "secbeam/scenario.hpp"
#include "secbeam/stage1_mm.hpp"

namespace secbeam {

// Pi_k = c I + Wc + sum_{j != k} W_j + V0 B V0^H, c = Phi_N^{-1}(1 - kappa^{1/Q}) sigma_e^2.
std::vector<CMat> build_pi(const BeamformingSolution& sol, double c);
double pi_identity_weight(const SystemConfig& cfg, int n);

// -log2(-sum Tr(Psi Pi)) - sum Tr(Psi W) - 1; DomainError unless -sum Tr(Psi Pi) > 0.
double dual_value(const std::vector<CMat>& psi, const std::vector<CMat>& pi, const std::vector<CMat>& w);
// Pi_k / (t ln2) - W_k with t = -sum Tr(Psi Pi).
std::vector<CMat> dual_gradient(const std::vector<CMat>& psi, const std::vector<CMat>& pi,
                                const std::vector<CMat>& w);
// -1 / sum Tr(Psi Pi).
double recover_gamma_e(const std::vector<CMat>& psi, const std::vector<CMat>& pi);
// max_k lambda_max(Pi_k^{-1/2} W_k Pi_k^{-1/2}).
double gamma_e_oracle(const std::vector<CMat>& pi, const std::vector<CMat>& w);

// Generic minimizer used by the dual solver.
using ScalarFn = std::function<double(const RVec&)>;
using GradFn = std::function<RVec(const RVec&)>;
using DomainFn = std::function<bool(const RVec&)>;

struct BfgsOptions {
    int max_iter = 500;
    double lambda_tol = 1e-16;   // stop on ||Lambda||^2 below this
    double grad_tol = 1e-10;     // or on ||grad|| below this
    double ls_tol = 1e-10;
};

struct BfgsResult {
    RVec x;
    double f = 0.0;
    int iterations = 0;
    int skipped_updates = 0;
    bool converged = false;
    RMat X;                  // inverse-Hessian surrogate at exit
    RVec xi, lambda;         // last iterate and gradient differences
    std::vector<double> f_trace;
};

// Inverse-Hessian rank-two update; returns X unchanged when xi.lambda <= 0.
RMat bfgs_update(const RMat& X, const RVec& xi, const RVec& lambda, bool* skipped = nullptr);

// Exact 1-D minimization of f(x + s d) over s >= 0 inside the domain:
// bracketing, golden section, then a safeguarded secant polish on the slope.
// Returns 0 when no domain-feasible decrease exists.
double exact_line_search(const ScalarFn& f, const GradFn& g, const DomainFn& dom, const RVec& x, const RVec& d,
                         double tol);

BfgsResult bfgs_minimize(const ScalarFn& f, const GradFn& g, const DomainFn& dom, const RVec& x0,
                         const BfgsOptions& opt = {});
// Damped Newton with a finite-difference Hessian; test reference only.
BfgsResult damped_newton_minimize(const ScalarFn& f, const GradFn& g, const DomainFn& dom, const RVec& x0,
                                  const BfgsOptions& opt = {});

struct DualState {
    std::vector<CMat> psi;
    std::vector<CMat> pi;
    std::vector<CMat> w;
    RMat X;
    RVec xi, lambda;
    double gamma_e = 0.0;
    double value = 0.0;
    int iterations = 0;
    int skipped_updates = 0;
    bool converged = false;
    std::vector<double> value_trace;
};

// Maximizes the dual on the slice sum Tr(Psi W) = -1 with Psi_k = -Y_k Y_k^H / sum Tr(Y^H W Y),
// starting from Psi_k = -I (normalized onto the slice).
DualState solve_dual(const std::vector<CMat>& pi, const std::vector<CMat>& w, const BfgsOptions& opt = {});
DualState solve_dual_newton(const std::vector<CMat>& pi, const std::vector<CMat>& w, const BfgsOptions& opt = {});

struct Stage2Options {
    Stage1Options stage1;
    BfgsOptions bfgs;
    int max_outer = 30;
    double oracle_rel_tol = 1e-4;  // BFGS result accepted when it matches the oracle this closely
};

struct Stage2Result {
    BeamformingSolution sol;
    std::vector<double> gamma_trace;   // Gamma_e used by each stage-1 run, then the final value
    std::vector<double> fssr_trace;    // F-SSR after each Gamma_e update
    std::vector<double> dual_trace;    // converged dual value per outer iteration
    std::vector<ConvergenceRecord> records;
    int outer_iterations = 0;
    int oracle_fallbacks = 0;
};

Stage2Result run_algorithm2(const ChannelSet& ch, const SystemConfig& cfg, const Stage2Options& opt = {});

}  // namespace secbeam
