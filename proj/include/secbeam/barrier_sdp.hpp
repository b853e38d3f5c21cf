#pragma once

#include <functional>
#include <vector>

#include "secbeam/types.hpp"

namespace secbeam {

// Maximize  c^T x + sum_j w_j ln(D_j x + e_j)
// s.t.      C_l + sum_terms coef * P X_b P^H  >= 0   (LMIs)
//           A x + b >= 0                              (linear)
// where x stacks real coordinates (hvec) of Hermitian blocks X_b.
struct BarrierProblem {
    struct Term {
        int block = 0;
        double coef = 1.0;
        CMat P;  // empty means identity embedding
        // block is 1x1 and enters as coef * x * I (used by phase I)
        bool scalar_identity = false;
    };
    struct Lmi {
        int dim = 0;
        CMat C;
        std::vector<Term> terms;
    };

    std::vector<int> block_dims;
    std::vector<Lmi> lmis;
    RMat A;
    RVec b;
    RVec c;
    RMat D;
    RVec e;
    RVec w;

    int add_block(int dim);
    int n_vars() const;
    int offset(int block) const;
    int barrier_degree() const;  // sum of LMI sizes + number of linear rows

    // Adds "X_b >= 0".
    void add_psd(int block);
    void add_linear(const RVec& a, double b0);
    void add_log(const RVec& d, double e0, double weight);
};

struct BarrierOptions {
    double t0 = 1.0;
    double growth = 10.0;
    double gap_tol = 1e-8;        // stop when degree / t < gap_tol
    double newton_tol = 1e-10;    // centering: lambda^2 / 2 below this
    double reg = 1e-10;           // relative diagonal shift on indefinite systems
    int max_newton_per_center = 100;
    int max_newton_total = 3000;
    double ls_alpha = 0.01;
    double ls_beta = 0.5;
};

struct BarrierResult {
    RVec x;
    double objective = 0.0;
    int newton_iters = 0;
    double t_final = 0.0;
    double kkt_residual = 0.0;   // ||grad of t-scaled barrier|| / t at exit
    std::vector<double> objective_trace;  // one entry per centering stage
};

// Smallest eigenvalue margin over all constraints; > 0 iff strictly feasible.
double min_slack(const BarrierProblem& p, const RVec& x);
double objective_value(const BarrierProblem& p, const RVec& x);

// Finds a strictly feasible point from any start; throws SolverError(Infeasible).
RVec phase1(const BarrierProblem& p, const RVec& x0, const BarrierOptions& opt = {});

// Requires a strictly feasible start.
BarrierResult barrier_solve(const BarrierProblem& p, const RVec& x_start, const BarrierOptions& opt = {});

// Pluggable interface so another convex solver can substitute the built-in one.
using ConvexSolver = std::function<BarrierResult(const BarrierProblem&, const RVec&, const BarrierOptions&)>;
BarrierResult default_convex_solver(const BarrierProblem& p, const RVec& x0, const BarrierOptions& opt);

}  // namespace secbeam
