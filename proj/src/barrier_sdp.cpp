#include "secbeam/barrier_sdp.hpp"

#include <cmath>
#include <limits>

#include "secbeam/hermitian.hpp"

namespace secbeam {

int BarrierProblem::add_block(int dim) {
    block_dims.push_back(dim);
    const int nv = n_vars();
    if (A.cols() != nv) A.conservativeResize(A.rows(), nv), A.rightCols(dim * dim).setZero();
    if (D.cols() != nv) D.conservativeResize(D.rows(), nv), D.rightCols(dim * dim).setZero();
    c.conservativeResize(nv);
    c.tail(dim * dim).setZero();
    return static_cast<int>(block_dims.size()) - 1;
}

int BarrierProblem::n_vars() const {
    int n = 0;
    for (int d : block_dims) n += d * d;
    return n;
}

int BarrierProblem::offset(int block) const {
    int n = 0;
    for (int i = 0; i < block; ++i) n += block_dims[i] * block_dims[i];
    return n;
}

int BarrierProblem::barrier_degree() const {
    int m = static_cast<int>(A.rows());
    for (const auto& l : lmis) m += l.dim;
    return m;
}

void BarrierProblem::add_psd(int block) {
    Lmi l;
    l.dim = block_dims[block];
    l.C = CMat::Zero(l.dim, l.dim);
    l.terms.push_back({block, 1.0, CMat(), false});
    lmis.push_back(std::move(l));
}

void BarrierProblem::add_linear(const RVec& a, double b0) {
    const auto r = A.rows();
    A.conservativeResize(r + 1, n_vars());
    A.row(r) = a.transpose();
    b.conservativeResize(r + 1);
    b(r) = b0;
}

void BarrierProblem::add_log(const RVec& d, double e0, double weight) {
    const auto r = D.rows();
    D.conservativeResize(r + 1, n_vars());
    D.row(r) = d.transpose();
    e.conservativeResize(r + 1);
    e(r) = e0;
    w.conservativeResize(r + 1);
    w(r) = weight;
}

namespace {

CMat lmi_slack(const BarrierProblem& p, const BarrierProblem::Lmi& l, const RVec& x) {
    CMat S = l.C;
    for (const auto& t : l.terms) {
        const int d = p.block_dims[t.block];
        const int off = p.offset(t.block);
        if (t.scalar_identity) {
            S.diagonal().array() += t.coef * x(off);
        } else {
            const CMat X = hmat(x.segment(off, d * d), d);
            if (t.P.size() == 0)
                S += t.coef * X;
            else
                S += t.coef * (t.P * X * t.P.adjoint());
        }
    }
    return S;
}

struct Eval {
    bool feasible = false;
    double phi = std::numeric_limits<double>::infinity();
    std::vector<CMat> G;  // inverse slacks
    RVec lin;             // linear slacks
    RVec logarg;
};

Eval evaluate(const BarrierProblem& p, const RVec& x, double t, bool need_inverse) {
    Eval ev;
    double phi = 0.0;
    for (const auto& l : p.lmis) {
        const CMat S = lmi_slack(p, l, x);
        Eigen::LLT<CMat> llt(herm(S));
        if (llt.info() != Eigen::Success) return ev;
        double ld = 0.0;
        const auto& Lm = llt.matrixLLT();
        for (int i = 0; i < l.dim; ++i) {
            const double di = Lm(i, i).real();
            if (!(di > 0.0)) return ev;
            ld += 2.0 * std::log(di);
        }
        phi -= ld;
        if (need_inverse) ev.G.push_back(llt.solve(CMat::Identity(l.dim, l.dim)));
    }
    if (p.A.rows() > 0) {
        ev.lin = p.A * x + p.b;
        for (int i = 0; i < ev.lin.size(); ++i) {
            if (!(ev.lin(i) > 0.0)) return ev;
            phi -= std::log(ev.lin(i));
        }
    }
    double f = p.c.dot(x);
    if (p.D.rows() > 0) {
        ev.logarg = p.D * x + p.e;
        for (int i = 0; i < ev.logarg.size(); ++i) {
            if (!(ev.logarg(i) > 0.0)) return ev;
            f += p.w(i) * std::log(ev.logarg(i));
        }
    }
    ev.phi = phi - t * f;
    ev.feasible = std::isfinite(ev.phi);
    return ev;
}

// Gradient and Hessian of  -t f(x) - sum log det S_l - sum log(lin).
void derivatives(const BarrierProblem& p, double t, const Eval& ev, RVec& g, RMat& H) {
    const int nv = p.n_vars();
    g = -t * p.c;
    H = RMat::Zero(nv, nv);
    for (int i = 0; i < ev.logarg.size(); ++i) {
        const RVec d = p.D.row(i).transpose();
        const double a = ev.logarg(i);
        g -= t * p.w(i) / a * d;
        H.noalias() += (t * p.w(i) / (a * a)) * d * d.transpose();
    }
    for (int i = 0; i < ev.lin.size(); ++i) {
        const RVec a = p.A.row(i).transpose();
        const double s = ev.lin(i);
        g -= a / s;
        H.noalias() += (1.0 / (s * s)) * a * a.transpose();
    }
    for (std::size_t li = 0; li < p.lmis.size(); ++li) {
        const auto& l = p.lmis[li];
        const CMat& G = ev.G[li];
        const std::size_t nt = l.terms.size();
        // M_u = P_u^H G  (d_u x dim), or G for identity embedding
        std::vector<CMat> PtG(nt);
        CMat G2;
        bool need_g2 = false;
        for (std::size_t u = 0; u < nt; ++u) {
            const auto& tu = l.terms[u];
            if (tu.scalar_identity) {
                need_g2 = true;
                continue;
            }
            PtG[u] = tu.P.size() == 0 ? G : CMat(tu.P.adjoint() * G);
        }
        if (need_g2) G2 = G * G;
        for (std::size_t u = 0; u < nt; ++u) {
            const auto& tu = l.terms[u];
            const int du = p.block_dims[tu.block];
            const int ou = p.offset(tu.block);
            if (tu.scalar_identity) {
                g(ou) -= tu.coef * G.trace().real();
            } else {
                const CMat PGP = tu.P.size() == 0 ? G : CMat(PtG[u] * tu.P);
                g.segment(ou, du * du) -= tu.coef * hvec(PGP);
            }
            for (std::size_t v = u; v < nt; ++v) {
                const auto& tv = l.terms[v];
                const int dv = p.block_dims[tv.block];
                const int ov = p.offset(tv.block);
                const double cc = tu.coef * tv.coef;
                if (tu.scalar_identity && tv.scalar_identity) {
                    H(ou, ov) += cc * G2.trace().real();
                    continue;
                }
                if (tu.scalar_identity || tv.scalar_identity) {
                    const auto& tm = tu.scalar_identity ? tv : tu;
                    const int dm = p.block_dims[tm.block];
                    const int om = p.offset(tm.block);
                    const int os = tu.scalar_identity ? ou : ov;
                    const CMat M = tm.P.size() == 0 ? G2 : CMat(tm.P.adjoint() * G2 * tm.P);
                    const RVec hv = cc * hvec(M);
                    H.block(om, os, dm * dm, 1) += hv;
                    if (om != os) H.block(os, om, 1, dm * dm) += hv.transpose();
                    continue;
                }
                const CMat L = tv.P.size() == 0 ? PtG[u] : CMat(PtG[u] * tv.P);
                if (u == v) {
                    add_congruence_block(L, cc, H.block(ou, ov, du * du, dv * dv));
                } else {
                    RMat blk = RMat::Zero(du * du, dv * dv);
                    add_congruence_block(L, cc, blk);
                    H.block(ou, ov, du * du, dv * dv) += blk;
                    H.block(ov, ou, dv * dv, du * du) += blk.transpose();
                }
            }
        }
    }
}

RVec newton_direction(RMat& H, const RVec& g, double reg) {
    Eigen::LLT<RMat> llt(H);
    if (llt.info() == Eigen::Success) return llt.solve(-g);
    const double shift = reg * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    H.diagonal().array() += shift;
    llt.compute(H);
    if (llt.info() != Eigen::Success)
        throw SolverError(SolverError::Kind::NumericalBreakdown, "barrier Newton system is not positive definite");
    return llt.solve(-g);
}

// One centering stage. Returns Newton steps used. Stops early when stop(x) is true.
int center(const BarrierProblem& p, RVec& x, double t, const BarrierOptions& opt, int budget,
           const std::function<bool(const RVec&)>& stop, double* last_grad = nullptr) {
    int it = 0;
    Eval ev = evaluate(p, x, t, true);
    if (!ev.feasible) throw SolverError(SolverError::Kind::NumericalBreakdown, "barrier iterate left the domain");
    RVec g;
    RMat H;
    for (; it < opt.max_newton_per_center; ++it) {
        if (it >= budget) throw SolverError(SolverError::Kind::MaxIterations, "barrier Newton iteration limit reached");
        derivatives(p, t, ev, g, H);
        if (last_grad) *last_grad = g.norm();
        const RVec dx = newton_direction(H, g, opt.reg);
        const double lam2 = -g.dot(dx);
        if (lam2 / 2.0 <= opt.newton_tol) break;
        double s = 1.0;
        Eval next;
        while (s > 1e-14) {
            next = evaluate(p, x + s * dx, t, true);
            if (next.feasible && next.phi <= ev.phi - opt.ls_alpha * s * lam2) break;
            s *= opt.ls_beta;
        }
        if (s <= 1e-14) break;  // no progress possible at this precision
        x += s * dx;
        ev = std::move(next);
        if (stop && stop(x)) {
            ++it;
            break;
        }
    }
    return it;
}

}  // namespace

double min_slack(const BarrierProblem& p, const RVec& x) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& l : p.lmis) {
        Eigen::SelfAdjointEigenSolver<CMat> es(herm(lmi_slack(p, l, x)), Eigen::EigenvaluesOnly);
        m = std::min(m, es.eigenvalues()(0));
    }
    if (p.A.rows() > 0) m = std::min(m, (p.A * x + p.b).minCoeff());
    return m;
}

double objective_value(const BarrierProblem& p, const RVec& x) {
    double f = p.c.dot(x);
    if (p.D.rows() > 0) {
        const RVec a = p.D * x + p.e;
        for (int i = 0; i < a.size(); ++i) f += p.w(i) * std::log(a(i));
    }
    return f;
}

RVec phase1(const BarrierProblem& p, const RVec& x0, const BarrierOptions& opt) {
    if (min_slack(p, x0) > 0.0) return x0;
    BarrierProblem q;
    q.block_dims = p.block_dims;
    const int nv = p.n_vars();
    const int sb = static_cast<int>(q.block_dims.size());
    q.block_dims.push_back(1);
    q.lmis = p.lmis;
    for (auto& l : q.lmis) l.terms.push_back({sb, 1.0, CMat(), true});
    q.A = RMat::Zero(p.A.rows(), nv + 1);
    q.A.leftCols(nv) = p.A;
    q.A.col(nv).setOnes();
    q.b = p.b;
    q.c = RVec::Zero(nv + 1);
    q.c(nv) = -1.0;  // maximize -s

    const double s0 = 1.0 - min_slack(p, x0);
    RVec lower = RVec::Zero(nv + 1);
    lower(nv) = 1.0;
    const double s_floor = 10.0 * s0 + 1.0;
    q.add_linear(lower, s_floor);  // s >= -floor keeps the phase-I problem bounded

    RVec x(nv + 1);
    x.head(nv) = x0;
    x(nv) = s0;
    double t = opt.t0;
    const int m = q.barrier_degree();
    int used = 0;
    bool found = false;
    auto stop = [&](const RVec& y) {
        found = y(nv) < 0.0 && min_slack(p, y.head(nv)) > 0.0;
        return found;
    };
    while (true) {
        used += center(q, x, t, opt, opt.max_newton_total - used, stop);
        if (found || min_slack(p, x.head(nv)) > 0.0) break;
        if (m / t < opt.gap_tol) break;
        t *= opt.growth;
    }
    if (!(min_slack(p, x.head(nv)) > 0.0))
        throw SolverError(SolverError::Kind::Infeasible,
                          "phase I: no strictly feasible point (min violation " + std::to_string(x(nv)) + ")");
    return x.head(nv);
}

BarrierResult barrier_solve(const BarrierProblem& p, const RVec& x_start, const BarrierOptions& opt) {
    BarrierResult r;
    r.x = x_start;
    if (!evaluate(p, r.x, opt.t0, false).feasible)
        throw SolverError(SolverError::Kind::Infeasible, "barrier start point is not strictly feasible");
    const int m = p.barrier_degree();
    double t = opt.t0;
    double gnorm = 0.0;
    while (true) {
        r.newton_iters += center(p, r.x, t, opt, opt.max_newton_total - r.newton_iters, nullptr, &gnorm);
        r.objective_trace.push_back(objective_value(p, r.x));
        if (m / t < opt.gap_tol) break;
        t *= opt.growth;
    }
    r.t_final = t;
    r.objective = objective_value(p, r.x);
    r.kkt_residual = gnorm / t;
    return r;
}

BarrierResult default_convex_solver(const BarrierProblem& p, const RVec& x0, const BarrierOptions& opt) {
    return barrier_solve(p, phase1(p, x0, opt), opt);
}

}  // namespace secbeam
