#include "secbeam/stage2_dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "secbeam/hermitian.hpp"
#include "secbeam/secrecy_stats.hpp"

namespace secbeam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tr_prod(const CMat& A, const CMat& B) { return (A.cwiseProduct(B.transpose())).sum().real(); }

double neg_trace_psi_pi(const std::vector<CMat>& psi, const std::vector<CMat>& pi) {
    if (psi.size() != pi.size() || psi.empty()) throw DomainError("dual: K mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < psi.size(); ++k) s += tr_prod(psi[k], pi[k]);
    return -s;
}

// Y_k blocks packed as interleaved (re, im) column-major.
RVec pack(const std::vector<CMat>& Y) {
    const int n = static_cast<int>(Y[0].rows());
    RVec x(2 * n * n * static_cast<int>(Y.size()));
    int p = 0;
    for (const auto& M : Y)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                x(p++) = M(i, j).real();
                x(p++) = M(i, j).imag();
            }
    return x;
}

std::vector<CMat> unpack(const RVec& x, int n, int k) {
    std::vector<CMat> Y(k, CMat(n, n));
    int p = 0;
    for (auto& M : Y)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i, p += 2) M(i, j) = cd(x(p), x(p + 1));
    return Y;
}

struct SliceProblem {
    const std::vector<CMat>& pi;
    const std::vector<CMat>& w;
    int n, k;

    void forms(const std::vector<CMat>& Y, double& a, double& b) const {
        a = b = 0.0;
        for (int i = 0; i < k; ++i) {
            a += (Y[i].adjoint() * pi[i] * Y[i]).trace().real();
            b += (Y[i].adjoint() * w[i] * Y[i]).trace().real();
        }
    }
    bool domain(const RVec& x) const {
        double a, b;
        forms(unpack(x, n, k), a, b);
        return a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b);
    }
    double value(const RVec& x) const {
        double a, b;
        forms(unpack(x, n, k), a, b);
        if (!(a > 0.0 && b > 0.0)) return kInf;
        return std::log2(a / b);
    }
    RVec grad(const RVec& x) const {
        const auto Y = unpack(x, n, k);
        double a, b;
        forms(Y, a, b);
        std::vector<CMat> G(k);
        for (int i = 0; i < k; ++i) G[i] = (2.0 / kLn2) * (pi[i] * Y[i] / a - w[i] * Y[i] / b);
        return pack(G);
    }
    std::vector<CMat> psi(const RVec& x) const {
        const auto Y = unpack(x, n, k);
        double a, b;
        forms(Y, a, b);
        std::vector<CMat> P(k);
        for (int i = 0; i < k; ++i) P[i] = herm(-(Y[i] * Y[i].adjoint()) / b);
        return P;
    }
};

DualState finish_dual(const SliceProblem& sp, const BfgsResult& r, const std::vector<CMat>& pi,
                      const std::vector<CMat>& w) {
    DualState st;
    st.pi = pi;
    st.w = w;
    st.psi = sp.psi(r.x);
    st.X = r.X;
    st.xi = r.xi;
    st.lambda = r.lambda;
    st.value = dual_value(st.psi, pi, w);
    st.gamma_e = recover_gamma_e(st.psi, pi);
    st.iterations = r.iterations;
    st.skipped_updates = r.skipped_updates;
    st.converged = r.converged;
    for (double f : r.f_trace) st.value_trace.push_back(-f);
    return st;
}

void check_pairs(const std::vector<CMat>& pi, const std::vector<CMat>& w) {
    if (pi.empty() || pi.size() != w.size()) throw DomainError("dual: K mismatch");
    for (std::size_t k = 0; k < pi.size(); ++k)
        if (pi[k].rows() != pi[0].rows() || w[k].rows() != pi[0].rows())
            throw DomainError("dual: dimension mismatch");
}

}  // namespace

double pi_identity_weight(const SystemConfig& cfg, int n) {
    return phi_inv(outage_arg(cfg.secrecy_prob, cfg.n_eves), n) * cfg.noise_eve;
}

std::vector<CMat> build_pi(const BeamformingSolution& sol, double c) {
    const int N = sol.n(), K = sol.k();
    const CMat base = c * CMat::Identity(N, N) + sol.Wc + sol.an_covariance();
    std::vector<CMat> pi;
    for (int k = 0; k < K; ++k) {
        CMat P = base;
        for (int j = 0; j < K; ++j)
            if (j != k) P += sol.Wp[j];
        pi.push_back(herm(P));
    }
    return pi;
}

double dual_value(const std::vector<CMat>& psi, const std::vector<CMat>& pi, const std::vector<CMat>& w) {
    const double t = neg_trace_psi_pi(psi, pi);
    if (!(t > 0.0)) throw DomainError("dual_value: -sum Tr(Psi Pi) must be positive");
    double s = 0.0;
    for (std::size_t k = 0; k < psi.size(); ++k) s += tr_prod(psi[k], w[k]);
    return -std::log2(t) - s - 1.0;
}

std::vector<CMat> dual_gradient(const std::vector<CMat>& psi, const std::vector<CMat>& pi,
                                const std::vector<CMat>& w) {
    const double t = neg_trace_psi_pi(psi, pi);
    if (!(t > 0.0)) throw DomainError("dual_gradient: -sum Tr(Psi Pi) must be positive");
    std::vector<CMat> g;
    for (std::size_t k = 0; k < psi.size(); ++k) g.push_back(pi[k] / (t * kLn2) - w[k]);
    return g;
}

double recover_gamma_e(const std::vector<CMat>& psi, const std::vector<CMat>& pi) {
    const double t = neg_trace_psi_pi(psi, pi);
    if (!(t > 0.0)) throw DomainError("recover_gamma_e: -sum Tr(Psi Pi) must be positive");
    return 1.0 / t;
}

double gamma_e_oracle(const std::vector<CMat>& pi, const std::vector<CMat>& w) {
    check_pairs(pi, w);
    double g = 0.0;
    for (std::size_t k = 0; k < pi.size(); ++k) {
        const CMat R = inv_sqrtm_pd(pi[k]);
        g = std::max(g, lambda_max_herm(R * w[k] * R));
    }
    return g;
}

RMat bfgs_update(const RMat& X, const RVec& xi, const RVec& lambda, bool* skipped) {
    const double sy = xi.dot(lambda);
    if (!(sy > 0.0)) {
        if (skipped) *skipped = true;
        return X;
    }
    if (skipped) *skipped = false;
    const RVec Xl = X * lambda;
    const double lXl = lambda.dot(Xl);
    RMat out = X + ((1.0 + lXl / sy) / sy) * (xi * xi.transpose());
    out -= (xi * Xl.transpose() + Xl * xi.transpose()) / sy;
    return 0.5 * (out + out.transpose());
}

double exact_line_search(const ScalarFn& f, const GradFn& g, const DomainFn& dom, const RVec& x, const RVec& d,
                         double tol) {
    auto phi = [&](double s) {
        const RVec y = x + s * d;
        if (!dom(y)) return kInf;
        const double v = f(y);
        return std::isfinite(v) ? v : kInf;
    };
    auto slope = [&](double s) { return g(x + s * d).dot(d); };

    const double f0 = phi(0.0);
    double a = 0.0, b, c, fb, fc;
    const double f1 = phi(1.0);
    if (f1 < f0) {
        b = 1.0;
        fb = f1;
        c = 2.0;
        fc = phi(c);
        while (fc < fb && c < 1e30) {
            a = b;
            b = c;
            fb = fc;
            c *= 2.0;
            fc = phi(c);
        }
    } else {
        c = 1.0;
        b = 0.5;
        fb = phi(b);
        while (!(fb < f0)) {
            c = b;
            b *= 0.5;
            if (b < 1e-30) return 0.0;
            fb = phi(b);
        }
    }

    // golden section on [a, c]
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = a, hi = c;
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1s = phi(x1), f2s = phi(x2);
    while (hi - lo > tol * (1.0 + std::abs(lo))) {
        if (f1s < f2s) {
            hi = x2;
            x2 = x1;
            f2s = f1s;
            x1 = hi - r * (hi - lo);
            f1s = phi(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1s = f2s;
            x2 = lo + r * (hi - lo);
            f2s = phi(x2);
        }
    }
    double best = f1s < f2s ? x1 : x2;
    double fbest = std::min(f1s, f2s);
    if (fb < fbest) best = b, fbest = fb;

    // secant polish on the slope within a widened bracket
    double s0 = std::max(0.0, best - 4.0 * (hi - lo)), s1 = best + 4.0 * (hi - lo);
    if (phi(s1) < kInf) {
        double d0 = slope(s0), d1 = slope(s1);
        for (int it = 0; it < 30 && d0 < 0.0 && d1 > 0.0; ++it) {
            const double sm = s0 - d0 * (s1 - s0) / (d1 - d0);
            if (!(sm > s0 && sm < s1)) break;
            const double dm = slope(sm);
            const double fm = phi(sm);
            if (fm <= fbest) best = sm, fbest = fm;
            if (dm == 0.0 || (s1 - s0) < 1e-16 * (1.0 + sm)) break;
            if (dm < 0.0) {
                s0 = sm;
                d0 = dm;
            } else {
                s1 = sm;
                d1 = dm;
            }
            if (std::abs(dm) < 1e-15 * (1.0 + std::abs(d0) + std::abs(d1))) break;
        }
    }
    return fbest < f0 ? best : 0.0;
}

BfgsResult bfgs_minimize(const ScalarFn& f, const GradFn& g, const DomainFn& dom, const RVec& x0,
                         const BfgsOptions& opt) {
    if (!dom(x0)) throw DomainError("bfgs_minimize: start outside domain");
    const int n = static_cast<int>(x0.size());
    BfgsResult r;
    r.x = x0;
    r.f = f(x0);
    r.X = RMat::Identity(n, n);
    r.xi = RVec::Zero(n);
    r.lambda = RVec::Zero(n);
    r.f_trace.push_back(r.f);
    RVec gx = g(r.x);
    bool fresh = true;
    for (int it = 0; it < opt.max_iter; ++it) {
        if (gx.norm() < opt.grad_tol) {
            r.converged = true;
            break;
        }
        RVec d = -r.X * gx;
        if (!(d.dot(gx) < 0.0)) {
            r.X.setIdentity();
            d = -gx;
            fresh = true;
        }
        const double s = exact_line_search(f, g, dom, r.x, d, opt.ls_tol);
        if (s == 0.0) {
            if (fresh) {
                r.converged = gx.norm() < 1e-6;
                break;
            }
            r.X.setIdentity();
            fresh = true;
            continue;
        }
        const RVec xn = r.x + s * d;
        const RVec gn = g(xn);
        r.xi = xn - r.x;
        r.lambda = gn - gx;
        bool skipped = false;
        r.X = bfgs_update(r.X, r.xi, r.lambda, &skipped);
        if (skipped) ++r.skipped_updates;
        fresh = false;
        r.x = xn;
        r.f = f(xn);
        gx = gn;
        r.f_trace.push_back(r.f);
        ++r.iterations;
        if (r.lambda.squaredNorm() < opt.lambda_tol) {
            r.converged = true;
            break;
        }
    }
    return r;
}

BfgsResult damped_newton_minimize(const ScalarFn& f, const GradFn& g, const DomainFn& dom, const RVec& x0,
                                  const BfgsOptions& opt) {
    if (!dom(x0)) throw DomainError("damped_newton_minimize: start outside domain");
    const int n = static_cast<int>(x0.size());
    BfgsResult r;
    r.x = x0;
    r.f = f(x0);
    r.xi = RVec::Zero(n);
    r.lambda = RVec::Zero(n);
    r.f_trace.push_back(r.f);
    RVec gx = g(r.x);
    for (int it = 0; it < opt.max_iter; ++it) {
        if (gx.norm() < opt.grad_tol) {
            r.converged = true;
            break;
        }
        const double h = 1e-6 * std::max(1.0, r.x.lpNorm<Eigen::Infinity>());
        RMat H(n, n);
        for (int i = 0; i < n; ++i) {
            RVec e = RVec::Zero(n);
            e(i) = h;
            H.col(i) = (g(r.x + e) - g(r.x - e)) / (2.0 * h);
        }
        H = 0.5 * (H + H.transpose());
        Eigen::SelfAdjointEigenSolver<RMat> es(H);
        const RVec ev = es.eigenvalues();
        const double cut = 1e-8 * ev.cwiseAbs().maxCoeff();
        const RVec proj = es.eigenvectors().transpose() * gx;
        RVec z = RVec::Zero(n);
        for (int i = 0; i < n; ++i)
            if (std::abs(ev(i)) > cut) z(i) = -proj(i) / std::abs(ev(i));
        const RVec d = es.eigenvectors() * z;
        const double slope = gx.dot(d);
        if (!(slope < 0.0)) break;
        double s = 1.0;
        while (!dom(r.x + s * d) || f(r.x + s * d) > r.f + 0.25 * s * slope) {
            s *= 0.5;
            if (s < 1e-20) break;
        }
        if (s < 1e-20) break;
        const RVec xn = r.x + s * d;
        const RVec gn = g(xn);
        r.xi = xn - r.x;
        r.lambda = gn - gx;
        r.x = xn;
        r.f = f(xn);
        gx = gn;
        r.f_trace.push_back(r.f);
        ++r.iterations;
        if (r.lambda.squaredNorm() < opt.lambda_tol) {
            r.converged = true;
            break;
        }
    }
    return r;
}

namespace {

DualState solve_dual_impl(const std::vector<CMat>& pi, const std::vector<CMat>& w, const BfgsOptions& opt,
                          bool newton) {
    check_pairs(pi, w);
    const int n = static_cast<int>(pi[0].rows()), k = static_cast<int>(pi.size());
    // Precondition with Pi_k = L L^H: work in Z with Y_k = L^{-H} Z_k.
    std::vector<CMat> T(k), pt(k), wt(k);
    for (int i = 0; i < k; ++i) {
        Eigen::LLT<CMat> llt(herm(pi[i]));
        if (llt.info() != Eigen::Success) throw DomainError("solve_dual: Pi_k must be positive definite");
        T[i] = llt.matrixU().solve(CMat::Identity(n, n));
        pt[i] = herm(T[i].adjoint() * pi[i] * T[i]);
        wt[i] = herm(T[i].adjoint() * w[i] * T[i]);
    }
    SliceProblem sp{pt, wt, n, k};
    std::vector<CMat> Y0(k, CMat::Identity(n, n) / std::sqrt(double(n * k)));
    const RVec x0 = pack(Y0);
    if (!sp.domain(x0)) throw DomainError("solve_dual: all W_k are zero");
    ScalarFn f = [&](const RVec& x) { return sp.value(x); };
    GradFn g = [&](const RVec& x) { return sp.grad(x); };
    DomainFn dom = [&](const RVec& x) { return sp.domain(x); };
    const BfgsResult r = newton ? damped_newton_minimize(f, g, dom, x0, opt) : bfgs_minimize(f, g, dom, x0, opt);
    DualState st = finish_dual(sp, r, pi, w);
    for (int i = 0; i < k; ++i) st.psi[i] = herm(T[i] * st.psi[i] * T[i].adjoint());
    st.value = dual_value(st.psi, pi, w);
    st.gamma_e = recover_gamma_e(st.psi, pi);
    return st;
}

}  // namespace

DualState solve_dual(const std::vector<CMat>& pi, const std::vector<CMat>& w, const BfgsOptions& opt) {
    return solve_dual_impl(pi, w, opt, false);
}

DualState solve_dual_newton(const std::vector<CMat>& pi, const std::vector<CMat>& w, const BfgsOptions& opt) {
    return solve_dual_impl(pi, w, opt, true);
}

Stage2Result run_algorithm2(const ChannelSet& ch, const SystemConfig& cfg, const Stage2Options& opt) {
    const int K = ch.k();
    const double c = pi_identity_weight(cfg, ch.n());
    Stage1Options s1 = opt.stage1;
    s1.eps1 = cfg.tol_eps1;

    Stage2Result out;
    double gamma = cfg.gamma_e_init;
    double prev_f = -kInf;
    int global_iter = 0;
    for (int outer = 0; outer < opt.max_outer; ++outer) {
        const Stage1Result r1 = run_algorithm1(ch, cfg, gamma, s1);
        for (std::size_t i = 0; i < r1.state.objective_history.size(); ++i)
            out.records.push_back({++global_iter, r1.state.objective_history[i] - K * std::log2(1.0 + gamma),
                                   r1.state.residual_history[i]});
        out.gamma_trace.push_back(gamma);

        const auto pi = build_pi(r1.sol, c);
        const DualState ds = solve_dual(pi, r1.sol.Wp, opt.bfgs);
        const double oracle = gamma_e_oracle(pi, r1.sol.Wp);
        double g_new = ds.gamma_e;
        if (!(std::abs(g_new - oracle) <= opt.oracle_rel_tol * oracle)) {
            g_new = oracle;
            ++out.oracle_fallbacks;
        }
        g_new = std::min(g_new, gamma);
        const double f = sum_common_rate(r1.sol, ch, cfg.noise_iod) - K * std::log2(1.0 + g_new);
        out.fssr_trace.push_back(f);
        out.dual_trace.push_back(ds.value);
        out.sol = r1.sol;
        // the returned covariances are exactly feasible at their own minimal Gamma_e
        out.sol.gamma_e = std::max(oracle, std::min(g_new, gamma));
        ++out.outer_iterations;

        const bool small_gamma_step = (gamma - g_new) <= cfg.tol_eps2 * gamma;
        const bool small_f_step = std::abs(f - prev_f) < cfg.tol_eps1;
        prev_f = f;
        gamma = g_new;
        if (small_gamma_step || small_f_step) break;
    }
    out.gamma_trace.push_back(out.sol.gamma_e);
    out.sol.gamma_e_trace = out.gamma_trace;
    out.sol.objective_trace = out.fssr_trace;
    return out;
}

}  // namespace secbeam
