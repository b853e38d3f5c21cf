#include "secbeam/minimax_barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "secbeam/barrier_sdp.hpp"
#include "secbeam/hermitian.hpp"
#include "secbeam/secrecy_stats.hpp"
#include "secbeam/stage1_mm.hpp"

namespace secbeam {

namespace {

// Powers in units of 1% of the budget. At unit 1 the private-beam gradient sits on a
// roundoff floor near 1e-6 once varsigma ~ 1e8; this balances it against the LMI rows.
constexpr double kPowerUnit = 0.01;

int n_lambda(const MinimaxData& d) { return d.sum_power ? 1 : d.n; }

CMat power_mat(const MinimaxData& d, int i) {
    if (d.sum_power) return CMat::Identity(d.n, d.n);
    CMat E = CMat::Zero(d.n, d.n);
    E(i, i) = 1.0;
    return E;
}

struct Layout {
    int n2 = 0, nb2 = 0;
    int wc = 0, w0 = 0, b = 0, nx = 0;
    int d0 = 0, lam = 0, mu = 0, ups = 0, total = 0;
};

Layout layout(const MinimaxData& d) {
    Layout L;
    L.n2 = d.n * d.n;
    L.nb2 = (d.n - d.k) * (d.n - d.k);
    L.wc = 0;
    L.w0 = L.n2;
    L.b = L.w0 + d.k * L.n2;
    L.nx = L.b + L.nb2;
    L.d0 = L.nx;
    L.lam = L.d0 + d.k * L.n2;
    L.mu = L.lam + n_lambda(d);
    L.ups = L.mu + d.k;
    L.total = L.ups + d.k;
    return L;
}

bool logdet_pd(const CMat& X, double& ld) {
    Eigen::LLT<CMat> llt(herm(X));
    if (llt.info() != Eigen::Success) return false;
    ld = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double di = llt.matrixLLT()(i, i).real();
        if (!(di > 0.0)) return false;
        ld += 2.0 * std::log(di);
    }
    return std::isfinite(ld);
}

CMat inv_pd(const CMat& X) {
    Eigen::LLT<CMat> llt(herm(X));
    if (llt.info() != Eigen::Success) throw DomainError("minimax: matrix is not positive definite");
    return llt.solve(CMat::Identity(X.rows(), X.cols()));
}

double quad(const CVec& h, const CMat& W) { return (h.adjoint() * W * h)(0, 0).real(); }

// hvec(B) -> hvec(V0 B V0^H)
RMat embed_map(const CMat& V0) {
    const int n = static_cast<int>(V0.rows()), m = static_cast<int>(V0.cols());
    RMat T(n * n, m * m);
    for (int j = 0; j < m * m; ++j) T.col(j) = hvec(V0 * hbasis(j, m) * V0.adjoint());
    return T;
}

CMat lmi_matrix(const MinimaxState& s, const MinimaxData& d, int k) {
    CMat S = d.xi * CMat::Identity(d.n, d.n) - s.W[k] + d.gamma_e * (s.Wc + d.V0 * s.B * d.V0.adjoint());
    for (int j = 0; j < d.k; ++j)
        if (j != k) S += d.gamma_e * s.W[j];
    return S;
}

}  // namespace

MinimaxData make_minimax_data(const ChannelSet& ch, const SystemConfig& cfg, double gamma_e) {
    MinimaxData d;
    d.n = ch.n();
    d.k = ch.k();
    d.p_ref = cfg.total_power() * kPowerUnit;
    d.noise = cfg.noise_iod;
    d.sum_power = cfg.sum_power;
    const double hs = std::sqrt(d.p_ref / cfg.noise_iod);
    for (const auto& h : ch.iod) {
        d.h.push_back(h * hs);
        d.hh.push_back(hvec(d.h.back() * d.h.back().adjoint()));
    }
    d.V0 = ch.V0;
    if (d.sum_power) {
        d.p = RVec::Constant(1, cfg.total_power() / d.p_ref);
    } else {
        d.p.resize(d.n);
        for (int i = 0; i < d.n; ++i) d.p(i) = cfg.per_antenna_power[i] / d.p_ref;
    }
    d.sinr.resize(d.k);
    for (int k = 0; k < d.k; ++k) d.sinr(k) = cfg.sinr_targets[k];
    d.gamma_e = gamma_e;
    d.xi = compute_xi(cfg.secrecy_prob, cfg.n_eves, gamma_e, cfg.noise_eve, d.n) / d.p_ref;
    d.sigma_p = effective_sigma_p(cfg, ch) / cfg.noise_iod;
    return d;
}

DualMatrices build_dual_matrices(const std::vector<CMat>& D, const RVec& lambda, const RVec& mu, const RVec& upsilon,
                                 const MinimaxData& d) {
    if (static_cast<int>(D.size()) != d.k || lambda.size() != n_lambda(d) || mu.size() != d.k ||
        upsilon.size() != d.k)
        throw DomainError("build_dual_matrices: dimension mismatch");
    DualMatrices m;
    CMat lam = CMat::Zero(d.n, d.n);
    for (int i = 0; i < lambda.size(); ++i) lam += lambda(i) * power_mat(d, i);
    CMat sumD = CMat::Zero(d.n, d.n);
    for (const auto& Dk : D) sumD += Dk;
    m.Sigma = lam - d.gamma_e * sumD;
    CMat ups = CMat::Zero(d.n, d.n);
    for (int j = 0; j < d.k; ++j) ups += upsilon(j) * d.h[j] * d.h[j].adjoint();
    for (int k = 0; k < d.k; ++k) {
        CMat O = D[k] + lam + ups - mu(k) * d.h[k] * d.h[k].adjoint();
        for (int j = 0; j < d.k; ++j)
            if (j != k) O += mu(j) * d.sinr(j) * d.h[j] * d.h[j].adjoint() - d.gamma_e * D[j];
        m.Omega.push_back(herm(O));
    }
    m.Phi = herm(d.V0.adjoint() * m.Sigma * d.V0);
    m.g.resize(lambda.size() + 2 * d.k);
    m.g.head(lambda.size()) = d.p;
    for (int k = 0; k < d.k; ++k) {
        m.g(lambda.size() + k) = -d.sinr(k);              // -d, d = Gamma_p sigma_u^2
        m.g(lambda.size() + d.k + k) = -(1.0 - d.sigma_p);  // -b, b = sigma_u^2 - Sigma_p
    }
    return m;
}

double log_det_ratio(const CMat& S, double omega, const std::vector<CVec>& h) {
    double base;
    if (!logdet_pd(S, base)) throw DomainError("log_det_ratio: S must be positive definite");
    double v = 0.0;
    for (const auto& hk : h) {
        double ld;
        if (!logdet_pd(S + omega * hk * hk.adjoint(), ld)) throw DomainError("log_det_ratio: not positive definite");
        v += (ld - base) / kLn2;
    }
    return v;
}

double barrier_objective(const ScaledPoint& s, const CMat& S_tilde, const std::vector<CVec>& h, double varsigma) {
    if (!(s.omega > 0.0)) throw DomainError("barrier_objective: omega must be positive");
    double bar = std::log2(s.omega);
    for (const auto& W : s.W_hat) {
        const double t = W.trace().real();
        if (!(t > 0.0)) throw DomainError("barrier_objective: Tr(W_hat) must be positive");
        bar += std::log2(t);
    }
    const double tb = s.B_hat.trace().real();
    if (!(tb > 0.0)) throw DomainError("barrier_objective: Tr(B_hat) must be positive");
    bar += std::log2(tb);
    for (const auto& D : s.D_tilde) {
        const double t = D.trace().real();
        if (!(t > 0.0)) throw DomainError("barrier_objective: Tr(D_tilde) must be positive");
        bar -= std::log2(t);
    }
    for (int i = 0; i < s.eta.size(); ++i) {
        if (!(s.eta(i) > 0.0)) throw DomainError("barrier_objective: eta must be positive");
        bar -= std::log2(s.eta(i));
    }
    return log_det_ratio(S_tilde, s.omega, h) + bar / varsigma;
}

double omega_row_approx(const CMat& S, double omega, double tau1, const CMat& dS, double domega, double dtau1,
                        const std::vector<CVec>& h, double varsigma) {
    const double c = varsigma * omega * omega;
    double lhs = domega + c * dtau1, rhs = omega - c * tau1;
    for (const auto& hk : h) {
        const CMat F = inv_pd(S + omega * hk * hk.adjoint());
        const CVec Fh = F * hk;
        const double hFh = (hk.adjoint() * Fh)(0, 0).real();
        lhs += c * (Fh.adjoint() * dS * Fh)(0, 0).real() + c * hFh * domega * hFh;
        rhs += c * hFh;
    }
    return lhs - rhs;
}

double omega_row_exact(const CMat& S, double omega, double tau1, const CMat& dS, double domega, double dtau1,
                       const std::vector<CVec>& h, double varsigma) {
    double v = 1.0 / (omega + domega) - varsigma * (tau1 + dtau1);
    for (const auto& hk : h) {
        const CMat F = inv_pd(S + omega * hk * hk.adjoint() + dS + domega * hk * hk.adjoint());
        v += varsigma * (hk.adjoint() * F * hk)(0, 0).real();
    }
    return -omega * omega * v;
}

UnscaledPoint scale_down(const UnscaledPoint& u, double z) {
    if (!(z > 0.0)) throw DomainError("scale_down: z must be positive");
    UnscaledPoint s = u;
    s.omega /= z;
    for (auto& W : s.W) W /= z;
    s.B /= z;
    for (auto& D : s.D) D /= z;
    s.eta /= z;
    s.S /= z;
    return s;
}

double budget_lhs(double omega, const std::vector<CMat>& W, const CMat& B, const DualMatrices& dm) {
    double v = omega + (dm.Phi * B).trace().real();
    for (std::size_t k = 0; k < W.size(); ++k) v += (dm.Omega[k] * W[k]).trace().real();
    return v;
}

MinimaxState feasible_state(const MinimaxData& d, const ChannelSet& ch, const SystemConfig& cfg, double varsigma) {
    const ConvexSubproblem sub(ch, cfg, d.gamma_e, SubproblemKind::P7);
    RVec x;
    try {
        x = phase1(sub.problem(), sub.default_start());
    } catch (const SolverError&) {
        return initial_state(d, varsigma);
    }
    const BeamformingSolution sol = sub.to_solution(x);
    MinimaxState s;
    s.varsigma = varsigma;
    s.Wc = herm(sol.Wc) / d.p_ref;
    for (const auto& W : sol.Wp) s.W.push_back(herm(W) / d.p_ref);
    s.B = herm(sol.B) / d.p_ref;
    try {
        for (int k = 0; k < d.k; ++k) s.D.push_back(inv_pd(varsigma * lmi_matrix(s, d, k)));
    } catch (const DomainError&) {
        return initial_state(d, varsigma);
    }
    CMat T = s.Wc + d.V0 * s.B * d.V0.adjoint();
    for (const auto& W : s.W) T += W;
    s.lambda.resize(n_lambda(d));
    for (int i = 0; i < n_lambda(d); ++i)
        s.lambda(i) = 1.0 / (varsigma * (d.p(i) - (power_mat(d, i) * T).trace().real()));
    s.mu.resize(d.k);
    s.upsilon.resize(d.k);
    for (int k = 0; k < d.k; ++k) {
        double interf = 0.0, all = 0.0;
        for (int j = 0; j < d.k; ++j) {
            const double q = quad(d.h[k], s.W[j]);
            all += q;
            if (j != k) interf += q;
        }
        s.mu(k) = 1.0 / (varsigma * (quad(d.h[k], s.W[k]) - d.sinr(k) * (interf + 1.0)));
        s.upsilon(k) = 1.0 / (varsigma * (d.sigma_p - 1.0 - all));
    }
    if (!in_domain(s)) return initial_state(d, varsigma);
    return s;
}

int saddle_dim(const MinimaxData& d) { return layout(d).total; }

int barrier_terms(const MinimaxData& d) { return d.n + d.k * d.n + (d.n - d.k) + d.k * d.n + n_lambda(d) + 2 * d.k; }

MinimaxState initial_state(const MinimaxData& d, double varsigma) {
    MinimaxState s;
    s.varsigma = varsigma;
    s.Wc = CMat::Identity(d.n, d.n) / d.n;
    s.W.assign(d.k, CMat::Identity(d.n, d.n));
    s.B = CMat::Identity(d.n - d.k, d.n - d.k);
    s.D.assign(d.k, CMat::Identity(d.n, d.n));
    s.lambda = RVec::Ones(n_lambda(d));
    s.mu = RVec::Ones(d.k);
    s.upsilon = RVec::Ones(d.k);
    // bring both budgets to the normalized total power
    const double px = 1.0 + d.k * d.n + (d.n - d.k);
    s.Wc /= px;
    for (auto& W : s.W) W /= px;
    s.B /= px;
    const DualMatrices m = build_dual_matrices(s.D, s.lambda, s.mu, s.upsilon, d);
    RVec eta(m.g.size());
    eta << s.lambda, s.mu, s.upsilon;
    const double py = d.xi * d.k * d.n + m.g.dot(eta);
    if (py > 0.0) {
        for (auto& D : s.D) D /= py;
        s.lambda /= py;
        s.mu /= py;
        s.upsilon /= py;
    }
    return s;
}

RVec pack_state(const MinimaxState& s) {
    std::vector<RVec> parts{hvec(s.Wc)};
    for (const auto& W : s.W) parts.push_back(hvec(W));
    parts.push_back(hvec(s.B));
    for (const auto& D : s.D) parts.push_back(hvec(D));
    parts.push_back(s.lambda);
    parts.push_back(s.mu);
    parts.push_back(s.upsilon);
    Eigen::Index n = 0;
    for (const auto& p : parts) n += p.size();
    RVec z(n);
    n = 0;
    for (const auto& p : parts) z.segment(n, p.size()) = p, n += p.size();
    return z;
}

MinimaxState unpack_state(const RVec& z, const MinimaxData& d, double varsigma) {
    const Layout L = layout(d);
    if (z.size() != L.total) throw DomainError("unpack_state: size mismatch");
    MinimaxState s;
    s.varsigma = varsigma;
    s.Wc = hmat(z.segment(L.wc, L.n2), d.n);
    for (int k = 0; k < d.k; ++k) s.W.push_back(hmat(z.segment(L.w0 + k * L.n2, L.n2), d.n));
    s.B = hmat(z.segment(L.b, L.nb2), d.n - d.k);
    for (int k = 0; k < d.k; ++k) s.D.push_back(hmat(z.segment(L.d0 + k * L.n2, L.n2), d.n));
    s.lambda = z.segment(L.lam, n_lambda(d));
    s.mu = z.segment(L.mu, d.k);
    s.upsilon = z.segment(L.ups, d.k);
    return s;
}

bool in_domain(const MinimaxState& s) {
    double ld;
    if (!logdet_pd(s.Wc, ld) || !logdet_pd(s.B, ld)) return false;
    for (const auto& W : s.W)
        if (!logdet_pd(W, ld)) return false;
    for (const auto& D : s.D)
        if (!logdet_pd(D, ld)) return false;
    return (s.lambda.array() > 0.0).all() && (s.mu.array() > 0.0).all() && (s.upsilon.array() > 0.0).all();
}

double saddle_lagrangian(const MinimaxState& s, const MinimaxData& d) {
    const DualMatrices m = build_dual_matrices(s.D, s.lambda, s.mu, s.upsilon, d);
    double L = 0.0;
    for (const auto& h : d.h) {
        const double q = quad(h, s.Wc);
        if (!(1.0 + q > 0.0)) throw DomainError("saddle_lagrangian: outside domain");
        L += std::log2(1.0 + q);
    }
    L -= (m.Sigma * s.Wc).trace().real() + (m.Phi * s.B).trace().real();
    for (int k = 0; k < d.k; ++k) L -= (m.Omega[k] * s.W[k]).trace().real();
    for (const auto& D : s.D) L += d.xi * D.trace().real();
    RVec eta(m.g.size());
    eta << s.lambda, s.mu, s.upsilon;
    L += m.g.dot(eta);
    double bar = 0.0, ld;
    auto add = [&](const CMat& X, double sign) {
        if (!logdet_pd(X, ld)) throw DomainError("saddle_lagrangian: outside domain");
        bar += sign * ld;
    };
    add(s.Wc, 1.0);
    for (const auto& W : s.W) add(W, 1.0);
    add(s.B, 1.0);
    for (const auto& D : s.D) add(D, -1.0);
    if (!((eta.array() > 0.0).all())) throw DomainError("saddle_lagrangian: outside domain");
    bar -= eta.array().log().sum();
    return L + bar / s.varsigma;
}

RVec kkt_residual(const MinimaxState& s, const MinimaxData& d) {
    const Layout L = layout(d);
    const DualMatrices m = build_dual_matrices(s.D, s.lambda, s.mu, s.upsilon, d);
    const double is = 1.0 / s.varsigma;
    RVec r(L.total);

    CMat G = -m.Sigma + is * inv_pd(s.Wc);
    for (const auto& h : d.h) G += h * h.adjoint() / (kLn2 * (1.0 + quad(h, s.Wc)));
    r.segment(L.wc, L.n2) = hvec(G);
    for (int k = 0; k < d.k; ++k) r.segment(L.w0 + k * L.n2, L.n2) = hvec(-m.Omega[k] + is * inv_pd(s.W[k]));
    r.segment(L.b, L.nb2) = hvec(-m.Phi + is * inv_pd(s.B));

    for (int k = 0; k < d.k; ++k) r.segment(L.d0 + k * L.n2, L.n2) = hvec(lmi_matrix(s, d, k) - is * inv_pd(s.D[k]));
    CMat T = s.Wc + d.V0 * s.B * d.V0.adjoint();
    for (const auto& W : s.W) T += W;
    for (int i = 0; i < n_lambda(d); ++i)
        r(L.lam + i) = d.p(i) - (power_mat(d, i) * T).trace().real() - is / s.lambda(i);
    for (int k = 0; k < d.k; ++k) {
        double interf = 0.0, all = 0.0;
        for (int j = 0; j < d.k; ++j) {
            const double q = quad(d.h[k], s.W[j]);
            all += q;
            if (j != k) interf += q;
        }
        r(L.mu + k) = quad(d.h[k], s.W[k]) - d.sinr(k) * (interf + 1.0) - is / s.mu(k);
        r(L.ups + k) = d.sigma_p - 1.0 - all - is / s.upsilon(k);
    }
    return r;
}

RMat saddle_jacobian(const MinimaxState& s, const MinimaxData& d) {
    const Layout L = layout(d);
    const double is = 1.0 / s.varsigma;
    const int nb = d.n - d.k;
    RMat J = RMat::Zero(L.total, L.total);

    // max-player block (negative definite)
    for (const auto& h : d.h) {
        const double a = 1.0 + quad(h, s.Wc);
        const RVec hh = hvec(h * h.adjoint());
        J.block(L.wc, L.wc, L.n2, L.n2).noalias() -= (1.0 / (kLn2 * a * a)) * hh * hh.transpose();
    }
    add_congruence_block(inv_pd(s.Wc), -is, J.block(L.wc, L.wc, L.n2, L.n2));
    for (int k = 0; k < d.k; ++k)
        add_congruence_block(inv_pd(s.W[k]), -is, J.block(L.w0 + k * L.n2, L.w0 + k * L.n2, L.n2, L.n2));
    add_congruence_block(inv_pd(s.B), -is, J.block(L.b, L.b, L.nb2, L.nb2));

    // min-player block (positive definite)
    for (int k = 0; k < d.k; ++k)
        add_congruence_block(inv_pd(s.D[k]), is, J.block(L.d0 + k * L.n2, L.d0 + k * L.n2, L.n2, L.n2));
    for (int i = 0; i < n_lambda(d); ++i) J(L.lam + i, L.lam + i) = is / (s.lambda(i) * s.lambda(i));
    for (int k = 0; k < d.k; ++k) {
        J(L.mu + k, L.mu + k) = is / (s.mu(k) * s.mu(k));
        J(L.ups + k, L.ups + k) = is / (s.upsilon(k) * s.upsilon(k));
    }

    // coupling: A = d(grad_y)/dx
    RMat A = RMat::Zero(L.total - L.nx, L.nx);
    const RMat I2 = RMat::Identity(L.n2, L.n2);
    const RMat T = embed_map(d.V0);
    const int y0 = L.nx;
    for (int k = 0; k < d.k; ++k) {
        const int row = L.d0 - y0 + k * L.n2;
        A.block(row, L.wc, L.n2, L.n2) = d.gamma_e * I2;
        for (int j = 0; j < d.k; ++j)
            A.block(row, L.w0 + j * L.n2, L.n2, L.n2) = (j == k ? -1.0 : d.gamma_e) * I2;
        A.block(row, L.b, L.n2, L.nb2) = d.gamma_e * T;
    }
    for (int i = 0; i < n_lambda(d); ++i) {
        const int row = L.lam - y0 + i;
        const CMat E = power_mat(d, i);
        const RVec e = hvec(E);
        A.block(row, L.wc, 1, L.n2) = -e.transpose();
        for (int j = 0; j < d.k; ++j) A.block(row, L.w0 + j * L.n2, 1, L.n2) = -e.transpose();
        A.block(row, L.b, 1, L.nb2) = -hvec(CMat(d.V0.adjoint() * E * d.V0)).transpose();
    }
    for (int k = 0; k < d.k; ++k) {
        for (int j = 0; j < d.k; ++j) {
            A.block(L.mu - y0 + k, L.w0 + j * L.n2, 1, L.n2) = (j == k ? 1.0 : -d.sinr(k)) * d.hh[k].transpose();
            A.block(L.ups - y0 + k, L.w0 + j * L.n2, 1, L.n2) = -d.hh[k].transpose();
        }
    }
    (void)nb;
    J.block(y0, 0, L.total - y0, L.nx) = A;
    J.block(0, y0, L.nx, L.total - y0) = A.transpose();
    return J;
}

RVec newton_step(const MinimaxState& s, const MinimaxData& d) {
    const RVec r = kkt_residual(s, d);
    RMat J = saddle_jacobian(s, d);
    auto attempt = [&](const RMat& M, RVec& dir) {
        Eigen::PartialPivLU<RMat> lu(M);
        dir = lu.solve(-r);
        if (!dir.allFinite()) return false;
        return (M * dir + r).norm() <= 1e-6 * std::max(1.0, r.norm());
    };
    RVec dir;
    if (attempt(J, dir)) return dir;
    const Layout L = layout(d);
    const double shift = 1e-10 * std::max(1.0, J.diagonal().cwiseAbs().maxCoeff());
    for (int i = 0; i < L.nx; ++i) J(i, i) -= shift;
    for (int i = L.nx; i < L.total; ++i) J(i, i) += shift;
    if (attempt(J, dir)) return dir;
    throw SolverError(SolverError::Kind::NumericalBreakdown, "minimax: singular Newton system after regularized retry");
}

double line_search(const MinimaxState& s, const RVec& dir, const MinimaxData& d, double alpha, double beta) {
    const RVec z = pack_state(s);
    const double r0 = kkt_residual(s, d).norm();
    double step = 1.0;
    while (step >= 1e-12) {
        const MinimaxState t = unpack_state(z + step * dir, d, s.varsigma);
        if (in_domain(t) && kkt_residual(t, d).norm() <= (1.0 - alpha * step) * r0) return step;
        step *= beta;
    }
    throw SolverError(SolverError::Kind::Stall, "minimax: line search step underflow");
}

namespace {

bool p7_feasible(const BeamformingSolution& sol, const ChannelSet& ch, const SystemConfig& cfg, double tol) {
    if (power_violation(sol, cfg) > tol) return false;
    if (!private_targets_met(sol, ch, cfg, tol)) return false;
    const double cap = effective_sigma_p(cfg, ch);
    for (const auto& h : ch.iod) {
        double s = cfg.noise_iod;
        for (const auto& W : sol.Wp) s += quad(h, W);
        if (s > cap * (1.0 + tol)) return false;
    }
    const double xi = compute_xi(cfg.secrecy_prob, cfg.n_eves, sol.gamma_e, cfg.noise_eve, sol.n());
    const double scale = cfg.total_power();
    for (int k = 0; k < sol.k(); ++k) {
        std::vector<CMat> others{sol.Wc};
        for (int j = 0; j < sol.k(); ++j)
            if (j != k) others.push_back(sol.Wp[j]);
        if (lmi_margin(sol.Wp[k], others, sol.B, sol.V0, sol.gamma_e, xi) < -tol * scale) return false;
    }
    return true;
}

BeamformingSolution to_physical(const MinimaxState& s, const MinimaxData& d, const ChannelSet& ch, const CMat& Wc) {
    BeamformingSolution sol = zero_solution(ch);
    sol.Wc = Wc;
    for (int k = 0; k < d.k; ++k) sol.Wp[k] = d.p_ref * herm(s.W[k]);
    sol.B = d.p_ref * herm(s.B);
    sol.gamma_e = d.gamma_e;
    return sol;
}

}  // namespace

std::vector<WcCandidate> recover_wc(const MinimaxState& s, const MinimaxData& d, const ChannelSet& ch,
                                    const SystemConfig& cfg) {
    std::vector<WcCandidate> out;
    auto evaluate = [&](const CMat& Wc, int source) {
        WcCandidate c;
        c.Wc = Wc;
        c.source = source;
        const BeamformingSolution sol = to_physical(s, d, ch, Wc);
        c.objective = p7_objective(sol, ch, cfg.noise_iod);
        c.feasible = p7_feasible(sol, ch, cfg, 1e-6);
        out.push_back(c);
    };
    evaluate(d.p_ref * herm(s.Wc), -1);
    const DualMatrices m = build_dual_matrices(s.D, s.lambda, s.mu, s.upsilon, d);
    Eigen::LLT<CMat> llt(herm(m.Sigma));
    if (llt.info() != Eigen::Success) return out;
    for (int k = 0; k < d.k; ++k) {
        const CVec sh = llt.solve(d.h[k]);
        const double a = (d.h[k].adjoint() * sh)(0, 0).real();
        if (!(a > 0.0)) continue;
        const double omega = quad(d.h[k], s.Wc) / a;
        evaluate(d.p_ref * herm(sh * sh.adjoint() * (omega / a)), k);
    }
    return out;
}

MinimaxOptions minimax_options_from(const SystemConfig& cfg) {
    MinimaxOptions o;
    o.varsigma0 = cfg.barrier_init;
    o.growth = cfg.barrier_growth;
    o.eps3 = cfg.tol_eps3;
    o.ls_alpha = cfg.ls_alpha;
    o.ls_beta = cfg.ls_beta;
    return o;
}

MinimaxResult run_algorithm3(const ChannelSet& ch, const SystemConfig& cfg, double gamma_e, const MinimaxOptions& opt) {
    const MinimaxData d = make_minimax_data(ch, cfg, gamma_e);
    MinimaxResult res;
    MinimaxState s = opt.feasible_start ? feasible_state(d, ch, cfg, opt.varsigma0) : initial_state(d, opt.varsigma0);
    const int m = barrier_terms(d);
    double r = 0.0;
    while (true) {
        while (true) {
            r = kkt_residual(s, d).norm();
            double obj = 0.0;
            for (const auto& h : d.h) obj += std::log2(1.0 + quad(h, s.Wc));
            res.records.push_back({res.newton_iterations, obj, r});
            if (r < opt.eps3) break;
            if (res.newton_iterations >= opt.max_newton)
                throw SolverError(SolverError::Kind::MaxIterations, "minimax: Newton iteration limit reached");
            const RVec dir = newton_step(s, d);
            const double step = line_search(s, dir, d, opt.ls_alpha, opt.ls_beta);
            s = unpack_state(pack_state(s) + step * dir, d, s.varsigma);
            ++res.newton_iterations;
        }
        ++res.outer_iterations;
        if (m / s.varsigma < opt.gap_tol) break;
        s.varsigma *= opt.growth;
    }
    res.kkt_residual = r;
    res.state = s;

    res.candidates = recover_wc(s, d, ch, cfg);
    const WcCandidate* best = nullptr;
    for (const auto& c : res.candidates)
        if (c.feasible && (!best || c.objective > best->objective)) best = &c;
    if (!best) best = &res.candidates.front();
    res.sol = to_physical(s, d, ch, best->Wc);
    res.objective = best->objective;

    MinimaxState no_barrier = s;
    no_barrier.varsigma = std::numeric_limits<double>::infinity();
    double lag = 0.0;
    {
        const DualMatrices dm = build_dual_matrices(s.D, s.lambda, s.mu, s.upsilon, d);
        for (const auto& h : d.h) lag += std::log2(1.0 + quad(h, s.Wc));
        lag -= (dm.Sigma * s.Wc).trace().real() + (dm.Phi * s.B).trace().real();
        for (int k = 0; k < d.k; ++k) lag -= (dm.Omega[k] * s.W[k]).trace().real();
        for (const auto& D : s.D) lag += d.xi * D.trace().real();
        RVec eta(dm.g.size());
        eta << s.lambda, s.mu, s.upsilon;
        lag += dm.g.dot(eta);
    }
    double primal = 0.0;
    for (const auto& h : d.h) primal += std::log2(1.0 + quad(h, s.Wc));
    res.duality_gap = std::abs(lag - primal);
    return res;
}

}  // namespace secbeam
