#include "secbeam/stage1_mm.hpp"

#include <cmath>

#include "secbeam/hermitian.hpp"
#include "secbeam/secrecy_stats.hpp"

namespace secbeam {

double surrogate_value(double chi, double zeta) {
    if (!(chi > 0.0) || !(zeta > 0.0)) throw DomainError("surrogate_value: arguments must be positive");
    return -chi * zeta / kLn2 + std::log2(chi) + 1.0 / kLn2;
}

RVec update_chi(const BeamformingSolution& sol, const ChannelSet& ch, double noise_iod) {
    const int K = ch.k();
    RVec chi(K);
    for (int k = 0; k < K; ++k) {
        const CVec& h = ch.iod[k];
        double s = noise_iod;
        for (const auto& W : sol.Wp) s += (h.adjoint() * W * h)(0, 0).real();
        chi(k) = 1.0 / s;
    }
    return chi;
}

double sum_common_rate(const BeamformingSolution& sol, const ChannelSet& ch, double noise_iod) {
    const IodSinr s = iod_sinrs(sol, ch, noise_iod);
    double v = 0.0;
    for (int k = 0; k < ch.k(); ++k) v += std::log2(1.0 + s.common(k));
    return v;
}

double p7_objective(const BeamformingSolution& sol, const ChannelSet& ch, double noise_iod) {
    double v = 0.0;
    for (const auto& h : ch.iod) v += std::log2(1.0 + (h.adjoint() * sol.Wc * h)(0, 0).real() / noise_iod);
    return v;
}

ConvexSubproblem::ConvexSubproblem(const ChannelSet& ch, const SystemConfig& cfg, double gamma_e,
                                   SubproblemKind kind)
    : ch_(ch), cfg_(cfg), gamma_e_(gamma_e), kind_(kind), p_ref_(cfg.total_power()) {
    const int N = ch.n(), K = ch.k();
    const int M = static_cast<int>(ch.V0.cols());  // AN dimension, N - K unless AN is disabled
    const double hscale = std::sqrt(p_ref_ / cfg.noise_iod);
    for (int k = 0; k < K; ++k) {
        const CVec h = ch.iod[k] * hscale;
        hh_.push_back(hvec(h * h.adjoint()));
    }
    chi_ = RVec::Ones(K);

    prob_.add_block(N);  // Wc
    for (int k = 0; k < K; ++k) prob_.add_block(N);
    prob_.add_block(M);  // B
    const int nv = prob_.n_vars();
    for (int b = 0; b <= blk_b(); ++b)
        if (prob_.block_dims[b] > 0) prob_.add_psd(b);

    if (std::isfinite(gamma_e_)) {
        const double xi = compute_xi(cfg.secrecy_prob, cfg.n_eves, gamma_e_, cfg.noise_eve, N) / p_ref_;
        for (int k = 0; k < K; ++k) {
            BarrierProblem::Lmi l;
            l.dim = N;
            l.C = xi * CMat::Identity(N, N);
            l.terms.push_back({blk_wp(k), -1.0, CMat(), false});
            l.terms.push_back({blk_wc(), gamma_e_, CMat(), false});
            for (int j = 0; j < K; ++j)
                if (j != k) l.terms.push_back({blk_wp(j), gamma_e_, CMat(), false});
            if (M > 0) l.terms.push_back({blk_b(), gamma_e_, ch.V0, false});
            prob_.lmis.push_back(std::move(l));
        }
    }

    auto trace_row = [&](RVec& a, int block, double coef) {
        const int d = prob_.block_dims[block];
        const int off = prob_.offset(block);
        for (int i = 0; i < d; ++i) a(off + i) += coef;
    };
    if (cfg.sum_power) {
        RVec a = RVec::Zero(nv);
        for (int b = 0; b <= blk_b(); ++b) trace_row(a, b, -1.0);
        prob_.add_linear(a, 1.0);
    } else {
        const int oB = prob_.offset(blk_b());
        for (int n = 0; n < N; ++n) {
            RVec a = RVec::Zero(nv);
            for (int b = 0; b < blk_b(); ++b) a(prob_.offset(b) + n) = -1.0;
            const CVec v = ch.V0.row(n).adjoint();
            a.segment(oB, M * M) = -hvec(v * v.adjoint());
            prob_.add_linear(a, cfg.per_antenna_power[n] / p_ref_);
        }
    }
    for (int k = 0; k < K; ++k) {
        RVec a = RVec::Zero(nv);
        const int n2 = N * N;
        for (int j = 0; j < K; ++j)
            a.segment(prob_.offset(blk_wp(j)), n2) = (j == k ? 1.0 : -cfg.sinr_targets[k]) * hh_[k];
        prob_.add_linear(a, -cfg.sinr_targets[k]);
    }
    if (kind_ == SubproblemKind::P7) {
        const double cap = effective_sigma_p(cfg, ch) / cfg.noise_iod;
        for (int k = 0; k < K; ++k) {
            RVec a = RVec::Zero(nv);
            for (int j = 0; j < K; ++j) a.segment(prob_.offset(blk_wp(j)), N * N) = -hh_[k];
            prob_.add_linear(a, cap - 1.0);
        }
    }
    rebuild_objective();
}

void ConvexSubproblem::set_chi(const RVec& chi_physical) {
    chi_ = chi_physical * cfg_.noise_iod;
    rebuild_objective();
}

void ConvexSubproblem::rebuild_objective() {
    const int N = ch_.n(), K = ch_.k();
    const int nv = prob_.n_vars();
    const int n2 = N * N;
    prob_.c = RVec::Zero(nv);
    prob_.D.resize(0, nv);
    prob_.e.resize(0);
    prob_.w.resize(0);
    constant_ = 0.0;
    if (kind_ == SubproblemKind::P7) {
        for (int k = 0; k < K; ++k) {
            RVec d = RVec::Zero(nv);
            d.segment(prob_.offset(blk_wc()), n2) = hh_[k];
            prob_.add_log(d, 1.0, 1.0 / kLn2);
        }
        return;
    }
    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < K; ++i) prob_.c.segment(prob_.offset(blk_wp(i)), n2) -= (chi_(k) / kLn2) * hh_[k];
        RVec d = RVec::Zero(nv);
        d.segment(prob_.offset(blk_wc()), n2) = hh_[k];
        for (int i = 0; i < K; ++i) d.segment(prob_.offset(blk_wp(i)), n2) = hh_[k];
        prob_.add_log(d, 1.0, 1.0 / kLn2);
        constant_ += -chi_(k) / kLn2 + std::log2(chi_(k)) + 1.0 / kLn2;
    }
}

double ConvexSubproblem::objective(const RVec& x) const { return objective_value(prob_, x) + constant_; }

RVec ConvexSubproblem::default_start() const { return RVec::Zero(prob_.n_vars()); }

RVec ConvexSubproblem::to_vars(const BeamformingSolution& sol) const {
    RVec x(prob_.n_vars());
    const int N = ch_.n(), K = ch_.k();
    const int M = static_cast<int>(ch_.V0.cols());
    x.segment(prob_.offset(blk_wc()), N * N) = hvec(sol.Wc / p_ref_);
    for (int k = 0; k < K; ++k) x.segment(prob_.offset(blk_wp(k)), N * N) = hvec(sol.Wp[k] / p_ref_);
    x.segment(prob_.offset(blk_b()), M * M) = hvec(sol.B / p_ref_);
    return x;
}

BeamformingSolution ConvexSubproblem::to_solution(const RVec& x) const {
    const int N = ch_.n(), K = ch_.k();
    const int M = static_cast<int>(ch_.V0.cols());
    BeamformingSolution s = zero_solution(ch_);
    s.Wc = p_ref_ * hmat(x.segment(prob_.offset(blk_wc()), N * N), N);
    for (int k = 0; k < K; ++k) s.Wp[k] = p_ref_ * hmat(x.segment(prob_.offset(blk_wp(k)), N * N), N);
    s.B = p_ref_ * hmat(x.segment(prob_.offset(blk_b()), M * M), M);
    s.gamma_e = gamma_e_;
    return s;
}

BarrierResult solve_subproblem(const ConvexSubproblem& sub, const RVec& start, const Stage1Options& opt) {
    return opt.solver(sub.problem(), start, opt.barrier);
}

Stage1Result run_algorithm1(const ChannelSet& ch, const SystemConfig& cfg, double gamma_e,
                            const Stage1Options& opt) {
    ConvexSubproblem sub(ch, cfg, gamma_e, SubproblemKind::MM);
    const int N = ch.n();
    const int M = static_cast<int>(ch.V0.cols());

    BeamformingSolution init = zero_solution(ch);
    init.Wc = CMat::Identity(N, N);
    for (auto& W : init.Wp) W = CMat::Identity(N, N);
    init.B = CMat::Identity(M, M);

    MMState st;
    st.chi = update_chi(init, ch, cfg.noise_iod);
    const RVec start = phase1(sub.problem(), sub.default_start(), opt.barrier);

    double prev = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < opt.max_iter; ++r) {
        sub.set_chi(st.chi);
        const BarrierResult res = solve_subproblem(sub, start, opt);
        st.sol = sub.to_solution(res.x);
        const double f = sum_common_rate(st.sol, ch, cfg.noise_iod);
        st.objective_history.push_back(f);
        st.surrogate_history.push_back(sub.objective(res.x));
        st.residual_history.push_back(res.kkt_residual);
        st.newton_iterations += res.newton_iters;
        st.iterations = r + 1;
        st.chi = update_chi(st.sol, ch, cfg.noise_iod);
        if (std::abs(f - prev) < opt.eps1) break;
        prev = f;
    }
    st.sol.objective_trace = st.objective_history;
    for (double& v : st.sol.objective_trace)
        v -= std::isfinite(gamma_e) ? ch.k() * std::log2(1.0 + gamma_e) : 0.0;
    Stage1Result out;
    out.sol = st.sol;
    out.state = std::move(st);
    return out;
}

P7Result solve_p7_reference(const ChannelSet& ch, const SystemConfig& cfg, double gamma_e,
                            const Stage1Options& opt) {
    ConvexSubproblem sub(ch, cfg, gamma_e, SubproblemKind::P7);
    const BarrierResult res = solve_subproblem(sub, sub.default_start(), opt);
    P7Result out;
    out.sol = sub.to_solution(res.x);
    out.objective = p7_objective(out.sol, ch, cfg.noise_iod);
    out.kkt_residual = res.kkt_residual;
    return out;
}

}  // namespace secbeam
