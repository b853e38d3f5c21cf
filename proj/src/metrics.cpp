#include "secbeam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "secbeam/hermitian.hpp"
#include "secbeam/secrecy_stats.hpp"

namespace secbeam {

namespace {

double quad(const CVec& h, const CMat& W) { return (h.adjoint() * W * h)(0, 0).real(); }

}  // namespace

BeamformingSolution zero_solution(const ChannelSet& ch) {
    BeamformingSolution s;
    const int N = ch.n(), K = ch.k();
    s.Wc = CMat::Zero(N, N);
    s.Wp.assign(K, CMat::Zero(N, N));
    s.B = CMat::Zero(ch.V0.cols(), ch.V0.cols());
    s.V0 = ch.V0;
    return s;
}

IodSinr iod_sinrs(const BeamformingSolution& sol, const ChannelSet& ch, double noise_iod) {
    const int K = ch.k();
    if (sol.k() != K || sol.n() != ch.n()) throw DomainError("iod_sinrs: dimension mismatch");
    const CMat an = sol.an_covariance();
    IodSinr r{RVec(K), RVec(K)};
    for (int k = 0; k < K; ++k) {
        const CVec& h = ch.iod[k];
        RVec p(K);
        double sum_priv = 0.0;
        for (int i = 0; i < K; ++i) sum_priv += (p(i) = quad(h, sol.Wp[i]));
        const double base = quad(h, an) + noise_iod;
        r.common(k) = std::max(0.0, quad(h, sol.Wc)) / (sum_priv + base);
        r.priv(k) = std::max(0.0, p(k)) / (sum_priv - p(k) + base);
    }
    return r;
}

EveSinr eve_sinrs(const BeamformingSolution& sol, const std::vector<CVec>& eves, double noise_eve) {
    const int Q = static_cast<int>(eves.size()), K = sol.k();
    const CMat an = sol.an_covariance();
    EveSinr r{RVec(Q), RMat(Q, K)};
    for (int q = 0; q < Q; ++q) {
        const CVec& h = eves[q];
        if (h.size() != sol.n()) throw DomainError("eve_sinrs: dimension mismatch");
        const double c = std::max(0.0, quad(h, sol.Wc));
        RVec p(K);
        double sum_priv = 0.0;
        for (int i = 0; i < K; ++i) sum_priv += (p(i) = std::max(0.0, quad(h, sol.Wp[i])));
        const double base = std::max(0.0, quad(h, an)) + noise_eve;
        r.common(q) = c / (sum_priv + base);
        for (int k = 0; k < K; ++k) r.priv(q, k) = p(k) / (c + sum_priv - p(k) + base);
    }
    return r;
}

double fssr_objective(const BeamformingSolution& sol, const ChannelSet& ch, double noise_iod, double gamma_e) {
    if (gamma_e < 0.0) throw DomainError("fssr_objective: gamma_e must be non-negative");
    const IodSinr s = iod_sinrs(sol, ch, noise_iod);
    double v = 0.0;
    for (int k = 0; k < ch.k(); ++k) v += std::log2(1.0 + s.common(k));
    return v - ch.k() * std::log2(1.0 + gamma_e);
}

RVec antenna_powers(const BeamformingSolution& sol) {
    CMat T = sol.Wc + sol.an_covariance();
    for (const auto& W : sol.Wp) T += W;
    return T.diagonal().real();
}

double power_violation(const BeamformingSolution& sol, const SystemConfig& cfg) {
    const RVec p = antenna_powers(sol);
    if (cfg.sum_power) return p.sum() / cfg.total_power() - 1.0;
    double v = -std::numeric_limits<double>::infinity();
    for (int n = 0; n < p.size(); ++n) v = std::max(v, p(n) / cfg.per_antenna_power[n] - 1.0);
    return v;
}

bool private_targets_met(const BeamformingSolution& sol, const ChannelSet& ch, const SystemConfig& cfg,
                         double rel_tol) {
    const IodSinr s = iod_sinrs(sol, ch, cfg.noise_iod);
    for (int k = 0; k < ch.k(); ++k)
        if (s.priv(k) < cfg.sinr_targets[k] * (1.0 - rel_tol)) return false;
    return true;
}

double ssr_single_draw(const BeamformingSolution& sol, const ChannelSet& ch, const SystemConfig& cfg,
                       const std::vector<CVec>& eves) {
    if (!private_targets_met(sol, ch, cfg)) return 0.0;
    const IodSinr u = iod_sinrs(sol, ch, cfg.noise_iod);
    const EveSinr e = eve_sinrs(sol, eves, cfg.noise_eve);
    double total = 0.0;
    for (int k = 0; k < ch.k(); ++k) {
        double worst = 0.0;
        for (int q = 0; q < e.common.size(); ++q)
            worst = std::max(worst, std::min(std::log2(1.0 + e.common(q)), std::log2(1.0 + e.priv(q, k))));
        total += std::log2(1.0 + u.common(k)) - worst;
    }
    return std::max(0.0, total);
}

SsrStats system_ssr(const BeamformingSolution& sol, const ChannelSet& ch, const SystemConfig& cfg, Rng& rng,
                    int trials) {
    if (trials < 1) throw DomainError("system_ssr: trials must be >= 1");
    SsrStats st;
    st.samples.reserve(trials);
    for (int t = 0; t < trials; ++t)
        st.samples.push_back(ssr_single_draw(sol, ch, cfg, sample_eve_channels(rng, cfg.n_eves, ch.n())));
    double m = 0.0;
    for (double x : st.samples) m += x;
    m /= trials;
    double v = 0.0;
    for (double x : st.samples) v += (x - m) * (x - m);
    st.mean = m;
    st.se = trials > 1 ? std::sqrt(v / (trials - 1) / trials) : 0.0;
    return st;
}

Rank1 extract_rank1(const CMat& W) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (W + W.adjoint()));
    const auto n = W.rows();
    const double lmax = std::max(0.0, es.eigenvalues()(n - 1));
    const double tr = W.trace().real();
    Rank1 r;
    r.w = std::sqrt(lmax) * es.eigenvectors().col(n - 1);
    r.gap = (tr - lmax) / std::max(tr, 1e-300);
    if (tr <= 0.0) r.gap = 0.0;
    return r;
}

namespace {

struct Candidate {
    CVec wc;
    std::vector<CVec> wp;
};

BeamformingSolution with_beams(const BeamformingSolution& base, const Candidate& c) {
    BeamformingSolution s = base;
    s.wc = c.wc;
    s.wp = c.wp;
    s.Wc = c.wc * c.wc.adjoint();
    for (std::size_t k = 0; k < c.wp.size(); ++k) s.Wp[k] = c.wp[k] * c.wp[k].adjoint();
    return s;
}

// Scales beams down so the power constraint holds with the AN left untouched.
void fit_power(Candidate& c, const CMat& an, const SystemConfig& cfg) {
    const int N = static_cast<int>(c.wc.size());
    RVec p = c.wc.cwiseAbs2();
    for (const auto& w : c.wp) p += w.cwiseAbs2();
    const RVec a = an.diagonal().real();
    double scale = 1.0;
    if (cfg.sum_power) {
        const double room = cfg.total_power() - a.sum();
        if (p.sum() > room) scale = std::max(0.0, room) / p.sum();
    } else {
        for (int n = 0; n < N; ++n) {
            const double room = cfg.per_antenna_power[n] - a(n);
            if (p(n) > room) scale = std::min(scale, std::max(0.0, room) / p(n));
        }
    }
    if (scale < 1.0) {
        const double s = std::sqrt(scale);
        c.wc *= s;
        for (auto& w : c.wp) w *= s;
    }
}

bool lmi_ok(const BeamformingSolution& s, const SystemConfig& cfg) {
    const int K = s.k();
    const double xi = compute_xi(cfg.secrecy_prob, cfg.n_eves, s.gamma_e, cfg.noise_eve, s.n());
    double scale = s.Wc.trace().real();
    for (const auto& W : s.Wp) scale += W.trace().real();
    for (int k = 0; k < K; ++k) {
        std::vector<CMat> others{s.Wc};
        for (int i = 0; i < K; ++i)
            if (i != k) others.push_back(s.Wp[i]);
        if (lmi_margin(s.Wp[k], others, s.B, s.V0, s.gamma_e, xi) < -1e-6 * scale) return false;
    }
    return true;
}

}  // namespace

void restore_rank_one(BeamformingSolution& sol, const ChannelSet& ch, const SystemConfig& cfg, Rng& rng,
                      double gap_tol, int n_candidates) {
    const int K = sol.k();
    Candidate pc;
    sol.rank_gap.clear();
    Rank1 r = extract_rank1(sol.Wc);
    pc.wc = r.w;
    sol.rank_gap.push_back(r.gap);
    for (int k = 0; k < K; ++k) {
        r = extract_rank1(sol.Wp[k]);
        pc.wp.push_back(r.w);
        sol.rank_gap.push_back(r.gap);
    }
    const double worst_gap = *std::max_element(sol.rank_gap.begin(), sol.rank_gap.end());
    if (worst_gap <= gap_tol) {
        const auto gaps = sol.rank_gap;
        sol = with_beams(sol, pc);
        sol.rank_gap = gaps;
        return;
    }

    const CMat an = sol.an_covariance();
    auto score = [&](const Candidate& c, bool& feasible) {
        const BeamformingSolution s = with_beams(sol, c);
        feasible = private_targets_met(s, ch, cfg) && lmi_ok(s, cfg);
        return fssr_objective(s, ch, cfg.noise_iod, sol.gamma_e);
    };

    // Square-root factors of each covariance for drawing w ~ CN(0, W).
    std::vector<CMat> roots;
    roots.push_back(sqrtm_pd(sol.Wc));
    for (int k = 0; k < K; ++k) roots.push_back(sqrtm_pd(sol.Wp[k]));

    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    auto draw = [&](const CMat& R) {
        CVec z(R.cols());
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            const double re = g(rng);
            const double im = g(rng);
            z(i) = cd(re, im);
        }
        return CVec(R * z);
    };

    Candidate best;
    bool have = false;
    double best_val = -std::numeric_limits<double>::infinity();
    {
        Candidate c = pc;
        fit_power(c, an, cfg);
        bool feas = false;
        const double v = score(c, feas);
        if (feas) best = c, best_val = v, have = true;
    }
    for (int t = 0; t < n_candidates; ++t) {
        Candidate c;
        c.wc = draw(roots[0]);
        for (int k = 0; k < K; ++k) c.wp.push_back(draw(roots[k + 1]));
        fit_power(c, an, cfg);
        bool feas = false;
        const double v = score(c, feas);
        if (feas && v > best_val) best = c, best_val = v, have = true;
    }
    const auto gaps = sol.rank_gap;
    if (have) {
        sol = with_beams(sol, best);
        sol.randomized = true;
    } else {
        // keep the relaxed covariances; report principal components only
        sol.wc = pc.wc;
        sol.wp = pc.wp;
    }
    sol.rank_gap = gaps;
}

}  // namespace secbeam
