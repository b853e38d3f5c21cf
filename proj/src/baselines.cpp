#include "secbeam/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "secbeam/stage1_mm.hpp"

namespace secbeam {

std::vector<double> mrt_split_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 20; ++i) g.push_back(i / 20.0);
    return g;
}

BeamformingSolution mrt_beams(const ChannelSet& ch, const SystemConfig& cfg, double power_split) {
    if (!(power_split >= 0.0 && power_split <= 1.0)) throw DomainError("mrt_beams: power split outside [0, 1]");
    const int N = ch.n(), K = ch.k();
    BeamformingSolution sol = zero_solution(ch);
    Eigen::JacobiSVD<CMat> svd(ch.H, Eigen::ComputeThinU);
    const CVec wc = std::sqrt(power_split) * svd.matrixU().col(0);
    std::vector<CVec> wp;
    for (int k = 0; k < K; ++k) {
        const double nh = ch.iod[k].norm();
        wp.push_back(nh > 0.0 ? CVec(std::sqrt((1.0 - power_split) / K) * ch.iod[k] / nh) : CVec(CVec::Zero(N)));
    }
    RVec pw = wc.cwiseAbs2();
    for (const auto& w : wp) pw += w.cwiseAbs2();
    double scale = 0.0;
    if (cfg.sum_power) {
        scale = pw.sum() > 0.0 ? cfg.total_power() / pw.sum() : 0.0;
    } else {
        double worst = 0.0;
        for (int n = 0; n < N; ++n) worst = std::max(worst, pw(n) / cfg.per_antenna_power[n]);
        scale = worst > 0.0 ? 1.0 / worst : 0.0;
    }
    const double a = std::sqrt(scale);
    sol.wc = a * wc;
    sol.Wc = sol.wc * sol.wc.adjoint();
    for (int k = 0; k < K; ++k) {
        sol.wp.push_back(a * wp[k]);
        sol.Wp[k] = sol.wp[k] * sol.wp[k].adjoint();
    }
    return sol;
}

MrtResult mrt_solution(const ChannelSet& ch, const SystemConfig& cfg, const std::vector<std::vector<CVec>>& eves) {
    if (eves.empty()) throw DomainError("mrt_solution: no Eve draws");
    MrtResult best;
    best.ssr_mean = -1.0;
    for (double rho : mrt_split_grid()) {
        const BeamformingSolution s = mrt_beams(ch, cfg, rho);
        double m = 0.0;
        for (const auto& e : eves) m += ssr_single_draw(s, ch, cfg, e);
        m /= static_cast<double>(eves.size());
        best.grid_means.push_back(m);
        if (m > best.ssr_mean) {
            best.ssr_mean = m;
            best.sol = s;
            best.power_split = rho;
        }
    }
    return best;
}

Stage2Result no_an_rs_solution(const ChannelSet& ch, const SystemConfig& cfg, const Stage2Options& opt) {
    ChannelSet no_an = ch;
    no_an.V0 = CMat(ch.n(), 0);
    Stage2Result r = run_algorithm2(no_an, cfg, opt);
    r.sol.V0 = ch.V0;
    r.sol.B = CMat::Zero(ch.V0.cols(), ch.V0.cols());
    return r;
}

double secrecy_upper_bound(const ChannelSet& ch, const SystemConfig& cfg, const Stage1Options& opt) {
    if (!(cfg.total_power() > 0.0)) return 0.0;
    const Stage1Result r = run_algorithm1(ch, cfg, ConvexSubproblem::kNoSecrecy, opt);
    return sum_common_rate(r.sol, ch, cfg.noise_iod);
}

}  // namespace secbeam
