#include <cmath>

#include "doctest.h"
#include "secbeam/hermitian.hpp"
#include "secbeam/metrics.hpp"
#include "secbeam/secrecy_stats.hpp"
#include "test_util.hpp"

using namespace secbeam;

namespace {

BeamformingSolution random_solution(const ChannelSet& ch, Rng& rng, double scale) {
    BeamformingSolution s = zero_solution(ch);
    s.Wc = scale * testutil::random_hpd(ch.n(), rng);
    for (auto& W : s.Wp) W = scale * testutil::random_hpd(ch.n(), rng);
    s.B = scale * testutil::random_hpd(ch.n() - ch.k(), rng);
    s.gamma_e = 0.5;
    return s;
}

}  // namespace

TEST_CASE("hvec is an isometry for the trace inner product") {
    Rng rng(1);
    for (int n : {1, 3, 6}) {
        const CMat X = testutil::random_herm(n, rng), Y = testutil::random_herm(n, rng);
        CHECK(hvec(X).dot(hvec(Y)) == doctest::Approx((X * Y).trace().real()).epsilon(1e-12));
        CHECK((hmat(hvec(X), n) - X).norm() < 1e-12);
        for (int j = 0; j < n * n; ++j) CHECK(hvec(hbasis(j, n)).dot(hvec(hbasis(j, n))) == doctest::Approx(1.0));
    }
}

TEST_CASE("congruence block matches basis images") {
    Rng rng(4);
    const int n = 3;
    const CMat L = testutil::random_hpd(n, rng);
    RMat out = RMat::Zero(n * n, n * n);
    add_congruence_block(L, 2.0, out);
    for (int i = 0; i < n * n; ++i)
        for (int j = 0; j < n * n; ++j)
            CHECK(out(i, j) == doctest::Approx(2.0 * (hbasis(i, n) * L * hbasis(j, n) * L).trace().real()).epsilon(1e-10));
}

TEST_CASE("matrix square roots") {
    Rng rng(5);
    const CMat A = testutil::random_hpd(4, rng);
    const CMat S = sqrtm_pd(A);
    CHECK((S * S - A).norm() < 1e-10 * A.norm());
    CHECK((inv_sqrtm_pd(A) * A * inv_sqrtm_pd(A) - CMat::Identity(4, 4)).norm() < 1e-10);
}

TEST_CASE("IoD SINRs from their definition") {
    Rng rng(6);
    const Scenario sc = testutil::random_scenario(6, 2, rng);
    const ChannelSet ch = build_channels(sc.cfg, sc.geom);
    const BeamformingSolution s = random_solution(ch, rng, 1e-3);
    const IodSinr r = iod_sinrs(s, ch, sc.cfg.noise_iod);
    for (int k = 0; k < 2; ++k) {
        const CVec& h = ch.iod[k];
        auto q = [&](const CMat& W) { return (h.adjoint() * W * h)(0, 0).real(); };
        // AN is invisible at the IoDs
        CHECK(std::abs(q(s.an_covariance())) < 1e-12 * q(s.Wc));
        const double pk = q(s.Wp[k]), po = q(s.Wp[1 - k]), n0 = sc.cfg.noise_iod;
        CHECK(r.common(k) == doctest::Approx(q(s.Wc) / (pk + po + n0)).epsilon(1e-9));
        CHECK(r.priv(k) == doctest::Approx(pk / (po + n0)).epsilon(1e-9));
    }
}

TEST_CASE("power accounting") {
    Rng rng(8);
    Scenario sc = testutil::random_scenario(5, 2, rng);
    const ChannelSet ch = build_channels(sc.cfg, sc.geom);
    const BeamformingSolution s = random_solution(ch, rng, 1e-4);
    const RVec p = antenna_powers(s);
    const CMat T = s.Wc + s.Wp[0] + s.Wp[1] + s.an_covariance();
    for (int n = 0; n < 5; ++n) CHECK(p(n) == doctest::Approx(T(n, n).real()).epsilon(1e-12));
    CHECK(p.sum() == doctest::Approx(T.trace().real()).epsilon(1e-12));
    sc.cfg.per_antenna_power.assign(5, p.maxCoeff());
    CHECK(power_violation(s, sc.cfg) <= 1e-12);
    sc.cfg.per_antenna_power.assign(5, 0.5 * p.maxCoeff());
    CHECK(power_violation(s, sc.cfg) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("SSR is zero when a private target fails") {
    Rng rng(10);
    Scenario sc = testutil::random_scenario(4, 2, rng);
    const ChannelSet ch = build_channels(sc.cfg, sc.geom);
    BeamformingSolution s = zero_solution(ch);
    s.Wc = 1e-3 * CMat::Identity(4, 4);
    const auto eves = sample_eve_channels(rng, 2, 4);
    CHECK(ssr_single_draw(s, ch, sc.cfg, eves) == 0.0);
    Rng r2(1);
    const SsrStats st = system_ssr(s, ch, sc.cfg, r2, 10);
    CHECK(st.mean == 0.0);
    CHECK(st.samples.size() == 10);
}

TEST_CASE("rank-one extraction") {
    Rng rng(12);
    const CVec w = testutil::random_complex(5, 1, rng);
    const Rank1 r = extract_rank1(w * w.adjoint());
    CHECK(r.gap < 1e-12);
    CHECK((r.w * r.w.adjoint() - w * w.adjoint()).norm() < 1e-10 * w.squaredNorm());
    CHECK(extract_rank1(CMat::Identity(4, 4)).gap == doctest::Approx(0.75));
}
