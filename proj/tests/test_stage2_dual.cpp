#include <cmath>

#include "doctest.h"
#include "secbeam/hermitian.hpp"
#include "secbeam/secrecy_stats.hpp"
#include "secbeam/stage2_dual.hpp"
#include "test_util.hpp"

using namespace secbeam;

namespace {

// Generalized eigenvalue oracle independent of the library's inverse square root.
double gen_eig_oracle(const std::vector<CMat>& pi, const std::vector<CMat>& w) {
    double g = 0.0;
    for (std::size_t k = 0; k < pi.size(); ++k) {
        Eigen::GeneralizedSelfAdjointEigenSolver<CMat> es(w[k], pi[k]);
        g = std::max(g, es.eigenvalues().maxCoeff());
    }
    return g;
}

void random_pair(int n, int k, Rng& rng, std::vector<CMat>& pi, std::vector<CMat>& w) {
    pi.clear();
    w.clear();
    for (int i = 0; i < k; ++i) {
        pi.push_back(testutil::random_hpd(n, rng));
        const CVec v = testutil::random_complex(n, 1, rng);
        w.push_back(v * v.adjoint());
    }
}

}  // namespace

TEST_CASE("Pi collects the interference seen by each private stream") {
    Rng rng(1);
    const Scenario sc = paper_scenario(4);
    const ChannelSet ch = build_channels(sc.cfg, sc.geom);
    BeamformingSolution s = zero_solution(ch);
    s.Wc = testutil::random_hpd(4, rng);
    for (auto& W : s.Wp) W = testutil::random_hpd(4, rng);
    s.B = testutil::random_hpd(2, rng);
    const auto pi = build_pi(s, 0.25);
    CHECK((pi[0] - (0.25 * CMat::Identity(4, 4) + s.Wc + s.Wp[1] + s.an_covariance())).norm() < 1e-12);
    CHECK(pi_identity_weight(sc.cfg, 4) ==
          doctest::Approx(phi_inv(outage_arg(0.95, 2), 4) * sc.cfg.noise_eve));
}

TEST_CASE("dual value and gradient") {
    Rng rng(2);
    std::vector<CMat> pi, w;
    random_pair(3, 2, rng, pi, w);
    std::vector<CMat> psi{-testutil::random_hpd(3, rng), -testutil::random_hpd(3, rng)};
    double t = 0.0, tw = 0.0;
    for (int k = 0; k < 2; ++k) t -= (psi[k] * pi[k]).trace().real(), tw += (psi[k] * w[k]).trace().real();
    CHECK(dual_value(psi, pi, w) == doctest::Approx(-std::log2(t) - tw - 1.0).epsilon(1e-12));
    CHECK(recover_gamma_e(psi, pi) == doctest::Approx(1.0 / t));

    const auto g = dual_gradient(psi, pi, w);
    const double h = 1e-6;
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 9; ++j) {
            auto p = psi, m = psi;
            p[k] += h * hbasis(j, 3);
            m[k] -= h * hbasis(j, 3);
            const double fd = (dual_value(p, pi, w) - dual_value(m, pi, w)) / (2.0 * h);
            CHECK(std::abs(fd - hvec(g[k])(j)) <= 1e-6 * std::max(1.0, std::abs(fd)));
        }
    std::vector<CMat> pos{testutil::random_hpd(3, rng), testutil::random_hpd(3, rng)};
    CHECK_THROWS_AS(dual_value(pos, pi, w), DomainError);
}

TEST_CASE("inverse BFGS update") {
    Rng rng(3);
    const RMat X = RMat::Identity(3, 3);
    RVec xi(3), lam(3);
    xi << 1.0, 0.5, -0.2;
    lam << 0.8, 0.1, 0.3;
    bool skipped = true;
    const RMat Xn = bfgs_update(X, xi, lam, &skipped);
    CHECK_FALSE(skipped);
    CHECK((Xn * lam - xi).norm() < 1e-12);       // secant condition
    CHECK((Xn - Xn.transpose()).norm() < 1e-12);
    CHECK(Eigen::SelfAdjointEigenSolver<RMat>(Xn).eigenvalues().minCoeff() > 0.0);
    const RMat same = bfgs_update(X, xi, -lam, &skipped);
    CHECK(skipped);
    CHECK((same - X).norm() == 0.0);
}

TEST_CASE("exact line search and BFGS on a quadratic") {
    RMat Q(2, 2);
    Q << 3.0, 1.0, 1.0, 2.0;
    RVec b(2);
    b << 1.0, -1.0;
    ScalarFn f = [&](const RVec& x) { return 0.5 * x.dot(Q * x) - b.dot(x); };
    GradFn g = [&](const RVec& x) { return RVec(Q * x - b); };
    DomainFn dom = [](const RVec&) { return true; };
    const RVec x0 = RVec::Zero(2);
    const RVec d = -g(x0);
    const double s = exact_line_search(f, g, dom, x0, d, 1e-12);
    CHECK(s == doctest::Approx(d.squaredNorm() / d.dot(Q * d)).epsilon(1e-8));
    const BfgsResult r = bfgs_minimize(f, g, dom, x0);
    CHECK(r.converged);
    CHECK((r.x - Q.ldlt().solve(b)).norm() < 1e-8);
    // BFGS with exact steps finishes a 2-D quadratic in at most 2 + 1 iterations
    CHECK(r.iterations <= 3);
}

TEST_CASE("dual solver recovers the generalized eigenvalue") {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + trial % 5, k = 1 + trial % 3;
        std::vector<CMat> pi, w;
        random_pair(n, k, rng, pi, w);
        const DualState st = solve_dual(pi, w);
        const double oracle = gen_eig_oracle(pi, w);
        CHECK(st.gamma_e == doctest::Approx(oracle).epsilon(1e-4));
        CHECK(gamma_e_oracle(pi, w) == doctest::Approx(oracle).epsilon(1e-10));
        CHECK(st.value == doctest::Approx(std::log2(oracle)).epsilon(1e-6));
        double tw = 0.0;
        for (int i = 0; i < k; ++i) tw += (st.psi[i] * w[i]).trace().real();
        CHECK(tw == doctest::Approx(-1.0).epsilon(1e-9));
    }
}

TEST_CASE("BFGS needs no more iterations than damped Newton") {
    const Scenario sc = paper_scenario(8);
    const ChannelSet ch = build_channels(sc.cfg, sc.geom);
    // the dual as posed in the last outer iteration of the two-stage loop
    const Stage2Result r2 = run_algorithm2(ch, sc.cfg);
    const auto pi = build_pi(r2.sol, pi_identity_weight(sc.cfg, 8));
    const DualState b = solve_dual(pi, r2.sol.Wp);
    const DualState n = solve_dual_newton(pi, r2.sol.Wp);
    CHECK(b.value == doctest::Approx(n.value).epsilon(1e-8));
    CHECK(b.iterations <= n.iterations);
}

TEST_CASE("two-stage loop tightens Gamma_e and improves F-SSR") {
    const Scenario sc = paper_scenario(4);
    const ChannelSet ch = build_channels(sc.cfg, sc.geom);
    const Stage2Result r = run_algorithm2(ch, sc.cfg);
    REQUIRE(r.gamma_trace.size() >= 2);
    for (std::size_t i = 1; i < r.gamma_trace.size() - 1; ++i) CHECK(r.gamma_trace[i] <= r.gamma_trace[i - 1]);
    CHECK(r.fssr_trace.back() >= r.fssr_trace.front() - 1e-9);
    CHECK(r.oracle_fallbacks == 0);
    const auto pi = build_pi(r.sol, pi_identity_weight(sc.cfg, 4));
    CHECK(gamma_e_oracle(pi, r.sol.Wp) <= r.sol.gamma_e * (1.0 + 1e-12));
}
