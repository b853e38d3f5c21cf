#include <cmath>

#include "doctest.h"
#include "secbeam/hermitian.hpp"
#include "secbeam/minimax_barrier.hpp"
#include "secbeam/stage1_mm.hpp"
#include "test_util.hpp"

using namespace secbeam;

namespace {

MinimaxState perturbed_state(const MinimaxData& d, Rng& rng, double varsigma) {
    MinimaxState s = initial_state(d, varsigma);
    s.Wc += 0.01 * testutil::random_hpd(d.n, rng);
    for (auto& W : s.W) W += 0.01 * testutil::random_hpd(d.n, rng);
    for (auto& D : s.D) D += 0.01 * testutil::random_hpd(d.n, rng);
    s.lambda.array() += 0.3;
    s.mu.array() += 0.2;
    return s;
}

}  // namespace

TEST_CASE("dual matrices from their definitions") {
    const Scenario sc = paper_scenario(4);
    const ChannelSet ch = build_channels(sc.cfg, sc.geom);
    const MinimaxData d = make_minimax_data(ch, sc.cfg, 0.3);
    Rng rng(1);
    std::vector<CMat> D{testutil::random_hpd(4, rng), testutil::random_hpd(4, rng)};
    RVec lam(4), mu(2), ups(2);
    lam << 1, 2, 3, 4;
    mu << 0.5, 0.7;
    ups << 0.1, 0.2;
    const DualMatrices m = build_dual_matrices(D, lam, mu, ups, d);
    const CMat L = lam.cast<cd>().asDiagonal();
    CHECK((m.Sigma - (L - 0.3 * (D[0] + D[1]))).norm() < 1e-12);
    const CMat H0 = d.h[0] * d.h[0].adjoint(), H1 = d.h[1] * d.h[1].adjoint();
    const CMat O0 = D[0] - 0.3 * D[1] + L - mu(0) * H0 + d.sinr(1) * mu(1) * H1 + ups(0) * H0 + ups(1) * H1;
    CHECK((m.Omega[0] - O0).norm() < 1e-9 * O0.norm());
    CHECK((m.Phi - d.V0.adjoint() * m.Sigma * d.V0).norm() < 1e-12);
    CHECK(m.g.size() == 8);
    CHECK(m.g(4) == doctest::Approx(-d.sinr(0)));
    CHECK(m.g(6) == doctest::Approx(d.sigma_p - 1.0));
}

TEST_CASE("residual is the gradient of the barrier Lagrangian") {
    const Scenario sc = paper_scenario(4);
    const ChannelSet ch = build_channels(sc.cfg, sc.geom);
    const MinimaxData d = make_minimax_data(ch, sc.cfg, 0.3);
    Rng rng(2);
    const MinimaxState s = perturbed_state(d, rng, 20.0);
    REQUIRE(in_domain(s));
    const RVec z = pack_state(s);
    CHECK(z.size() == saddle_dim(d));
    const RVec r = kkt_residual(s, d);
    const double h = 1e-6;
    for (int i = 0; i < z.size(); ++i) {
        RVec zp = z, zm = z;
        zp(i) += h;
        zm(i) -= h;
        const double fd = (saddle_lagrangian(unpack_state(zp, d, 20.0), d) -
                           saddle_lagrangian(unpack_state(zm, d, 20.0), d)) / (2.0 * h);
        CHECK(std::abs(fd - r(i)) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("Jacobian matches finite differences of the residual") {
    const Scenario sc = paper_scenario(4);
    const ChannelSet ch = build_channels(sc.cfg, sc.geom);
    const MinimaxData d = make_minimax_data(ch, sc.cfg, 0.3);
    Rng rng(3);
    const MinimaxState s = perturbed_state(d, rng, 20.0);
    const RVec z = pack_state(s);
    const RMat J = saddle_jacobian(s, d);
    CHECK((J - J.transpose()).norm() <= 1e-10 * J.norm());
    const double h = 1e-6;
    double worst = 0.0;
    for (int i = 0; i < z.size(); ++i) {
        RVec zp = z, zm = z;
        zp(i) += h;
        zm(i) -= h;
        const RVec col = (kkt_residual(unpack_state(zp, d, 20.0), d) - kkt_residual(unpack_state(zm, d, 20.0), d)) / (2.0 * h);
        worst = std::max(worst, (col - J.col(i)).norm() / std::max(1.0, col.norm()));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("log-det ratio and scaled barrier objective") {
    Rng rng(4);
    const CMat S = testutil::random_hpd(3, rng);
    const std::vector<CVec> h{testutil::random_complex(3, 1, rng), testutil::random_complex(3, 1, rng)};
    double expect = 0.0;
    for (const auto& v : h)
        expect += std::log2(std::abs((S + 0.7 * v * v.adjoint()).determinant()) / std::abs(S.determinant()));
    CHECK(log_det_ratio(S, 0.7, h) == doctest::Approx(expect).epsilon(1e-10));

    ScaledPoint p;
    p.omega = 0.7;
    p.W_hat = {testutil::random_hpd(3, rng)};
    p.B_hat = testutil::random_hpd(1, rng);
    p.D_tilde = {testutil::random_hpd(3, rng)};
    p.eta = RVec::Constant(3, 0.5);
    const double bar = std::log2(0.7) + std::log2(p.W_hat[0].trace().real()) + std::log2(p.B_hat.trace().real()) -
                       std::log2(p.D_tilde[0].trace().real()) - 3.0 * std::log2(0.5);
    CHECK(barrier_objective(p, S, h, 20.0) == doctest::Approx(expect + bar / 20.0).epsilon(1e-10));
    p.eta(1) = 0.0;
    CHECK_THROWS_AS(barrier_objective(p, S, h, 20.0), DomainError);
}

TEST_CASE("omega row: first-order form agrees with the exact row for small steps") {
    Rng rng(5);
    const CMat S = testutil::random_hpd(3, rng);
    const std::vector<CVec> h{testutil::random_complex(3, 1, rng)};
    const double omega = 0.6, tau1 = 0.4, vs = 20.0;
    const CMat dS = 1e-4 * testutil::random_herm(3, rng);
    const double dw = 1e-4, dt = -2e-4;
    const double zero = omega_row_exact(S, omega, tau1, CMat::Zero(3, 3), 0.0, 0.0, h, vs);
    const double ex = omega_row_exact(S, omega, tau1, dS, dw, dt, h, vs);
    const double ap = omega_row_approx(S, omega, tau1, dS, dw, dt, h, vs);
    CHECK(omega_row_approx(S, omega, tau1, CMat::Zero(3, 3), 0.0, 0.0, h, vs) == doctest::Approx(zero).epsilon(1e-12));
    // what is left over is second order in the step
    CHECK(std::abs(ap - ex) <= 1e-3 * std::abs(ex - zero));
}

TEST_CASE("scaling by z leaves the ratio and the budget test unchanged") {
    Rng rng(6);
    UnscaledPoint u;
    u.omega = 0.8;
    u.W = {testutil::random_hpd(3, rng)};
    u.B = testutil::random_hpd(1, rng);
    u.D = {testutil::random_hpd(3, rng)};
    u.eta = RVec::Constant(3, 1.0);
    u.S = testutil::random_hpd(3, rng);
    const double z = 3.7;
    const UnscaledPoint s = scale_down(u, z);
    const std::vector<CVec> h{testutil::random_complex(3, 1, rng)};
    CHECK(log_det_ratio(s.S, s.omega, h) == doctest::Approx(log_det_ratio(u.S, u.omega, h)).epsilon(1e-12));
    DualMatrices dm;
    dm.Omega = {testutil::random_hpd(3, rng)};
    dm.Phi = testutil::random_hpd(1, rng);
    const double theta = 2.0;
    CHECK((budget_lhs(u.omega, u.W, u.B, dm) <= z * theta) == (budget_lhs(s.omega, s.W, s.B, dm) <= theta));
    CHECK(budget_lhs(u.omega, u.W, u.B, dm) == doctest::Approx(z * budget_lhs(s.omega, s.W, s.B, dm)));
    CHECK_THROWS_AS(scale_down(u, 0.0), DomainError);
}

TEST_CASE("saddle matches the direct P7 solve") {
    const Scenario sc = paper_scenario(4);
    const ChannelSet ch = build_channels(sc.cfg, sc.geom);
    for (double g : {0.1, 1.0}) {
        const P7Result ref = solve_p7_reference(ch, sc.cfg, g);
        const MinimaxResult m = run_algorithm3(ch, sc.cfg, g, minimax_options_from(sc.cfg));
        CHECK(m.objective == doctest::Approx(ref.objective).epsilon(1e-3));
        CHECK(m.kkt_residual <= 1e-6);
        CHECK(m.duality_gap <= 1e-5);
        CHECK(barrier_terms(make_minimax_data(ch, sc.cfg, g)) / m.state.varsigma < 1e-6);
        bool any = false;
        for (const auto& c : m.candidates) any = any || c.feasible;
        CHECK(any);
        for (std::size_t i = 1; i < m.records.size(); ++i) CHECK(m.records[i].iter >= m.records[i - 1].iter);
    }
}

TEST_CASE("table initialization also converges") {
    const Scenario sc = paper_scenario(4);
    const ChannelSet ch = build_channels(sc.cfg, sc.geom);
    MinimaxOptions opt = minimax_options_from(sc.cfg);
    opt.feasible_start = false;
    const MinimaxResult m = run_algorithm3(ch, sc.cfg, 1.0, opt);
    CHECK(m.objective == doctest::Approx(solve_p7_reference(ch, sc.cfg, 1.0).objective).epsilon(1e-3));
}

TEST_CASE("sum-power variant") {
    Scenario sc = paper_scenario(4);
    sc.cfg.sum_power = true;
    const ChannelSet ch = build_channels(sc.cfg, sc.geom);
    const MinimaxResult m = run_algorithm3(ch, sc.cfg, 0.3, minimax_options_from(sc.cfg));
    CHECK(m.objective == doctest::Approx(solve_p7_reference(ch, sc.cfg, 0.3).objective).epsilon(1e-3));
    CHECK(m.state.lambda.size() == 1);
}
