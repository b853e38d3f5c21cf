#include <cmath>

#include "doctest.h"
#include "secbeam/barrier_sdp.hpp"
#include "secbeam/hermitian.hpp"
#include "test_util.hpp"

using namespace secbeam;

TEST_CASE("trace-constrained linear SDP reaches the top eigenvalue") {
    Rng rng(1);
    const int n = 4;
    const CMat C = testutil::random_herm(n, rng);
    BarrierProblem p;
    p.add_block(n);
    p.add_psd(0);
    RVec a = RVec::Zero(n * n);
    a.head(n).setConstant(-1.0);  // 1 - Tr X >= 0
    p.add_linear(a, 1.0);
    p.c = hvec(C);
    const BarrierResult r = default_convex_solver(p, RVec::Zero(n * n), {});
    Eigen::SelfAdjointEigenSolver<CMat> es(C);
    CHECK(r.objective == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-6));
    CHECK(min_slack(p, r.x) > 0.0);
}

TEST_CASE("log objective splits a budget evenly") {
    BarrierProblem p;
    p.add_block(1);
    p.add_block(1);
    p.add_psd(0);
    p.add_psd(1);
    RVec a(2);
    a << -1.0, -1.0;
    p.add_linear(a, 2.0);
    RVec d0(2), d1(2);
    d0 << 1.0, 0.0;
    d1 << 0.0, 1.0;
    p.add_log(d0, 1.0, 1.0);
    p.add_log(d1, 1.0, 1.0);
    const BarrierResult r = default_convex_solver(p, RVec::Zero(2), {});
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.objective == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-8));
}

TEST_CASE("congruence LMI bounds the trace") {
    // max Tr X  s.t.  I - P X P^H >= 0  gives Tr((P^H P)^{-1})
    Rng rng(2);
    const int n = 3;
    const CMat P = testutil::random_hpd(n, rng) + CMat::Identity(n, n);
    BarrierProblem p;
    p.add_block(n);
    p.add_psd(0);
    BarrierProblem::Lmi l;
    l.dim = n;
    l.C = CMat::Identity(n, n);
    l.terms.push_back({0, -1.0, P, false});
    p.lmis.push_back(l);
    p.c = hvec(CMat::Identity(n, n));
    const BarrierResult r = default_convex_solver(p, RVec::Zero(n * n), {});
    const double expect = (P.adjoint() * P).inverse().trace().real();
    CHECK(r.objective == doctest::Approx(expect).epsilon(1e-6));
    CHECK(r.kkt_residual < 1e-6);
}

TEST_CASE("phase I") {
    BarrierProblem p;
    p.add_block(2);
    p.add_psd(0);
    RVec a = RVec::Zero(4);
    a.head(2).setConstant(-1.0);
    p.add_linear(a, 3.0);
    const RVec far = hvec(CMat(10.0 * CMat::Identity(2, 2)));
    CHECK(min_slack(p, far) < 0.0);
    const RVec x = phase1(p, far);
    CHECK(min_slack(p, x) > 0.0);

    BarrierProblem bad = p;
    bad.add_linear(a, -1.0);  // Tr X <= -1 with X >= 0
    CHECK_THROWS_AS(phase1(bad, far), SolverError);
    try {
        phase1(bad, far);
    } catch (const SolverError& e) {
        CHECK(e.kind() == SolverError::Kind::Infeasible);
    }
}

TEST_CASE("barrier start must be interior") {
    BarrierProblem p;
    p.add_block(1);
    p.add_psd(0);
    RVec x(1);
    x << -1.0;
    CHECK_THROWS_AS(barrier_solve(p, x), SolverError);
}

TEST_CASE("objective trace ascends across centering stages") {
    Rng rng(3);
    const int n = 3;
    BarrierProblem p;
    p.add_block(n);
    p.add_psd(0);
    RVec a = RVec::Zero(n * n);
    a.head(n).setConstant(-1.0);
    p.add_linear(a, 1.0);
    p.c = hvec(testutil::random_herm(n, rng));
    const BarrierResult r = default_convex_solver(p, RVec::Zero(n * n), {});
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
        CHECK(r.objective_trace[i] >= r.objective_trace[i - 1] - 1e-9);
}
