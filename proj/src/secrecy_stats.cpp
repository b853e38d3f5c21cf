#include "secbeam/secrecy_stats.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

namespace secbeam {

double phi_cdf(double y, int n) {
    if (n < 1) throw DomainError("phi_cdf: n must be >= 1");
    if (y <= 0.0) return 0.0;
    if (!std::isfinite(y)) return 1.0;
    // Pr(X >= 1/y) = Q(n, 1/y)
    return boost::math::gamma_q(static_cast<double>(n), 1.0 / y);
}

double phi_inv(double p, int n) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("phi_inv: probability must lie in (0,1)");
    if (n < 1) throw DomainError("phi_inv: n must be >= 1");
    if (n == 1) return -1.0 / std::log(p);

    // Solve Q(n, x) = p for x = 1/y: bracket then bisection, Newton polish.
    const double a = static_cast<double>(n);
    auto f = [&](double x) { return boost::math::gamma_q(a, x) - p; };  // decreasing in x
    double lo = 0.0, hi = a + 1.0;
    while (f(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 5; ++it) {
        // dQ/dx = -x^(a-1) e^-x / Gamma(a)
        const double d = -boost::math::gamma_p_derivative(a, x);
        if (d == 0.0) break;
        const double step = f(x) / d;
        const double xn = x - step;
        if (!(xn > lo && xn < hi)) break;
        x = xn;
        if (std::abs(step) < 1e-15 * x) break;
    }
    return 1.0 / x;
}

double outage_arg(double kappa, int q) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("outage_arg: kappa must lie in (0,1)");
    if (q < 1) throw DomainError("outage_arg: q must be >= 1");
    return -std::expm1(std::log(kappa) / q);
}

double compute_xi(double kappa, int q, double gamma_e, double noise_eve, int n) {
    if (gamma_e < 0.0 || noise_eve < 0.0) throw DomainError("compute_xi: negative input");
    return phi_inv(outage_arg(kappa, q), n) * gamma_e * noise_eve;
}

SecrecyBound secrecy_bound(double kappa, int q, double gamma_e, double noise_eve, int n) {
    return {compute_xi(kappa, q, gamma_e, noise_eve, n), gamma_e, kappa, q, n};
}

double lambda_max_herm(const CMat& A) {
    const CMat S = 0.5 * (A + A.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(S.rows() - 1);
}

double lmi_margin(const CMat& Wk, const std::vector<CMat>& others, const CMat& B, const CMat& V0, double gamma_e,
                  double xi) {
    const auto N = Wk.rows();
    if (Wk.cols() != N || V0.rows() != N || B.rows() != V0.cols() || B.cols() != V0.cols())
        throw DomainError("lmi_margin: dimension mismatch");
    CMat A = Wk;
    for (const auto& W : others) {
        if (W.rows() != N || W.cols() != N) throw DomainError("lmi_margin: dimension mismatch");
        A -= gamma_e * W;
    }
    A -= gamma_e * (V0 * B * V0.adjoint());
    return xi - lambda_max_herm(A);
}

}  // namespace secbeam
