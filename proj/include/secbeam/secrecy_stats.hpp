#pragma once

#include <vector>

#include "secbeam/types.hpp"

namespace secbeam {

struct SecrecyBound {
    double xi = 0.0;
    double gamma_e = 0.0;
    double kappa = 0.0;
    int q = 0;
    int n = 0;
};

// Pr(1/X <= y) for X ~ Gamma(n, 1).
double phi_cdf(double y, int n);

// Inverse of phi_cdf: y with Pr(1/X <= y) = p.
double phi_inv(double p, int n);

// Probability argument 1 - kappa^(1/Q).
double outage_arg(double kappa, int q);

double compute_xi(double kappa, int q, double gamma_e, double noise_eve, int n);
SecrecyBound secrecy_bound(double kappa, int q, double gamma_e, double noise_eve, int n);

// Largest eigenvalue of (A + A^H)/2.
double lambda_max_herm(const CMat& A);

// xi - lambda_max(W_k - gamma_e * sum others - gamma_e * V0 B V0^H).
double lmi_margin(const CMat& Wk, const std::vector<CMat>& others, const CMat& B, const CMat& V0, double gamma_e,
                  double xi);

}  // namespace secbeam
