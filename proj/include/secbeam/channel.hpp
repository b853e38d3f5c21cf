#pragma once

#include <random>
#include <vector>

#include "secbeam/scenario.hpp"
#include "secbeam/types.hpp"

namespace secbeam {

using Rng = std::mt19937_64;

struct ChannelSet {
    std::vector<CVec> iod;  // h_{u,k}
    CMat H;                 // N x K, columns h_{u,k}
    CMat V0;                // N x (N-K), orthonormal, H^H V0 = 0
    int n() const { return static_cast<int>(H.rows()); }
    int k() const { return static_cast<int>(H.cols()); }
};

double path_loss_db(double carrier_hz, double range_m);
double path_gain_amplitude(double carrier_hz, double range_m);

CVec steering(double azimuth_deg, double range_m, const SystemConfig& cfg);

CMat nullspace_projector(const CMat& H);

ChannelSet build_channels(const SystemConfig& cfg, const Geometry& geom);
ChannelSet channels_from_matrix(const CMat& H);

std::vector<CVec> sample_eve_channels(Rng& rng, int q, int n);

// Interference cap default: sigma_u^2 + max_k ||h_k||^2 * total power.
double effective_sigma_p(const SystemConfig& cfg, const ChannelSet& ch);

}  // namespace secbeam
