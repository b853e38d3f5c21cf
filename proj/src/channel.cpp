#include "secbeam/channel.hpp"

#include <cmath>

namespace secbeam {

double path_loss_db(double carrier_hz, double range_m) {
    if (!(carrier_hz > 0.0) || !(range_m > 0.0)) throw DomainError("path_loss_db: frequency and range must be positive");
    return 32.5 + 20.0 * std::log10(carrier_hz / 1e6) + 20.0 * std::log10(range_m / 1e3);
}

double path_gain_amplitude(double carrier_hz, double range_m) {
    return std::pow(10.0, -path_loss_db(carrier_hz, range_m) / 20.0);
}

CVec steering(double azimuth_deg, double range_m, const SystemConfig& cfg) {
    if (!(std::abs(azimuth_deg) <= 90.0)) throw DomainError("steering: azimuth outside [-90, 90]");
    const double rho = path_gain_amplitude(cfg.carrier_hz, range_m);
    const double s = std::sin(azimuth_deg * kPi / 180.0);
    const double k = 2.0 * kPi * cfg.carrier_hz * cfg.spacing() * s / kSpeedOfLight;
    CVec h(cfg.n_antennas);
    // h = rho * [Phi_1 .. Phi_N]^H, so each entry is conjugated.
    for (int n = 0; n < cfg.n_antennas; ++n) h(n) = rho * std::polar(1.0, -k * n);
    return h;
}

CMat nullspace_projector(const CMat& H) {
    const Eigen::Index N = H.rows(), K = H.cols();
    if (K >= N) throw DomainError("nullspace_projector: need K < N");
    Eigen::JacobiSVD<CMat> svd(H, Eigen::ComputeFullU);
    const RVec& sv = svd.singularValues();
    if (sv(0) <= 0.0 || sv(K - 1) < 1e-10 * sv(0))
        throw DomainError("nullspace_projector: channel matrix is rank deficient");
    return svd.matrixU().rightCols(N - K);
}

ChannelSet channels_from_matrix(const CMat& H) {
    ChannelSet ch;
    ch.H = H;
    for (Eigen::Index k = 0; k < H.cols(); ++k) ch.iod.push_back(H.col(k));
    ch.V0 = nullspace_projector(H);
    return ch;
}

ChannelSet build_channels(const SystemConfig& cfg, const Geometry& geom) {
    CMat H(cfg.n_antennas, static_cast<Eigen::Index>(geom.iod_polar.size()));
    for (std::size_t k = 0; k < geom.iod_polar.size(); ++k)
        H.col(k) = steering(geom.iod_polar[k].azimuth_deg, geom.iod_polar[k].range_m, cfg);
    return channels_from_matrix(H);
}

std::vector<CVec> sample_eve_channels(Rng& rng, int q, int n) {
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    std::vector<CVec> out;
    out.reserve(q);
    for (int i = 0; i < q; ++i) {
        CVec h(n);
        for (int j = 0; j < n; ++j) {
            const double re = g(rng);
            const double im = g(rng);
            h(j) = cd(re, im);
        }
        out.push_back(std::move(h));
    }
    return out;
}

double effective_sigma_p(const SystemConfig& cfg, const ChannelSet& ch) {
    if (cfg.sigma_p) return *cfg.sigma_p;
    double g = 0.0;
    for (const auto& h : ch.iod) g = std::max(g, h.squaredNorm());
    return cfg.noise_iod + g * cfg.total_power();
}

}  // namespace secbeam
