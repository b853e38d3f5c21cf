#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "secbeam/types.hpp"

namespace secbeam {

struct SystemConfig {
    int n_antennas = 20;
    int n_iods = 2;
    int n_eves = 2;
    double carrier_hz = 1e9;
    double element_spacing = 0.0;        // meters; 0 means c/(2 f_c)
    std::vector<double> per_antenna_power;  // watts, length N
    double noise_iod = 1e-13;            // watts
    double noise_eve = 1e-13;            // watts
    std::vector<double> sinr_targets;    // linear, length K
    double secrecy_prob = 0.95;
    std::optional<double> sigma_p;       // watts; unset means channel-dependent default
    std::optional<double> vartheta;      // unset means total power
    double tol_eps1 = 1e-6;
    double tol_eps2 = 1e-6;
    double tol_eps3 = 1e-6;
    double barrier_init = 20.0;
    double barrier_growth = 2.0;
    double ls_alpha = 0.1;
    double ls_beta = 0.5;
    bool sum_power = false;
    double gamma_e_init = 1.0;           // linear
    std::uint64_t rng_seed = 1;

    double total_power() const;
    double spacing() const;
    double effective_vartheta() const;
};

struct PolarPoint {
    double range_m = 1000.0;
    double azimuth_deg = 0.0;
};

struct Geometry {
    std::vector<PolarPoint> iod_polar;
    std::vector<PolarPoint> eve_polar;
};

struct Scenario {
    SystemConfig cfg;
    Geometry geom;
};

// Fills per-antenna powers and SINR targets of the reference setup.
Scenario paper_scenario(int n_antennas = 20);

std::vector<std::string> validate_config(const SystemConfig& cfg);
std::vector<std::string> validate_geometry(const Geometry& geom, const SystemConfig& cfg);

Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::string& path);
std::string format_scenario(const Scenario& sc);
void save_scenario(const Scenario& sc, const std::string& path);

}  // namespace secbeam
