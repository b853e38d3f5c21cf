#pragma once

#include <vector>

#include "secbeam/channel.hpp"
#include "secbeam/metrics.hpp"
#include "secbeam/scenario.hpp"
#include "secbeam/stage2_dual.hpp"

namespace secbeam {

enum class BaselineKind { MRT, NoAnRs };

struct BaselineSpec {
    BaselineKind kind = BaselineKind::MRT;
    double power_split = 0.5;  // fraction of power on the common stream
};

// Common beam along the dominant left singular vector of H, private beams
// along h_k, no AN; scaled so the binding antenna (or the sum) meets its budget.
BeamformingSolution mrt_beams(const ChannelSet& ch, const SystemConfig& cfg, double power_split);

struct MrtResult {
    BeamformingSolution sol;
    double power_split = 0.0;
    double ssr_mean = 0.0;
    std::vector<double> grid_means;  // one per split on the grid
};

// Splits 0, 0.05, ..., 1; the split with the best mean SSR over `eves` is kept.
MrtResult mrt_solution(const ChannelSet& ch, const SystemConfig& cfg, const std::vector<std::vector<CVec>>& eves);
std::vector<double> mrt_split_grid();

// The proposed two-stage design with the AN covariance removed from the
// feasible set.
Stage2Result no_an_rs_solution(const ChannelSet& ch, const SystemConfig& cfg, const Stage2Options& opt = {});

// Sum of common rates of the Eve-free design.
double secrecy_upper_bound(const ChannelSet& ch, const SystemConfig& cfg, const Stage1Options& opt = {});

}  // namespace secbeam
