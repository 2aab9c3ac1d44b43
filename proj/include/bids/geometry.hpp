#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bids/errors.hpp"

namespace bids {

// Interval of projected covariate values [L_beta, U_beta].
struct ProjectedInterval {
    double lower = 0.0;
    double upper = 1.0;

    double length() const { return upper - lower; }
    double clamp(double u) const {
        if (u < lower) return lower;
        if (u > upper) return upper;
        return u;
    }
};

// Bin in the depth-M partition hierarchy. Layer i has n_i = prod_{l<i} b_l
// equal-width intervals; index runs over 0..n_i-1.
struct BinId {
    int layer = 1;
    std::int64_t index = 0;

    friend bool operator==(const BinId&, const BinId&) = default;
    friend auto operator<=>(const BinId&, const BinId&) = default;
};

// Batch schedule: split factors b_0..b_{M-2}, per-layer widths w_1..w_M and
// the batch grid t_0 = 0 < t_1 <= ... <= t_M = T.
struct Schedule {
    std::int64_t T = 0;
    int M = 2;
    double alpha = 1.0;
    double gamma = 2.0 / 3.0;
    double a_scale = 1.0;
    double c_B = 1.0;
    std::vector<std::int64_t> split_factors; // M-1 entries
    std::vector<double> widths;              // M entries
    std::vector<std::int64_t> grid;          // M+1 entries
    bool degenerate = false;                 // some delta_i hit 0 or the grid clipped

    // Bin count at a layer (1-based).
    std::int64_t bins_at(int layer) const {
        std::int64_t n = 1;
        for (int l = 0; l < layer && l < static_cast<int>(split_factors.size()); ++l)
            n *= split_factors[l];
        return n;
    }

    // Split factor b_layer applied when moving from `layer` to `layer + 1`
    // (n_{i+1} = n_i * b_i); layers past the factor list are pass-through.
    std::int64_t factor_after(int layer) const {
        if (layer < 1 || layer >= M) throw LeafBin("no children past layer M");
        if (layer < static_cast<int>(split_factors.size()))
            return split_factors[layer];
        return 1;
    }
};

// Split factors b_0 = floor(a^{1/3}), b_i = floor(b_{i-1}^gamma), clamped at 1,
// with a = a_scale * T^{(1-gamma)/(1-gamma^M)} and gamma = (1+alpha)/3.
std::vector<std::int64_t> compute_split_factors(std::int64_t T, int M, double alpha,
                                                double a_scale = 1.0);

// Per-layer widths w_i = |interval| / prod_{l<i} b_l; w_M repeats w_{M-1}'s
// denominator since only M-1 factors exist.
std::vector<double> compute_widths(const ProjectedInterval& interval,
                                   const std::vector<std::int64_t>& split_factors);

// Batch grid with delta_i = floor(c_B * w_i^{-3} * ln(2 T w_i)), cumulative and
// clipped at T; the final batch takes all residual rounds.
// `degenerate` reports a zero delta or clipping.
std::vector<std::int64_t> compute_grid(std::int64_t T, const std::vector<double>& widths,
                                       double c_B, bool* degenerate = nullptr);

// Full schedule assembly for the 1-d projected partition.
Schedule make_schedule(std::int64_t T, int M, double alpha, double a_scale, double c_B,
                       const ProjectedInterval& interval);

// Dimension-dependent analogue for the d-dimensional baseline: exponent 3 is
// replaced by d + 2 in both the split factors and the grid.
Schedule make_np_schedule(std::int64_t T, int M, double alpha, int d, double a_scale,
                          double c_B, const ProjectedInterval& per_axis);

// Index of the layer-`layer` interval covering u. Half-open intervals, last one
// closed on the right.
BinId bin_of(double u, int layer, const Schedule& schedule,
             const ProjectedInterval& interval);

BinId parent_of(const BinId& bin, const Schedule& schedule);

std::vector<BinId> children_of(const BinId& bin, const Schedule& schedule);

// Extent of a bin in projected units.
ProjectedInterval bin_extent(const BinId& bin, const Schedule& schedule,
                             const ProjectedInterval& interval);

std::string schedule_to_json(const Schedule& s);

} // namespace bids
