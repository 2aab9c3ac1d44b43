#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bids/geometry.hpp"
#include "bids/rng.hpp"

namespace bids {

// Labeled classification rows turned into bandit rounds: reward 1 when the
// chosen arm matches the label, 0 otherwise.
struct Dataset {
    std::vector<std::vector<double>> features;
    std::vector<int> labels; // 1..K
    int d = 0;
    int K = 0;
    std::string name;

    std::int64_t size() const { return static_cast<std::int64_t>(labels.size()); }
};

// Parses a CSV with a header row. The label column maps to contiguous integers
// 1..K by sorted distinct value. With `normalize`, each feature column is
// mapped to zero mean / unit variance (constant columns go to all zeros).
Dataset load_csv(const std::string& path, const std::string& label_column,
                 bool normalize = false);

// Pilot interval: [min, max] of the projections, expanded about its midpoint by
// factor C.
ProjectedInterval interval_from_pilot(const std::vector<double>& projections,
                                      double expansion);

// One bandit policy driven over permuted dataset rows. choose/record mirror the
// policy modules; on_boundary fires end-of-batch updates.
struct ReplayPolicy {
    std::function<int(const std::vector<double>&)> choose;
    std::function<void(const std::vector<double>&, int, double)> record;
    std::function<void(std::int64_t)> on_boundary; // called with round t when t hits a grid point
    std::vector<std::int64_t> boundaries;          // interior grid points, ascending
};

using ReplayPolicyFactory = std::function<ReplayPolicy(std::uint64_t trial_seed)>;

struct ReplayResult {
    // cumulative mismatch count per round, one row per trial
    std::vector<std::vector<std::int64_t>> cumulative_errors;
    std::vector<double> mean_rolling_error; // pointwise mean of cum_error / t
};

// Runs `trials` permuted passes over the dataset. Each trial derives its
// permutation seed from (seed, trial index); the policy sees rounds in
// permuted order and the trace records 1{chosen != label}.
ReplayResult run_replay(const Dataset& dataset, const ReplayPolicyFactory& factory,
                        int trials, std::uint64_t seed);

// CSV with columns trial, t, cum_error, rolling_error.
void write_replay_csv(std::ostream& os, const ReplayResult& result,
                      std::int64_t max_rows_per_trial = 2000);

} // namespace bids
