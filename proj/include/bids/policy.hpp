#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bids/geometry.hpp"

namespace bids {

// Per-bin statistics: visit count m, and per-arm pull counts / reward sums for
// the bin's active arms. Arms are pulled cyclically in the fixed order of
// `active_arms`, so pull counts differ by at most one.
struct BinState {
    BinId bin;
    std::vector<int> active_arms; // 1-based arm indices, fixed order
    std::int64_t visits = 0;
    std::vector<std::int64_t> pulls;  // parallel to active_arms
    std::vector<double> reward_sums;  // parallel to active_arms

    explicit BinState(BinId id, std::vector<int> arms)
        : bin(id),
          active_arms(std::move(arms)),
          pulls(active_arms.size(), 0),
          reward_sums(active_arms.size(), 0.0) {}
    BinState() = default;

    std::optional<double> mean(int slot) const {
        if (pulls[slot] == 0) return std::nullopt;
        return reward_sums[slot] / static_cast<double>(pulls[slot]);
    }
};

struct BinElimination {
    int batch = 0;
    BinId bin;
    std::vector<int> eliminated;
    std::vector<int> survivors;
    bool split = false;
    bool frozen = false;
};

struct EliminationReport {
    int batch = 0;
    std::vector<BinElimination> bins;

    std::string to_json_lines() const;
};

// Confidence radius U(m, T, |C|) = 4 sqrt(2 ln(2 T w) / m). Returns +inf when
// m = 0 or the log argument is <= 1, which disables elimination.
double threshold_U(std::int64_t m, std::int64_t T, double bin_width);

// BIDS policy: cyclic pulls within active bins, end-of-batch successive arm
// elimination, dynamic bin splitting along the projected direction.
class BidsPolicy {
public:
    BidsPolicy(Schedule schedule, ProjectedInterval interval,
               std::vector<double> direction, int arms);

    // Projects x onto the working direction (clamping to the interval) and
    // returns the arm to pull this round. Does not mutate state.
    int choose_arm(const std::vector<double>& x) const;

    int choose_arm_projected(double u) const;

    // Records the observed reward for the arm returned by the matching
    // choose_arm call, and advances the round counter.
    void record_reward(const std::vector<double>& x, int arm, double reward);
    void record_reward_projected(double u, int arm, double reward);

    // Runs the batch-end elimination/split pass. Must be called exactly at a
    // grid boundary t_i with i < M.
    EliminationReport end_batch();

    std::int64_t round() const { return round_; }
    int current_batch() const { return batch_; }
    const Schedule& schedule() const { return schedule_; }
    const ProjectedInterval& interval() const { return interval_; }
    const std::vector<double>& direction() const { return direction_; }
    const std::map<BinId, BinState>& live_bins() const { return live_; }
    const std::map<BinId, int>& frozen_bins() const { return frozen_; }

    double project(const std::vector<double>& x) const;

private:
    // Returns the frozen survivor covering u, if any.
    std::optional<int> frozen_covering(double u) const;
    const BinState* live_covering(double u) const;
    BinState* live_covering(double u);

    Schedule schedule_;
    ProjectedInterval interval_;
    std::vector<double> direction_;
    int arms_;
    std::map<BinId, BinState> live_;
    std::map<BinId, int> frozen_;            // bin -> surviving arm
    std::map<BinId, BinState> frozen_stats_; // diagnostics only
    int batch_ = 1;
    std::int64_t round_ = 0;
};

} // namespace bids
