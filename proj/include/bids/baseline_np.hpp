#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "bids/geometry.hpp"
#include "bids/policy.hpp"

namespace bids {

// Hypercube bin in the d-dimensional partition: one per-axis index per
// coordinate, all axes split by the same layer factor.
struct HyperBinId {
    int layer = 1;
    std::vector<std::int64_t> indices;

    friend bool operator==(const HyperBinId&, const HyperBinId&) = default;
    friend auto operator<=>(const HyperBinId&, const HyperBinId&) = default;
};

struct HyperBinState {
    std::vector<int> active_arms;
    std::int64_t visits = 0;
    std::vector<std::int64_t> pulls;
    std::vector<double> reward_sums;

    explicit HyperBinState(std::vector<int> arms)
        : active_arms(std::move(arms)),
          pulls(active_arms.size(), 0),
          reward_sums(active_arms.size(), 0.0) {}
    HyperBinState() = default;
};

// Nonparametric comparison policy: the same batched successive-elimination
// machinery run on a hypercube partition of [L, U]^d, with the
// dimension-dependent schedule from make_np_schedule. An approximation of
// BaSEDB, not a bit-faithful replication.
class NpPolicy {
public:
    NpPolicy(Schedule schedule, ProjectedInterval per_axis, int d, int arms);

    int choose_arm(const std::vector<double>& x) const;
    void record_reward(const std::vector<double>& x, int arm, double reward);
    EliminationReport end_batch();

    std::int64_t round() const { return round_; }
    int current_batch() const { return batch_; }
    const Schedule& schedule() const { return schedule_; }

private:
    HyperBinId bin_at(const std::vector<double>& x, int layer) const;
    std::optional<int> frozen_covering(const std::vector<double>& x) const;
    const HyperBinState* live_covering(const std::vector<double>& x) const;
    HyperBinState* live_covering(const std::vector<double>& x);

    Schedule schedule_;
    ProjectedInterval per_axis_;
    int d_;
    int arms_;
    std::map<HyperBinId, HyperBinState> live_;
    std::map<HyperBinId, int> frozen_;
    std::map<HyperBinId, HyperBinState> frozen_stats_;
    int batch_ = 1;
    std::int64_t round_ = 0;
};

} // namespace bids
