#include "bids/baseline_np.hpp"

#include <algorithm>
#include <cmath>

namespace bids {

NpPolicy::NpPolicy(Schedule schedule, ProjectedInterval per_axis, int d, int arms)
    : schedule_(std::move(schedule)), per_axis_(per_axis), d_(d), arms_(arms) {
    if (d_ < 1) throw InvalidParameter("d must be >= 1");
    if (arms_ < 2) throw InvalidParameter("need at least two arms");
    std::vector<int> all_arms(arms_);
    for (int k = 0; k < arms_; ++k) all_arms[k] = k + 1;

    // Layer-1 hypercubes: the d-fold product of the b_0 axis intervals.
    const std::int64_t n1 = schedule_.bins_at(1);
    std::vector<std::int64_t> idx(d_, 0);
    for (;;) {
        live_.emplace(HyperBinId{1, idx}, HyperBinState(all_arms));
        int axis = d_ - 1;
        while (axis >= 0 && ++idx[axis] == n1) idx[axis--] = 0;
        if (axis < 0) break;
    }
}

HyperBinId NpPolicy::bin_at(const std::vector<double>& x, int layer) const {
    HyperBinId id{layer, std::vector<std::int64_t>(d_)};
    for (int i = 0; i < d_; ++i) {
        const double u = per_axis_.clamp(x[i]);
        id.indices[i] = bin_of(u, layer, schedule_, per_axis_).index;
    }
    return id;
}

std::optional<int> NpPolicy::frozen_covering(const std::vector<double>& x) const {
    for (int layer = 1; layer <= schedule_.M; ++layer) {
        auto it = frozen_.find(bin_at(x, layer));
        if (it != frozen_.end()) return it->second;
    }
    return std::nullopt;
}

const HyperBinState* NpPolicy::live_covering(const std::vector<double>& x) const {
    for (int layer = 1; layer <= schedule_.M; ++layer) {
        auto it = live_.find(bin_at(x, layer));
        if (it != live_.end()) return &it->second;
    }
    return nullptr;
}

HyperBinState* NpPolicy::live_covering(const std::vector<double>& x) {
    return const_cast<HyperBinState*>(std::as_const(*this).live_covering(x));
}

int NpPolicy::choose_arm(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != d_) throw InvalidParameter("dimension mismatch");
    if (auto survivor = frozen_covering(x)) return *survivor;
    const HyperBinState* state = live_covering(x);
    if (!state) throw NotInitialized("no hypercube covers x");
    const auto n = static_cast<std::int64_t>(state->active_arms.size());
    return state->active_arms[static_cast<std::size_t>(state->visits % n)];
}

void NpPolicy::record_reward(const std::vector<double>& x, int arm, double reward) {
    HyperBinState* state = live_covering(x);
    if (!state) {
        for (int layer = 1; layer <= schedule_.M; ++layer) {
            auto it = frozen_stats_.find(bin_at(x, layer));
            if (it != frozen_stats_.end()) {
                state = &it->second;
                break;
            }
        }
    }
    if (!state) throw NotInitialized("no hypercube covers x");
    auto slot = std::find(state->active_arms.begin(), state->active_arms.end(), arm);
    if (slot == state->active_arms.end())
        throw InvalidParameter("arm is not active in the covering hypercube");
    const auto idx = static_cast<std::size_t>(slot - state->active_arms.begin());
    state->visits += 1;
    state->pulls[idx] += 1;
    state->reward_sums[idx] += reward;
    round_ += 1;
}

EliminationReport NpPolicy::end_batch() {
    if (batch_ >= schedule_.M) throw NotAtBoundary("no elimination after the final batch");
    if (round_ != schedule_.grid[batch_])
        throw NotAtBoundary("round is not at the batch boundary");

    EliminationReport report;
    report.batch = batch_;
    std::map<HyperBinId, HyperBinState> next;

    for (auto& [id, state] : live_) {
        const double width = schedule_.widths[id.layer - 1]; // hypercube edge length
        const double radius = threshold_U(state.visits, schedule_.T, width);
        BinElimination entry;
        entry.batch = batch_;
        entry.bin = BinId{id.layer, id.indices.front()};

        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < state.active_arms.size(); ++k)
            if (state.pulls[k] > 0)
                best = std::max(best, state.reward_sums[k] / state.pulls[k]);

        std::vector<int> survivors;
        for (std::size_t k = 0; k < state.active_arms.size(); ++k) {
            if (state.pulls[k] > 0 &&
                best - state.reward_sums[k] / state.pulls[k] > radius) {
                entry.eliminated.push_back(state.active_arms[k]);
            } else {
                survivors.push_back(state.active_arms[k]);
            }
        }
        entry.survivors = survivors;

        if (survivors.size() == 1) {
            entry.frozen = true;
            frozen_.emplace(id, survivors.front());
            frozen_stats_.emplace(id, HyperBinState(survivors));
        } else {
            entry.split = true;
            const std::int64_t b = schedule_.factor_after(id.layer);
            std::vector<std::int64_t> offset(d_, 0);
            for (;;) {
                HyperBinId child{id.layer + 1, std::vector<std::int64_t>(d_)};
                for (int i = 0; i < d_; ++i)
                    child.indices[i] = id.indices[i] * b + offset[i];
                next.emplace(std::move(child), HyperBinState(survivors));
                int axis = d_ - 1;
                while (axis >= 0 && ++offset[axis] == b) offset[axis--] = 0;
                if (axis < 0) break;
            }
        }
        report.bins.push_back(std::move(entry));
    }

    live_ = std::move(next);
    batch_ += 1;
    return report;
}

} // namespace bids
