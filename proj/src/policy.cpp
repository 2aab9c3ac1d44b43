#include "bids/policy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace bids {

double threshold_U(std::int64_t m, std::int64_t T, double bin_width) {
    if (m <= 0) return std::numeric_limits<double>::infinity();
    const double arg = 2.0 * static_cast<double>(T) * bin_width;
    if (arg <= 1.0) return std::numeric_limits<double>::infinity();
    return 4.0 * std::sqrt(2.0 * std::log(arg) / static_cast<double>(m));
}

std::string EliminationReport::to_json_lines() const {
    std::ostringstream out;
    for (const auto& b : bins) {
        nlohmann::json j;
        j["batch"] = b.batch;
        j["bin_layer"] = b.bin.layer;
        j["bin_index"] = b.bin.index;
        j["eliminated_arms"] = b.eliminated;
        j["survivors"] = b.survivors;
        j["split"] = b.split;
        out << j.dump() << '\n';
    }
    return out.str();
}

BidsPolicy::BidsPolicy(Schedule schedule, ProjectedInterval interval,
                       std::vector<double> direction, int arms)
    : schedule_(std::move(schedule)),
      interval_(interval),
      direction_(std::move(direction)),
      arms_(arms) {
    if (arms_ < 2) throw InvalidParameter("need at least two arms");
    if (!(interval_.lower < interval_.upper))
        throw InvalidParameter("interval must have lower < upper");
    std::vector<int> all_arms(arms_);
    for (int k = 0; k < arms_; ++k) all_arms[k] = k + 1;
    const std::int64_t n1 = schedule_.bins_at(1);
    for (std::int64_t i = 0; i < n1; ++i) {
        BinId id{1, i};
        live_.emplace(id, BinState(id, all_arms));
    }
}

double BidsPolicy::project(const std::vector<double>& x) const {
    if (x.size() != direction_.size())
        throw InvalidParameter("covariate dimension mismatch");
    double u = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) u += x[i] * direction_[i];
    return u;
}

std::optional<int> BidsPolicy::frozen_covering(double u) const {
    for (int layer = 1; layer <= schedule_.M; ++layer) {
        auto it = frozen_.find(bin_of(u, layer, schedule_, interval_));
        if (it != frozen_.end()) return it->second;
    }
    return std::nullopt;
}

const BinState* BidsPolicy::live_covering(double u) const {
    for (int layer = 1; layer <= schedule_.M; ++layer) {
        auto it = live_.find(bin_of(u, layer, schedule_, interval_));
        if (it != live_.end()) return &it->second;
    }
    return nullptr;
}

BinState* BidsPolicy::live_covering(double u) {
    return const_cast<BinState*>(std::as_const(*this).live_covering(u));
}

int BidsPolicy::choose_arm_projected(double u) const {
    u = interval_.clamp(u);
    if (auto survivor = frozen_covering(u)) return *survivor;
    const BinState* state = live_covering(u);
    if (!state) throw NotInitialized("no bin covers the projected value");
    const auto n = static_cast<std::int64_t>(state->active_arms.size());
    return state->active_arms[static_cast<std::size_t>(state->visits % n)];
}

int BidsPolicy::choose_arm(const std::vector<double>& x) const {
    return choose_arm_projected(project(x));
}

void BidsPolicy::record_reward_projected(double u, int arm, double reward) {
    u = interval_.clamp(u);
    BinState* state = live_covering(u);
    if (!state) {
        // Frozen bins keep accumulating for diagnostics only.
        for (int layer = 1; layer <= schedule_.M; ++layer) {
            auto it = frozen_stats_.find(bin_of(u, layer, schedule_, interval_));
            if (it != frozen_stats_.end()) {
                state = &it->second;
                break;
            }
        }
    }
    if (!state) throw NotInitialized("no bin covers the projected value");
    auto slot = std::find(state->active_arms.begin(), state->active_arms.end(), arm);
    if (slot == state->active_arms.end())
        throw InvalidParameter("arm is not active in the covering bin");
    const auto idx = static_cast<std::size_t>(slot - state->active_arms.begin());
    state->visits += 1;
    state->pulls[idx] += 1;
    state->reward_sums[idx] += reward;
    round_ += 1;
}

void BidsPolicy::record_reward(const std::vector<double>& x, int arm, double reward) {
    record_reward_projected(project(x), arm, reward);
}

EliminationReport BidsPolicy::end_batch() {
    if (batch_ >= schedule_.M) throw NotAtBoundary("no elimination after the final batch");
    if (round_ != schedule_.grid[batch_])
        throw NotAtBoundary("round is not at the batch boundary");

    EliminationReport report;
    report.batch = batch_;
    std::map<BinId, BinState> next;

    for (auto& [id, state] : live_) {
        const double width = schedule_.widths[id.layer - 1];
        const double radius = threshold_U(state.visits, schedule_.T, width);
        BinElimination entry;
        entry.batch = batch_;
        entry.bin = id;

        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < state.active_arms.size(); ++k)
            if (auto m = state.mean(static_cast<int>(k))) best = std::max(best, *m);

        std::vector<int> survivors;
        for (std::size_t k = 0; k < state.active_arms.size(); ++k) {
            auto m = state.mean(static_cast<int>(k));
            // Arms with zero pulls are never eliminable.
            if (m && best - *m > radius) {
                entry.eliminated.push_back(state.active_arms[k]);
            } else {
                survivors.push_back(state.active_arms[k]);
            }
        }
        entry.survivors = survivors;

        if (survivors.size() == 1) {
            entry.frozen = true;
            frozen_.emplace(id, survivors.front());
            BinState frozen_state(id, survivors);
            frozen_stats_.emplace(id, std::move(frozen_state));
        } else {
            entry.split = true;
            for (const BinId& child : children_of(id, schedule_))
                next.emplace(child, BinState(child, survivors));
        }
        report.bins.push_back(std::move(entry));
    }

    live_ = std::move(next);
    batch_ += 1;
    return report;
}

} // namespace bids
