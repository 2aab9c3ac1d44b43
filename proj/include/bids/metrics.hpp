#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "bids/errors.hpp"

namespace bids {

// Per-replicate regret accounting. Cumulative regret uses oracle mean rewards;
// inferior_count tallies rounds where a strictly suboptimal arm was played.
struct RegretTrace {
    std::vector<double> cumulative;
    std::vector<std::int64_t> inferior_count;
    std::string metadata; // JSON descriptor

    void accumulate(double gap);
    double final_cumulative() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
    double final_average() const;
};

struct AggregateTrace {
    std::vector<double> mean_cumulative;
    std::vector<double> stderr_cumulative;
    std::vector<std::int64_t> mean_round; // 1-based round of each row
};

AggregateTrace aggregate_traces(const std::vector<RegretTrace>& traces);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    bool smoothed = false; // regret + 1 substitution was applied
};

// OLS slope of log(final regret) on log(T).
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

// Per-replicate CSV: t, cum_regret, avg_regret, inferior_count. Large traces
// are downsampled by a uniform stride to at most `max_rows` rows.
void write_trace_csv(std::ostream& os, const RegretTrace& trace,
                     std::int64_t max_rows = 2000);

// Aggregate CSV: t, mean_cum_regret, stderr_cum_regret, mean_avg_regret.
void write_aggregate_csv(std::ostream& os, const AggregateTrace& agg,
                         std::int64_t max_rows = 2000);

} // namespace bids
