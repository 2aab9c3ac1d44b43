#include "bids/metrics.hpp"

#include <cmath>
#include <cstdio>

namespace bids {

void RegretTrace::accumulate(double gap) {
    if (gap < 0.0) throw InvalidParameter("oracle gap must be nonnegative");
    const double prev = cumulative.empty() ? 0.0 : cumulative.back();
    const std::int64_t prev_inf = inferior_count.empty() ? 0 : inferior_count.back();
    cumulative.push_back(prev + gap);
    inferior_count.push_back(prev_inf + (gap > 0.0 ? 1 : 0));
}

double RegretTrace::final_average() const {
    if (cumulative.empty()) return 0.0;
    return cumulative.back() / static_cast<double>(cumulative.size());
}

AggregateTrace aggregate_traces(const std::vector<RegretTrace>& traces) {
    AggregateTrace agg;
    if (traces.empty()) return agg;
    const std::size_t T = traces.front().cumulative.size();
    for (const auto& tr : traces)
        if (tr.cumulative.size() != T)
            throw InvalidParameter("traces must share a horizon");
    const double n = static_cast<double>(traces.size());
    agg.mean_cumulative.resize(T);
    agg.stderr_cumulative.resize(T);
    agg.mean_round.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        double sum = 0.0, sumsq = 0.0;
        for (const auto& tr : traces) {
            sum += tr.cumulative[t];
            sumsq += tr.cumulative[t] * tr.cumulative[t];
        }
        const double mean = sum / n;
        agg.mean_cumulative[t] = mean;
        agg.mean_round[t] = static_cast<std::int64_t>(t) + 1;
        const double var = n > 1.0 ? std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0)) : 0.0;
        agg.stderr_cumulative[t] = std::sqrt(var / n);
    }
    return agg;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw InvalidParameter("need at least three points");
    RateFit fit;
    double shift = 0.0;
    for (const auto& [T, r] : points) {
        if (!(T > 0.0)) throw InvalidParameter("horizons must be positive");
        if (r <= 0.0) fit.smoothed = true;
    }
    if (fit.smoothed) shift = 1.0;

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(points.size());
    for (const auto& [T, r] : points) {
        const double x = std::log(T);
        const double y = std::log(r + shift);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

namespace {

std::int64_t stride_for(std::size_t rows, std::int64_t max_rows) {
    if (max_rows <= 0 || static_cast<std::int64_t>(rows) <= max_rows) return 1;
    return (static_cast<std::int64_t>(rows) + max_rows - 1) / max_rows;
}

void print_row(std::ostream& os, std::int64_t t, double cum, double avg,
               std::int64_t inferior) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%lld\n",
                  static_cast<long long>(t), cum, avg, static_cast<long long>(inferior));
    os << buf;
}

} // namespace

void write_trace_csv(std::ostream& os, const RegretTrace& trace, std::int64_t max_rows) {
    os << "t,cum_regret,avg_regret,inferior_count\n";
    const auto n = trace.cumulative.size();
    const std::int64_t stride = stride_for(n, max_rows);
    for (std::size_t i = 0; i < n; ++i) {
        const auto t = static_cast<std::int64_t>(i) + 1;
        if (t % stride != 0 && i + 1 != n) continue;
        print_row(os, t, trace.cumulative[i], trace.cumulative[i] / static_cast<double>(t),
                  trace.inferior_count[i]);
    }
}

void write_aggregate_csv(std::ostream& os, const AggregateTrace& agg,
                         std::int64_t max_rows) {
    os << "t,mean_cum_regret,stderr_cum_regret,mean_avg_regret\n";
    const auto n = agg.mean_cumulative.size();
    const std::int64_t stride = stride_for(n, max_rows);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t t = agg.mean_round[i];
        if (t % stride != 0 && i + 1 != n) continue;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g\n",
                      static_cast<long long>(t), agg.mean_cumulative[i],
                      agg.stderr_cumulative[i],
                      agg.mean_cumulative[i] / static_cast<double>(t));
        os << buf;
    }
}

} // namespace bids
