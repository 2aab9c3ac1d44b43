#include "bids/replay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "bids/errors.hpp"

namespace bids {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim whitespace and CR
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace

Dataset load_csv(const std::string& path, const std::string& label_column,
                 bool normalize) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw EmptyDataset("empty file: " + path);
    const std::vector<std::string> header = split_csv_line(line);
    int label_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == label_column) label_idx = static_cast<int>(i);
    if (label_idx < 0) throw ParseError("label column '" + label_column + "' not found");

    Dataset ds;
    ds.name = path;
    ds.d = static_cast<int>(header.size()) - 1;
    std::vector<std::string> raw_labels;

    std::int64_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw ParseError("row " + std::to_string(row_no) + ": expected " +
                             std::to_string(header.size()) + " cells");
        std::vector<double> feats;
        feats.reserve(ds.d);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (static_cast<int>(c) == label_idx) continue;
            try {
                std::size_t pos = 0;
                const double v = std::stod(cells[c], &pos);
                if (pos != cells[c].size()) throw std::invalid_argument("trailing");
                feats.push_back(v);
            } catch (const std::exception&) {
                throw ParseError("row " + std::to_string(row_no) + ", column '" +
                                 header[c] + "': non-numeric cell '" + cells[c] + "'");
            }
        }
        ds.features.push_back(std::move(feats));
        raw_labels.push_back(cells[label_idx]);
    }
    if (ds.features.empty()) throw EmptyDataset("no data rows in " + path);

    // Map distinct label strings to 1..K by sorted order.
    std::map<std::string, int> label_map;
    for (const auto& l : raw_labels) label_map.emplace(l, 0);
    int next = 1;
    for (auto& [key, id] : label_map) id = next++;
    ds.K = next - 1;
    ds.labels.reserve(raw_labels.size());
    for (const auto& l : raw_labels) ds.labels.push_back(label_map.at(l));

    if (normalize) {
        const auto n = static_cast<double>(ds.features.size());
        for (int c = 0; c < ds.d; ++c) {
            double sum = 0.0, sumsq = 0.0;
            for (const auto& row : ds.features) {
                sum += row[c];
                sumsq += row[c] * row[c];
            }
            const double mean = sum / n;
            const double var = std::max(0.0, sumsq / n - mean * mean);
            const double sd = std::sqrt(var);
            for (auto& row : ds.features)
                row[c] = sd > 1e-12 ? (row[c] - mean) / sd : 0.0;
        }
    }
    return ds;
}

ProjectedInterval interval_from_pilot(const std::vector<double>& projections,
                                      double expansion) {
    if (projections.size() < 2) throw InvalidParameter("need at least two projections");
    if (expansion < 1.0) throw InvalidParameter("expansion factor must be >= 1");
    const auto [lo_it, hi_it] = std::minmax_element(projections.begin(), projections.end());
    const double a = *lo_it, b = *hi_it;
    if (!(b > a)) throw DegenerateInterval("all projections identical");
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * expansion * (b - a);
    return ProjectedInterval{mid - half, mid + half};
}

ReplayResult run_replay(const Dataset& dataset, const ReplayPolicyFactory& factory,
                        int trials, std::uint64_t seed) {
    if (trials < 1) throw InvalidParameter("trials must be >= 1");
    const std::int64_t n = dataset.size();
    ReplayResult result;
    result.cumulative_errors.resize(trials);
    result.mean_rolling_error.assign(n, 0.0);

    for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(trial));
        Rng rng(trial_seed);
        std::vector<std::int64_t> order(n);
        for (std::int64_t i = 0; i < n; ++i) order[i] = i;
        for (std::int64_t i = n - 1; i > 0; --i)
            std::swap(order[i], order[rng.uniform_int(static_cast<std::uint64_t>(i + 1))]);

        ReplayPolicy policy = factory(trial_seed);
        auto boundary = policy.boundaries.begin();
        auto& cum = result.cumulative_errors[trial];
        cum.resize(n);
        std::int64_t errors = 0;
        for (std::int64_t t = 0; t < n; ++t) {
            const auto& x = dataset.features[order[t]];
            const int label = dataset.labels[order[t]];
            const int arm = policy.choose(x);
            const double reward = arm == label ? 1.0 : 0.0;
            policy.record(x, arm, reward);
            if (reward == 0.0) ++errors;
            cum[t] = errors;
            if (boundary != policy.boundaries.end() && t + 1 == *boundary) {
                policy.on_boundary(t + 1);
                ++boundary;
            }
        }
        for (std::int64_t t = 0; t < n; ++t)
            result.mean_rolling_error[t] +=
                static_cast<double>(cum[t]) / static_cast<double>(t + 1);
    }
    for (double& v : result.mean_rolling_error) v /= static_cast<double>(trials);
    return result;
}

void write_replay_csv(std::ostream& os, const ReplayResult& result,
                      std::int64_t max_rows_per_trial) {
    os << "trial,t,cum_error,rolling_error\n";
    for (std::size_t trial = 0; trial < result.cumulative_errors.size(); ++trial) {
        const auto& cum = result.cumulative_errors[trial];
        const auto n = static_cast<std::int64_t>(cum.size());
        std::int64_t stride = 1;
        if (max_rows_per_trial > 0 && n > max_rows_per_trial)
            stride = (n + max_rows_per_trial - 1) / max_rows_per_trial;
        for (std::int64_t t = 1; t <= n; ++t) {
            if (t % stride != 0 && t != n) continue;
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%zu,%lld,%lld,%.17g\n", trial,
                          static_cast<long long>(t), static_cast<long long>(cum[t - 1]),
                          static_cast<double>(cum[t - 1]) / static_cast<double>(t));
            os << buf;
        }
    }
}

} // namespace bids
