#include "bids/geometry.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace bids {

namespace {

// Shared by the index-projected schedule (exponent 3) and the d-dimensional
// baseline schedule (exponent d + 2).
std::vector<std::int64_t> split_factors_impl(std::int64_t T, int M, double alpha,
                                             double a_scale, int exponent) {
    if (T < 2) throw InvalidParameter("T must be >= 2");
    if (M < 2) throw InvalidParameter("M must be >= 2");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidParameter("alpha must be in (0,1]");
    if (!(a_scale > 0.0)) throw InvalidParameter("a_scale must be positive");

    const long double gamma = (1.0L + static_cast<long double>(alpha)) / exponent;
    const long double gM = std::pow(gamma, static_cast<long double>(M));
    const long double rate = (1.0L - gamma) / (1.0L - gM);
    const long double a =
        static_cast<long double>(a_scale) * std::pow(static_cast<long double>(T), rate);

    std::vector<std::int64_t> b(M - 1);
    long double b_prev = std::pow(a, 1.0L / exponent);
    b[0] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(b_prev)));
    for (int i = 1; i < M - 1; ++i) {
        const long double next = std::pow(static_cast<long double>(b[i - 1]), gamma);
        b[i] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(next)));
    }
    return b;
}

std::vector<std::int64_t> grid_impl(std::int64_t T, const std::vector<double>& widths,
                                    double c_B, int exponent, bool* degenerate) {
    if (!(c_B > 0.0)) throw InvalidParameter("c_B must be positive");
    const int M = static_cast<int>(widths.size());
    bool degen = false;
    std::vector<std::int64_t> grid(M + 1, 0);
    std::int64_t t = 0;
    for (int i = 1; i <= M - 1; ++i) {
        const long double w = widths[i - 1];
        const long double arg = 2.0L * static_cast<long double>(T) * w;
        std::int64_t delta = 0;
        if (arg > 1.0L) {
            const long double v = static_cast<long double>(c_B) *
                                  std::pow(w, static_cast<long double>(-exponent)) *
                                  std::log(arg);
            delta = static_cast<std::int64_t>(std::floor(v));
        }
        if (delta <= 0) degen = true;
        t += delta;
        if (t >= T) {
            t = T;
            degen = true;
        }
        grid[i] = t;
    }
    grid[M] = T;
    if (degenerate) *degenerate = degen;
    return grid;
}

Schedule schedule_impl(std::int64_t T, int M, double alpha, double a_scale, double c_B,
                       const ProjectedInterval& interval, int exponent) {
    if (!(interval.lower < interval.upper))
        throw InvalidParameter("interval must have lower < upper");
    Schedule s;
    s.T = T;
    s.M = M;
    s.alpha = alpha;
    s.gamma = (1.0 + alpha) / exponent;
    s.a_scale = a_scale;
    s.c_B = c_B;
    s.split_factors = split_factors_impl(T, M, alpha, a_scale, exponent);
    s.widths = compute_widths(interval, s.split_factors);
    s.grid = grid_impl(T, s.widths, c_B, exponent, &s.degenerate);
    return s;
}

} // namespace

std::vector<std::int64_t> compute_split_factors(std::int64_t T, int M, double alpha,
                                                double a_scale) {
    return split_factors_impl(T, M, alpha, a_scale, 3);
}

std::vector<double> compute_widths(const ProjectedInterval& interval,
                                   const std::vector<std::int64_t>& split_factors) {
    const int M = static_cast<int>(split_factors.size()) + 1;
    std::vector<double> widths(M);
    std::int64_t n = 1;
    for (int i = 0; i < M; ++i) {
        if (i < M - 1) {
            if (split_factors[i] < 1) throw InvalidParameter("split factors must be >= 1");
            n *= split_factors[i];
        }
        // Layer i+1 has n_i = prod_{l <= i} b_l bins; the final layer inherits
        // the last product since only M-1 factors exist.
        widths[i] = interval.length() / static_cast<double>(n);
    }
    return widths;
}

std::vector<std::int64_t> compute_grid(std::int64_t T, const std::vector<double>& widths,
                                       double c_B, bool* degenerate) {
    return grid_impl(T, widths, c_B, 3, degenerate);
}

Schedule make_schedule(std::int64_t T, int M, double alpha, double a_scale, double c_B,
                       const ProjectedInterval& interval) {
    return schedule_impl(T, M, alpha, a_scale, c_B, interval, 3);
}

Schedule make_np_schedule(std::int64_t T, int M, double alpha, int d, double a_scale,
                          double c_B, const ProjectedInterval& per_axis) {
    if (d < 1) throw InvalidParameter("d must be >= 1");
    return schedule_impl(T, M, alpha, a_scale, c_B, per_axis, d + 2);
}

BinId bin_of(double u, int layer, const Schedule& schedule,
             const ProjectedInterval& interval) {
    if (layer < 1 || layer > schedule.M) throw InvalidParameter("layer out of range");
    if (u < interval.lower || u > interval.upper)
        throw OutOfRange("projected value outside interval");
    const std::int64_t n = schedule.bins_at(layer);
    const double w = interval.length() / static_cast<double>(n);
    auto idx = static_cast<std::int64_t>(std::floor((u - interval.lower) / w));
    if (idx >= n) idx = n - 1; // last interval closed on the right
    if (idx < 0) idx = 0;
    return BinId{layer, idx};
}

BinId parent_of(const BinId& bin, const Schedule& schedule) {
    if (bin.layer < 2) throw InvalidParameter("layer-1 bins have no parent");
    const std::int64_t b = schedule.factor_after(bin.layer - 1);
    return BinId{bin.layer - 1, bin.index / b};
}

std::vector<BinId> children_of(const BinId& bin, const Schedule& schedule) {
    if (bin.layer >= schedule.M) throw LeafBin("bin is at the final layer");
    const std::int64_t b = schedule.factor_after(bin.layer);
    std::vector<BinId> out;
    out.reserve(b);
    for (std::int64_t j = 0; j < b; ++j)
        out.push_back(BinId{bin.layer + 1, bin.index * b + j});
    return out;
}

ProjectedInterval bin_extent(const BinId& bin, const Schedule& schedule,
                             const ProjectedInterval& interval) {
    const std::int64_t n = schedule.bins_at(bin.layer);
    const double w = interval.length() / static_cast<double>(n);
    return ProjectedInterval{interval.lower + bin.index * w,
                             interval.lower + (bin.index + 1) * w};
}

std::string schedule_to_json(const Schedule& s) {
    nlohmann::json j;
    j["T"] = s.T;
    j["M"] = s.M;
    j["alpha"] = s.alpha;
    j["gamma"] = s.gamma;
    j["a_scale"] = s.a_scale;
    j["c_B"] = s.c_B;
    j["split_factors"] = s.split_factors;
    j["widths"] = s.widths;
    j["grid"] = s.grid;
    j["degenerate"] = s.degenerate;
    return j.dump();
}

} // namespace bids
