#include "bids/envs.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace bids {

namespace {

double tent(double x) { return std::abs(x) <= 1.0 ? 1.0 - std::abs(x) : 0.0; }

std::vector<double> random_unit_vector(int d, Rng& rng) {
    std::vector<double> v(d);
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (int i = 0; i < d; ++i) {
            v[i] = rng.normal();
            norm2 += v[i] * v[i];
        }
    } while (norm2 < 1e-24);
    const double norm = std::sqrt(norm2);
    for (double& c : v) c /= norm;
    return v;
}

} // namespace

BumpLink BumpLink::make(double baseline, int B, double lo, double hi, Rng& rng) {
    BumpLink link;
    link.baseline = baseline;
    link.bump_count_param = B;
    link.lo = lo;
    link.hi = hi;
    link.signs.resize(B / 2);
    for (int& s : link.signs) s = rng.sign();
    return link;
}

double eval_bump_link(const BumpLink& link, double u) {
    const double span = link.hi - link.lo;
    const double B = static_cast<double>(link.bump_count_param);
    double sum = 0.0;
    for (std::size_t j = 0; j < link.signs.size(); ++j) {
        const double center = link.lo + (2.0 * (j + 1) - 1.0) * span / B;
        sum += link.signs[j] * tent(B / span * (u - center));
    }
    return link.baseline + 2.0 / B * sum;
}

HardInstance HardInstance::make(double h, double alpha, Rng& rng, double amplitude) {
    if (!(h > 0.0 && h <= 1.0)) throw InvalidParameter("h must be in (0,1]");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidParameter("alpha must be in [0,1]");
    HardInstance inst;
    inst.h = h;
    inst.amplitude = std::min(amplitude, 0.25);
    const auto n = static_cast<std::int64_t>(std::llround(1.0 / h));
    auto D = static_cast<std::int64_t>(std::ceil(std::pow(h, -(1.0 - alpha))));
    if (D > n) D = n;
    inst.bits.resize(D);
    inst.centers.resize(D);
    for (std::int64_t j = 0; j < D; ++j) {
        inst.bits[j] = rng.sign() > 0 ? 2 : 1;
        inst.centers[j] = -0.5 + (static_cast<double>(j) + 0.5) * h;
    }
    return inst;
}

double eval_hard_instance(const HardInstance& inst, double u) {
    double sum = 0.0;
    for (std::size_t j = 0; j < inst.bits.size(); ++j) {
        const double t = (u - inst.centers[j]) / inst.h;
        if (std::abs(t) <= 0.5) sum += (2.0 * inst.bits[j] - 3.0) * (1.0 - std::abs(2.0 * t));
    }
    return 0.5 + inst.amplitude * inst.h * sum;
}

double Environment::oracle_best(const std::vector<double>& x) const {
    double best = mean_reward(1, x);
    for (int k = 2; k <= arms; ++k) best = std::max(best, mean_reward(k, x));
    return best;
}

double Environment::oracle_regret(const std::vector<double>& x, int arm) const {
    return oracle_best(x) - mean_reward(arm, x);
}

std::vector<double> sample_truncated_mvn(const std::vector<double>& mean,
                                         const std::vector<double>& cov_diag,
                                         const std::vector<std::pair<double, double>>& box,
                                         Rng& rng) {
    constexpr std::int64_t kMaxRejections = 100000;
    const int d = static_cast<int>(mean.size());
    std::vector<double> x(d);
    for (int i = 0; i < d; ++i) {
        if (!(box[i].first < box[i].second)) throw InvalidParameter("empty box");
        const double sd = std::sqrt(cov_diag[i]);
        std::int64_t rejections = 0;
        for (;;) {
            const double v = rng.normal(mean[i], sd);
            if (v >= box[i].first && v <= box[i].second) {
                x[i] = v;
                break;
            }
            if (++rejections >= kMaxRejections)
                throw AcceptanceTooLow("truncation box rejects nearly all mass");
        }
    }
    return x;
}

Environment make_setting(int setting, int d, double sigma, Rng& rng, CovariateLaw law) {
    if (setting != 1 && setting != 2) throw InvalidParameter("setting must be 1 or 2");
    if (d < 1) throw InvalidParameter("d must be >= 1");
    if (sigma < 0.0) throw InvalidParameter("sigma must be >= 0");

    const double bound = 3.0 * std::sqrt(static_cast<double>(d));
    Environment env;
    env.d = d;
    env.arms = 2;
    env.beta0 = random_unit_vector(d, rng);

    const BumpLink arm1 = BumpLink::make(0.5, 8, -bound, bound, rng);
    std::function<double(double)> link2;
    nlohmann::json desc;
    if (setting == 1) {
        link2 = [](double u) { return 0.5 + u; };
    } else {
        const BumpLink second = BumpLink::make(0.75, 5, -bound, bound, rng);
        link2 = [second](double u) { return eval_bump_link(second, u); };
        desc["arm2_signs"] = second.signs;
    }

    const std::vector<double> beta = env.beta0;
    env.mean_reward = [arm1, link2, beta](int arm, const std::vector<double>& x) {
        double u = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) u += x[i] * beta[i];
        return arm == 1 ? eval_bump_link(arm1, u) : link2(u);
    };

    const std::vector<double> mean(d, 0.0);
    const std::vector<double> cov(d, 25.0);
    const std::vector<std::pair<double, double>> box(d, {-3.0, 3.0});
    switch (law) {
        case CovariateLaw::TruncatedNormal:
            env.sample_covariate = [mean, cov, box](Rng& r) {
                return sample_truncated_mvn(mean, cov, box, r);
            };
            break;
        case CovariateLaw::Normal:
            env.sample_covariate = [d](Rng& r) {
                std::vector<double> x(d);
                for (double& c : x) c = r.normal(0.0, 5.0);
                return x;
            };
            break;
        case CovariateLaw::Uniform:
            env.sample_covariate = [d](Rng& r) {
                std::vector<double> x(d);
                for (double& c : x) c = r.uniform(-3.0, 3.0);
                return x;
            };
            break;
    }
    env.sample_noise = [sigma](Rng& r) { return sigma > 0.0 ? r.normal(0.0, sigma) : 0.0; };

    desc["setting"] = setting;
    desc["d"] = d;
    desc["sigma"] = sigma;
    desc["beta0"] = env.beta0;
    desc["arm1_signs"] = arm1.signs;
    desc["covariate_law"] = law == CovariateLaw::TruncatedNormal ? "truncated_normal"
                            : law == CovariateLaw::Normal        ? "normal"
                                                                 : "uniform";
    env.description = desc.dump();
    return env;
}

Environment make_hard_env(const HardInstance& inst, double sigma) {
    Environment env;
    env.d = 1;
    env.arms = 2;
    env.beta0 = {1.0};
    env.sample_covariate = [](Rng& r) { return std::vector<double>{r.uniform(-0.5, 0.5)}; };
    env.mean_reward = [inst](int arm, const std::vector<double>& x) {
        return arm == 1 ? eval_hard_instance(inst, x[0]) : 0.5;
    };
    env.sample_noise = [sigma](Rng& r) { return sigma > 0.0 ? r.normal(0.0, sigma) : 0.0; };
    nlohmann::json desc;
    desc["kind"] = "hard_instance";
    desc["h"] = inst.h;
    desc["amplitude"] = inst.amplitude;
    desc["bits"] = inst.bits;
    desc["sigma"] = sigma;
    env.description = desc.dump();
    return env;
}

std::vector<std::pair<double, double>> margin_probe(const Environment& env,
                                                    const std::vector<double>& deltas,
                                                    std::int64_t n_samples, Rng& rng) {
    if (n_samples < 1000) throw InvalidParameter("need at least 1000 samples");
    std::vector<std::int64_t> hits(deltas.size(), 0);
    for (std::int64_t i = 0; i < n_samples; ++i) {
        const std::vector<double> x = env.sample_covariate(rng);
        const double gap = std::abs(env.mean_reward(1, x) - env.mean_reward(2, x));
        for (std::size_t j = 0; j < deltas.size(); ++j)
            if (gap > 0.0 && gap <= deltas[j]) hits[j] += 1;
    }
    std::vector<std::pair<double, double>> out(deltas.size());
    for (std::size_t j = 0; j < deltas.size(); ++j)
        out[j] = {deltas[j], static_cast<double>(hits[j]) / static_cast<double>(n_samples)};
    return out;
}

double lipschitz_probe(const std::function<double(double)>& link, double lo, double hi,
                       std::int64_t n_pairs, Rng& rng) {
    if (n_pairs < 1000) throw InvalidParameter("need at least 1000 pairs");
    double worst = 0.0;
    for (std::int64_t i = 0; i < n_pairs; ++i) {
        const double u1 = rng.uniform(lo, hi);
        const double u2 = rng.uniform(lo, hi);
        const double du = std::abs(u1 - u2);
        if (du < 1e-12) continue;
        worst = std::max(worst, std::abs(link(u1) - link(u2)) / du);
    }
    return worst;
}

} // namespace bids
