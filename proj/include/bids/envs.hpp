#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bids/errors.hpp"
#include "bids/rng.hpp"

namespace bids {

// Triangular-bump link: f(u) = a + (2/B) sum_j v_j phi(B/(u-l) (u - q_j)) with
// phi(x) = (1-|x|) 1{|x|<=1}, centers q_j = l + (2j-1)(u-l)/B for
// j = 1..floor(B/2) and Rademacher signs v_j.
struct BumpLink {
    double baseline = 0.5;
    int bump_count_param = 8; // B
    double lo = -1.0;
    double hi = 1.0;
    std::vector<int> signs; // floor(B/2) entries in {-1, +1}

    static BumpLink make(double baseline, int B, double lo, double hi, Rng& rng);
};

double eval_bump_link(const BumpLink& link, double u);

// Lower-bound hard instance on [-0.5, 0.5]: arm 1 mean is
// 1/2 + C_f h sum_j (2 v_j - 3) K((u - u_j)/h), arm 2 mean is 1/2, where
// K(u) = (1 - |2u|) 1{|u| <= 0.5} and the centers are the first D of the 1/h
// interval midpoints.
struct HardInstance {
    double h = 0.1;
    double amplitude = 0.25; // C_f = min(tau, 1/4)
    std::vector<int> bits;   // D entries in {1, 2}
    std::vector<double> centers;

    static HardInstance make(double h, double alpha, Rng& rng, double amplitude = 0.25);
};

double eval_hard_instance(const HardInstance& inst, double u);

// Environment: covariate sampler, per-arm mean rewards with oracle access, and
// an additive noise generator shared across arms.
struct Environment {
    int d = 1;
    int arms = 2;
    std::function<std::vector<double>(Rng&)> sample_covariate;
    std::function<double(int, const std::vector<double>&)> mean_reward; // arm 1-based
    std::function<double(Rng&)> sample_noise;
    std::vector<double> beta0; // unit index direction when single-index
    std::string description;   // JSON provenance blob

    double oracle_best(const std::vector<double>& x) const;
    // g*(x) - g^(arm)(x) >= 0.
    double oracle_regret(const std::vector<double>& x, int arm) const;
};

// Rejection sampler for N(mu, Sigma) restricted to a box. Diagonal covariances
// sample per coordinate; the guard trips after 1e5 consecutive rejections.
std::vector<double> sample_truncated_mvn(const std::vector<double>& mean,
                                         const std::vector<double>& cov_diag,
                                         const std::vector<std::pair<double, double>>& box,
                                         Rng& rng);

enum class CovariateLaw { TruncatedNormal, Normal, Uniform };

// Section-5 style synthetic environments. Setting 1 pairs the B = 8 bump link
// against the linear 1/2 + u link; Setting 2 pairs B = 8 against B = 5 with a
// 0.75 baseline. Covariates are truncated N(0, 25 I) on [-3, 3]^d by default.
Environment make_setting(int setting, int d, double sigma, Rng& rng,
                         CovariateLaw law = CovariateLaw::TruncatedNormal);

// Two-arm environment on [-0.5, 0.5] built from a hard instance, with uniform
// covariates (d = 1).
Environment make_hard_env(const HardInstance& inst, double sigma);

// Monte Carlo estimates of P(0 < |g1(X) - g2(X)| <= delta) per delta.
std::vector<std::pair<double, double>> margin_probe(const Environment& env,
                                                    const std::vector<double>& deltas,
                                                    std::int64_t n_samples, Rng& rng);

// Max empirical difference quotient of a scalar link over random pairs.
double lipschitz_probe(const std::function<double(double)>& link, double lo, double hi,
                       std::int64_t n_pairs, Rng& rng);

} // namespace bids
