#pragma once

#include <functional>
#include <vector>

#include "bids/errors.hpp"
#include "bids/rng.hpp"

namespace bids {

// Unit vector with a deterministic sign: the first component whose magnitude
// exceeds 1e-12 is nonnegative.
struct Direction {
    std::vector<double> v;

    static Direction normalized(std::vector<double> raw);
    int dim() const { return static_cast<int>(v.size()); }
    double dot(const Direction& other) const;
};

// Score S_1(x) = -grad log p(x) of the covariate density. For (truncated)
// Gaussians this is Sigma^{-1} (x - mu); truncation does not change the
// interior gradient. For the uniform box the interior gradient vanishes, so we
// use the moment-matched Gaussian surrogate.
class ScoreFunction {
public:
    static ScoreFunction gaussian(std::vector<double> mean, std::vector<double> cov_diag);
    static ScoreFunction gaussian_full(std::vector<double> mean,
                                       std::vector<std::vector<double>> cov);
    static ScoreFunction truncated_gaussian(std::vector<double> mean,
                                            std::vector<double> cov_diag,
                                            std::vector<std::pair<double, double>> box);
    static ScoreFunction uniform_box(std::vector<std::pair<double, double>> box);
    static ScoreFunction custom(std::function<std::vector<double>(const std::vector<double>&)> f);

    std::vector<double> operator()(const std::vector<double>& x) const { return eval_(x); }

private:
    std::function<std::vector<double>(const std::vector<double>&)> eval_;
};

struct SadeDiagnostics {
    std::vector<std::int64_t> slice_counts;
    std::vector<double> eigenvalues; // descending
};

// Sliced Average Derivative Estimation: slices the observed reward range into
// H equal intervals and returns the top eigenvector of
// V = (1/n) sum S(x_i) S(x_i)^T - sum_h p_h Cov(S | slice h).
Direction sade_estimate(const std::vector<std::vector<double>>& xs,
                        const std::vector<double>& ys, const ScoreFunction& score,
                        int slices, SadeDiagnostics* diag = nullptr);

// Fuses sign-ambiguous directions through the weighted projection matrix
// P = sum_k w_k b_k b_k^T and returns its top eigenvector.
Direction combine_directions(const std::vector<Direction>& dirs,
                             const std::vector<double>& weights);

// sin of the principal angle: sqrt(1 - (u . v)^2).
double sin_angle(const Direction& u, const Direction& v);

// Rotates beta by `theta` radians toward a uniformly random orthogonal unit
// vector.
Direction perturb_direction(const Direction& beta, double theta, Rng& rng);

} // namespace bids

#include "bids/envs.hpp"

namespace bids {

struct InitialPhaseResult {
    Direction direction;
    double regret = 0.0;
    std::vector<double> per_round_gaps; // oracle gap of each initial-phase round
};

// Cyclic exploration phase: pulls arms round-robin for t_init rounds, fits one
// direction per arm with SADE, and fuses them with equal weights.
InitialPhaseResult initial_phase(const Environment& env, std::int64_t t_init, int slices,
                                 const ScoreFunction& score, Rng& rng);

} // namespace bids
