#include "bids/sir.hpp"
#include "bids/envs.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace bids {

namespace {

void apply_sign_convention(std::vector<double>& v) {
    for (double c : v) {
        if (std::abs(c) > 1e-12) {
            if (c < 0)
                for (double& x : v) x = -x;
            return;
        }
    }
}

Direction top_eigenvector(const Eigen::MatrixXd& sym, double min_gap, double min_top,
                          std::vector<double>* eigenvalues) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw DegenerateDirection("eigendecomposition failed");
    const auto& vals = solver.eigenvalues(); // ascending
    const int d = static_cast<int>(sym.rows());
    if (eigenvalues) {
        eigenvalues->assign(vals.data(), vals.data() + d);
        std::reverse(eigenvalues->begin(), eigenvalues->end());
    }
    const double top = vals(d - 1);
    if (min_top > 0.0 && top <= min_top)
        throw DegenerateDirection("top eigenvalue is not separated from zero");
    if (min_gap > 0.0 && d >= 2 && top - vals(d - 2) <= min_gap)
        throw DegenerateDirection("top two eigenvalues are tied");
    Eigen::VectorXd u = solver.eigenvectors().col(d - 1);
    std::vector<double> out(u.data(), u.data() + d);
    return Direction::normalized(std::move(out));
}

} // namespace

Direction Direction::normalized(std::vector<double> raw) {
    double norm2 = 0.0;
    for (double c : raw) norm2 += c * c;
    const double norm = std::sqrt(norm2);
    if (!(norm > 0.0)) throw DegenerateDirection("zero vector has no direction");
    for (double& c : raw) c /= norm;
    apply_sign_convention(raw);
    return Direction{std::move(raw)};
}

double Direction::dot(const Direction& other) const {
    if (v.size() != other.v.size()) throw InvalidParameter("dimension mismatch");
    return std::inner_product(v.begin(), v.end(), other.v.begin(), 0.0);
}

ScoreFunction ScoreFunction::gaussian(std::vector<double> mean,
                                      std::vector<double> cov_diag) {
    ScoreFunction s;
    s.eval_ = [mean = std::move(mean), cov = std::move(cov_diag)](
                  const std::vector<double>& x) {
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / cov[i];
        return out;
    };
    return s;
}

ScoreFunction ScoreFunction::gaussian_full(std::vector<double> mean,
                                           std::vector<std::vector<double>> cov) {
    const int d = static_cast<int>(mean.size());
    Eigen::MatrixXd sigma(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) sigma(i, j) = cov[i][j];
    Eigen::MatrixXd prec = sigma.inverse();
    ScoreFunction s;
    s.eval_ = [mean = std::move(mean), prec](const std::vector<double>& x) {
        const int n = static_cast<int>(x.size());
        Eigen::VectorXd centered(n);
        for (int i = 0; i < n; ++i) centered(i) = x[i] - mean[i];
        Eigen::VectorXd r = prec * centered;
        return std::vector<double>(r.data(), r.data() + n);
    };
    return s;
}

ScoreFunction ScoreFunction::truncated_gaussian(
    std::vector<double> mean, std::vector<double> cov_diag,
    std::vector<std::pair<double, double>> /*box*/) {
    // Truncation leaves the interior log-density gradient unchanged, and
    // samples never land outside the box by construction.
    return gaussian(std::move(mean), std::move(cov_diag));
}

ScoreFunction ScoreFunction::uniform_box(std::vector<std::pair<double, double>> box) {
    std::vector<double> mean(box.size()), cov(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) {
        mean[i] = 0.5 * (box[i].first + box[i].second);
        const double len = box[i].second - box[i].first;
        cov[i] = len * len / 12.0;
    }
    return gaussian(std::move(mean), std::move(cov));
}

ScoreFunction ScoreFunction::custom(
    std::function<std::vector<double>(const std::vector<double>&)> f) {
    ScoreFunction s;
    s.eval_ = std::move(f);
    return s;
}

Direction sade_estimate(const std::vector<std::vector<double>>& xs,
                        const std::vector<double>& ys, const ScoreFunction& score,
                        int slices, SadeDiagnostics* diag) {
    const auto n = static_cast<std::int64_t>(xs.size());
    if (slices < 2) throw InvalidParameter("need at least two slices");
    if (n < 2 * slices) throw InsufficientData("need n >= 2H observations");
    const int d = static_cast<int>(xs.front().size());

    const auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
    const double ymin = *ymin_it, ymax = *ymax_it;
    if (!(ymax > ymin)) throw DegenerateDirection("constant rewards carry no signal");
    const double slice_width = (ymax - ymin) / slices;

    std::vector<Eigen::VectorXd> scores(n);
    std::vector<int> slice_of(n);
    std::vector<std::int64_t> counts(slices, 0);
    Eigen::MatrixXd second_moment = Eigen::MatrixXd::Zero(d, d);
    std::vector<Eigen::VectorXd> slice_sum(slices, Eigen::VectorXd::Zero(d));
    for (std::int64_t i = 0; i < n; ++i) {
        const std::vector<double> s = score(xs[i]);
        scores[i] = Eigen::Map<const Eigen::VectorXd>(s.data(), d);
        int h = static_cast<int>((ys[i] - ymin) / slice_width);
        if (h >= slices) h = slices - 1;
        slice_of[i] = h;
        counts[h] += 1;
        slice_sum[h] += scores[i];
        second_moment += scores[i] * scores[i].transpose();
    }
    second_moment /= static_cast<double>(n);

    // Within-slice covariance with the (n p_h - 1) denominator; slices with
    // fewer than two points contribute zero.
    std::vector<Eigen::MatrixXd> slice_cov(slices, Eigen::MatrixXd::Zero(d, d));
    std::vector<Eigen::VectorXd> slice_mean(slices, Eigen::VectorXd::Zero(d));
    for (int h = 0; h < slices; ++h)
        if (counts[h] >= 1) slice_mean[h] = slice_sum[h] / static_cast<double>(counts[h]);
    for (std::int64_t i = 0; i < n; ++i) {
        const int h = slice_of[i];
        if (counts[h] < 2) continue;
        const Eigen::VectorXd c = scores[i] - slice_mean[h];
        slice_cov[h] += c * c.transpose();
    }

    Eigen::MatrixXd v_hat = second_moment;
    for (int h = 0; h < slices; ++h) {
        if (counts[h] < 2) continue;
        const double p_h = static_cast<double>(counts[h]) / static_cast<double>(n);
        v_hat -= p_h * slice_cov[h] / static_cast<double>(counts[h] - 1);
    }
    v_hat = 0.5 * (v_hat + v_hat.transpose()).eval();

    std::vector<double> eigenvalues;
    Direction dir = top_eigenvector(v_hat, 0.0, 1e-10, &eigenvalues);
    if (diag) {
        diag->slice_counts = counts;
        diag->eigenvalues = eigenvalues;
    }
    return dir;
}

Direction combine_directions(const std::vector<Direction>& dirs,
                             const std::vector<double>& weights) {
    if (dirs.empty() || dirs.size() != weights.size())
        throw InvalidParameter("need matching nonempty directions and weights");
    double wsum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw InvalidParameter("weights must be nonnegative");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-12) throw InvalidParameter("weights must sum to 1");

    const int d = dirs.front().dim();
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        if (dirs[k].dim() != d) throw InvalidParameter("dimension mismatch");
        const Eigen::Map<const Eigen::VectorXd> b(dirs[k].v.data(), d);
        proj += weights[k] * (b * b.transpose());
    }
    return top_eigenvector(proj, 1e-10, 0.0, nullptr);
}

double sin_angle(const Direction& u, const Direction& v) {
    const double c = u.dot(v);
    return std::sqrt(std::max(0.0, 1.0 - c * c));
}

Direction perturb_direction(const Direction& beta, double theta, Rng& rng) {
    if (theta < 0.0 || theta > M_PI / 2.0 + 1e-12)
        throw InvalidParameter("theta must be in [0, pi/2]");
    if (theta == 0.0) return beta;
    const int d = beta.dim();
    if (d < 2) throw InvalidParameter("perturbation needs d >= 2");

    // Random unit vector orthogonal to beta.
    std::vector<double> w(d);
    double norm2 = 0.0;
    do {
        double proj = 0.0;
        for (int i = 0; i < d; ++i) {
            w[i] = rng.normal();
            proj += w[i] * beta.v[i];
        }
        norm2 = 0.0;
        for (int i = 0; i < d; ++i) {
            w[i] -= proj * beta.v[i];
            norm2 += w[i] * w[i];
        }
    } while (norm2 < 1e-24);
    const double norm = std::sqrt(norm2);

    std::vector<double> out(d);
    const double c = std::cos(theta), s = std::sin(theta);
    for (int i = 0; i < d; ++i) out[i] = c * beta.v[i] + s * w[i] / norm;
    return Direction{std::move(out)};
}

InitialPhaseResult initial_phase(const Environment& env, std::int64_t t_init, int slices,
                                 const ScoreFunction& score, Rng& rng) {
    const int K = env.arms;
    if (t_init < static_cast<std::int64_t>(4) * slices * K)
        throw InsufficientData("initial phase needs t_init >= 4HK");

    std::vector<std::vector<std::vector<double>>> xs(K);
    std::vector<std::vector<double>> ys(K);
    InitialPhaseResult result;
    result.per_round_gaps.reserve(t_init);
    for (std::int64_t t = 1; t <= t_init; ++t) {
        const int arm = static_cast<int>((t - 1) % K) + 1;
        std::vector<double> x = env.sample_covariate(rng);
        const double y = env.mean_reward(arm, x) + env.sample_noise(rng);
        const double gap = env.oracle_regret(x, arm);
        result.regret += gap;
        result.per_round_gaps.push_back(gap);
        xs[arm - 1].push_back(std::move(x));
        ys[arm - 1].push_back(y);
    }

    std::vector<Direction> dirs;
    dirs.reserve(K);
    for (int k = 0; k < K; ++k)
        dirs.push_back(sade_estimate(xs[k], ys[k], score, slices));
    const std::vector<double> weights(K, 1.0 / K);
    result.direction = combine_directions(dirs, weights);
    return result;
}

} // namespace bids
