#include "bids/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "bids/baseline_np.hpp"
#include "bids/replay.hpp"
#include "json.hpp"

namespace bids {

namespace {

constexpr int kStreamEnv = 0;
constexpr int kStreamData = 1;
constexpr int kStreamAux = 2;

std::string mode_name(Mode m) { return m == Mode::Pilot ? "pilot" : "estimate"; }

std::string policy_name(PolicyKind p) {
    switch (p) {
        case PolicyKind::Bids: return "bids";
        case PolicyKind::NpBaseline: return "np_baseline";
        case PolicyKind::BidsOracle: return "bids_oracle";
    }
    return "?";
}

std::string law_name(CovariateLaw law) {
    switch (law) {
        case CovariateLaw::TruncatedNormal: return "truncated_normal";
        case CovariateLaw::Normal: return "normal";
        case CovariateLaw::Uniform: return "uniform";
    }
    return "?";
}

ScoreFunction score_for(const ExperimentConfig& config) {
    const std::vector<double> mean(config.d, 0.0);
    const std::vector<double> cov(config.d, 25.0);
    if (config.covariate_law == CovariateLaw::Uniform) {
        return ScoreFunction::uniform_box(
            std::vector<std::pair<double, double>>(config.d, {-3.0, 3.0}));
    }
    if (config.covariate_law == CovariateLaw::TruncatedNormal) {
        return ScoreFunction::truncated_gaussian(
            mean, cov, std::vector<std::pair<double, double>>(config.d, {-3.0, 3.0}));
    }
    return ScoreFunction::gaussian(mean, cov);
}

int pool_size(int replicates) {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* cap = std::getenv("BIDS_THREADS")) {
        const int c = std::atoi(cap);
        if (c >= 1) n = std::min(n, c);
    }
    return std::min(n, replicates);
}

// Runs the batched decision loop of `policy` for `rounds` rounds, drawing
// covariates and shared noise from `data_rng`.
template <typename Policy>
void run_batched_loop(Policy& policy, const Environment& env, std::int64_t rounds,
                      Rng& data_rng, RegretTrace& trace, std::string* jsonl) {
    const Schedule& schedule = policy.schedule();
    int next_boundary = 1;
    for (std::int64_t t = 1; t <= rounds; ++t) {
        const std::vector<double> x = env.sample_covariate(data_rng);
        const double eps = env.sample_noise(data_rng);
        const int arm = policy.choose_arm(x);
        policy.record_reward(x, arm, env.mean_reward(arm, x) + eps);
        trace.accumulate(env.oracle_regret(x, arm));
        while (next_boundary < schedule.M && t == schedule.grid[next_boundary]) {
            const EliminationReport report = policy.end_batch();
            if (jsonl) *jsonl += report.to_json_lines();
            ++next_boundary;
        }
    }
}

} // namespace

std::int64_t ExperimentConfig::t_init() const {
    return static_cast<std::int64_t>(
        std::llround(t_init_scale * std::pow(static_cast<double>(T), 2.0 / 3.0)));
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["mode"] = mode_name(mode);
    j["theta"] = theta;
    j["t_init_scale"] = t_init_scale;
    j["t_init"] = t_init();
    j["sade_slices"] = sade_slices;
    j["setting"] = setting;
    j["d"] = d;
    j["sigma"] = sigma;
    j["covariate_law"] = law_name(covariate_law);
    j["T"] = T;
    j["M"] = M;
    j["alpha"] = alpha;
    j["a_scale"] = a_scale;
    j["c_B"] = c_B;
    j["K"] = K;
    j["replicates"] = replicates;
    j["seed"] = master_seed;
    j["policy"] = policy_name(policy);
    j["estimate_interval"] = estimate_interval;
    j["out"] = out_dir;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    if (j.contains("mode")) {
        const std::string m = j["mode"];
        if (m == "pilot") c.mode = Mode::Pilot;
        else if (m == "estimate") c.mode = Mode::Estimate;
        else throw ConfigError("unknown mode: " + m);
    }
    c.theta = j.value("theta", c.theta);
    c.t_init_scale = j.value("t_init_scale", c.t_init_scale);
    c.sade_slices = j.value("sade_slices", c.sade_slices);
    c.setting = j.value("setting", c.setting);
    c.d = j.value("d", c.d);
    c.sigma = j.value("sigma", c.sigma);
    if (j.contains("covariate_law")) {
        const std::string law = j["covariate_law"];
        if (law == "truncated_normal") c.covariate_law = CovariateLaw::TruncatedNormal;
        else if (law == "normal") c.covariate_law = CovariateLaw::Normal;
        else if (law == "uniform") c.covariate_law = CovariateLaw::Uniform;
        else throw ConfigError("unknown covariate_law: " + law);
    }
    c.T = j.value("T", c.T);
    c.M = j.value("M", c.M);
    c.alpha = j.value("alpha", c.alpha);
    c.a_scale = j.value("a_scale", c.a_scale);
    c.c_B = j.value("c_B", c.c_B);
    c.K = j.value("K", c.K);
    c.replicates = j.value("replicates", c.replicates);
    c.master_seed = j.value("seed", c.master_seed);
    if (j.contains("policy")) {
        const std::string p = j["policy"];
        if (p == "bids") c.policy = PolicyKind::Bids;
        else if (p == "np_baseline") c.policy = PolicyKind::NpBaseline;
        else if (p == "bids_oracle") c.policy = PolicyKind::BidsOracle;
        else throw ConfigError("unknown policy: " + p);
    }
    c.estimate_interval = j.value("estimate_interval", c.estimate_interval);
    c.out_dir = j.value("out", c.out_dir);
    return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return from_json(text);
}

std::uint64_t replicate_seed(std::uint64_t master, int replicate, int stream) {
    return derive_seed(master, static_cast<std::uint64_t>(replicate),
                       static_cast<std::uint64_t>(stream));
}

RegretTrace run_replicate(const ExperimentConfig& config, int replicate,
                          std::string* elimination_jsonl) {
    Rng env_rng(replicate_seed(config.master_seed, replicate, kStreamEnv));
    Rng data_rng(replicate_seed(config.master_seed, replicate, kStreamData));
    Rng aux_rng(replicate_seed(config.master_seed, replicate, kStreamAux));

    const Environment env =
        make_setting(config.setting, config.d, config.sigma, env_rng, config.covariate_law);

    RegretTrace trace;
    nlohmann::json meta;
    meta["replicate"] = replicate;
    meta["env"] = nlohmann::json::parse(env.description);

    const double bound = 3.0 * std::sqrt(static_cast<double>(config.d));

    if (config.policy == PolicyKind::NpBaseline) {
        ProjectedInterval axis{-3.0, 3.0};
        if (config.estimate_interval) {
            std::vector<double> coords;
            const std::int64_t pilot = std::min<std::int64_t>(config.T, 2000);
            for (std::int64_t i = 0; i < pilot; ++i)
                for (double c : env.sample_covariate(aux_rng)) coords.push_back(c);
            axis = interval_from_pilot(coords, 1.2);
        }
        Schedule schedule = make_np_schedule(config.T, config.M, config.alpha, config.d,
                                             config.a_scale, config.c_B, axis);
        NpPolicy policy(schedule, axis, config.d, config.K);
        run_batched_loop(policy, env, config.T, data_rng, trace, elimination_jsonl);
        meta["policy"] = "np_baseline";
        trace.metadata = meta.dump();
        return trace;
    }

    // Working direction.
    Direction beta0 = Direction::normalized(env.beta0);
    Direction working = beta0;
    std::int64_t bids_T = config.T;
    int bids_M = config.M;
    if (config.policy == PolicyKind::Bids) {
        if (config.mode == Mode::Pilot) {
            working = perturb_direction(beta0, config.theta, aux_rng);
        } else {
            const std::int64_t t_init = std::min(config.t_init(), config.T - 1);
            const InitialPhaseResult init =
                initial_phase(env, t_init, config.sade_slices, score_for(config), data_rng);
            working = init.direction;
            for (double gap : init.per_round_gaps) trace.accumulate(gap);
            bids_T = config.T - t_init;
            bids_M = std::max(2, config.M - 1);
            meta["t_init"] = t_init;
            meta["estimated_sin_angle"] = sin_angle(working, beta0);
        }
    }

    ProjectedInterval interval{-bound, bound};
    if (config.estimate_interval) {
        std::vector<double> projections;
        const std::int64_t pilot = std::min<std::int64_t>(config.T, 2000);
        for (std::int64_t i = 0; i < pilot; ++i) {
            const std::vector<double> x = env.sample_covariate(aux_rng);
            double u = 0.0;
            for (int c = 0; c < config.d; ++c) u += x[c] * working.v[c];
            projections.push_back(u);
        }
        interval = interval_from_pilot(projections, 1.2);
    }

    Schedule schedule =
        make_schedule(bids_T, bids_M, config.alpha, config.a_scale, config.c_B, interval);
    BidsPolicy policy(schedule, interval, working.v, config.K);
    run_batched_loop(policy, env, bids_T, data_rng, trace, elimination_jsonl);

    meta["policy"] = policy_name(config.policy);
    meta["working_direction"] = working.v;
    meta["interval"] = {interval.lower, interval.upper};
    trace.metadata = meta.dump();
    return trace;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    if (config.replicates < 1) throw ConfigError("replicates must be >= 1");
    ExperimentResult result;
    result.traces.resize(config.replicates);
    result.elimination_jsonl.resize(config.replicates);

    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= config.replicates || failed.load()) return;
            try {
                result.traces[r] = run_replicate(config, r, &result.elimination_jsonl[r]);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                error = "replicate " + std::to_string(r) + " (seed " +
                        std::to_string(replicate_seed(config.master_seed, r, 0)) +
                        ") failed: " + e.what();
                failed.store(true);
                return;
            }
        }
    };

    const int threads = pool_size(config.replicates);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw std::runtime_error(error);

    result.aggregate = aggregate_traces(result.traces);

    nlohmann::json meta;
    meta["config"] = nlohmann::json::parse(config.to_json());
    nlohmann::json reps = nlohmann::json::array();
    for (int r = 0; r < config.replicates; ++r) {
        nlohmann::json jr = nlohmann::json::parse(result.traces[r].metadata);
        jr["seed_env"] = replicate_seed(config.master_seed, r, kStreamEnv);
        jr["seed_data"] = replicate_seed(config.master_seed, r, kStreamData);
        jr["final_cum_regret"] = result.traces[r].final_cumulative();
        reps.push_back(jr);
    }
    meta["replicates"] = reps;
    result.metadata_json = meta.dump(2);
    return result;
}

ExperimentResult run_experiment_to_files(const ExperimentConfig& config) {
    if (config.out_dir.empty()) throw ConfigError("output directory is not set");
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    ExperimentResult result = run_experiment(config);

    for (int r = 0; r < config.replicates; ++r) {
        std::ofstream os(fs::path(config.out_dir) / ("rep_" + std::to_string(r) + ".csv"));
        write_trace_csv(os, result.traces[r]);
    }
    {
        std::ofstream os(fs::path(config.out_dir) / "aggregate.csv");
        write_aggregate_csv(os, result.aggregate);
    }
    {
        std::ofstream os(fs::path(config.out_dir) / "metadata.json");
        os << result.metadata_json << '\n';
    }
    {
        std::ofstream os(fs::path(config.out_dir) / "eliminations.jsonl");
        for (const auto& blob : result.elimination_jsonl) os << blob;
    }
    return result;
}

} // namespace bids
