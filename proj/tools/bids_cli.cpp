// Command-line front end: simulate / replay / schedule / sade-fit / sweep.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bids/baseline_np.hpp"
#include "bids/harness.hpp"
#include "bids/replay.hpp"

namespace {

using namespace bids;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> replicates;
    std::optional<std::int64_t> T;
    std::optional<double> theta;
    std::optional<double> sigma;
    std::optional<std::string> policy;
    std::optional<std::string> mode;
    std::optional<int> setting;
    std::optional<int> d;
    std::optional<int> M;
};

void apply_overrides(ExperimentConfig& config, const Overrides& ov) {
    if (ov.seed) config.master_seed = *ov.seed;
    if (ov.out) config.out_dir = *ov.out;
    if (ov.replicates) config.replicates = *ov.replicates;
    if (ov.T) config.T = *ov.T;
    if (ov.theta) config.theta = *ov.theta;
    if (ov.sigma) config.sigma = *ov.sigma;
    if (ov.setting) config.setting = *ov.setting;
    if (ov.d) config.d = *ov.d;
    if (ov.M) config.M = *ov.M;
    if (ov.policy) {
        if (*ov.policy == "bids") config.policy = PolicyKind::Bids;
        else if (*ov.policy == "np_baseline") config.policy = PolicyKind::NpBaseline;
        else if (*ov.policy == "bids_oracle") config.policy = PolicyKind::BidsOracle;
        else throw ConfigError("unknown policy: " + *ov.policy);
    }
    if (ov.mode) {
        if (*ov.mode == "pilot") config.mode = Mode::Pilot;
        else if (*ov.mode == "estimate") config.mode = Mode::Estimate;
        else throw ConfigError("unknown mode: " + *ov.mode);
    }
}

ScoreFunction sample_score(const std::vector<std::vector<double>>& xs) {
    const int d = static_cast<int>(xs.front().size());
    const auto n = static_cast<double>(xs.size());
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    for (const auto& row : xs)
        for (int c = 0; c < d; ++c) mean[c] += row[c];
    for (double& m : mean) m /= n;
    for (const auto& row : xs)
        for (int c = 0; c < d; ++c) var[c] += (row[c] - mean[c]) * (row[c] - mean[c]);
    for (double& v : var) {
        v /= n;
        if (v < 1e-12) v = 1.0;
    }
    return ScoreFunction::gaussian(std::move(mean), std::move(var));
}

int run_simulate(const std::string& config_path, const Overrides& ov) {
    ExperimentConfig config =
        config_path.empty() ? ExperimentConfig{} : ExperimentConfig::from_json_file(config_path);
    apply_overrides(config, ov);
    if (config.out_dir.empty()) {
        const ExperimentResult result = run_experiment(config);
        std::cout << result.metadata_json << '\n';
    } else {
        run_experiment_to_files(config);
        std::cout << "wrote " << config.replicates << " replicate traces to "
                  << config.out_dir << '\n';
    }
    return 0;
}

int run_schedule(std::int64_t T, int M, double alpha, double a_scale, double c_B,
                 double lo, double hi, int np_dim) {
    const ProjectedInterval interval{lo, hi};
    const Schedule s = np_dim > 0
                           ? make_np_schedule(T, M, alpha, np_dim, a_scale, c_B, interval)
                           : make_schedule(T, M, alpha, a_scale, c_B, interval);
    std::cout << schedule_to_json(s) << '\n';
    return 0;
}

int run_sade_fit(const std::string& data_path, const std::string& response_column,
                 int slices, bool normalize) {
    const Dataset ds = load_csv(data_path, response_column, normalize);
    std::vector<double> ys(ds.labels.begin(), ds.labels.end());
    SadeDiagnostics diag;
    const Direction dir =
        sade_estimate(ds.features, ys, sample_score(ds.features), slices, &diag);
    nlohmann::json j;
    j["direction"] = dir.v;
    j["eigenvalues"] = diag.eigenvalues;
    j["slice_counts"] = diag.slice_counts;
    std::cout << j.dump(2) << '\n';
    return 0;
}

int run_replay_cmd(const std::string& data_path, const std::string& label_column,
                   bool normalize, const std::string& policy, int M, int trials,
                   int slices, std::uint64_t seed, const std::string& out) {
    const Dataset ds = load_csv(data_path, label_column, normalize);
    const std::int64_t n = ds.size();

    ReplayPolicyFactory factory;
    nlohmann::json meta;
    if (policy == "bids") {
        // Pilot pass over the full file: direction by SADE against the label,
        // interval from the projected rows with the 20% expansion.
        std::vector<double> ys(ds.labels.begin(), ds.labels.end());
        const Direction dir =
            sade_estimate(ds.features, ys, sample_score(ds.features), slices);
        std::vector<double> projections(n);
        for (std::int64_t i = 0; i < n; ++i) {
            double u = 0.0;
            for (int c = 0; c < ds.d; ++c) u += ds.features[i][c] * dir.v[c];
            projections[i] = u;
        }
        const ProjectedInterval interval = interval_from_pilot(projections, 1.2);
        const Schedule schedule = make_schedule(n, M, 1.0, 1.0, 1.0, interval);
        meta["direction"] = dir.v;
        meta["interval"] = {interval.lower, interval.upper};
        meta["schedule"] = nlohmann::json::parse(schedule_to_json(schedule));
        factory = [schedule, interval, dir, K = ds.K](std::uint64_t) {
            auto policy = std::make_shared<BidsPolicy>(schedule, interval, dir.v, K);
            ReplayPolicy rp;
            rp.choose = [policy](const std::vector<double>& x) { return policy->choose_arm(x); };
            rp.record = [policy](const std::vector<double>& x, int arm, double r) {
                policy->record_reward(x, arm, r);
            };
            rp.on_boundary = [policy](std::int64_t) { policy->end_batch(); };
            rp.boundaries.assign(schedule.grid.begin() + 1, schedule.grid.end() - 1);
            return rp;
        };
    } else if (policy == "np_baseline") {
        std::vector<double> coords;
        for (const auto& row : ds.features)
            for (double c : row) coords.push_back(c);
        const ProjectedInterval axis = interval_from_pilot(coords, 1.2);
        const Schedule schedule = make_np_schedule(n, M, 1.0, ds.d, 1.0, 1.0, axis);
        meta["per_axis"] = {axis.lower, axis.upper};
        meta["schedule"] = nlohmann::json::parse(schedule_to_json(schedule));
        factory = [schedule, axis, d = ds.d, K = ds.K](std::uint64_t) {
            auto policy = std::make_shared<NpPolicy>(schedule, axis, d, K);
            ReplayPolicy rp;
            rp.choose = [policy](const std::vector<double>& x) { return policy->choose_arm(x); };
            rp.record = [policy](const std::vector<double>& x, int arm, double r) {
                policy->record_reward(x, arm, r);
            };
            rp.on_boundary = [policy](std::int64_t) { policy->end_batch(); };
            rp.boundaries.assign(schedule.grid.begin() + 1, schedule.grid.end() - 1);
            return rp;
        };
    } else {
        throw ConfigError("unknown replay policy: " + policy);
    }

    const ReplayResult result = run_replay(ds, factory, trials, seed);

    meta["dataset"] = ds.name;
    meta["rows"] = n;
    meta["d"] = ds.d;
    meta["K"] = ds.K;
    meta["normalize"] = normalize;
    meta["policy"] = policy;
    meta["M"] = M;
    meta["trials"] = trials;
    meta["seed"] = seed;
    meta["final_mean_rolling_error"] = result.mean_rolling_error.back();

    if (out.empty()) {
        std::cout << meta.dump(2) << '\n';
    } else {
        namespace fs = std::filesystem;
        fs::create_directories(out);
        std::ofstream csv(fs::path(out) / "replay.csv");
        write_replay_csv(csv, result);
        std::ofstream mf(fs::path(out) / "replay_meta.json");
        mf << meta.dump(2) << '\n';
        std::cout << "final mean rolling error " << result.mean_rolling_error.back()
                  << "; traces in " << out << '\n';
    }
    return 0;
}

int run_sweep(const std::string& config_path, const std::string& param,
              const std::vector<double>& values, const Overrides& ov) {
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    ExperimentConfig base =
        config_path.empty() ? ExperimentConfig{} : ExperimentConfig::from_json_file(config_path);
    apply_overrides(base, ov);
    if (base.out_dir.empty()) throw ConfigError("sweep requires an output directory");

    namespace fs = std::filesystem;
    for (std::size_t i = 0; i < values.size(); ++i) {
        ExperimentConfig config = base;
        if (param == "theta") config.theta = values[i];
        else if (param == "sigma") config.sigma = values[i];
        else if (param == "T") config.T = static_cast<std::int64_t>(values[i]);
        else if (param == "t_init_scale") config.t_init_scale = values[i];
        else throw ConfigError("unknown sweep parameter: " + param);
        config.out_dir =
            (fs::path(base.out_dir) / (param + "_" + std::to_string(values[i]))).string();
        run_experiment_to_files(config);
        std::cout << param << "=" << values[i] << " -> " << config.out_dir << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batched single-index bandit simulator"};
    app.require_subcommand(1);

    Overrides ov;
    std::string config_path;

    auto add_overrides = [&](CLI::App* cmd) {
        cmd->add_option("--seed", ov.seed, "master seed override");
        cmd->add_option("--out", ov.out, "output directory override");
        cmd->add_option("--replicates", ov.replicates, "replicate count override");
        cmd->add_option("--T", ov.T, "horizon override");
        cmd->add_option("--theta", ov.theta, "pilot perturbation angle override");
        cmd->add_option("--sigma", ov.sigma, "noise level override");
        cmd->add_option("--policy", ov.policy, "bids | np_baseline | bids_oracle");
        cmd->add_option("--mode", ov.mode, "pilot | estimate");
        cmd->add_option("--setting", ov.setting, "synthetic setting (1 or 2)");
        cmd->add_option("--d", ov.d, "covariate dimension override");
        cmd->add_option("--M", ov.M, "batch count override");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run a configured experiment");
    sim->add_option("--config", config_path, "JSON config file");
    add_overrides(sim);

    std::int64_t sch_T = 1000000;
    int sch_M = 5, sch_np_d = 0;
    double sch_alpha = 1.0, sch_a = 1.0, sch_cb = 1.0, sch_lo = 0.0, sch_hi = 1.0;
    CLI::App* sch = app.add_subcommand("schedule", "print a resolved schedule as JSON");
    sch->add_option("--T", sch_T, "horizon")->required();
    sch->add_option("--M", sch_M, "batches");
    sch->add_option("--alpha", sch_alpha, "margin parameter");
    sch->add_option("--a-scale", sch_a, "a multiplier");
    sch->add_option("--c-B", sch_cb, "batch-size constant");
    sch->add_option("--lo", sch_lo, "interval lower end");
    sch->add_option("--hi", sch_hi, "interval upper end");
    sch->add_option("--np-d", sch_np_d, "use the d-dimensional baseline schedule");

    std::string fit_data, fit_response = "y";
    int fit_slices = 10;
    bool fit_normalize = false;
    CLI::App* fit = app.add_subcommand("sade-fit", "fit an index direction from a CSV");
    fit->add_option("--data", fit_data, "CSV file")->required();
    fit->add_option("--response", fit_response, "response column name");
    fit->add_option("--slices", fit_slices, "slice count H");
    fit->add_flag("--normalize", fit_normalize, "standardize feature columns");

    std::string rp_data, rp_label = "label", rp_policy = "bids", rp_out;
    int rp_M = 5, rp_trials = 60, rp_slices = 10;
    bool rp_normalize = false;
    std::uint64_t rp_seed = 1;
    CLI::App* rp = app.add_subcommand("replay", "replay a classification dataset");
    rp->add_option("--data", rp_data, "CSV file")->required();
    rp->add_option("--label", rp_label, "label column name");
    rp->add_option("--policy", rp_policy, "bids | np_baseline");
    rp->add_option("--M", rp_M, "batch count");
    rp->add_option("--trials", rp_trials, "permuted trials");
    rp->add_option("--slices", rp_slices, "SADE slice count");
    rp->add_option("--seed", rp_seed, "master seed");
    rp->add_option("--out", rp_out, "output directory");
    rp->add_flag("--normalize", rp_normalize, "standardize feature columns");

    std::string sweep_param;
    std::vector<double> sweep_values;
    CLI::App* sw = app.add_subcommand("sweep", "grid over theta / sigma / T");
    sw->add_option("--config", config_path, "JSON base config file");
    sw->add_option("--param", sweep_param, "theta | sigma | T | t_init_scale")->required();
    sw->add_option("--values", sweep_values, "grid values")->required()->delimiter(',');
    add_overrides(sw);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) return run_simulate(config_path, ov);
        if (sch->parsed())
            return run_schedule(sch_T, sch_M, sch_alpha, sch_a, sch_cb, sch_lo, sch_hi,
                                sch_np_d);
        if (fit->parsed()) return run_sade_fit(fit_data, fit_response, fit_slices, fit_normalize);
        if (rp->parsed())
            return run_replay_cmd(rp_data, rp_label, rp_normalize, rp_policy, rp_M,
                                  rp_trials, rp_slices, rp_seed, rp_out);
        if (sw->parsed()) return run_sweep(config_path, sweep_param, sweep_values, ov);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
