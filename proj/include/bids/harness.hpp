#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bids/envs.hpp"
#include "bids/geometry.hpp"
#include "bids/metrics.hpp"
#include "bids/policy.hpp"
#include "bids/sir.hpp"

namespace bids {

enum class Mode { Pilot, Estimate };
enum class PolicyKind { Bids, NpBaseline, BidsOracle };

struct ExperimentConfig {
    Mode mode = Mode::Pilot;
    double theta = 0.0;         // pilot mode
    double t_init_scale = 1.0;  // estimate mode: t_init = round(scale * T^{2/3})
    int sade_slices = 10;

    int setting = 1;
    int d = 5;
    double sigma = 0.1;
    CovariateLaw covariate_law = CovariateLaw::TruncatedNormal;

    std::int64_t T = 100000;
    int M = 5;
    double alpha = 1.0;
    double a_scale = 1.0;
    double c_B = 1.0;
    int K = 2;

    int replicates = 20;
    std::uint64_t master_seed = 1;
    PolicyKind policy = PolicyKind::Bids;
    bool estimate_interval = false; // pilot-sample interval with 20% expansion
    std::string out_dir;

    std::int64_t t_init() const;
    std::string to_json() const;
    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json(const std::string& text);
};

struct ExperimentResult {
    std::vector<RegretTrace> traces;
    AggregateTrace aggregate;
    std::vector<std::string> elimination_jsonl; // one blob per replicate
    std::string metadata_json;
};

// Pure function of (master seed, replicate index): replicate streams do not
// move when the replicate count changes.
std::uint64_t replicate_seed(std::uint64_t master, int replicate, int stream);

// Runs one replicate of the configured experiment; exposed for tests.
RegretTrace run_replicate(const ExperimentConfig& config, int replicate,
                          std::string* elimination_jsonl = nullptr);

// Runs all replicates (work pool capped by BIDS_THREADS) and reduces
// deterministically by replicate index.
ExperimentResult run_experiment(const ExperimentConfig& config);

// run_experiment plus CSV / metadata / elimination-report emission into
// config.out_dir.
ExperimentResult run_experiment_to_files(const ExperimentConfig& config);

} // namespace bids
