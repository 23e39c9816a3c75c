#pragma once

// Reproducible experiment orchestration: seeded parallel trials, wrapped-
// error statistics, convergence sweeps in N, and CSV/JSON persistence.
//
// Determinism contract: trial k draws from an engine seeded with
// trial_seed(config.seed, k) = splitmix64(seed + (k+1) * 0x9E3779B97F4A7C15),
// so results are independent of execution order and worker count, and
// byte-identical across runs of the same binary.

#include <cstdint>
#include <string>
#include <vector>

#include "phasekit/experiment.hpp"

namespace phasekit {

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

// Runs config.trials independent trials; workers = 0 picks the hardware
// concurrency. The worker count never changes the results.
std::vector<EstimationRecord> run_trials(const ExperimentConfig& config,
                                         int workers = 0);

struct SweepRow {
    long long total_copies = 0;
    long long trials = 0;
    double mean_bias = 0.0;
    double mse = 0.0;
    double mse_standard_error = 0.0;
    double n_times_mse = 0.0;
    double heisenberg_reference = 0.0;  // 1/H, the per-copy bound times N
};

// MSE = mean of squared wrapped errors; its standard error is the sample
// standard deviation of the squared errors over sqrt(trials).
SweepRow aggregate(const std::vector<EstimationRecord>& records,
                   long long total_copies, double qfi_value);

// One aggregated row per N in ascending order.
std::vector<SweepRow> convergence_sweep(const ExperimentConfig& base,
                                        const std::vector<long long>& copies_list,
                                        int workers = 0);

// Shortest round-trip decimal representation.
std::string format_double(double x);

// JSON config file with exactly the ExperimentConfig fields (snake_case);
// unknown keys are rejected. output_path / output_format are optional.
ExperimentConfig load_config_json(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

// Per-trial records: CSV with header
// trial,theta_rough,theta_hat,wrapped_error,squared_error,branch_flipped
void write_records_csv(const std::string& path,
                       const std::vector<EstimationRecord>& records);
std::string records_to_csv(const std::vector<EstimationRecord>& records);

// Records as a JSON array (alternative per-trial format).
void write_records_json(const std::string& path,
                        const std::vector<EstimationRecord>& records);

// Aggregate summary: sweep rows, the config echo and the library version.
void write_summary_json(const std::string& path, const ExperimentConfig& config,
                        const std::vector<SweepRow>& rows);
std::string summary_to_json(const ExperimentConfig& config,
                            const std::vector<SweepRow>& rows);

}  // namespace phasekit
