#pragma once

// Configuration and per-trial record types shared by the two estimation
// schemes and the Monte Carlo harness.

#include <cstdint>
#include <string>

namespace phasekit {

enum class Scheme { povm, homodyne };
enum class OutputFormat { csv, json };

std::string to_string(Scheme s);
std::string to_string(OutputFormat f);
Scheme scheme_from_string(const std::string& s);
OutputFormat output_format_from_string(const std::string& s);

// One two-step estimation run: N total copies, ceil(N^alpha) spent on the
// rough first step, the rest on the tuned measurement.
struct ExperimentConfig {
    Scheme scheme = Scheme::povm;
    double r = 1.0;
    double theta_true = 0.0;
    long long total_copies = 0;
    double split_exponent = 2.0 / 3.0;  // in (1/2, 1)
    long long trials = 1;
    std::uint64_t seed = 0;
    int truncation_dim = 128;
    std::string output_path;
    OutputFormat output_format = OutputFormat::csv;

    long long step_one_copies() const;  // ceil(N^alpha)
    void validate() const;              // throws std::invalid_argument
};

struct EstimationRecord {
    long long trial_index = 0;
    double theta_rough = 0.0;
    double theta_hat = 0.0;
    double wrapped_error = 0.0;   // in (-pi/2, pi/2]
    double squared_error = 0.0;
    // scheme-dependent payload: POVM counts, or the homodyne sufficient
    // statistic sum(p_i^2)/N_bar
    long long n_plus = 0;
    long long n_minus = 0;
    long long n_zero = 0;
    double statistic = 0.0;
    bool branch_flipped = false;
};

}  // namespace phasekit
