#pragma once

// Estimation with the three-outcome SLD POVM: multinomial sampling, the
// approximate and exact maximum-likelihood estimators, conditional and
// averaged mean squared error, and the full two-step experiment.

#include <cstdint>
#include <optional>
#include <random>

#include "phasekit/experiment.hpp"
#include "phasekit/fock.hpp"

namespace phasekit {

struct ThreeOutcomeCounts {
    long long n_plus = 0;
    long long n_minus = 0;
    long long n_zero = 0;

    long long informative() const { return n_plus + n_minus; }
    long long total() const { return n_plus + n_minus + n_zero; }
};

ThreeOutcomeCounts sample_three_outcome(const OutcomeProbabilities& probs,
                                        long long copies, std::mt19937_64& rng);

// theta_guess + (n+ - n-) / (2 (n+ + n-) delta_n); falls back to the guess
// when no informative outcome was seen.
double approximate_mle(const ThreeOutcomeCounts& counts, double theta_guess,
                       double delta_n);

struct ExactMleResult {
    double theta = 0.0;
    bool degenerate = false;  // flat likelihood, theta is the prior guess
};

// Maximizes the multinomial log-likelihood with exact oracle probabilities
// over [theta_guess - 0.5, theta_guess + 0.5] (coarse grid + golden section).
ExactMleResult exact_mle(const ThreeOutcomeCounts& counts, double theta_guess,
                         double r, int dim);

// 1 / (4 delta_n^2 n_informative); empty for n_informative = 0, where the
// caller substitutes the squared first-step error.
std::optional<double> conditional_mse(long long n_informative, double delta_n);

struct BinomialInverseMoment {
    double exact;         // sum_{k>=1} (1/k) C(N,k) p^k (1-p)^(N-k)
    double second_order;  // (1/(Np)) (1 + (1-p)/(Np) - (1-p)^N)
};

BinomialInverseMoment averaged_inverse_ninf(long long copies, double p_informative);

// Shared first-step estimator. Stage (a): ceil(n/2) copies split across the
// quadratures theta' = 0 and pi/4, empirical variances inverted for
// (cos 2theta, sin 2theta), atan2/2. Stage (b): the remaining copies sample
// the three-outcome POVM built at the stage-(a) guess and apply the
// approximate MLE, whose correction is bounded by 1/(2 delta_n). The
// refinement keeps the first-step error small enough that the cubic bias of
// the second-step linearized estimator stays negligible at desk scales.
double rough_phase_estimate(const SldPovmModel& model, double theta_true,
                            long long copies, std::mt19937_64& rng);

// One full two-step run: rough estimate on ceil(N^alpha) copies, POVM tuned
// to it on the remainder, approximate MLE.
EstimationRecord two_step_povm_experiment(const ExperimentConfig& config,
                                          std::mt19937_64& rng);

}  // namespace phasekit
