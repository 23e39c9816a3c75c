#pragma once

// Single-quadrature (homodyne) measurement of the squeezed vacuum: outcome
// variance, Fisher information, the twice-degenerate MLE with branch
// selection, the wrong-branch bias, and the full two-step scheme with the
// local oscillator at theta' = theta_rough + Phi(s)/2.

#include <random>
#include <vector>

#include "phasekit/experiment.hpp"
#include "phasekit/gaussian.hpp"

namespace phasekit {

struct HomodyneBatch {
    double theta_prime = 0.0;
    std::vector<double> outcomes;
    double sum_of_squares = 0.0;  // sufficient statistic numerator
};

// sigma^2(theta', theta) = [1 + s^4 + (1 - s^4) cos 2(theta' - theta)] / (4 s^2)
double quadrature_variance(double s, double theta_prime, double theta);

// i.i.d. normal(0, sigma^2) outcomes; the signal must be a squeezed vacuum
// (alpha = 0).
HomodyneBatch sample_homodyne(const GaussianPureState& state, double theta_prime,
                              long long copies, std::mt19937_64& rng);

// Fisher information of the zero-mean Gaussian family:
// (d sigma^2 / d theta)^2 / (2 sigma^4). Peaks at theta' - theta = +-Phi/2
// where it reaches (1 - s^4)^2 / (2 s^4) = cosh 4r - 1.
double homodyne_fisher(double s, double theta_prime, double theta);

struct HomodyneMleResult {
    double theta;          // chosen branch
    double minus_branch;   // theta' - arccos(u)/2
    double plus_branch;    // theta' + arccos(u)/2
    bool chose_minus;
};

// Solves sigma^2(theta', theta) = sum p_i^2 / N for theta. The condition is
// twice degenerate; the branch nearer (wrapped) to theta_guess wins. The
// arccos argument is clamped to [-1, 1] unconditionally: the sufficient
// statistic is random and exits the admissible range by O(1/sqrt(N))
// sampling noise.
HomodyneMleResult homodyne_mle_full(const HomodyneBatch& batch, double theta_guess,
                                    double s);
double homodyne_mle(const HomodyneBatch& batch, double theta_guess, double s);

// arccos[(4 s^2 sigma^2(theta', theta) - 1 - s^4)/(1 - s^4)]: the constant
// separation of the two likelihood maxima (the bias of the wrong branch).
double wrong_branch_bias(double s, double theta_prime, double theta);

enum class OscillatorSign { plus, minus };  // theta' = rough +- Phi(s)/2

// One full two-step run: rough estimate, homodyne at theta' = rough + Phi/2
// on the remaining copies, branch selection nearest the rough estimate.
// The plus/minus conventions are statistically equivalent.
EstimationRecord two_step_homodyne_experiment(const ExperimentConfig& config,
                                              std::mt19937_64& rng,
                                              OscillatorSign sign = OscillatorSign::plus);

}  // namespace phasekit
