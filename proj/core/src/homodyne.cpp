#include "phasekit/homodyne.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "phasekit/dyne.hpp"
#include "phasekit/povm.hpp"

namespace phasekit {

double quadrature_variance(double s, double theta_prime, double theta) {
    if (!(s > 0.0)) throw std::invalid_argument("quadrature_variance: s must be > 0");
    const double s4 = s * s * s * s;
    return (1.0 + s4 + (1.0 - s4) * std::cos(2.0 * (theta_prime - theta))) /
           (4.0 * s * s);
}

HomodyneBatch sample_homodyne(const GaussianPureState& state, double theta_prime,
                              long long copies, std::mt19937_64& rng) {
    if (state.alpha != 0.0) {
        throw std::invalid_argument(
            "sample_homodyne: only squeezed-vacuum signals (alpha = 0) are supported");
    }
    if (copies < 1) throw std::invalid_argument("sample_homodyne: copies must be >= 1");
    const double sd = std::sqrt(quadrature_variance(state.s(), theta_prime, state.theta));
    std::normal_distribution<double> normal(0.0, sd);
    HomodyneBatch batch;
    batch.theta_prime = theta_prime;
    batch.outcomes.reserve(static_cast<size_t>(copies));
    for (long long i = 0; i < copies; ++i) {
        const double x = normal(rng);
        batch.outcomes.push_back(x);
        batch.sum_of_squares += x * x;
    }
    return batch;
}

double homodyne_fisher(double s, double theta_prime, double theta) {
    if (!(s > 0.0) || s >= 1.0) {
        throw std::invalid_argument("homodyne_fisher: s must be in (0, 1)");
    }
    const double s4 = s * s * s * s;
    const double sigma2 = quadrature_variance(s, theta_prime, theta);
    const double dsigma2 = (1.0 - s4) * std::sin(2.0 * (theta_prime - theta)) /
                           (2.0 * s * s);
    return dsigma2 * dsigma2 / (2.0 * sigma2 * sigma2);
}

HomodyneMleResult homodyne_mle_full(const HomodyneBatch& batch, double theta_guess,
                                    double s) {
    if (batch.outcomes.empty()) {
        throw std::invalid_argument("homodyne_mle: empty batch");
    }
    if (!(s > 0.0)) throw std::invalid_argument("homodyne_mle: s must be > 0");
    if (s == 1.0) {
        throw std::invalid_argument(
            "homodyne_mle: s = 1 (no squeezing) makes the phase unidentifiable");
    }
    const double s4 = s * s * s * s;
    const double v = batch.sum_of_squares / static_cast<double>(batch.outcomes.size());
    const double u = std::clamp((4.0 * s * s * v - 1.0 - s4) / (1.0 - s4), -1.0, 1.0);
    const double gap = 0.5 * std::acos(u);

    HomodyneMleResult res;
    res.minus_branch = batch.theta_prime - gap;
    res.plus_branch = batch.theta_prime + gap;
    const double d_minus = std::abs(wrap_phase_error(res.minus_branch - theta_guess));
    const double d_plus = std::abs(wrap_phase_error(res.plus_branch - theta_guess));
    res.chose_minus = d_minus <= d_plus;
    res.theta = res.chose_minus ? res.minus_branch : res.plus_branch;
    return res;
}

double homodyne_mle(const HomodyneBatch& batch, double theta_guess, double s) {
    return homodyne_mle_full(batch, theta_guess, s).theta;
}

double wrong_branch_bias(double s, double theta_prime, double theta) {
    if (!(s > 0.0) || s >= 1.0) {
        throw std::invalid_argument("wrong_branch_bias: s must be in (0, 1)");
    }
    const double s4 = s * s * s * s;
    const double arg =
        (4.0 * s * s * quadrature_variance(s, theta_prime, theta) - 1.0 - s4) /
        (1.0 - s4);
    // deterministic argument: only rounding-level excursions are tolerated
    if (arg > 1.0 + 1e-12 || arg < -1.0 - 1e-12) {
        throw std::domain_error("wrong_branch_bias: arccos argument outside [-1, 1]");
    }
    return std::acos(std::clamp(arg, -1.0, 1.0));
}

EstimationRecord two_step_homodyne_experiment(const ExperimentConfig& config,
                                              std::mt19937_64& rng,
                                              OscillatorSign sign) {
    config.validate();
    const long long n1 = config.step_one_copies();
    const long long n_bar = config.total_copies - n1;
    const double s = std::exp(-config.r);

    const SldPovmModel model(config.r, config.truncation_dim);
    const double theta_rough =
        rough_phase_estimate(model, config.theta_true, n1, rng);

    const double half_phi = 0.5 * limiting_angle(s);
    const double theta_prime = sign == OscillatorSign::plus ? theta_rough + half_phi
                                                            : theta_rough - half_phi;
    const GaussianPureState state(0.0, config.r, config.theta_true);
    const HomodyneBatch batch = sample_homodyne(state, theta_prime, n_bar, rng);
    const HomodyneMleResult mle = homodyne_mle_full(batch, theta_rough, s);

    EstimationRecord rec;
    rec.theta_rough = theta_rough;
    rec.theta_hat = mle.theta;
    rec.wrapped_error = wrap_phase_error(mle.theta - config.theta_true);
    rec.squared_error = rec.wrapped_error * rec.wrapped_error;
    rec.statistic = batch.sum_of_squares / static_cast<double>(n_bar);
    // flipped = the nearest-branch rule disagreed with the sign convention
    rec.branch_flipped =
        sign == OscillatorSign::plus ? !mle.chose_minus : mle.chose_minus;
    return rec;
}

}  // namespace phasekit
