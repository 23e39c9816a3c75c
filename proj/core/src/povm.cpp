#include "phasekit/povm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "phasekit/gaussian.hpp"
#include "phasekit/homodyne.hpp"

namespace phasekit {

ThreeOutcomeCounts sample_three_outcome(const OutcomeProbabilities& probs,
                                        long long copies, std::mt19937_64& rng) {
    const double sum = probs.p_plus + probs.p_minus + probs.p_zero;
    if (std::abs(sum - 1.0) > 1e-6 || probs.p_plus < 0.0 || probs.p_minus < 0.0 ||
        probs.p_zero < 0.0) {
        throw std::invalid_argument("sample_three_outcome: probabilities not normalized");
    }
    if (copies < 0) throw std::invalid_argument("sample_three_outcome: copies < 0");

    ThreeOutcomeCounts counts;
    if (probs.p_plus >= 1.0) {
        counts.n_plus = copies;
        return counts;
    }
    std::binomial_distribution<long long> bp(copies, probs.p_plus);
    counts.n_plus = bp(rng);
    // conditional probability can exceed 1 by an ulp when p_zero = 0
    const double q = std::clamp(probs.p_minus / (1.0 - probs.p_plus), 0.0, 1.0);
    std::binomial_distribution<long long> bm(copies - counts.n_plus, q);
    counts.n_minus = bm(rng);
    counts.n_zero = copies - counts.n_plus - counts.n_minus;
    return counts;
}

double approximate_mle(const ThreeOutcomeCounts& counts, double theta_guess,
                       double delta_n) {
    if (!(delta_n > 0.0)) throw std::invalid_argument("approximate_mle: delta_n must be > 0");
    const long long ninf = counts.informative();
    if (ninf == 0) return theta_guess;
    return theta_guess + static_cast<double>(counts.n_plus - counts.n_minus) /
                             (2.0 * static_cast<double>(ninf) * delta_n);
}

namespace {

double log_likelihood(const ThreeOutcomeCounts& c, const OutcomeProbabilities& p) {
    double ll = 0.0;
    auto add = [&ll](long long n, double prob) {
        if (n > 0) {
            if (prob <= 0.0) {
                ll = -std::numeric_limits<double>::infinity();
            } else if (std::isfinite(ll)) {
                ll += static_cast<double>(n) * std::log(prob);
            }
        }
    };
    add(c.n_plus, p.p_plus);
    add(c.n_minus, p.p_minus);
    add(c.n_zero, p.p_zero);
    return ll;
}

}  // namespace

ExactMleResult exact_mle(const ThreeOutcomeCounts& counts, double theta_guess,
                         double r, int dim) {
    if (counts.informative() == 0) {
        return {theta_guess, true};
    }
    const SldPovmModel model(r, dim);
    auto ll = [&](double theta) {
        return log_likelihood(counts, model.probabilities(theta - theta_guess));
    };

    // coarse grid, then golden-section refinement of the best bracket
    const double lo = theta_guess - 0.5, hi = theta_guess + 0.5;
    const int grid = 201;
    double best = lo, best_ll = ll(lo);
    for (int i = 1; i < grid; ++i) {
        const double t = lo + (hi - lo) * i / (grid - 1);
        const double v = ll(t);
        if (v > best_ll) {
            best_ll = v;
            best = t;
        }
    }
    const double step = (hi - lo) / (grid - 1);
    double a = std::max(lo, best - step), b = std::min(hi, best + step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = ll(x1), f2 = ll(x2);
    while (b - a > 1e-10) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = ll(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = ll(x1);
        }
    }
    return {0.5 * (a + b), false};
}

std::optional<double> conditional_mse(long long n_informative, double delta_n) {
    if (!(delta_n > 0.0)) throw std::invalid_argument("conditional_mse: delta_n must be > 0");
    if (n_informative < 0) throw std::invalid_argument("conditional_mse: negative count");
    if (n_informative == 0) return std::nullopt;  // caller uses delta_theta^2
    return 1.0 / (4.0 * delta_n * delta_n * static_cast<double>(n_informative));
}

BinomialInverseMoment averaged_inverse_ninf(long long copies, double p_informative) {
    if (copies < 1) throw std::invalid_argument("averaged_inverse_ninf: copies must be >= 1");
    if (!(p_informative > 0.0) || p_informative > 1.0) {
        throw std::invalid_argument("averaged_inverse_ninf: p must be in (0, 1]");
    }
    const double n = static_cast<double>(copies);
    const double p = p_informative;

    if (p == 1.0) {
        return {1.0 / n, 1.0 / n};
    }
    // log-space binomial pmf keeps the sum stable for p near 1
    const double lp = std::log(p), lq = std::log1p(-p);
    double exact = 0.0;
    for (long long k = 1; k <= copies; ++k) {
        const double kd = static_cast<double>(k);
        const double lpmf = std::lgamma(n + 1.0) - std::lgamma(kd + 1.0) -
                            std::lgamma(n - kd + 1.0) + kd * lp + (n - kd) * lq;
        exact += std::exp(lpmf) / kd;
    }
    const double qn = std::exp(n * lq);  // (1-p)^N
    const double second = (1.0 / (n * p)) * (1.0 + (1.0 - p) / (n * p) - qn);
    return {exact, second};
}

double rough_phase_estimate(const SldPovmModel& model, double theta_true,
                            long long copies, std::mt19937_64& rng) {
    if (copies < 3) throw std::invalid_argument("rough_phase_estimate: copies must be >= 3");
    const double r = model.squeezing();
    const double s = std::exp(-r);
    const double s4 = s * s * s * s;
    if (!(s4 < 1.0)) throw std::invalid_argument("rough_phase_estimate: needs r > 0");

    const long long stage_a = (copies + 1) / 2;  // remainder to the first stage
    const long long stage_b = copies - stage_a;
    const long long m0 = (stage_a + 1) / 2;
    const long long m1 = stage_a - m0;

    constexpr double pi = 3.14159265358979323846;
    auto mean_square = [&](double theta_prime, long long m) {
        const double sd = std::sqrt(quadrature_variance(s, theta_prime, theta_true));
        std::normal_distribution<double> normal(0.0, sd);
        double ss = 0.0;
        for (long long i = 0; i < m; ++i) {
            const double x = normal(rng);
            ss += x * x;
        }
        return ss / static_cast<double>(m);
    };
    const double v0 = mean_square(0.0, m0);
    const double v1 = mean_square(pi / 4.0, m1);

    auto invert = [&](double v) {
        return std::clamp((4.0 * s * s * v - 1.0 - s4) / (1.0 - s4), -1.0, 1.0);
    };
    const double cos2t = invert(v0);
    const double sin2t = invert(v1);
    const double theta_a = 0.5 * std::atan2(sin2t, cos2t);

    if (stage_b == 0) return theta_a;
    const OutcomeProbabilities probs = model.probabilities(theta_true - theta_a);
    const ThreeOutcomeCounts counts = sample_three_outcome(probs, stage_b, rng);
    return approximate_mle(counts, theta_a, model.delta_n());
}

EstimationRecord two_step_povm_experiment(const ExperimentConfig& config,
                                          std::mt19937_64& rng) {
    config.validate();
    const long long n1 = config.step_one_copies();
    const long long n_bar = config.total_copies - n1;

    const SldPovmModel model(config.r, config.truncation_dim);
    const double theta_rough =
        rough_phase_estimate(model, config.theta_true, n1, rng);

    const OutcomeProbabilities probs =
        model.probabilities(config.theta_true - theta_rough);
    const ThreeOutcomeCounts counts = sample_three_outcome(probs, n_bar, rng);
    const double theta_hat = approximate_mle(counts, theta_rough, model.delta_n());

    EstimationRecord rec;
    rec.theta_rough = theta_rough;
    rec.theta_hat = theta_hat;
    rec.wrapped_error = wrap_phase_error(theta_hat - config.theta_true);
    rec.squared_error = rec.wrapped_error * rec.wrapped_error;
    rec.n_plus = counts.n_plus;
    rec.n_minus = counts.n_minus;
    rec.n_zero = counts.n_zero;
    return rec;
}

}  // namespace phasekit
