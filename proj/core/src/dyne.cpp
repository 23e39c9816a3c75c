#include "phasekit/dyne.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace phasekit {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Strict clamp for deterministic arccos arguments: rounding may push the
// value marginally outside [-1, 1]; anything beyond the window is a logic
// error upstream.
double clamp_acos_arg(double x, const char* where) {
    if (x > 1.0 + 1e-12 || x < -1.0 - 1e-12) {
        throw std::domain_error(std::string(where) + ": arccos argument " +
                                std::to_string(x) + " outside [-1, 1]");
    }
    return std::clamp(x, -1.0, 1.0);
}

CovarianceMatrix ancilla_covariance(const DyneConfig& dyne) {
    const double c = std::cos(dyne.theta_prime), s = std::sin(dyne.theta_prime);
    const double a = std::exp(-2.0 * dyne.r_prime);
    const double b = std::exp(2.0 * dyne.r_prime);
    return CovarianceMatrix(c * c * a + s * s * b, c * s * (b - a), s * s * a + c * c * b);
}

}  // namespace

DyneConfig::DyneConfig(double r_prime_, double theta_prime_)
    : r_prime(r_prime_), theta_prime(theta_prime_) {
    if (!std::isfinite(r_prime) || !std::isfinite(theta_prime)) {
        throw std::invalid_argument("DyneConfig: fields must be finite");
    }
}

double DyneConfig::t() const { return std::exp(-r_prime); }

CovarianceMatrix precision_matrix(const GaussianPureState& state, const DyneConfig& dyne) {
    return (covariance_of_state(state) + ancilla_covariance(dyne)).inverse();
}

double outcome_density(double q, double p, const GaussianPureState& state,
                       const DyneConfig& dyne) {
    const CovarianceMatrix m = precision_matrix(state, dyne);
    const double quad =
        m.m11() * q * q + 2.0 * m.m12() * q * p + m.m22() * p * p;
    return std::sqrt(m.det()) / kPi * std::exp(-quad);
}

std::pair<double, double> sample_dyne(const GaussianPureState& state,
                                      const DyneConfig& dyne, std::mt19937_64& rng) {
    const CovarianceMatrix sum = covariance_of_state(state) + ancilla_covariance(dyne);
    // covariance (gamma_0 + gamma_theta)/2, Cholesky by hand
    const double c11 = 0.5 * sum.m11(), c12 = 0.5 * sum.m12(), c22 = 0.5 * sum.m22();
    const double l11 = std::sqrt(c11);
    const double l21 = c12 / l11;
    const double l22 = std::sqrt(c22 - l21 * l21);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double z1 = normal(rng), z2 = normal(rng);
    return {l11 * z1, l21 * z1 + l22 * z2};
}

double fisher_numeric(const GaussianPureState& state, const DyneConfig& dyne) {
    const double h = 1e-5;
    auto m_at = [&](double theta) {
        return precision_matrix(GaussianPureState(state.alpha, state.r, theta), dyne).mat();
    };
    const Mat2 mp = (1.0 / (2.0 * h)) * (m_at(state.theta + h) - m_at(state.theta - h));
    const Mat2 mi = m_at(state.theta).inverse();
    return 0.5 * (mp * mi * mp * mi).trace();
}

double fisher_gamma_form(double r, double r_prime, double phi) {
    const double ch2r = std::cosh(2.0 * r), sh2r = std::sinh(2.0 * r);
    const double ch2p = std::cosh(2.0 * r_prime), sh2p = std::sinh(2.0 * r_prime);
    const double d = ch2r + ch2p;                      // coefficient of 1
    const double z = sh2r + sh2p * std::cos(phi);      // coefficient of -sigma3
    const double x = sh2p * std::sin(phi);             // coefficient of sigma1
    const Mat2 gamma{d - z, x, x, d + z};
    const Mat2 sigma{0.0, 2.0 * sh2r, 2.0 * sh2r, 0.0};
    const Mat2 gi = gamma.inverse();
    return 0.5 * (gi * sigma * gi * sigma).trace();
}

double fisher_closed(double r, double r_prime, double phi) {
    const double ch2r = std::cosh(2.0 * r), sh2r = std::sinh(2.0 * r);
    const double ch2p = std::cosh(2.0 * r_prime), sh2p = std::sinh(2.0 * r_prime);
    const double a = ch2r * ch2p - sh2r * sh2p * std::cos(phi) + 1.0;
    const double b = a + sh2p * sh2p * std::sin(phi) * std::sin(phi);
    return 2.0 * sh2r * sh2r * b / (a * a);
}

double threshold(double s) {
    if (!(s > 0.0) || s > 1.0) {
        throw std::invalid_argument("threshold: s must be in (0, 1]");
    }
    const double s4 = s * s * s * s;
    const double s8 = s4 * s4;
    return (1.0 / (2.0 * s)) * std::sqrt(s4 - 1.0 + std::sqrt(s8 + 14.0 * s4 + 1.0));
}

bool above_threshold(double r, double r_prime) {
    return std::abs(std::sinh(2.0 * r_prime)) > 0.5 * std::sinh(2.0 * r);
}

double optimal_angle(double r, double r_prime) {
    if (!(r > 0.0)) throw std::domain_error("optimal_angle: needs r > 0");
    if (!above_threshold(r, r_prime)) {
        throw std::domain_error(
            "optimal_angle: below threshold, no interior maximum (use phi = 0)");
    }
    const double num = 2.0 * std::cosh(4.0 * r_prime) * std::sinh(2.0 * r) +
                       std::cosh(2.0 * r_prime) * std::sinh(4.0 * r);
    const double den = (3.0 + std::cosh(4.0 * r)) * std::sinh(2.0 * r_prime) +
                       2.0 * std::cosh(2.0 * r) * std::sinh(4.0 * r_prime);
    return std::acos(clamp_acos_arg(num / den, "optimal_angle"));
}

double fisher_below_threshold_max(double r, double r_prime) {
    const double sh2r = std::sinh(2.0 * r);
    const double ch = std::cosh(r - r_prime);
    return sh2r * sh2r / (ch * ch);
}

double fisher_at_optimum(double r, double r_prime) {
    if (!above_threshold(r, r_prime)) {
        throw std::domain_error("fisher_at_optimum: below threshold");
    }
    const double sh2r = std::sinh(2.0 * r);
    const double num = 3.0 + std::cosh(4.0 * r) +
                       8.0 * std::cosh(2.0 * r) * std::cosh(2.0 * r_prime) +
                       4.0 * std::cosh(4.0 * r_prime);
    const double den = std::cosh(2.0 * r) + std::cosh(2.0 * r_prime);
    return sh2r * sh2r * num / (4.0 * den * den);
}

double limiting_angle(double s) {
    if (!(s > 0.0) || s > 1.0) {
        throw std::invalid_argument("limiting_angle: s must be in (0, 1]");
    }
    const double s4 = s * s * s * s;
    return std::acos(clamp_acos_arg((s4 - 1.0) / (s4 + 1.0), "limiting_angle"));
}

MarginalIntegral marginal_integral_check(double r_prime, double dq) {
    // psi(q) = e^{r'/2} pi^{-1/4} exp(-e^{2r'} q^2 / 2); real, so the overlap
    // integrand is psi(q1 - q') psi(q2 - q') with q1 = dq, q2 = 0.
    const double w = std::exp(2.0 * r_prime);
    auto psi = [&](double q) {
        return std::exp(0.5 * r_prime) / std::pow(kPi, 0.25) * std::exp(-0.5 * w * q * q);
    };
    const double sigma = std::exp(-r_prime);  // width scale of psi
    const double lo = std::min(dq, 0.0) - 12.0 * sigma;
    const double hi = std::max(dq, 0.0) + 12.0 * sigma;
    const int n = 4096;  // composite Simpson, even count
    const double h = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double q = lo + i * h;
        const double f = psi(dq - q) * psi(-q);
        const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += wgt * f;
    }
    const double numeric = acc * h / 3.0;
    const double closed = std::exp(-0.25 * w * dq * dq);
    return {numeric, closed};
}

BestDyneFisher best_dyne_fisher(double r, double r_prime) {
    if (above_threshold(r, r_prime)) {
        return {fisher_at_optimum(r, r_prime), optimal_angle(r, r_prime), true};
    }
    const double phi = r_prime >= 0.0 ? 0.0 : kPi;
    return {fisher_closed(r, r_prime, phi), phi, false};
}

}  // namespace phasekit
