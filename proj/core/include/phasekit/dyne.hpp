#pragma once

// Covariant Gaussian (dyne) measurements: simultaneous noisy readout of two
// conjugate quadratures with a squeezed ancilla in the auxiliary port.
// Outcome density, the three equivalent Fisher-information forms, the
// squeezing threshold and optimal local-oscillator angle, the infinite-
// squeezing limits, and the marginal-POVM Gaussian integral check.

#include <random>
#include <utility>

#include "phasekit/gaussian.hpp"

namespace phasekit {

// Ancilla state of the auxiliary port: squeezing r' and phase theta'.
// t = e^{-r'} is the conventional strength parameter; r' < 0 (t > 1) is the
// regime that reaches the Heisenberg limit.
struct DyneConfig {
    DyneConfig(double r_prime, double theta_prime);

    double r_prime;
    double theta_prime;

    double t() const;  // e^{-r'}
};

// M = (gamma_0 + gamma_theta)^{-1}; symmetric positive definite.
CovarianceMatrix precision_matrix(const GaussianPureState& state, const DyneConfig& dyne);

// p(chi) = sqrt(det M)/pi * exp(-chi^t M chi); normalized over the plane.
double outcome_density(double q, double p, const GaussianPureState& state,
                       const DyneConfig& dyne);

// Bivariate normal with zero mean and covariance (gamma_0 + gamma_theta)/2.
std::pair<double, double> sample_dyne(const GaussianPureState& state,
                                      const DyneConfig& dyne, std::mt19937_64& rng);

// F = 1/2 tr[M' M^{-1} M' M^{-1}] with M' by central differences in theta.
double fisher_numeric(const GaussianPureState& state, const DyneConfig& dyne);

// F = 1/2 tr[Gamma^{-1} Sigma Gamma^{-1} Sigma] with
// Gamma = (cosh2r + cosh2r') 1 - (sinh2r + sinh2r' cos phi) sigma3
//         + sinh2r' sin phi sigma1,   Sigma = 2 sinh2r sigma1.
double fisher_gamma_form(double r, double r_prime, double phi);

// The explicit closed form in phi = 2(theta' - theta); even and 2pi-periodic.
double fisher_closed(double r, double r_prime, double phi);

// t_thr(s) = (1/2s) sqrt(s^4 - 1 + sqrt(s^8 + 14 s^4 + 1)) for s in (0, 1].
// This is the bifurcation point of F in phi: d^2F/dphi^2 at phi = 0 changes
// sign exactly at |sinh 2r'| = sinh(2r)/2, i.e. at e^{-|r'|} = t_thr(e^{-r}).
// Note t_thr(s) <= 1, with equality only at s = 1.
double threshold(double s);

// True when the interior maxima +-phi_0 exist: |sinh 2r'| > sinh(2r)/2.
// Below, F is maximal at phi = 0 (r' > 0) or phi = pi (r' < 0).
bool above_threshold(double r, double r_prime);

// phi_0 >= 0 from the stationarity condition; requires above_threshold.
double optimal_angle(double r, double r_prime);

// sinh^2(2r) / cosh^2(r - r'), the value of fisher_closed at phi = 0.
double fisher_below_threshold_max(double r, double r_prime);

// Maximum Fisher information over phi in the above-threshold regime; equals
// fisher_closed at +-phi_0. Approaches cosh 4r - 1 as r' -> -inf.
double fisher_at_optimum(double r, double r_prime);

// Phi(s) = arccos((s^4-1)/(s^4+1)) = arccos(-tanh 2r), in [pi/2, pi).
double limiting_angle(double s);

struct MarginalIntegral {
    double numeric;  // quadrature of int dq' psi(q1-q') psi*(q2-q')
    double closed;   // exp(-e^{2r'} dq^2 / 4)
};

// Overlap kernel of the marginal POVM for the squeezed-vacuum wave function
// psi(q) = e^{r'/2} pi^{-1/4} exp(-e^{2r'} q^2 / 2), at q1 - q2 = dq.
MarginalIntegral marginal_integral_check(double r_prime, double dq);

struct BestDyneFisher {
    double fisher;
    double phi;
    bool above_threshold;
};

// Case dispatch: +-phi_0 above threshold, else the flat-direction optimum
// (phi = 0 for r' >= 0, phi = pi for r' < 0).
BestDyneFisher best_dyne_fisher(double r, double r_prime);

}  // namespace phasekit
