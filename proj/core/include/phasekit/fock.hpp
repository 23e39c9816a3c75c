#pragma once

// Truncated Fock-space oracle for the squeezed-vacuum family: state
// construction (closed form and matrix-exponential routes), number-operator
// moments, the SLD eigenvectors, the three-outcome POVM and its exact
// outcome probabilities, and the POVM optimality conditions.
//
// Truncation is never silent: every constructed state carries the weight it
// lost to the cutoff ("leakage"), and operations that need accurate moments
// reject states whose leakage exceeds their tolerance.

#include <complex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace phasekit {

class TruncationError : public std::runtime_error {
public:
    explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

// Fock amplitude vector over |0>..|dim-1>.
struct TruncatedState {
    std::vector<std::complex<double>> amplitudes;
    double leakage = 0.0;  // 1 - sum |c_n|^2 relative to the untruncated state

    int dim() const { return static_cast<int>(amplitudes.size()); }
    double norm() const;
};

struct NumberMoments {
    double mean;
    double variance;
};

// <n> and <dn>^2 from the amplitudes. Throws TruncationError when the state's
// leakage exceeds the tolerance: tail weight enters the moments as ~n^2.
NumberMoments number_operator_moments(const TruncatedState& state,
                                      double leakage_tolerance = 1e-8);

// S(r)|0> by the even-photon expansion
//   c_{2n} = (-tanh r)^n sqrt((2n)!) / (2^n n!) / sqrt(cosh r).
// dim must be even and >= 16. Throws TruncationError when leakage > 1e-6.
TruncatedState squeeze_vacuum(double r, int dim);

struct SqueezeGen { double r; };        // (r/2)(a^2 - a+^2)
struct DisplaceGen { double alpha; };   // alpha (a+ - a), real alpha
struct RotateGen { double theta; };     // -i theta a+a

using Generator = std::variant<SqueezeGen, DisplaceGen, RotateGen>;

// exp(generator) applied to the state. Rotation acts exactly (diagonal
// phases e^{-i n theta}); squeeze and displace go through the dense matrix
// exponential of the truncated generator (scaling-and-squaring), which is
// orthogonal on the block, so norms survive up to the reported leakage.
TruncatedState apply_generator_exponential(const TruncatedState& state,
                                           const Generator& gen);

// |psi> = (1 - |phi0><phi0|) G |phi0> for phi0 = U(theta) S(r)|0>, G = a+a.
// Unnormalized; <psi|phi0> = 0 and 4 <psi|psi> equals the QFI.
TruncatedState psi_vector(double r, double theta, int dim);

struct SldPovm {
    TruncatedState e_plus;
    TruncatedState e_minus;
};

// Normalized SLD eigenvectors U(theta_guess) S(r) (+-i|0> - |2>)/sqrt(2).
// The third POVM element is the complement and stays implicit.
SldPovm sld_povm(double r, double theta_guess, int dim);

struct OutcomeProbabilities {
    double p_plus;
    double p_minus;
    double p_zero;
};

// p_+- = |<e_+-|phi0(theta_true)>|^2, p_0 the complement (clamped at 0).
// Depends on theta_true - theta_guess only, and is pi-periodic in it.
OutcomeProbabilities three_outcome_probabilities(double r, double theta_true,
                                                 double theta_guess, int dim);

// Max violation of the POVM optimality conditions for E_+, E_- at delta
// theta = 0: |Im tr[rho E lambda]| and the residual of
// rho lambda E = k rho E with real k. Degenerate (r = 0) returns 0.
double optimality_conditions_check(double r, double theta, int dim);

// Precomputed overlap model for the three-outcome POVM at fixed (r, dim).
// probabilities(dt) costs O(dim); used by the estimation loops where the
// POVM is rebuilt at a fresh guess every trial.
class SldPovmModel {
public:
    SldPovmModel(double r, int dim);

    OutcomeProbabilities probabilities(double delta_theta) const;

    double delta_n() const { return delta_n_; }  // sinh(2r)/sqrt(2)
    double squeezing() const { return r_; }
    int dim() const { return static_cast<int>(signal_.size()); }
    double leakage() const { return leakage_; }

private:
    std::vector<std::complex<double>> signal_;   // S(r)|0>
    std::vector<std::complex<double>> e_plus_;   // S(r)(+i|0> - |2>)/sqrt(2)
    std::vector<std::complex<double>> e_minus_;
    double delta_n_;
    double r_;
    double leakage_;
};

}  // namespace phasekit
