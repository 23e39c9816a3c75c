#pragma once

// Closed-form quantities for pure Gaussian states of a single mode:
// covariance matrices, photon statistics, quantum Fisher information and
// the Heisenberg bound at fixed mean photon number.
//
// Conventions: vacuum quadrature variance is 1/2, i.e. the vacuum
// covariance matrix is the identity and <dQ>^2 = [gamma]_11 / 2. Squeezing
// with r > 0 narrows the Q quadrature (S = diag(e^{-2r}, e^{2r})).

#include <vector>

namespace phasekit {

// The state U(theta) D(alpha) S(r) |0>. The displacement amplitude is
// restricted to real alpha >= 0.
struct GaussianPureState {
    GaussianPureState(double alpha, double r, double theta);

    double alpha;
    double r;
    double theta;

    double s() const;  // e^{-r}
};

// General 2x2 real matrix (row major).
struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    double det() const;
    double trace() const;
    Mat2 transpose() const;
    Mat2 inverse() const;
};

Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a, const Mat2& b);
Mat2 operator*(double c, const Mat2& a);

// Symmetric 2x2 matrix, symmetric by construction (stores three entries).
class CovarianceMatrix {
public:
    CovarianceMatrix(double m11, double m12, double m22);

    // Symmetrizes a general product; rejects asymmetry beyond tol * scale.
    static CovarianceMatrix from_mat2(const Mat2& m, double symmetry_tol = 1e-12);

    double m11() const { return m11_; }
    double m12() const { return m12_; }
    double m21() const { return m12_; }
    double m22() const { return m22_; }

    Mat2 mat() const;
    double det() const;
    double trace() const;
    CovarianceMatrix inverse() const;
    bool positive_definite() const;

private:
    double m11_, m12_, m22_;
};

CovarianceMatrix operator+(const CovarianceMatrix& a, const CovarianceMatrix& b);

// R(theta) = [[cos, -sin], [sin, cos]]; orthogonal, det 1.
Mat2 rotation_matrix(double theta);

// gamma_theta = R^t(theta) S R(theta) with S = diag(e^{-2r}, e^{2r}).
CovarianceMatrix covariance_of_state(const GaussianPureState& state);

// <n> = |alpha|^2 + sinh^2 r
double mean_photon_number(const GaussianPureState& state);

// H = 4 [ |alpha|^2 (cosh r - sinh r)^2 + 2 sinh^2 r cosh^2 r ];
// independent of theta.
double qfi(const GaussianPureState& state);

// H = 8 (nbar^2 + nbar), the squeezed-vacuum QFI at mean photon number nbar.
double qfi_squeezed_vacuum_from_photons(double nbar);

// 1 / (8 (nbar^2 + nbar) copies). Rejects nbar <= 0 (bound diverges).
double heisenberg_bound(double nbar, long long copies);

struct QfiScanPoint {
    double displacement_fraction;  // f: |alpha|^2 = f nbar, sinh^2 r = (1-f) nbar
    double qfi;
};

// Scans the energy split between displacement and squeezing at fixed nbar.
// The QFI maximum sits at f = 0 (all energy in squeezing).
std::vector<QfiScanPoint> fixed_energy_qfi_scan(double nbar, int grid_points);

// Maps a phase difference into (-pi/2, pi/2]. The squeezed vacuum is
// identifiable only mod pi, so estimation errors are wrapped before squaring.
double wrap_phase_error(double delta);

}  // namespace phasekit
