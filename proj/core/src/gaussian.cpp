#include "phasekit/gaussian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace phasekit {

GaussianPureState::GaussianPureState(double alpha_, double r_, double theta_)
    : alpha(alpha_), r(r_), theta(theta_) {
    if (!std::isfinite(alpha) || !std::isfinite(r) || !std::isfinite(theta)) {
        throw std::invalid_argument("GaussianPureState: fields must be finite");
    }
    if (alpha < 0.0) {
        throw std::invalid_argument("GaussianPureState: alpha must be >= 0");
    }
}

double GaussianPureState::s() const { return std::exp(-r); }

double Mat2::det() const { return a11 * a22 - a12 * a21; }
double Mat2::trace() const { return a11 + a22; }
Mat2 Mat2::transpose() const { return {a11, a21, a12, a22}; }

Mat2 Mat2::inverse() const {
    const double d = det();
    if (d == 0.0) throw std::invalid_argument("Mat2: singular matrix");
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
}

Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
}

Mat2 operator*(double c, const Mat2& a) {
    return {c * a.a11, c * a.a12, c * a.a21, c * a.a22};
}

CovarianceMatrix::CovarianceMatrix(double m11, double m12, double m22)
    : m11_(m11), m12_(m12), m22_(m22) {
    if (!std::isfinite(m11) || !std::isfinite(m12) || !std::isfinite(m22)) {
        throw std::invalid_argument("CovarianceMatrix: entries must be finite");
    }
}

CovarianceMatrix CovarianceMatrix::from_mat2(const Mat2& m, double symmetry_tol) {
    const double scale = std::abs(m.a11) + std::abs(m.a12) + std::abs(m.a21) + std::abs(m.a22);
    if (std::abs(m.a12 - m.a21) > symmetry_tol * (1.0 + scale)) {
        throw std::invalid_argument("CovarianceMatrix: matrix is not symmetric");
    }
    return CovarianceMatrix(m.a11, 0.5 * (m.a12 + m.a21), m.a22);
}

Mat2 CovarianceMatrix::mat() const { return {m11_, m12_, m12_, m22_}; }
double CovarianceMatrix::det() const { return m11_ * m22_ - m12_ * m12_; }
double CovarianceMatrix::trace() const { return m11_ + m22_; }

CovarianceMatrix CovarianceMatrix::inverse() const {
    const double d = det();
    if (d == 0.0) throw std::invalid_argument("CovarianceMatrix: singular matrix");
    return CovarianceMatrix(m22_ / d, -m12_ / d, m11_ / d);
}

bool CovarianceMatrix::positive_definite() const {
    return m11_ > 0.0 && det() > 0.0;
}

CovarianceMatrix operator+(const CovarianceMatrix& a, const CovarianceMatrix& b) {
    return CovarianceMatrix(a.m11() + b.m11(), a.m12() + b.m12(), a.m22() + b.m22());
}

Mat2 rotation_matrix(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("rotation_matrix: theta must be finite");
    const double c = std::cos(theta), s = std::sin(theta);
    return {c, -s, s, c};
}

CovarianceMatrix covariance_of_state(const GaussianPureState& state) {
    const double c = std::cos(state.theta), s = std::sin(state.theta);
    const double a = std::exp(-2.0 * state.r);   // Q variance scale
    const double b = std::exp(2.0 * state.r);
    // R^t diag(a, b) R, written out to keep exact symmetry
    return CovarianceMatrix(c * c * a + s * s * b, c * s * (b - a), s * s * a + c * c * b);
}

double mean_photon_number(const GaussianPureState& state) {
    const double sh = std::sinh(state.r);
    return state.alpha * state.alpha + sh * sh;
}

double qfi(const GaussianPureState& state) {
    const double ch = std::cosh(state.r), sh = std::sinh(state.r);
    const double em = ch - sh;  // e^{-r}
    return 4.0 * (state.alpha * state.alpha * em * em + 2.0 * sh * sh * ch * ch);
}

double qfi_squeezed_vacuum_from_photons(double nbar) {
    if (!(nbar >= 0.0)) {
        throw std::invalid_argument("qfi_squeezed_vacuum_from_photons: nbar must be >= 0");
    }
    return 8.0 * (nbar * nbar + nbar);
}

double heisenberg_bound(double nbar, long long copies) {
    if (!(nbar > 0.0)) {
        throw std::invalid_argument("heisenberg_bound: nbar must be > 0 (bound diverges)");
    }
    if (copies < 1) {
        throw std::invalid_argument("heisenberg_bound: copies must be >= 1");
    }
    return 1.0 / (8.0 * (nbar * nbar + nbar) * static_cast<double>(copies));
}

std::vector<QfiScanPoint> fixed_energy_qfi_scan(double nbar, int grid_points) {
    if (!(nbar > 0.0)) throw std::invalid_argument("fixed_energy_qfi_scan: nbar must be > 0");
    if (grid_points < 3) throw std::invalid_argument("fixed_energy_qfi_scan: need >= 3 grid points");
    std::vector<QfiScanPoint> table;
    table.reserve(static_cast<size_t>(grid_points));
    for (int i = 0; i < grid_points; ++i) {
        const double f = static_cast<double>(i) / (grid_points - 1);
        const double alpha = std::sqrt(f * nbar);
        const double r = std::asinh(std::sqrt((1.0 - f) * nbar));
        table.push_back({f, qfi(GaussianPureState(alpha, r, 0.0))});
    }
    return table;
}

double wrap_phase_error(double delta) {
    constexpr double pi = 3.14159265358979323846;
    double w = std::fmod(delta + pi / 2.0, pi);
    if (w <= 0.0) w += pi;
    return w - pi / 2.0;  // (-pi/2, pi/2]
}

}  // namespace phasekit
