#include "phasekit/fock.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace phasekit {

namespace {

using Cd = std::complex<double>;
using VectorXcd = Eigen::VectorXcd;
using MatrixXcd = Eigen::MatrixXcd;

VectorXcd to_eigen(const std::vector<Cd>& v) {
    return Eigen::Map<const VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<Cd> from_eigen(const VectorXcd& v) {
    return {v.data(), v.data() + v.size()};
}

void check_dim(int dim) {
    if (dim < 16 || dim % 2 != 0) {
        throw std::invalid_argument("fock: dim must be even and >= 16");
    }
}

// a+ and a on amplitude vectors, truncated at the top.
VectorXcd raise_op(const VectorXcd& v) {
    VectorXcd out = VectorXcd::Zero(v.size());
    for (Eigen::Index n = 1; n < v.size(); ++n) {
        out[n] = std::sqrt(static_cast<double>(n)) * v[n - 1];
    }
    return out;
}

VectorXcd lower_op(const VectorXcd& v) {
    VectorXcd out = VectorXcd::Zero(v.size());
    for (Eigen::Index n = 1; n < v.size(); ++n) {
        out[n - 1] = std::sqrt(static_cast<double>(n)) * v[n];
    }
    return out;
}

VectorXcd rotate_exact(const VectorXcd& v, double theta) {
    VectorXcd out(v.size());
    for (Eigen::Index n = 0; n < v.size(); ++n) {
        out[n] = std::polar(1.0, -static_cast<double>(n) * theta) * v[n];
    }
    return out;
}

// S(r)|0> coefficients by the stable two-term recurrence.
VectorXcd squeeze_vacuum_vec(double r, int dim) {
    VectorXcd c = VectorXcd::Zero(dim);
    c[0] = 1.0 / std::sqrt(std::cosh(r));
    const double t = std::tanh(r);
    for (int n = 0; 2 * n + 2 < dim; ++n) {
        c[2 * n + 2] = c[2 * n] * (-t) *
                       std::sqrt(static_cast<double>(2 * n + 1) * (2 * n + 2)) /
                       (2.0 * (n + 1));
    }
    return c;
}

// S(r)|2> = (a+ cosh r + a sinh r)^2 S(r)|0> / sqrt(2)  (Bogoliubov identity)
VectorXcd squeeze_two_vec(double r, int dim) {
    const VectorXcd s0 = squeeze_vacuum_vec(r, dim);
    const double ch = std::cosh(r), sh = std::sinh(r);
    auto bog = [&](const VectorXcd& v) { return (ch * raise_op(v) + sh * lower_op(v)).eval(); };
    return bog(bog(s0)) / std::sqrt(2.0);
}

double leakage_of(const VectorXcd& v) {
    return 1.0 - v.squaredNorm();
}

}  // namespace

double TruncatedState::norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return std::sqrt(s);
}

NumberMoments number_operator_moments(const TruncatedState& state,
                                      double leakage_tolerance) {
    if (state.amplitudes.empty()) {
        throw std::invalid_argument("number_operator_moments: empty state");
    }
    if (state.leakage > leakage_tolerance) {
        throw TruncationError(
            "number_operator_moments: leakage " + std::to_string(state.leakage) +
            " exceeds tolerance " + std::to_string(leakage_tolerance) +
            "; increase the truncation dimension");
    }
    double m1 = 0.0, m2 = 0.0;
    for (size_t n = 0; n < state.amplitudes.size(); ++n) {
        const double p = std::norm(state.amplitudes[n]);
        m1 += static_cast<double>(n) * p;
        m2 += static_cast<double>(n) * static_cast<double>(n) * p;
    }
    return {m1, m2 - m1 * m1};
}

TruncatedState squeeze_vacuum(double r, int dim) {
    check_dim(dim);
    const VectorXcd c = squeeze_vacuum_vec(r, dim);
    const double leak = std::max(0.0, leakage_of(c));
    if (leak > 1e-6) {
        throw TruncationError("squeeze_vacuum: leakage " + std::to_string(leak) +
                              " at dim " + std::to_string(dim) +
                              "; increase the truncation dimension");
    }
    return {from_eigen(c), leak};
}

TruncatedState apply_generator_exponential(const TruncatedState& state,
                                           const Generator& gen) {
    const int dim = state.dim();
    check_dim(dim);
    const VectorXcd v = to_eigen(state.amplitudes);
    if (std::abs(v.squaredNorm() - 1.0) > 1e-6) {
        throw std::invalid_argument(
            "apply_generator_exponential: input state is not normalized");
    }

    if (const auto* rot = std::get_if<RotateGen>(&gen)) {
        return {from_eigen(rotate_exact(v, rot->theta)), state.leakage};
    }

    // Both remaining generators are real antisymmetric on the block, so the
    // exponential is orthogonal and the block norm is preserved exactly.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
    if (const auto* sq = std::get_if<SqueezeGen>(&gen)) {
        const double half_r = 0.5 * sq->r;
        for (int n = 0; n + 2 < dim; ++n) {
            const double c = half_r * std::sqrt(static_cast<double>(n + 1) * (n + 2));
            A(n, n + 2) += c;   // a^2
            A(n + 2, n) -= c;   // -a+^2
        }
    } else {
        const double alpha = std::get<DisplaceGen>(gen).alpha;
        for (int n = 0; n + 1 < dim; ++n) {
            const double c = alpha * std::sqrt(static_cast<double>(n + 1));
            A(n + 1, n) += c;   // alpha a+
            A(n, n + 1) -= c;   // -alpha a
        }
    }

    const Eigen::MatrixXd U = A.exp();
    VectorXcd out = U * v.real() + Cd(0.0, 1.0) * (U * v.imag());
    const double lost = std::max(0.0, v.squaredNorm() - out.squaredNorm());
    return {from_eigen(out), state.leakage + lost};
}

TruncatedState psi_vector(double r, double theta, int dim) {
    check_dim(dim);
    const TruncatedState s0 = squeeze_vacuum(r, dim);
    VectorXcd phi0 = rotate_exact(to_eigen(s0.amplitudes), theta);
    VectorXcd g(dim);
    for (int n = 0; n < dim; ++n) g[n] = static_cast<double>(n) * phi0[n];
    const Cd mean = phi0.dot(g);  // <phi0|G|phi0>
    VectorXcd psi = g - mean * phi0;
    return {from_eigen(psi), s0.leakage};
}

SldPovm sld_povm(double r, double theta_guess, int dim) {
    check_dim(dim);
    const VectorXcd s0 = squeeze_vacuum_vec(r, dim);
    const VectorXcd s2 = squeeze_two_vec(r, dim);
    const Cd i(0.0, 1.0);
    VectorXcd ep = (i * s0 - s2) / std::sqrt(2.0);
    VectorXcd em = (-i * s0 - s2) / std::sqrt(2.0);
    ep = rotate_exact(ep, theta_guess);
    em = rotate_exact(em, theta_guess);
    const double leak_p = std::max(0.0, leakage_of(ep));
    const double leak_m = std::max(0.0, leakage_of(em));
    ep.normalize();
    em.normalize();
    return {{from_eigen(ep), leak_p}, {from_eigen(em), leak_m}};
}

OutcomeProbabilities three_outcome_probabilities(double r, double theta_true,
                                                 double theta_guess, int dim) {
    return SldPovmModel(r, dim).probabilities(theta_true - theta_guess);
}

double optimality_conditions_check(double r, double theta, int dim) {
    check_dim(dim);
    const VectorXcd s0 = squeeze_vacuum_vec(r, dim);
    const VectorXcd phi0 = rotate_exact(s0, theta);

    VectorXcd g(dim);
    for (int n = 0; n < dim; ++n) g[n] = static_cast<double>(n) * phi0[n];
    const VectorXcd psi = g - phi0.dot(g) * phi0;
    const double psi_sq = psi.squaredNorm();
    if (psi_sq < 1e-30) return 0.0;  // r = 0: lambda vanishes identically

    const Cd i(0.0, 1.0);
    const MatrixXcd rho = phi0 * phi0.adjoint();
    const MatrixXcd lambda =
        2.0 * i * (phi0 * psi.adjoint() - psi * phi0.adjoint());

    const VectorXcd s2 = squeeze_two_vec(r, dim);
    const VectorXcd ep = rotate_exact(((i * s0 - s2) / std::sqrt(2.0)).eval(), theta);
    const VectorXcd em = rotate_exact(((-i * s0 - s2) / std::sqrt(2.0)).eval(), theta);

    double viol = 0.0;
    for (const VectorXcd* e : {&ep, &em}) {
        const MatrixXcd E = (*e) * e->adjoint();
        const Cd tr1 = (rho * E * lambda).trace();
        viol = std::max(viol, std::abs(tr1.imag()));

        const Cd num = phi0.dot(lambda * (*e));  // <phi0|lambda|e>
        const Cd den = phi0.dot(*e);
        const double k = (num / den).real();
        const MatrixXcd resid = rho * lambda * E - k * (rho * E);
        viol = std::max(viol, resid.norm());
    }
    return viol;
}

SldPovmModel::SldPovmModel(double r, int dim) : delta_n_(0.0), r_(r) {
    check_dim(dim);
    const VectorXcd s0 = squeeze_vacuum_vec(r, dim);
    const VectorXcd s2 = squeeze_two_vec(r, dim);
    const Cd i(0.0, 1.0);
    signal_ = from_eigen(s0);
    e_plus_ = from_eigen(((i * s0 - s2) / std::sqrt(2.0)).eval());
    e_minus_ = from_eigen(((-i * s0 - s2) / std::sqrt(2.0)).eval());
    delta_n_ = std::sinh(2.0 * r) / std::sqrt(2.0);
    leakage_ = std::max(0.0, leakage_of(s0));
    if (leakage_ > 1e-6) {
        throw TruncationError("SldPovmModel: leakage " + std::to_string(leakage_) +
                              "; increase the truncation dimension");
    }
}

OutcomeProbabilities SldPovmModel::probabilities(double delta_theta) const {
    const size_t d = signal_.size();
    Cd op(0.0, 0.0), om(0.0, 0.0);
    // <e_+-| U(dt) |signal>; the rotation only touches even n.
    for (size_t n = 0; n < d; n += 2) {
        const Cd y = std::polar(1.0, -static_cast<double>(n) * delta_theta) * signal_[n];
        op += std::conj(e_plus_[n]) * y;
        om += std::conj(e_minus_[n]) * y;
    }
    const double pp = std::norm(op);
    const double pm = std::norm(om);
    return {pp, pm, std::max(0.0, 1.0 - pp - pm)};
}

}  // namespace phasekit
