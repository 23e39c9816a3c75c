// Acceptance suite: one line per criterion, exit 0 when all pass, 2 otherwise.
//
// Criterion 3's first sub-check (truncated-Fock QFI agreement at dim = 128
// up to r = 1.5 within 1e-6 relative) is expected to fail at the top of the
// r range: the Fock tail beyond n = 127 carries ~n^2 weight into the number
// variance (1.6e-4 relative at r = 1.5). The check is run as specified and
// reported honestly; at dim = 256 the same check passes for every r <= 1.5,
// which the suite prints for diagnosis.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "phasekit/dyne.hpp"
#include "phasekit/fock.hpp"
#include "phasekit/gaussian.hpp"
#include "phasekit/homodyne.hpp"
#include "phasekit/montecarlo.hpp"
#include "phasekit/povm.hpp"

using namespace phasekit;

namespace {

constexpr double kPi = 3.14159265358979323846;

int failures = 0;

class Criterion {
public:
    explicit Criterion(int index, std::string name)
        : index_(index), name_(std::move(name)),
          start_(std::chrono::steady_clock::now()) {}

    void check(bool ok, const std::string& detail) {
        if (!ok) {
            failed_ = true;
            details_.push_back(detail);
        }
    }

    void note(const std::string& text) { notes_.push_back(text); }

    ~Criterion() {
        const auto elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
        std::printf("[%s] criterion %d: %s (%.2fs)\n", failed_ ? "FAIL" : "PASS",
                    index_, name_.c_str(), elapsed);
        for (const auto& d : details_) std::printf("       !! %s\n", d.c_str());
        for (const auto& n : notes_) std::printf("       -- %s\n", n.c_str());
        if (failed_) ++failures;
        std::fflush(stdout);
    }

private:
    int index_;
    std::string name_;
    std::chrono::steady_clock::time_point start_;
    bool failed_ = false;
    std::vector<std::string> details_;
    std::vector<std::string> notes_;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

void criterion1_qfi_identity() {
    Criterion crit(1, "QFI identity 8(n^2+n) = cosh 4r - 1 over r in [0, 3]");
    for (int i = 0; i < 50; ++i) {
        const double r = 3.0 * i / 49.0;
        const double nbar = mean_photon_number(GaussianPureState(0.0, r, 0.0));
        const double lhs = qfi_squeezed_vacuum_from_photons(nbar);
        const double rhs = std::cosh(4.0 * r) - 1.0;
        const double rel = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        crit.check(r == 0.0 ? lhs == rhs : rel <= 1e-9,
                   fmt("r = %.4f: relative error %.3e", r, rel));
    }
}

void criterion2_optimal_state_scan() {
    Criterion crit(2, "fixed-energy QFI scan peaks at zero displacement");
    for (double nbar : {0.1, 1.0, 10.0}) {
        const auto table = fixed_energy_qfi_scan(nbar, 101);
        size_t argmax = 0;
        for (size_t i = 1; i < table.size(); ++i) {
            if (table[i].qfi > table[argmax].qfi) argmax = i;
        }
        crit.check(argmax == 0, fmt("nbar = %.2f: argmax fraction %.3f", nbar,
                                    table[argmax].displacement_fraction));
    }
}

void criterion3_oracle_consistency() {
    Criterion crit(3, "oracle consistency (QFI moments, POVM slope, optimality)");

    // (a) truncated-Fock 4 var(n) vs cosh 4r - 1 at dim = 128, r <= 1.5
    for (double r : {0.25, 0.5, 0.75, 1.0, 1.25, 1.5}) {
        const auto state = squeeze_vacuum(r, 128);
        const auto m = number_operator_moments(state, 1e-5);
        const double target = std::cosh(4.0 * r) - 1.0;
        const double rel = std::abs(4.0 * m.variance - target) / target;
        crit.check(rel <= 1e-6,
                   fmt("QFI moments at r = %.2f, dim 128: relative error %.3e "
                       "(leakage %.1e)", r, rel, state.leakage));
    }
    {
        // diagnosis: the same check with dim = 256 passes across the range
        double worst = 0.0;
        for (double r : {0.25, 0.5, 0.75, 1.0, 1.25, 1.5}) {
            const auto m = number_operator_moments(squeeze_vacuum(r, 256));
            const double target = std::cosh(4.0 * r) - 1.0;
            worst = std::max(worst, std::abs(4.0 * m.variance - target) / target);
        }
        crit.note(fmt("at dim = 256 the worst relative error over the same r grid is %.3e", worst));
    }

    // (b) POVM probability slope +-sinh(2r)/sqrt(2) by central differences
    for (double r : {0.5, 1.0}) {
        const SldPovmModel model(r, 128);
        const double h = 1e-4;
        const double slope =
            (model.probabilities(h).p_plus - model.probabilities(-h).p_plus) / (2.0 * h);
        const double err = std::abs(slope - std::sinh(2.0 * r) / std::sqrt(2.0));
        crit.check(err <= 1e-4, fmt("slope at r = %.2f: error %.3e", r, err));
    }

    // (c) optimality-condition violation
    for (double r : {0.5, 1.0}) {
        const double viol = optimality_conditions_check(r, 0.3, 128);
        crit.check(viol <= 1e-8, fmt("optimality violation at r = %.2f: %.3e", r, viol));
    }
}

void criterion4_fisher_forms() {
    Criterion crit(4, "Fisher-form equivalence and quantum ceiling on the 4x11x13 grid");
    double worst_gamma = 0.0, worst_numeric = 0.0, worst_ceiling = -1e300;
    for (double r : {0.2, 0.5, 1.0, 1.5}) {
        const double ceiling = std::cosh(4.0 * r) - 1.0;
        for (int i = 0; i <= 10; ++i) {
            const double rp = -4.0 + 0.5 * i;
            for (int j = 0; j <= 12; ++j) {
                const double phi = kPi * j / 12.0;
                const double fc = fisher_closed(r, rp, phi);
                const double fg = fisher_gamma_form(r, rp, phi);
                const double fn = fisher_numeric(GaussianPureState(0.0, r, 0.37),
                                                 DyneConfig(rp, 0.37 + phi / 2.0));
                worst_gamma = std::max(worst_gamma, std::abs(fc - fg) / (1.0 + fc));
                worst_numeric = std::max(worst_numeric, std::abs(fc - fn) / (1.0 + fc));
                worst_ceiling = std::max(worst_ceiling, fc - ceiling);
            }
        }
    }
    crit.check(worst_gamma <= 1e-9, fmt("closed vs gamma form: %.3e", worst_gamma));
    crit.check(worst_numeric <= 1e-6, fmt("closed vs numeric form: %.3e", worst_numeric));
    crit.check(worst_ceiling <= 1e-9, fmt("ceiling excess: %.3e", worst_ceiling));
}

void criterion5_threshold_and_angle() {
    Criterion crit(5, "threshold bifurcation, optimal-angle stationarity, limit Fisher");

    // sign flip of d2F/dphi2 at phi = 0 across t_thr, bracketed to 1e-6
    const double s = std::exp(-1.0);
    const double t_formula = threshold(s);
    auto d2f = [](double t) {
        const double h = 1e-4;
        const double rp = -std::log(t);
        return (fisher_closed(1.0, rp, h) - 2.0 * fisher_closed(1.0, rp, 0.0) +
                fisher_closed(1.0, rp, -h)) / (h * h);
    };
    double lo = t_formula - 1e-2, hi = t_formula + 1e-2;
    bool bracketed = d2f(lo) * d2f(hi) < 0.0;
    crit.check(bracketed, "no sign change of d2F/dphi2 around t_thr");
    if (bracketed) {
        while (hi - lo > 1e-9) {
            const double mid = 0.5 * (lo + hi);
            if (d2f(lo) * d2f(mid) <= 0.0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        const double t_bisect = 0.5 * (lo + hi);
        crit.check(std::abs(t_bisect - t_formula) <= 1e-6,
                   fmt("bisected flip at t = %.9f vs formula %.9f", t_bisect, t_formula));
    }

    // phi_0 is a stationary point of the closed form (5-point stencil: the
    // peak is skewed enough that a 2-point difference truncates near 1e-5)
    const double phi0 = optimal_angle(1.0, -3.0);
    const double h = 1e-4;
    auto f = [](double phi) { return fisher_closed(1.0, -3.0, phi); };
    const double df = (8.0 * (f(phi0 + h) - f(phi0 - h)) -
                       (f(phi0 + 2.0 * h) - f(phi0 - 2.0 * h))) / (12.0 * h);
    crit.check(std::abs(df) <= 1e-8, fmt("dF/dphi at phi_0: %.3e", std::abs(df)));

    // strongly squeezed ancilla approaches the Heisenberg ceiling
    const double target = std::cosh(4.0) - 1.0;
    const double rel = std::abs(fisher_at_optimum(1.0, -5.0) - target) / target;
    crit.check(rel <= 0.01, fmt("fisher_at_optimum(1, -5) off ceiling by %.3e", rel));
}

void criterion6_marginal_integral() {
    Criterion crit(6, "marginal POVM Gaussian integral vs closed form");
    for (double rp : {-2.0, 0.0, 1.0}) {
        for (double dq : {0.0, 0.5, 1.0}) {
            const auto m = marginal_integral_check(rp, dq);
            crit.check(std::abs(m.numeric - m.closed) <= 1e-8,
                       fmt("r' = %.1f, dq = %.1f: |numeric - closed| = %.3e", rp, dq,
                           std::abs(m.numeric - m.closed)));
        }
    }
}

void criterion7_binomial_average() {
    Criterion crit(7, "averaged 1/N_inf: exact sum vs second-order formula");
    const auto small = averaged_inverse_ninf(3, 0.9);
    crit.check(std::abs(small.exact - 0.3915) <= 1e-12,
               fmt("exact value at N = 3, p = 0.9: %.6f", small.exact));
    const auto large = averaged_inverse_ninf(100, 0.99);
    const double rel = std::abs(large.exact - large.second_order) / large.exact;
    crit.check(rel <= 1e-4, fmt("relative difference at N = 100, p = 0.99: %.3e", rel));
}

ExperimentConfig scheme_config(Scheme scheme, long long n, long long trials,
                               std::uint64_t seed) {
    ExperimentConfig c;
    c.scheme = scheme;
    c.r = 1.0;
    c.theta_true = 0.7;
    c.total_copies = n;
    c.split_exponent = 2.0 / 3.0;
    c.trials = trials;
    c.seed = seed;
    c.truncation_dim = 128;
    return c;
}

void criterion_heisenberg(int index, Scheme scheme, std::uint64_t seed) {
    const char* name = scheme == Scheme::povm
                           ? "Heisenberg-limit attainment, POVM scheme"
                           : "Heisenberg-limit attainment, homodyne scheme";
    Criterion crit(index, name);
    const double h = std::cosh(4.0) - 1.0;

    // monotone convergence of N MSE H across decades
    std::vector<double> nmse;
    long long flips_final = 0;
    for (long long n : {1000LL, 10000LL, 100000LL}) {
        const long long trials = n == 100000 ? 800 : 300;
        const auto records = run_trials(scheme_config(scheme, n, trials, seed));
        const auto row = aggregate(records, n, h);
        nmse.push_back(row.n_times_mse * h);
        if (n == 100000) {
            for (const auto& rec : records) flips_final += rec.branch_flipped ? 1 : 0;
            crit.check(row.n_times_mse * h >= 0.85 && row.n_times_mse * h <= 1.15,
                       fmt("N MSE H at N = 1e5: %.4f (requires [0.85, 1.15])",
                           row.n_times_mse * h));
            // asymptotic unbiasedness: the bias contributes negligibly
            crit.check(row.mean_bias * row.mean_bias <= row.mse / 10.0,
                       fmt("bias^2 = %.3e exceeds MSE/10 = %.3e",
                           row.mean_bias * row.mean_bias, row.mse / 10.0));
            crit.note(fmt("N = 1e5: N MSE H = %.4f +- %.4f over 800 trials",
                          row.n_times_mse * h,
                          static_cast<double>(n) * row.mse_standard_error * h));
        }
    }
    crit.check(nmse[0] > nmse[1] && nmse[1] > nmse[2],
               fmt("N MSE H not decreasing: %.3f -> %.3f -> %.3f", nmse[0], nmse[1], nmse[2]));

    if (scheme == Scheme::homodyne) {
        crit.check(flips_final < 8, fmt("branch-flip rate at N = 1e5: %.4f (requires < 1%%)",
                                        static_cast<double>(flips_final) / 800.0));
    }
}

void criterion10_reproducibility() {
    Criterion crit(10, "byte-identical outputs across runs and worker counts");
    for (Scheme scheme : {Scheme::povm, Scheme::homodyne}) {
        auto config = scheme_config(scheme, 4000, 40, 20260809);
        const auto r1 = run_trials(config, 1);
        const auto r1b = run_trials(config, 1);
        const auto r4 = run_trials(config, 4);
        const std::string csv1 = records_to_csv(r1);
        crit.check(csv1 == records_to_csv(r1b), "rerun CSV differs");
        crit.check(csv1 == records_to_csv(r4), "worker-count CSV differs");

        const double h = std::cosh(4.0) - 1.0;
        const std::string sum1 = summary_to_json(config, {aggregate(r1, 4000, h)});
        const std::string sum4 = summary_to_json(config, {aggregate(r4, 4000, h)});
        crit.check(sum1 == sum4, "summary JSON differs across worker counts");
    }
}

}  // namespace

int main() {
    std::printf("phasekit acceptance suite\n");
    criterion1_qfi_identity();
    criterion2_optimal_state_scan();
    criterion3_oracle_consistency();
    criterion4_fisher_forms();
    criterion5_threshold_and_angle();
    criterion6_marginal_integral();
    criterion7_binomial_average();
    criterion_heisenberg(8, Scheme::povm, 61803398);
    criterion_heisenberg(9, Scheme::homodyne, 27182818);
    criterion10_reproducibility();

    if (failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", failures);
    return 2;
}
