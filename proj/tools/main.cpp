// phasekit command line: closed-form Fisher/QFI evaluation, oracle
// self-checks, and seeded Monte Carlo runs of the two estimation schemes.
//
// Exit codes: 0 success, 1 validation error, 2 tolerance/acceptance
// failure, 3 I/O error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "phasekit/dyne.hpp"
#include "phasekit/fock.hpp"
#include "phasekit/gaussian.hpp"
#include "phasekit/homodyne.hpp"
#include "phasekit/montecarlo.hpp"
#include "phasekit/povm.hpp"
#include "phasekit/version.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitTolerance = 2;
constexpr int kExitIo = 3;

using phasekit::format_double;

struct RangeSpec {
    double lo = 0.0, hi = 0.0;
    int steps = 1;
};

RangeSpec parse_range(const std::string& text) {
    RangeSpec r;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
        throw CLI::ValidationError("range", "expected lo:hi:steps, got '" + text + "'");
    }
    r.lo = std::stod(text.substr(0, c1));
    r.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    r.steps = std::stoi(text.substr(c2 + 1));
    if (r.steps < 1 || (r.steps == 1 && r.lo != r.hi) || r.hi < r.lo) {
        throw CLI::ValidationError("range", "bad range '" + text + "'");
    }
    return r;
}

double range_at(const RangeSpec& r, int i) {
    if (r.steps == 1) return r.lo;
    return r.lo + (r.hi - r.lo) * i / (r.steps - 1);
}

int cmd_qfi(const std::optional<double>& r_opt, const std::optional<double>& nbar_opt,
            double alpha_displacement) {
    double h, nbar;
    if (nbar_opt) {
        if (alpha_displacement != 0.0) {
            throw std::invalid_argument("--nbar describes a squeezed vacuum; "
                                        "use --r with --alpha-displacement");
        }
        nbar = *nbar_opt;
        h = phasekit::qfi_squeezed_vacuum_from_photons(nbar);  // exact 8(n^2+n)
    } else {
        const phasekit::GaussianPureState state(alpha_displacement, *r_opt, 0.0);
        h = phasekit::qfi(state);
        nbar = phasekit::mean_photon_number(state);
    }
    std::cout << "qfi " << format_double(h) << "\n";
    std::cout << "mean_photons " << format_double(nbar) << "\n";
    if (nbar > 0.0) {
        std::cout << "heisenberg_bound_per_copy "
                  << format_double(phasekit::heisenberg_bound(nbar, 1)) << "\n";
    } else {
        std::cout << "heisenberg_bound_per_copy inf\n";
    }
    return kExitOk;
}

int cmd_fisher_map(const std::string& r_range, const std::string& rp_range,
                   int phi_steps, const std::string& out_path) {
    const RangeSpec rr = parse_range(r_range);
    const RangeSpec rp = parse_range(rp_range);
    if (phi_steps < 1) throw std::invalid_argument("--phi-steps must be >= 1");

    std::string csv = "r,r_prime,phi,F_closed,F_gamma,F_numeric\n";
    bool tolerance_ok = true;
    double worst = 0.0;
    for (int i = 0; i < rr.steps; ++i) {
        const double r = range_at(rr, i);
        for (int j = 0; j < rp.steps; ++j) {
            const double rprime = range_at(rp, j);
            for (int k = 0; k < phi_steps; ++k) {
                const double phi = phi_steps == 1 ? 0.0 : kPi * k / (phi_steps - 1);
                const double fc = phasekit::fisher_closed(r, rprime, phi);
                const double fg = phasekit::fisher_gamma_form(r, rprime, phi);
                const double theta = 0.0;
                const double fn = phasekit::fisher_numeric(
                    phasekit::GaussianPureState(0.0, r, theta),
                    phasekit::DyneConfig(rprime, theta + phi / 2.0));
                csv += format_double(r);
                csv += ',';
                csv += format_double(rprime);
                csv += ',';
                csv += format_double(phi);
                csv += ',';
                csv += format_double(fc);
                csv += ',';
                csv += format_double(fg);
                csv += ',';
                csv += format_double(fn);
                csv += '\n';
                const double dg = std::abs(fc - fg) / (1.0 + fc);
                const double dn = std::abs(fc - fn) / (1.0 + fc);
                worst = std::max({worst, dg, dn});
                if (dg > 1e-9 || dn > 1e-6) tolerance_ok = false;
                const double ceiling = std::cosh(4.0 * r) - 1.0;
                if (fc > ceiling + 1e-9) tolerance_ok = false;
            }
        }
    }

    if (out_path == "-") {
        std::cout << csv;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot open '" << out_path << "'\n";
            return kExitIo;
        }
        out << csv;
    }
    if (!tolerance_ok) {
        std::cerr << "error: cross-form disagreement above tolerance (worst "
                  << format_double(worst) << ")\n";
        return kExitTolerance;
    }
    return kExitOk;
}

int cmd_oracle_check(double r, int dim) {
    bool ok = true;
    auto report = [&ok](const std::string& name, double value, double bound) {
        const bool pass = value <= bound;
        ok = ok && pass;
        std::cout << (pass ? "ok   " : "FAIL ") << name << " = " << format_double(value)
                  << " (bound " << format_double(bound) << ")\n";
    };

    const auto closed = phasekit::squeeze_vacuum(r, dim);
    std::cout << "leakage " << format_double(closed.leakage) << "\n";

    // closed form vs matrix exponential, per amplitude
    phasekit::TruncatedState vac;
    vac.amplitudes.assign(static_cast<size_t>(dim), {0.0, 0.0});
    vac.amplitudes[0] = 1.0;
    const auto viaexp = phasekit::apply_generator_exponential(vac, phasekit::SqueezeGen{r});
    double route = 0.0;
    for (size_t n = 0; n < closed.amplitudes.size(); ++n) {
        route = std::max(route, std::abs(closed.amplitudes[n] - viaexp.amplitudes[n]));
    }
    report("route_equivalence_max_amp", route, r <= 1.0 ? 1e-8 : 1e-4);

    // oracle QFI against cosh 4r - 1
    const auto moments = phasekit::number_operator_moments(closed, 1e-5);
    const double target = std::cosh(4.0 * r) - 1.0;
    report("qfi_consistency_rel", std::abs(4.0 * moments.variance - target) / target, 1e-6);

    // probability slope at the guess
    const phasekit::SldPovmModel model(r, dim);
    const double h = 1e-4;
    const double slope =
        (model.probabilities(h).p_plus - model.probabilities(-h).p_plus) / (2.0 * h);
    report("povm_slope_error", std::abs(slope - model.delta_n()), 1e-4);

    // optimality conditions
    report("optimality_violation", phasekit::optimality_conditions_check(r, 0.3, dim), 1e-8);

    std::cout << (ok ? "oracle-check passed" : "oracle-check FAILED") << "\n";
    return ok ? kExitOk : kExitTolerance;
}

struct SimulateArgs {
    std::string scheme;
    std::string config_path;
    double r = 1.0;
    double theta = 0.0;
    long long copies = 10000;
    double alpha = 2.0 / 3.0;
    long long trials = 100;
    std::optional<std::uint64_t> seed;
    int dim = 128;
    std::string out;
    std::string format = "csv";
    int workers = 0;
    bool degrees = false;
};

phasekit::ExperimentConfig build_config(const SimulateArgs& a, bool scheme_required) {
    phasekit::ExperimentConfig config;
    if (!a.config_path.empty()) {
        config = phasekit::load_config_json(a.config_path);
        if (!a.scheme.empty() &&
            phasekit::scheme_from_string(a.scheme) != config.scheme) {
            throw std::invalid_argument(
                "scheme argument conflicts with the config file");
        }
        if (a.seed) config.seed = *a.seed;
        if (!a.out.empty()) config.output_path = a.out;
        return config;
    }
    if (scheme_required && a.scheme.empty()) {
        throw std::invalid_argument("missing scheme (povm|homodyne) or --config");
    }
    if (!a.seed) {
        throw std::invalid_argument("--seed is required (runs must be reproducible)");
    }
    config.scheme = phasekit::scheme_from_string(a.scheme);
    config.r = a.r;
    config.theta_true = a.degrees ? a.theta / 180.0 * kPi : a.theta;
    config.total_copies = a.copies;
    config.split_exponent = a.alpha;
    config.trials = a.trials;
    config.seed = *a.seed;
    config.truncation_dim = a.dim;
    config.output_path = a.out;
    config.output_format = phasekit::output_format_from_string(a.format);
    config.validate();
    return config;
}

int cmd_simulate(const SimulateArgs& args) {
    const auto config = build_config(args, true);
    const auto records = phasekit::run_trials(config, args.workers);
    const double h = phasekit::qfi(phasekit::GaussianPureState(0.0, config.r, 0.0));
    const auto row = phasekit::aggregate(records, config.total_copies, h);

    if (!config.output_path.empty()) {
        if (config.output_format == phasekit::OutputFormat::csv) {
            phasekit::write_records_csv(config.output_path + ".csv", records);
        } else {
            phasekit::write_records_json(config.output_path + ".records.json", records);
        }
        phasekit::write_summary_json(config.output_path + ".json", config, {row});
    }

    std::cout << "scheme " << phasekit::to_string(config.scheme) << "\n";
    std::cout << "total_copies " << config.total_copies << "\n";
    std::cout << "trials " << config.trials << "\n";
    std::cout << "mse " << format_double(row.mse) << "\n";
    std::cout << "mse_standard_error " << format_double(row.mse_standard_error) << "\n";
    std::cout << "n_mse_h " << format_double(row.n_times_mse * h) << "\n";
    return kExitOk;
}

int cmd_sweep(const SimulateArgs& args, const std::string& copies_list) {
    auto config = build_config(args, true);
    std::vector<long long> ns;
    std::string token;
    std::istringstream in(copies_list);
    while (std::getline(in, token, ',')) {
        if (!token.empty()) ns.push_back(std::stoll(token));
    }
    if (ns.empty()) throw std::invalid_argument("--copies-list is empty");

    const auto rows = phasekit::convergence_sweep(config, ns, args.workers);
    const double h = phasekit::qfi(phasekit::GaussianPureState(0.0, config.r, 0.0));
    if (!config.output_path.empty()) {
        phasekit::write_summary_json(config.output_path + ".json", config, rows);
    }
    for (const auto& row : rows) {
        std::cout << "N " << row.total_copies << " n_mse_h "
                  << format_double(row.n_times_mse * h) << " mse "
                  << format_double(row.mse) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phasekit: optimal phase estimation with squeezed light"};
    app.set_version_flag("--version", phasekit::version_string);
    app.require_subcommand(1);

    // qfi
    auto* qfi_cmd = app.add_subcommand("qfi", "QFI, photon number and Heisenberg bound");
    std::optional<double> qfi_r, qfi_nbar;
    double qfi_alpha = 0.0;
    auto* opt_r = qfi_cmd->add_option("--r", qfi_r, "squeezing parameter");
    auto* opt_nbar = qfi_cmd->add_option("--nbar", qfi_nbar, "mean photon number (squeezed vacuum)");
    opt_r->excludes(opt_nbar);
    opt_nbar->excludes(opt_r);
    qfi_cmd->add_option("--alpha-displacement", qfi_alpha, "real displacement amplitude");

    // fisher-map
    auto* map_cmd = app.add_subcommand("fisher-map", "CSV grid of the three Fisher forms");
    std::string map_r = "1:1:1", map_rp = "-4:1:11", map_out = "-";
    int map_phi_steps = 13;
    map_cmd->add_option("--r-range", map_r, "signal squeezing lo:hi:steps");
    map_cmd->add_option("--rprime-range", map_rp, "ancilla squeezing lo:hi:steps");
    map_cmd->add_option("--phi-steps", map_phi_steps, "phi grid points on [0, pi]");
    map_cmd->add_option("--out", map_out, "output path ('-' for stdout)");

    // threshold
    auto* thr_cmd = app.add_subcommand("threshold", "ancilla squeezing threshold t_thr(s)");
    std::optional<double> thr_s, thr_r;
    auto* thr_opt_s = thr_cmd->add_option("--s", thr_s, "s = e^{-r} in (0, 1]");
    auto* thr_opt_r = thr_cmd->add_option("--r", thr_r, "signal squeezing r >= 0");
    thr_opt_s->excludes(thr_opt_r);
    thr_opt_r->excludes(thr_opt_s);

    // optimal-angle
    auto* ang_cmd = app.add_subcommand("optimal-angle", "optimal phi_0 above threshold");
    double ang_r = 1.0, ang_rp = -3.0;
    ang_cmd->add_option("--r", ang_r, "signal squeezing")->required();
    ang_cmd->add_option("--rprime", ang_rp, "ancilla squeezing")->required();

    // oracle-check
    auto* oracle_cmd = app.add_subcommand("oracle-check", "truncated Fock oracle self-checks");
    double oracle_r = 1.0;
    int oracle_dim = 128;
    oracle_cmd->add_option("--r", oracle_r, "squeezing parameter");
    oracle_cmd->add_option("--dim", oracle_dim, "truncation dimension (even)");

    // simulate / sweep share flags
    SimulateArgs sim;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("scheme", sim.scheme, "povm|homodyne");
        cmd->add_option("--config", sim.config_path, "JSON config file");
        cmd->add_option("--r", sim.r, "squeezing parameter");
        cmd->add_option("--theta", sim.theta, "true phase (radians unless --degrees)");
        cmd->add_option("--copies", sim.copies, "total copies N");
        cmd->add_option("--alpha", sim.alpha, "step-one split exponent in (1/2, 1)");
        cmd->add_option("--trials", sim.trials, "Monte Carlo trials");
        cmd->add_option("--seed", sim.seed, "RNG seed (required)");
        cmd->add_option("--dim", sim.dim, "Fock truncation dimension");
        cmd->add_option("--out", sim.out, "output path stem");
        cmd->add_option("--format", sim.format, "per-trial record format: csv|json");
        cmd->add_option("--workers", sim.workers, "worker threads (0 = all cores)");
        cmd->add_flag("--degrees", sim.degrees, "interpret --theta in degrees");
    };
    auto* sim_cmd = app.add_subcommand("simulate", "run a two-step estimation experiment");
    add_common(sim_cmd);
    auto* sweep_cmd = app.add_subcommand("sweep", "convergence sweep over N");
    std::string sweep_list = "1000,10000,100000";
    add_common(sweep_cmd);
    sweep_cmd->add_option("--copies-list", sweep_list, "comma-separated N values (ascending)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (qfi_cmd->parsed()) {
            if (!qfi_r && !qfi_nbar) {
                throw std::invalid_argument("qfi: exactly one of --r/--nbar is required");
            }
            return cmd_qfi(qfi_r, qfi_nbar, qfi_alpha);
        }
        if (map_cmd->parsed()) {
            return cmd_fisher_map(map_r, map_rp, map_phi_steps, map_out);
        }
        if (thr_cmd->parsed()) {
            if (!thr_s && !thr_r) {
                throw std::invalid_argument("threshold: exactly one of --s/--r is required");
            }
            const double s = thr_s ? *thr_s : std::exp(-*thr_r);
            std::cout << format_double(phasekit::threshold(s)) << "\n";
            return kExitOk;
        }
        if (ang_cmd->parsed()) {
            std::cout << format_double(phasekit::optimal_angle(ang_r, ang_rp)) << "\n";
            return kExitOk;
        }
        if (oracle_cmd->parsed()) {
            return cmd_oracle_check(oracle_r, oracle_dim);
        }
        if (sim_cmd->parsed()) {
            return cmd_simulate(sim);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(sim, sweep_list);
        }
    } catch (const phasekit::TruncationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTolerance;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitValidation;
}
