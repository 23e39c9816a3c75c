#include "phasekit/montecarlo.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "phasekit/gaussian.hpp"
#include "phasekit/homodyne.hpp"
#include "phasekit/povm.hpp"
#include "phasekit/version.hpp"

namespace phasekit {

using ordered_json = nlohmann::ordered_json;

std::string to_string(Scheme s) {
    return s == Scheme::povm ? "povm" : "homodyne";
}

std::string to_string(OutputFormat f) {
    return f == OutputFormat::csv ? "csv" : "json";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "povm") return Scheme::povm;
    if (s == "homodyne") return Scheme::homodyne;
    throw std::invalid_argument("unknown scheme '" + s + "' (expected povm or homodyne)");
}

OutputFormat output_format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw std::invalid_argument("unknown output format '" + s + "' (expected csv or json)");
}

long long ExperimentConfig::step_one_copies() const {
    return static_cast<long long>(
        std::ceil(std::pow(static_cast<double>(total_copies), split_exponent)));
}

void ExperimentConfig::validate() const {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("config: r must be finite and > 0");
    }
    if (!std::isfinite(theta_true)) {
        throw std::invalid_argument("config: theta_true must be finite");
    }
    if (total_copies < 4) {
        throw std::invalid_argument("config: total_copies must be >= 4");
    }
    if (!(split_exponent > 0.5) || !(split_exponent < 1.0)) {
        throw std::invalid_argument("config: split_exponent must be in (1/2, 1)");
    }
    if (step_one_copies() >= total_copies) {
        throw std::invalid_argument("config: ceil(N^alpha) must be < N");
    }
    if (trials < 1) {
        throw std::invalid_argument("config: trials must be >= 1");
    }
    if (truncation_dim < 16 || truncation_dim % 2 != 0) {
        throw std::invalid_argument("config: truncation_dim must be even and >= 16");
    }
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    // splitmix64 of (seed + (k+1) * golden gamma)
    std::uint64_t z = master_seed + (trial_index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<EstimationRecord> run_trials(const ExperimentConfig& config, int workers) {
    config.validate();
    const long long n = config.trials;
    std::vector<EstimationRecord> records(static_cast<size_t>(n));

    int nworkers = workers > 0 ? workers
                               : static_cast<int>(std::thread::hardware_concurrency());
    if (nworkers < 1) nworkers = 1;
    nworkers = static_cast<int>(std::min<long long>(nworkers, n));

    std::atomic<long long> next{0};
    auto work = [&]() {
        for (;;) {
            const long long k = next.fetch_add(1);
            if (k >= n) break;
            std::mt19937_64 rng(trial_seed(config.seed, static_cast<std::uint64_t>(k)));
            EstimationRecord rec = config.scheme == Scheme::povm
                                       ? two_step_povm_experiment(config, rng)
                                       : two_step_homodyne_experiment(config, rng);
            rec.trial_index = k;
            records[static_cast<size_t>(k)] = rec;
        }
    };

    if (nworkers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(nworkers));
        for (int i = 0; i < nworkers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return records;
}

SweepRow aggregate(const std::vector<EstimationRecord>& records,
                   long long total_copies, double qfi_value) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");
    const double n = static_cast<double>(records.size());
    double bias = 0.0, mse = 0.0;
    for (const auto& r : records) {
        bias += r.wrapped_error;
        mse += r.squared_error;
    }
    bias /= n;
    mse /= n;
    double var_sq = 0.0;
    for (const auto& r : records) {
        const double d = r.squared_error - mse;
        var_sq += d * d;
    }
    var_sq = records.size() > 1 ? var_sq / (n - 1.0) : 0.0;

    SweepRow row;
    row.total_copies = total_copies;
    row.trials = static_cast<long long>(records.size());
    row.mean_bias = bias;
    row.mse = mse;
    row.mse_standard_error = std::sqrt(var_sq / n);
    row.n_times_mse = static_cast<double>(total_copies) * mse;
    row.heisenberg_reference = 1.0 / qfi_value;
    return row;
}

std::vector<SweepRow> convergence_sweep(const ExperimentConfig& base,
                                        const std::vector<long long>& copies_list,
                                        int workers) {
    if (copies_list.empty()) throw std::invalid_argument("convergence_sweep: empty N list");
    for (size_t i = 1; i < copies_list.size(); ++i) {
        if (copies_list[i] <= copies_list[i - 1]) {
            throw std::invalid_argument("convergence_sweep: N list must be ascending");
        }
    }
    const double h = qfi(GaussianPureState(0.0, base.r, 0.0));
    std::vector<SweepRow> rows;
    rows.reserve(copies_list.size());
    for (long long n : copies_list) {
        ExperimentConfig c = base;
        c.total_copies = n;
        rows.push_back(aggregate(run_trials(c, workers), n, h));
    }
    return rows;
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

void require_key(const ordered_json& j, const char* key) {
    if (!j.contains(key)) {
        throw std::invalid_argument(std::string("config: missing key '") + key + "'");
    }
}

}  // namespace

ExperimentConfig load_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config: invalid JSON in '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

    static const char* known[] = {"scheme",         "r",     "theta_true",
                                  "total_copies",   "split_exponent", "trials",
                                  "seed",           "truncation_dim", "output_path",
                                  "output_format"};
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw std::invalid_argument("config: unknown key '" + key + "'");
    }

    for (const char* k : {"scheme", "r", "theta_true", "total_copies",
                          "split_exponent", "trials", "seed", "truncation_dim"}) {
        require_key(j, k);
    }

    ExperimentConfig c;
    c.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    c.r = j.at("r").get<double>();
    c.theta_true = j.at("theta_true").get<double>();
    c.total_copies = j.at("total_copies").get<long long>();
    c.split_exponent = j.at("split_exponent").get<double>();
    c.trials = j.at("trials").get<long long>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.truncation_dim = j.at("truncation_dim").get<int>();
    if (j.contains("output_path")) c.output_path = j.at("output_path").get<std::string>();
    if (j.contains("output_format")) {
        c.output_format = output_format_from_string(j.at("output_format").get<std::string>());
    }
    c.validate();
    return c;
}

namespace {

ordered_json config_json(const ExperimentConfig& c) {
    ordered_json j;
    j["scheme"] = to_string(c.scheme);
    j["r"] = c.r;
    j["theta_true"] = c.theta_true;
    j["total_copies"] = c.total_copies;
    j["split_exponent"] = c.split_exponent;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["truncation_dim"] = c.truncation_dim;
    j["output_path"] = c.output_path;
    j["output_format"] = to_string(c.output_format);
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

std::string config_to_json(const ExperimentConfig& config) {
    return config_json(config).dump(2) + "\n";
}

std::string records_to_csv(const std::vector<EstimationRecord>& records) {
    std::string out = "trial,theta_rough,theta_hat,wrapped_error,squared_error,branch_flipped\n";
    for (const auto& r : records) {
        out += std::to_string(r.trial_index);
        out += ',';
        out += format_double(r.theta_rough);
        out += ',';
        out += format_double(r.theta_hat);
        out += ',';
        out += format_double(r.wrapped_error);
        out += ',';
        out += format_double(r.squared_error);
        out += ',';
        out += r.branch_flipped ? '1' : '0';
        out += '\n';
    }
    return out;
}

void write_records_csv(const std::string& path,
                       const std::vector<EstimationRecord>& records) {
    write_file(path, records_to_csv(records));
}

void write_records_json(const std::string& path,
                        const std::vector<EstimationRecord>& records) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : records) {
        ordered_json j;
        j["trial"] = r.trial_index;
        j["theta_rough"] = r.theta_rough;
        j["theta_hat"] = r.theta_hat;
        j["wrapped_error"] = r.wrapped_error;
        j["squared_error"] = r.squared_error;
        j["n_plus"] = r.n_plus;
        j["n_minus"] = r.n_minus;
        j["n_zero"] = r.n_zero;
        j["statistic"] = r.statistic;
        j["branch_flipped"] = r.branch_flipped;
        arr.push_back(std::move(j));
    }
    write_file(path, arr.dump(2) + "\n");
}

std::string summary_to_json(const ExperimentConfig& config,
                            const std::vector<SweepRow>& rows) {
    ordered_json j;
    j["library_version"] = version_string;
    j["config"] = config_json(config);
    ordered_json arr = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json rj;
        rj["total_copies"] = row.total_copies;
        rj["trials"] = row.trials;
        rj["mean_bias"] = row.mean_bias;
        rj["mse"] = row.mse;
        rj["mse_standard_error"] = row.mse_standard_error;
        rj["n_times_mse"] = row.n_times_mse;
        rj["heisenberg_reference"] = row.heisenberg_reference;
        arr.push_back(std::move(rj));
    }
    j["results"] = std::move(arr);
    return j.dump(2) + "\n";
}

void write_summary_json(const std::string& path, const ExperimentConfig& config,
                        const std::vector<SweepRow>& rows) {
    write_file(path, summary_to_json(config, rows));
}

}  // namespace phasekit
