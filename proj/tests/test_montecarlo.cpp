#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phasekit/gaussian.hpp"
#include "phasekit/montecarlo.hpp"
#include "phasekit/version.hpp"

using namespace phasekit;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.scheme = Scheme::povm;
    c.r = 1.0;
    c.theta_true = 0.7;
    c.total_copies = 2000;
    c.split_exponent = 2.0 / 3.0;
    c.trials = 24;
    c.seed = 12345;
    c.truncation_dim = 64;
    return c;
}

std::string temp_path(const std::string& name) {
    return std::string("mc_test_") + name;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool records_equal(const std::vector<EstimationRecord>& a,
                   const std::vector<EstimationRecord>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].trial_index != b[i].trial_index) return false;
        if (a[i].theta_rough != b[i].theta_rough) return false;
        if (a[i].theta_hat != b[i].theta_hat) return false;
        if (a[i].wrapped_error != b[i].wrapped_error) return false;
        if (a[i].n_plus != b[i].n_plus) return false;
        if (a[i].statistic != b[i].statistic) return false;
        if (a[i].branch_flipped != b[i].branch_flipped) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("config validation catches every invariant") {
    auto c = small_config();
    CHECK_NOTHROW(c.validate());

    auto bad = c; bad.total_copies = 3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c; bad.split_exponent = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c; bad.split_exponent = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c; bad.trials = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c; bad.truncation_dim = 63;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c; bad.truncation_dim = 14;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c; bad.r = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    // alpha close to 1 makes ceil(N^alpha) reach N
    bad = c; bad.total_copies = 5; bad.split_exponent = 0.99;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("trial seeds differ and are deterministic") {
    CHECK(trial_seed(1, 0) == trial_seed(1, 0));
    CHECK(trial_seed(1, 0) != trial_seed(1, 1));
    CHECK(trial_seed(1, 0) != trial_seed(2, 0));
}

TEST_CASE("run_trials determinism and parallel invariance") {
    const auto config = small_config();
    const auto serial = run_trials(config, 1);
    const auto again = run_trials(config, 1);
    const auto parallel = run_trials(config, 4);
    REQUIRE(serial.size() == static_cast<size_t>(config.trials));
    CHECK(records_equal(serial, again));
    CHECK(records_equal(serial, parallel));

    // the first trial does not depend on how many trials run
    auto one = config;
    one.trials = 1;
    const auto single = run_trials(one, 1);
    CHECK(single[0].theta_hat == serial[0].theta_hat);

    for (const auto& rec : serial) {
        CHECK(std::abs(rec.wrapped_error) <= 1.5707963267948966 + 1e-15);
        CHECK(std::isfinite(rec.theta_hat));
    }
}

TEST_CASE("run_trials works for the homodyne scheme too") {
    auto config = small_config();
    config.scheme = Scheme::homodyne;
    const auto recs = run_trials(config, 2);
    REQUIRE(recs.size() == static_cast<size_t>(config.trials));
    for (const auto& rec : recs) {
        CHECK(rec.statistic > 0.0);
        CHECK(std::isfinite(rec.theta_hat));
    }
}

TEST_CASE("aggregate statistics") {
    std::vector<EstimationRecord> recs(3);
    for (auto& r : recs) { r.wrapped_error = 0.0; r.squared_error = 0.0; }
    const auto zero = aggregate(recs, 100, 16.0);
    CHECK(zero.mse == 0.0);
    CHECK(zero.mean_bias == 0.0);
    CHECK(zero.heisenberg_reference == doctest::Approx(1.0 / 16.0));

    std::vector<EstimationRecord> pm(2);
    pm[0].wrapped_error = 0.25;  pm[0].squared_error = 0.0625;
    pm[1].wrapped_error = -0.25; pm[1].squared_error = 0.0625;
    const auto sym = aggregate(pm, 100, 16.0);
    CHECK(sym.mean_bias == doctest::Approx(0.0));
    CHECK(sym.mse == doctest::Approx(0.0625));
    CHECK(sym.n_times_mse == doctest::Approx(6.25));

    CHECK_THROWS_AS(aggregate({}, 10, 16.0), std::invalid_argument);
}

TEST_CASE("mse decomposes into variance plus squared bias") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.01, 0.05);
    std::vector<EstimationRecord> recs(500);
    for (auto& r : recs) {
        r.wrapped_error = g(rng);
        r.squared_error = r.wrapped_error * r.wrapped_error;
    }
    const auto row = aggregate(recs, 10, 16.0);
    double var = 0.0;
    for (const auto& r : recs) {
        var += (r.wrapped_error - row.mean_bias) * (r.wrapped_error - row.mean_bias);
    }
    var /= static_cast<double>(recs.size());
    CHECK(std::abs(row.mse - (var + row.mean_bias * row.mean_bias)) <= 1e-12);
}

TEST_CASE("convergence sweep produces one row per N") {
    auto config = small_config();
    config.trials = 8;
    const auto rows = convergence_sweep(config, {500, 1000}, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].total_copies == 500);
    CHECK(rows[1].total_copies == 1000);
    CHECK(rows[0].trials == 8);
    CHECK(rows[0].heisenberg_reference ==
          doctest::Approx(1.0 / (std::cosh(4.0) - 1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(convergence_sweep(config, {1000, 500}, 1), std::invalid_argument);
    CHECK_THROWS_AS(convergence_sweep(config, {}, 1), std::invalid_argument);
}

TEST_CASE("doubling the trials shrinks the MSE standard error by sqrt(2)") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 0.03);
    std::vector<EstimationRecord> half(400);
    for (auto& r : half) {
        r.wrapped_error = g(rng);
        r.squared_error = r.wrapped_error * r.wrapped_error;
    }
    std::vector<EstimationRecord> full = half;
    full.insert(full.end(), half.begin(), half.end());
    const auto a = aggregate(half, 10, 16.0);
    const auto b = aggregate(full, 10, 16.0);
    // duplicated sample: same spread, twice the count
    CHECK(a.mse_standard_error / b.mse_standard_error ==
          doctest::Approx(std::sqrt(2.0)).epsilon(2e-3));
}

TEST_CASE("format_double produces shortest round-trip decimals") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(0.25) == "0.25");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-0.7) == "-0.7");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("records CSV: exact header and parsable rows") {
    std::vector<EstimationRecord> recs(2);
    recs[0].trial_index = 0;
    recs[0].theta_rough = 0.5;
    recs[0].theta_hat = 0.625;
    recs[0].wrapped_error = -0.075;
    recs[0].squared_error = 0.075 * 0.075;
    recs[1].trial_index = 1;
    recs[1].branch_flipped = true;

    const std::string csv = records_to_csv(recs);
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "trial,theta_rough,theta_hat,wrapped_error,squared_error,branch_flipped");
    REQUIRE(std::getline(in, line));
    CHECK(line == "0,0.5,0.625,-0.075,0.005625,0");
    REQUIRE(std::getline(in, line));
    CHECK(line == "1,0,0,0,0,1");
    CHECK(!std::getline(in, line));
}

TEST_CASE("summary JSON parses and echoes config and version") {
    const auto config = small_config();
    const auto recs = run_trials(config, 2);
    const auto row = aggregate(recs, config.total_copies,
                               qfi(GaussianPureState(0.0, config.r, 0.0)));
    const std::string text = summary_to_json(config, {row});
    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("library_version").get<std::string>() == version_string);
    CHECK(j.at("config").at("scheme").get<std::string>() == "povm");
    CHECK(j.at("config").at("seed").get<std::uint64_t>() == config.seed);
    CHECK(j.at("results").size() == 1);
    CHECK(j.at("results")[0].at("total_copies").get<long long>() == config.total_copies);
    CHECK(j.at("results")[0].at("mse").get<double>() == doctest::Approx(row.mse));
}

TEST_CASE("config JSON round trip and unknown-key rejection") {
    const auto config = small_config();
    const std::string path = temp_path("config.json");
    {
        std::ofstream out(path);
        out << config_to_json(config);
    }
    const auto back = load_config_json(path);
    CHECK(back.scheme == config.scheme);
    CHECK(back.r == config.r);
    CHECK(back.theta_true == config.theta_true);
    CHECK(back.total_copies == config.total_copies);
    CHECK(back.seed == config.seed);
    CHECK(back.truncation_dim == config.truncation_dim);

    {
        std::ofstream out(path);
        out << R"({"scheme":"povm","r":1.0,"theta_true":0.7,"total_copies":2000,)"
            << R"("split_exponent":0.6667,"trials":5,"seed":1,"truncation_dim":64,)"
            << R"("surprise":42})";
    }
    CHECK_THROWS_WITH_AS(load_config_json(path), "config: unknown key 'surprise'",
                         std::invalid_argument);

    {
        std::ofstream out(path);
        out << R"({"scheme":"povm","r":1.0})";
    }
    CHECK_THROWS_AS(load_config_json(path), std::invalid_argument);

    {
        std::ofstream out(path);
        out << "not json";
    }
    CHECK_THROWS_AS(load_config_json(path), std::invalid_argument);
    CHECK_THROWS_AS(load_config_json("does_not_exist.json"), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("file outputs are byte-identical across worker counts") {
    const auto config = small_config();
    const auto r1 = run_trials(config, 1);
    const auto r4 = run_trials(config, 4);
    const std::string p1 = temp_path("w1.csv"), p4 = temp_path("w4.csv");
    write_records_csv(p1, r1);
    write_records_csv(p4, r4);
    CHECK(slurp(p1) == slurp(p4));
    std::remove(p1.c_str());
    std::remove(p4.c_str());
}

TEST_CASE("records JSON is valid and complete") {
    const auto config = small_config();
    auto c = config;
    c.trials = 3;
    const auto recs = run_trials(c, 1);
    const std::string path = temp_path("records.json");
    write_records_json(path, recs);
    const auto j = nlohmann::json::parse(slurp(path));
    REQUIRE(j.is_array());
    CHECK(j.size() == 3);
    CHECK(j[0].contains("theta_hat"));
    CHECK(j[0].contains("n_plus"));
    std::remove(path.c_str());
}

TEST_CASE("scheme and format string conversions") {
    CHECK(to_string(Scheme::povm) == "povm");
    CHECK(to_string(Scheme::homodyne) == "homodyne");
    CHECK(scheme_from_string("homodyne") == Scheme::homodyne);
    CHECK_THROWS_AS(scheme_from_string("dyne"), std::invalid_argument);
    CHECK(output_format_from_string("csv") == OutputFormat::csv);
    CHECK_THROWS_AS(output_format_from_string("xml"), std::invalid_argument);
}
