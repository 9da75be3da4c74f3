#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "frolov/harness.hpp"

using namespace frolov;

namespace {

StudyConfig tiny_config() {
    StudyConfig cfg;
    cfg.fn = "hat_tensor";
    cfg.dim = 1;
    cfg.method = Method::frolov;
    cfg.n_grid = {4.0};
    cfg.replications = 2;
    cfg.base_seed = 123;
    return cfg;
}

} // namespace

TEST_CASE("identical configs reproduce identical records and CSV bytes") {
    StudyConfig cfg = tiny_config();
    cfg.n_grid = {4.0, 16.0};
    cfg.replications = 25;
    const auto a = run_study(cfg);
    const auto b = run_study(cfg);
    REQUIRE(a.size() == 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].rmse == b[i].rmse);
        CHECK(a[i].mean_est == b[i].mean_est);
        CHECK(a[i].mean_node_count == b[i].mean_node_count);
    }
    CHECK(results_csv(cfg, a) == results_csv(cfg, b));
}

TEST_CASE("classical Monte Carlo study recovers the n^{-1/2} rate") {
    StudyConfig cfg;
    cfg.fn = "hat_tensor";
    cfg.dim = 2;
    cfg.method = Method::mc;
    for (int k = 8; k <= 14; ++k) cfg.n_grid.push_back(std::pow(2.0, k));
    cfg.replications = 200;
    cfg.base_seed = 2024;
    const auto records = run_study(cfg);
    const RateFit fit = fit_rate(records);
    CHECK(std::fabs(fit.slope + 0.5) <= 0.1);
}

TEST_CASE("box indicator study is unbiased at every grid point") {
    StudyConfig cfg;
    cfg.fn = "box_indicator";
    cfg.dim = 2;
    cfg.method = Method::frolov;
    cfg.n_grid = {64.0, 256.0};
    cfg.replications = 2000;
    cfg.base_seed = 31;
    const auto records = run_study(cfg);
    for (const auto& r : records) {
        CHECK(r.exact == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(r.mean_node_count > 0.0);
        // se of the mean from rmse and bias: sd^2 = (rmse^2 - bias^2) R/(R-1)
        const double bias = r.mean_est - r.exact;
        const double sd = std::sqrt(std::max(0.0, (r.rmse * r.rmse - bias * bias) *
                                                      r.replications / (r.replications - 1.0)));
        const double se = sd / std::sqrt(static_cast<double>(r.replications));
        CHECK(std::fabs(bias) <= 3.0 * se);
    }
}

TEST_CASE("splitting replications with an offset pools back to the same rmse") {
    StudyConfig full = tiny_config();
    full.fn = "hat_tensor";
    full.n_grid = {16.0, 64.0};
    full.replications = 400;
    full.base_seed = 99;

    std::vector<RawRecord> raw_full;
    const auto rec_full = run_study(full, &raw_full);

    StudyConfig first = full, second = full;
    first.replications = 200;
    second.replications = 200;
    second.rep_offset = 200;
    std::vector<RawRecord> raw_a, raw_b;
    run_study(first, &raw_a);
    run_study(second, &raw_b);

    // pool per grid entry in replication-index order and recompute
    for (std::size_t grid = 0; grid < full.n_grid.size(); ++grid) {
        const double n = full.n_grid[grid];
        std::vector<double> pooled;
        for (const auto& row : raw_a)
            if (row.n == n) pooled.push_back(row.sq_error);
        for (const auto& row : raw_b)
            if (row.n == n) pooled.push_back(row.sq_error);
        REQUIRE(pooled.size() == 400);
        const RmseStats stats = rmse_from_squared_errors(pooled);
        CHECK(std::fabs(stats.rmse - rec_full[grid].rmse) <= 1e-12);
    }
}

TEST_CASE("records do not depend on the replication thread count") {
    StudyConfig cfg = tiny_config();
    cfg.n_grid = {16.0, 64.0};
    cfg.replications = 60;
    cfg.base_seed = 55;
    cfg.threads = 1;
    const auto serial = run_study(cfg);
    cfg.threads = 4;
    const auto parallel = run_study(cfg);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].rmse == parallel[i].rmse);
        CHECK(serial[i].rmse_se == parallel[i].rmse_se);
        CHECK(serial[i].mean_est == parallel[i].mean_est);
        CHECK(serial[i].mean_node_count == parallel[i].mean_node_count);
    }
}

TEST_CASE("enumeration-cap failures identify the grid point and replication") {
    StudyConfig cfg = tiny_config();
    cfg.dim = 2;
    cfg.n_grid = {1e9};
    try {
        run_study(cfg);
        FAIL("expected an enumeration-cap failure");
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        CHECK(what.find("n=1000000000") != std::string::npos);
        CHECK(what.find("replication 0") != std::string::npos);
        CHECK(what.find("exceeds cap") != std::string::npos);
    }
}

TEST_CASE("run_study validates its configuration") {
    StudyConfig cfg = tiny_config();
    cfg.replications = 1;
    CHECK_THROWS_AS(run_study(cfg), std::invalid_argument);

    cfg = tiny_config();
    cfg.n_grid = {};
    CHECK_THROWS_AS(run_study(cfg), std::invalid_argument);

    cfg = tiny_config();
    cfg.n_grid = {64.0, 32.0};
    CHECK_THROWS_AS(run_study(cfg), std::invalid_argument);

    cfg = tiny_config();
    cfg.fn = "not_a_function";
    CHECK_THROWS_AS(run_study(cfg), std::invalid_argument);

    cfg = tiny_config();
    cfg.fn = "poly_nobc";
    CHECK_THROWS_AS(run_study(cfg), std::invalid_argument);
    cfg.method = Method::frolov_boundary_free;
    CHECK_NOTHROW(run_study(cfg));
}

TEST_CASE("report formatting") {
    std::vector<StudyRecord> records;
    for (int k = 6; k <= 10; ++k) {
        StudyRecord r;
        r.n = std::pow(2.0, k);
        r.replications = 100;
        r.rmse = 2.0 / r.n;
        r.rmse_se = 0.01 * r.rmse;
        r.mean_est = 0.5;
        r.exact = 0.5;
        r.mean_node_count = r.n;
        records.push_back(r);
    }
    SUBCASE("exact power law, matching prediction, no flag") {
        const RatePrediction pred{-1.0, true, SmoothnessMode::mixed};
        const std::string text = report(records, pred);
        CHECK(text.find("fitted slope: -1.000") != std::string::npos);
        CHECK(text.find("predicted exponent: -1.000") != std::string::npos);
        CHECK(text.find("REGIME-VIOLATION") == std::string::npos);
    }
    SUBCASE("regime violation is flagged") {
        const RatePrediction pred = predict_rate({Vec(2, 0.2), 4.0 / 3.0, SmoothnessMode::mixed});
        const std::string text = report(records, pred);
        CHECK(text.find("REGIME-VIOLATION") != std::string::npos);
    }
    SUBCASE("empty records are an error") {
        CHECK_THROWS_AS(report(std::vector<StudyRecord>{}), std::invalid_argument);
    }
}

TEST_CASE("results CSV round-trips through the reader") {
    StudyConfig cfg = tiny_config();
    cfg.n_grid = {16.0, 64.0, 256.0, 1024.0};
    cfg.replications = 40;
    const auto records = run_study(cfg);
    const std::string csv = results_csv(cfg, records);
    CHECK(csv.rfind("fn,d,method,seed,n,reps,rmse,rmse_se,mean_est,exact,mean_node_count\n", 0) ==
          0);

    const auto path =
        std::filesystem::temp_directory_path() / "frolov_test_results_roundtrip.csv";
    write_text_file(path.string(), csv);
    const auto loaded = read_results_csv(path.string());
    std::filesystem::remove(path);

    REQUIRE(loaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(loaded[i].n == records[i].n);
        CHECK(loaded[i].replications == records[i].replications);
        CHECK(loaded[i].rmse == records[i].rmse);
        CHECK(loaded[i].rmse_se == records[i].rmse_se);
        CHECK(loaded[i].mean_est == records[i].mean_est);
        CHECK(loaded[i].exact == records[i].exact);
        CHECK(loaded[i].mean_node_count == records[i].mean_node_count);
    }
}

TEST_CASE("config files mirror the CLI flags and the CLI overrides them") {
    const auto path = std::filesystem::temp_directory_path() / "frolov_test_study.cfg";
    {
        std::ofstream out(path);
        out << "# comment line\n"
            << "fn=bspline_tensor:r=2\n"
            << "dim=2\n"
            << "method=mc\n"
            << "n-grid=64,128,256\n"
            << "reps=50\n"
            << "seed=77\n";
    }
    StudyConfig cfg = read_config_file(path.string());
    std::filesystem::remove(path);
    CHECK(cfg.fn == "bspline_tensor:r=2");
    CHECK(cfg.dim == 2);
    CHECK(cfg.method == Method::mc);
    CHECK(cfg.n_grid == std::vector<double>{64.0, 128.0, 256.0});
    CHECK(cfg.replications == 50);
    CHECK(cfg.base_seed == 77);

    apply_config_entry(cfg, "reps", "10"); // later flags win
    CHECK(cfg.replications == 10);

    CHECK_THROWS_AS(apply_config_entry(cfg, "bogus", "1"), std::invalid_argument);
    CHECK_THROWS_AS(method_from_name("bogus"), std::invalid_argument);
}
