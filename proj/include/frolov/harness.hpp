#pragma once

// Reproducible convergence studies: seeded replication sweeps over an n-grid,
// RMSE aggregation, CSV persistence and rate reporting. Identical configs
// produce byte-identical CSV output.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "frolov/analysis.hpp"
#include "frolov/corpus.hpp"
#include "frolov/cubature.hpp"
#include "frolov/generator.hpp"
#include "frolov/transform.hpp"

namespace frolov {

enum class Method { frolov, frolov_boundary_free, mc };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::frolov: return "frolov";
        case Method::frolov_boundary_free: return "frolov-boundary-free";
        case Method::mc: return "mc";
    }
    throw std::logic_error("method_name: bad enum");
}

inline Method method_from_name(const std::string& s) {
    if (s == "frolov") return Method::frolov;
    if (s == "frolov-boundary-free") return Method::frolov_boundary_free;
    if (s == "mc") return Method::mc;
    throw std::invalid_argument("unknown method '" + s + "' (frolov|frolov-boundary-free|mc)");
}

struct StudyConfig {
    std::string fn = "hat_tensor"; // corpus spec, "name" or "name:k=v,..."
    int dim = 1;
    Method method = Method::frolov;
    std::vector<double> n_grid;
    int replications = 2;
    std::uint64_t base_seed = 0;
    std::uint64_t rep_offset = 0; // first replication index (for split runs)
    std::string out_path;         // results CSV, empty = don't write
    std::string raw_path;         // per-replication squared errors, empty = don't write
    int generator_check_radius = 30;
    int threads = 1; // replication-level parallelism; results do not depend on it
};

struct StudyRecord {
    double n = 0.0;
    int replications = 0;
    double rmse = 0.0;
    double rmse_se = 0.0;
    double mean_est = 0.0;
    double exact = 0.0;
    double mean_node_count = 0.0;
};

struct RawRecord {
    double n = 0.0;
    std::uint64_t rep_index = 0;
    double estimate = 0.0;
    double sq_error = 0.0;
};

namespace detail {

inline std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void validate_config(const StudyConfig& cfg) {
    if (cfg.dim < 1) throw std::invalid_argument("run_study: dim must be >= 1");
    if (cfg.replications < 2) throw std::invalid_argument("run_study: need R >= 2");
    if (cfg.n_grid.empty()) throw std::invalid_argument("run_study: empty n-grid");
    for (std::size_t i = 0; i + 1 < cfg.n_grid.size(); ++i)
        if (!(cfg.n_grid[i] < cfg.n_grid[i + 1]))
            throw std::invalid_argument("run_study: n-grid must be strictly increasing");
    for (double n : cfg.n_grid)
        if (!(n > 0.0)) throw std::invalid_argument("run_study: n must be positive");
}

} // namespace detail

inline std::vector<StudyRecord> run_study(const StudyConfig& cfg,
                                          std::vector<RawRecord>* raw = nullptr) {
    detail::validate_config(cfg);
    const auto [fn_name, fn_params] = parse_integrand_spec(cfg.fn);
    Integrand f = get_integrand(fn_name, cfg.dim, fn_params);
    if (!f.exact_integral)
        throw std::invalid_argument("run_study: integrand has no known exact integral");
    if (cfg.method == Method::frolov && !f.support_in_domain)
        throw std::invalid_argument("run_study: '" + fn_name +
                                    "' is not compactly supported; use frolov-boundary-free");

    const double exact = *f.exact_integral;
    const Domain dom = Domain::unit_cube(cfg.dim);

    Integrand effective = f;
    if (cfg.method == Method::frolov_boundary_free) effective = to_compact_support(f);

    std::optional<FrolovMatrix> base;
    if (cfg.method != Method::mc) base = build_generator(cfg.dim, cfg.generator_check_radius);

    std::vector<StudyRecord> records;
    records.reserve(cfg.n_grid.size());
    const std::size_t reps = static_cast<std::size_t>(cfg.replications);
    std::vector<double> estimates(reps), sq_errors(reps), node_counts(reps);

    for (std::size_t n_idx = 0; n_idx < cfg.n_grid.size(); ++n_idx) {
        const double n = cfg.n_grid[n_idx];
        std::optional<ScaledGenerator> gen;
        if (base) gen = scale(*base, n);

        // Each replication writes only its own slot, so the aggregation below
        // is independent of scheduling; failures carry the (n, replication)
        // that produced them.
        std::mutex error_mutex;
        std::string first_error;
        const auto run_replication = [&](std::size_t r) {
            const std::uint64_t rep_index = cfg.rep_offset + r;
            try {
                RandomStream stream(derive_stream_seed(cfg.base_seed, n_idx, rep_index), rep_index);
                EstimateResult res;
                if (cfg.method == Method::mc) {
                    res = plain_monte_carlo(f, static_cast<long long>(std::llround(n)), dom, stream);
                } else {
                    const Randomization rand = draw_randomization(stream, cfg.dim);
                    res = randomized_frolov(effective, *gen, rand, dom);
                }
                estimates[r] = res.value;
                sq_errors[r] = (res.value - exact) * (res.value - exact);
                node_counts[r] = static_cast<double>(res.node_count);
            } catch (const std::exception& e) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error.empty())
                    first_error = "run_study: n=" + detail::fmt17(n) + " replication " +
                                   std::to_string(rep_index) + ": " + e.what();
            }
        };

        const int threads = std::max(1, cfg.threads);
        if (threads == 1 || reps < 2 * static_cast<std::size_t>(threads)) {
            for (std::size_t r = 0; r < reps; ++r) run_replication(r);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(threads));
            std::atomic<std::size_t> next{0};
            for (int t = 0; t < threads; ++t)
                pool.emplace_back([&] {
                    for (std::size_t r = next.fetch_add(1); r < reps; r = next.fetch_add(1))
                        run_replication(r);
                });
            for (auto& th : pool) th.join();
        }
        if (!first_error.empty()) throw std::runtime_error(first_error);
        if (raw)
            for (std::size_t r = 0; r < reps; ++r)
                raw->push_back({n, cfg.rep_offset + r, estimates[r], sq_errors[r]});

        const RmseStats stats = rmse_from_squared_errors(sq_errors);
        StudyRecord rec;
        rec.n = n;
        rec.replications = cfg.replications;
        rec.rmse = stats.rmse;
        rec.rmse_se = stats.rmse_se;
        rec.mean_est = compensated_mean(estimates);
        rec.exact = exact;
        rec.mean_node_count = compensated_mean(node_counts);
        records.push_back(rec);
    }
    return records;
}

inline std::string results_csv(const StudyConfig& cfg, std::span<const StudyRecord> records) {
    std::string out = "fn,d,method,seed,n,reps,rmse,rmse_se,mean_est,exact,mean_node_count\n";
    for (const auto& r : records) {
        out += cfg.fn + ',' + std::to_string(cfg.dim) + ',' + method_name(cfg.method) + ',' +
               std::to_string(cfg.base_seed) + ',' + detail::fmt17(r.n) + ',' +
               std::to_string(r.replications) + ',' + detail::fmt17(r.rmse) + ',' +
               detail::fmt17(r.rmse_se) + ',' + detail::fmt17(r.mean_est) + ',' +
               detail::fmt17(r.exact) + ',' + detail::fmt17(r.mean_node_count) + '\n';
    }
    return out;
}

inline std::string raw_csv(const StudyConfig& cfg, std::span<const RawRecord> rows) {
    std::string out = "fn,d,method,seed,n,rep_index,estimate,sq_error\n";
    for (const auto& r : rows) {
        out += cfg.fn + ',' + std::to_string(cfg.dim) + ',' + method_name(cfg.method) + ',' +
               std::to_string(cfg.base_seed) + ',' + detail::fmt17(r.n) + ',' +
               std::to_string(r.rep_index) + ',' + detail::fmt17(r.estimate) + ',' +
               detail::fmt17(r.sq_error) + '\n';
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

// Reads the n/reps/rmse/... columns back from a results CSV.
inline std::vector<StudyRecord> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty results file '" + path + "'");
    std::vector<StudyRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            cells.push_back(line.substr(pos, comma - pos));
            pos = comma + 1;
        }
        if (cells.size() != 11) throw std::runtime_error("bad results row: " + line);
        StudyRecord r;
        r.n = std::stod(cells[4]);
        r.replications = std::stoi(cells[5]);
        r.rmse = std::stod(cells[6]);
        r.rmse_se = std::stod(cells[7]);
        r.mean_est = std::stod(cells[8]);
        r.exact = std::stod(cells[9]);
        r.mean_node_count = std::stod(cells[10]);
        records.push_back(r);
    }
    return records;
}

inline RateFit fit_rate(std::span<const StudyRecord> records) {
    std::vector<double> n, rmse;
    for (const auto& r : records) {
        n.push_back(r.n);
        rmse.push_back(r.rmse);
    }
    return fit_rate(std::span<const double>(n), std::span<const double>(rmse));
}

inline std::string report(std::span<const StudyRecord> records,
                          const std::optional<RatePrediction>& prediction = std::nullopt) {
    if (records.empty()) throw std::invalid_argument("report: no records");
    std::ostringstream out;
    char buf[160];
    out << "        n   reps          rmse       rmse_se        mean_est           exact    nodes\n";
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%9.6g %6d %13.6e %13.6e %15.8e %15.8e %8.1f\n", r.n,
                      r.replications, r.rmse, r.rmse_se, r.mean_est, r.exact, r.mean_node_count);
        out << buf;
    }
    if (records.size() >= 4) {
        const RateFit fit = fit_rate(records);
        std::snprintf(buf, sizeof buf, "fitted slope: %.3f +/- %.3f (intercept %.3f)\n", fit.slope,
                      fit.slope_stderr, fit.intercept);
        out << buf;
    } else {
        out << "fitted slope: n/a (need >= 4 grid points)\n";
    }
    if (prediction) {
        std::snprintf(buf, sizeof buf, "predicted exponent: %.3f (%s)\n", prediction->exponent,
                      prediction->mode == SmoothnessMode::mixed ? "mixed" : "isotropic");
        out << buf;
        if (!prediction->regime_ok)
            out << "REGIME-VIOLATION: smoothness below the integrability threshold; "
                   "the predicted rate does not apply\n";
    }
    return out.str();
}

// key=value study-config files mirroring the CLI flags; unknown keys rejected.
inline void apply_config_entry(StudyConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "fn") {
        cfg.fn = value;
    } else if (key == "dim") {
        cfg.dim = std::stoi(value);
    } else if (key == "method") {
        cfg.method = method_from_name(value);
    } else if (key == "n-grid") {
        cfg.n_grid.clear();
        std::size_t pos = 0;
        while (pos <= value.size()) {
            std::size_t comma = value.find(',', pos);
            if (comma == std::string::npos) comma = value.size();
            cfg.n_grid.push_back(std::stod(value.substr(pos, comma - pos)));
            pos = comma + 1;
        }
    } else if (key == "reps") {
        cfg.replications = std::stoi(value);
    } else if (key == "seed") {
        cfg.base_seed = std::stoull(value);
    } else if (key == "rep-offset") {
        cfg.rep_offset = std::stoull(value);
    } else if (key == "out") {
        cfg.out_path = value;
    } else if (key == "raw") {
        cfg.raw_path = value;
    } else if (key == "threads") {
        cfg.threads = std::stoi(value);
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

inline StudyConfig read_config_file(const std::string& path, StudyConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        apply_config_entry(base, line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

} // namespace frolov
