// Command-line front end: generator inspection, point dumps, single
// integrations, convergence studies, rate reports and lemma verification.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "frolov/frolov.hpp"

using namespace frolov;
using nlohmann::json;

namespace {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<double> parse_csv_doubles(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        out.push_back(std::stod(s.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

// Largest scan radius that keeps the admissibility scan near 1e9 candidates.
int default_check_radius(int dim) {
    if (dim <= 4) return 100;
    double m = 100.0;
    for (;;) {
        double count = 1.0;
        for (int i = 0; i < dim; ++i) count *= 2.0 * m + 1.0;
        if (count / 2.0 <= 1e9 || m <= 2.0) return static_cast<int>(m);
        m = std::floor(m * 0.8);
    }
}

// "mixed:s=1.5,p=2" or "isotropic:S=1x2,p=2"
SmoothnessSpec parse_prediction(const std::string& text, int dim) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--predict", "expected mode:s=...,p=...");
    const std::string mode = text.substr(0, colon);
    SmoothnessSpec spec;
    if (mode == "mixed")
        spec.mode = SmoothnessMode::mixed;
    else if (mode == "isotropic")
        spec.mode = SmoothnessMode::isotropic;
    else
        throw CLI::ValidationError("--predict", "mode must be mixed or isotropic");

    std::size_t pos = colon + 1;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string kv = text.substr(pos, comma - pos);
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--predict", "expected k=v");
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if (key == "s") {
            spec.S.assign(static_cast<std::size_t>(dim), std::stod(value));
        } else if (key == "S") {
            spec.S.clear();
            std::size_t vpos = 0;
            while (vpos <= value.size()) {
                std::size_t x = value.find('x', vpos);
                if (x == std::string::npos) x = value.size();
                spec.S.push_back(std::stod(value.substr(vpos, x - vpos)));
                vpos = x + 1;
            }
        } else if (key == "p") {
            spec.p = value == "inf" ? std::numeric_limits<double>::infinity() : std::stod(value);
        } else {
            throw CLI::ValidationError("--predict", "unknown key '" + key + "'");
        }
        pos = comma + 1;
    }
    if (spec.S.empty()) throw CLI::ValidationError("--predict", "missing s or S");
    spec.validate();
    return spec;
}

int run_matrix(int dim, int check_radius, bool as_json) {
    const FrolovMatrix g = build_generator(dim, check_radius);
    if (as_json) {
        json out;
        out["dim"] = g.dim;
        out["check_radius"] = g.check_radius;
        out["det_abs"] = g.det_abs;
        out["check_margin"] = g.check_margin;
        std::vector<double> entries;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) entries.push_back(g.entries(i, j));
        out["entries"] = entries;
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    std::cout << "d = " << g.dim << ", check_radius = " << g.check_radius << "\n";
    for (int i = 0; i < dim; ++i) {
        std::cout << (i == 0 ? "B = " : "    ");
        for (int j = 0; j < dim; ++j) std::cout << (j ? " " : "") << fmt17(g.entries(i, j));
        std::cout << "\n";
    }
    std::cout << "d_B = " << fmt17(g.det_abs) << "\n";
    std::cout << "check_margin = " << fmt17(g.check_margin) << "\n";
    return 0;
}

int run_points(int dim, double n, std::uint64_t seed, const std::string& u_text,
               const std::string& v_text, const std::string& out_path) {
    const FrolovMatrix base = build_generator(dim, std::min(default_check_radius(dim), 30));
    const ScaledGenerator gen = scale(base, n);

    Randomization rand;
    if (!u_text.empty() || !v_text.empty()) {
        if (u_text.empty() || v_text.empty())
            throw CLI::ValidationError("--u/--v", "provide both or neither");
        rand.dilation = parse_csv_doubles(u_text);
        rand.shift = parse_csv_doubles(v_text);
        rand.seed = seed;
        if (static_cast<int>(rand.dilation.size()) != dim ||
            static_cast<int>(rand.shift.size()) != dim)
            throw CLI::ValidationError("--u/--v", "need exactly d components");
        for (double u : rand.dilation)
            if (u < 0.5 || u > 1.5)
                throw CLI::ValidationError("--u", "components must lie in [1/2, 3/2]");
        for (double v : rand.shift)
            if (v < 0.0 || v >= 1.0)
                throw CLI::ValidationError("--v", "components must lie in [0, 1)");
    } else {
        RandomStream stream(derive_stream_seed(seed, 0, 0), 0);
        rand = draw_randomization(stream, dim);
    }

    const NodeSet nodes = enumerate_nodes(gen, rand, Domain::unit_cube(dim));
    std::string text = "# frolov-points v1, d=" + std::to_string(dim) + ", n=" + fmt17(n) +
                       ", seed=" + std::to_string(seed) + "\n";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto x = nodes.node(i);
        for (int j = 0; j < dim; ++j) text += (j ? "," : "") + fmt17(x[static_cast<std::size_t>(j)]);
        text += "\n";
    }
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
    return 0;
}

int run_integrate(const std::string& fn, int dim, double n, std::uint64_t seed,
                  const std::string& method, bool boundary_free, bool as_json) {
    const auto [name, params] = parse_integrand_spec(fn);
    const Integrand f = get_integrand(name, dim, params);
    const Domain dom = Domain::unit_cube(dim);
    RandomStream stream(derive_stream_seed(seed, 0, 0), 0);

    EstimateResult res;
    std::string effective = method;
    if (method == "mc") {
        res = plain_monte_carlo(f, static_cast<long long>(std::llround(n)), dom, stream);
    } else if (method == "frolov") {
        const ScaledGenerator gen = scale(build_generator(dim, 30), n);
        const Randomization rand = draw_randomization(stream, dim);
        if (boundary_free || !f.support_in_domain) {
            res = randomized_frolov_boundary_free(f, gen, rand);
            effective = "frolov-boundary-free";
        } else {
            res = randomized_frolov(f, gen, rand, dom);
        }
    } else {
        throw CLI::ValidationError("--method", "must be frolov or mc");
    }

    if (as_json) {
        json out;
        out["fn"] = fn;
        out["d"] = dim;
        out["n"] = n;
        out["method"] = effective;
        out["seed"] = seed;
        out["value"] = res.value;
        out["node_count"] = res.node_count;
        if (f.exact_integral)
            out["exact"] = *f.exact_integral;
        else
            out["exact"] = nullptr;
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << fn << " d=" << dim << " n=" << fmt17(n) << " method=" << effective
                  << " seed=" << seed << "\n";
        std::cout << "value = " << fmt17(res.value) << " (nodes: " << res.node_count << ")\n";
        if (f.exact_integral) {
            std::cout << "exact = " << fmt17(*f.exact_integral)
                      << ", error = " << fmt17(res.value - *f.exact_integral) << "\n";
        }
    }
    return 0;
}

int run_corpus_list() {
    for (const CorpusEntry& e : corpus_list()) {
        std::printf("%-16s params: %-48s smoothness: %-28s exact: %s\n", e.name.c_str(),
                    e.params.c_str(), e.smoothness.c_str(), e.exact.c_str());
    }
    return 0;
}

int run_study_cmd(StudyConfig cfg) {
    std::vector<RawRecord> raw;
    const auto records = run_study(cfg, cfg.raw_path.empty() ? nullptr : &raw);
    const std::string csv = results_csv(cfg, records);
    if (cfg.out_path.empty())
        std::cout << csv;
    else
        write_text_file(cfg.out_path, csv);
    if (!cfg.raw_path.empty()) write_text_file(cfg.raw_path, raw_csv(cfg, raw));
    if (!cfg.out_path.empty())
        std::cerr << "wrote " << records.size() << " records to " << cfg.out_path << "\n";
    return 0;
}

int run_rate(const std::string& in_path, const std::string& predict, int dim) {
    const auto records = read_results_csv(in_path);
    std::optional<RatePrediction> prediction;
    if (!predict.empty()) prediction = predict_rate(parse_prediction(predict, dim));
    std::cout << report(records, prediction);
    return 0;
}

int run_verify(const std::string& lemma, int dim, double n, bool as_json) {
    bool pass = false;
    json out;
    out["lemma"] = lemma;
    out["d"] = dim;
    out["n"] = n;

    if (lemma == "boxes") {
        const FrolovMatrix base = build_generator(dim, 30);
        const ScaledGenerator gen = scale(base, n);
        RandomStream stream(derive_stream_seed(777, 0, 0), 0);
        pass = true;
        double worst = 0.0;
        for (int i = 0; i < 1000 && pass; ++i) {
            const double lo = std::log(0.01 * n / base.det_abs);
            const double hi = std::log(50.0 * n);
            const double vol = std::exp(lo + (hi - lo) * stream.next_double());
            Vec wj(static_cast<std::size_t>(dim));
            double acc = vol;
            for (int j = 0; j + 1 < dim; ++j) {
                wj[static_cast<std::size_t>(j)] = std::pow(acc, 0.2 + 0.6 * stream.next_double());
                acc /= wj[static_cast<std::size_t>(j)];
            }
            wj[static_cast<std::size_t>(dim - 1)] = acc;
            AxisBox box{Vec(static_cast<std::size_t>(dim)), Vec(static_cast<std::size_t>(dim))};
            for (int j = 0; j < dim; ++j) {
                const double t = stream.next_double();
                box.lo[static_cast<std::size_t>(j)] = -t * wj[static_cast<std::size_t>(j)];
                box.hi[static_cast<std::size_t>(j)] = (1.0 - t) * wj[static_cast<std::size_t>(j)];
            }
            const long long count = count_dual_in_box(gen, box);
            const double limit = base.det_abs * box.volume() / n + 1e-9;
            worst = std::max(worst, static_cast<double>(count) - limit);
            if (static_cast<double>(count) > limit) pass = false;
            if (box.volume() < n / base.det_abs && count != 0) pass = false;
        }
        out["max_excess"] = worst;
    } else if (lemma == "shift-mse") {
        const Integrand f = get_integrand("hat_tensor", dim);
        const ScaledGenerator gen = scale(build_generator(dim, 30), n);
        const int grid = dim == 1 ? 4096 : 256;
        const ShiftMsePair p = shift_mse_identity(f, gen.entries, grid);
        pass = shift_mse_agrees(p, 1e-3);
        out["grid_mse"] = p.grid_mse;
        out["fourier_sum"] = p.fourier_sum;
    } else if (lemma == "tail-bound") {
        const Integrand f = get_integrand("hat_tensor", dim);
        const FrolovMatrix base = build_generator(dim, 30);
        const ScaledGenerator gen = scale(base, n);
        const double bound = fourier_tail_bound(f, gen);
        const Domain dom = Domain::unit_cube(dim);
        std::vector<double> sq;
        for (std::uint64_t rep = 0; rep < 2000; ++rep) {
            RandomStream stream(derive_stream_seed(7, 0, rep), rep);
            const Randomization rand = draw_randomization(stream, dim);
            const double err = randomized_frolov(f, gen, rand, dom).value - *f.exact_integral;
            sq.push_back(err * err);
        }
        const RmseStats rs = rmse_from_squared_errors(sq);
        pass = rs.rmse <= bound + 3.0 * rs.rmse_se;
        out["empirical_rmse"] = rs.rmse;
        out["bound"] = bound;
    } else {
        throw CLI::ValidationError("--lemma", "must be boxes, shift-mse or tail-bound");
    }

    out["pass"] = pass;
    if (as_json)
        std::cout << out.dump(2) << "\n";
    else
        std::cout << lemma << " d=" << dim << " n=" << fmt17(n) << ": "
                  << (pass ? "OK" : "VIOLATION") << "\n";
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"randomized Frolov cubature toolkit"};
    app.require_subcommand(1);

    // matrix
    int m_dim = 2;
    int m_radius = -1;
    bool m_json = false;
    auto* matrix_cmd = app.add_subcommand("matrix", "print a generator matrix");
    matrix_cmd->add_option("--dim", m_dim, "dimension")->required()->check(CLI::PositiveNumber);
    matrix_cmd->add_option("--check-radius", m_radius, "admissibility scan radius");
    matrix_cmd->add_flag("--json", m_json, "JSON output");

    // points
    int p_dim = 2;
    double p_n = 64.0;
    std::uint64_t p_seed = 0;
    std::string p_u, p_v, p_out;
    auto* points_cmd = app.add_subcommand("points", "dump a realized node set as CSV");
    points_cmd->add_option("--dim", p_dim, "dimension")->required()->check(CLI::PositiveNumber);
    points_cmd->add_option("--n", p_n, "expected point count")->required();
    points_cmd->add_option("--seed", p_seed, "seed");
    points_cmd->add_option("--u", p_u, "dilation override, comma-separated");
    points_cmd->add_option("--v", p_v, "shift override, comma-separated");
    points_cmd->add_option("--out", p_out, "output file (stdout if omitted)");

    // integrate
    std::string i_fn = "hat_tensor", i_method = "frolov";
    int i_dim = 2;
    double i_n = 1024.0;
    std::uint64_t i_seed = 0;
    bool i_boundary_free = false, i_json = false;
    auto* int_cmd = app.add_subcommand("integrate", "single randomized estimate");
    int_cmd->add_option("--fn", i_fn, "integrand, name[:k=v,...]")->required();
    int_cmd->add_option("--dim", i_dim, "dimension")->required()->check(CLI::PositiveNumber);
    int_cmd->add_option("--n", i_n, "expected point count")->required();
    int_cmd->add_option("--seed", i_seed, "seed");
    int_cmd->add_option("--method", i_method, "frolov|mc");
    int_cmd->add_flag("--boundary-free", i_boundary_free, "route through the change of variable");
    int_cmd->add_flag("--json", i_json, "JSON output");

    // corpus list
    auto* corpus_cmd = app.add_subcommand("corpus", "corpus utilities");
    std::string c_action = "list";
    corpus_cmd->add_option("action", c_action, "list")->required();

    // study
    StudyConfig s_cfg;
    std::string s_method = "frolov", s_grid, s_config;
    bool s_boundary_free = false;
    auto* study_cmd = app.add_subcommand("study", "seeded convergence study, CSV output");
    study_cmd->add_option("--config", s_config, "key=value config file (flags override)");
    study_cmd->add_option("--fn", s_cfg.fn, "integrand, name[:k=v,...]");
    study_cmd->add_option("--dim", s_cfg.dim, "dimension")->check(CLI::PositiveNumber);
    study_cmd->add_option("--method", s_method, "frolov|frolov-boundary-free|mc");
    study_cmd->add_option("--n-grid", s_grid, "comma-separated increasing n values");
    study_cmd->add_option("--reps", s_cfg.replications, "replications per n");
    study_cmd->add_option("--seed", s_cfg.base_seed, "base seed");
    study_cmd->add_option("--rep-offset", s_cfg.rep_offset, "first replication index");
    study_cmd->add_option("--out", s_cfg.out_path, "results CSV path (stdout if omitted)");
    study_cmd->add_option("--raw", s_cfg.raw_path, "per-replication CSV path");
    study_cmd->add_flag("--boundary-free", s_boundary_free, "route through the change of variable");
    study_cmd->add_option("--threads", s_cfg.threads, "replication-level threads (results unchanged)");

    // rate
    std::string r_in, r_predict;
    int r_dim = 2;
    auto* rate_cmd = app.add_subcommand("rate", "fit a convergence rate from a results CSV");
    rate_cmd->add_option("--in", r_in, "results CSV")->required();
    rate_cmd->add_option("--predict", r_predict, "mixed:s=1.5,p=2 or isotropic:S=1x2,p=2");
    rate_cmd->add_option("--dim", r_dim, "dimension for scalar s predictions");

    // verify
    std::string v_lemma;
    int v_dim = 2;
    double v_n = 64.0;
    bool v_json = false;
    auto* verify_cmd = app.add_subcommand("verify", "run a lemma oracle, nonzero exit on violation");
    verify_cmd->add_option("--lemma", v_lemma, "boxes|shift-mse|tail-bound")->required();
    verify_cmd->add_option("--dim", v_dim, "dimension")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--n", v_n, "scaling n");
    verify_cmd->add_flag("--json", v_json, "JSON output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (matrix_cmd->parsed())
            return run_matrix(m_dim, m_radius > 0 ? m_radius : default_check_radius(m_dim), m_json);
        if (points_cmd->parsed()) return run_points(p_dim, p_n, p_seed, p_u, p_v, p_out);
        if (int_cmd->parsed())
            return run_integrate(i_fn, i_dim, i_n, i_seed, i_method, i_boundary_free, i_json);
        if (corpus_cmd->parsed()) {
            if (c_action != "list") throw CLI::ValidationError("corpus", "only 'list' is supported");
            return run_corpus_list();
        }
        if (study_cmd->parsed()) {
            StudyConfig cfg;
            if (!s_config.empty()) cfg = read_config_file(s_config);
            // explicit flags override the file
            if (study_cmd->count("--fn")) cfg.fn = s_cfg.fn;
            if (study_cmd->count("--dim")) cfg.dim = s_cfg.dim;
            if (study_cmd->count("--method") || s_config.empty())
                cfg.method = method_from_name(s_method);
            if (study_cmd->count("--n-grid")) cfg.n_grid = parse_csv_doubles(s_grid);
            if (study_cmd->count("--reps")) cfg.replications = s_cfg.replications;
            if (study_cmd->count("--seed")) cfg.base_seed = s_cfg.base_seed;
            if (study_cmd->count("--rep-offset")) cfg.rep_offset = s_cfg.rep_offset;
            if (study_cmd->count("--out")) cfg.out_path = s_cfg.out_path;
            if (study_cmd->count("--raw")) cfg.raw_path = s_cfg.raw_path;
            if (study_cmd->count("--threads")) cfg.threads = s_cfg.threads;
            if (s_boundary_free && cfg.method == Method::frolov)
                cfg.method = Method::frolov_boundary_free;
            return run_study_cmd(cfg);
        }
        if (rate_cmd->parsed()) return run_rate(r_in, r_predict, r_dim);
        if (verify_cmd->parsed()) return run_verify(v_lemma, v_dim, v_n, v_json);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
