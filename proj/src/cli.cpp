#include "arsym/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "arsym/errors.hpp"
#include "arsym/experiment.hpp"
#include "arsym/util.hpp"

namespace arsym {

namespace {

std::vector<double> parse_list(const std::string& what, const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw config_error(what + ": empty list entry");
        item = item.substr(b, e - b + 1);
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw config_error(what + ": bad number '" + item + "'");
        }
    }
    if (out.empty()) throw config_error(what + ": empty list");
    return out;
}

std::vector<double> read_decimal_stream(std::istream& in, const std::string& path) {
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r");
        std::string item = line.substr(b, e - b + 1);
        if (item[0] == '#') continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw config_error("'" + path + "' line " + std::to_string(lineno) +
                               ": expected one decimal number, got '" + item + "'");
        }
    }
    if (out.empty()) throw config_error("'" + path + "' contains no values");
    return out;
}

std::vector<double> read_decimal_file(const std::string& path) {
    if (path == "-") return read_decimal_stream(std::cin, "<stdin>");
    std::ifstream in(path);
    if (!in) throw config_error("cannot open input file '" + path + "'");
    return read_decimal_stream(in, path);
}

ResidualSet residuals_from_file(const std::string& path, bool precomputed, std::size_t p) {
    std::vector<double> values = read_decimal_file(path);
    if (precomputed) return make_residual_set(std::move(values));
    if (values.size() < 2 * p + 1)
        throw config_error("series file needs at least 2p+1 values (p presample rows first)");
    Series s;
    s.presample.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(p));
    s.obs.assign(values.begin() + static_cast<std::ptrdiff_t>(p), values.end());
    auto beta = ols_estimate(s, p);
    return residuals(s, beta);
}

void write_text(const std::string& dest, const std::string& text, std::ostream& out) {
    if (dest == "-") {
        out << text;
        return;
    }
    std::ofstream f(dest, std::ios::trunc);
    if (!f) throw config_error("cannot write output file '" + dest + "'");
    f << text;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    return parse_config(in);
}

struct CliState {
    // simulate
    std::string sim_coeffs = "0.5";
    std::string sim_innov = "normal(1)";
    std::string sim_q;
    double sim_rho = 0.0;
    double sim_gamma = 0.0;
    std::string sim_pi = "point_mass(0)";
    std::size_t sim_n = 200;
    std::uint64_t sim_seed = 1;
    std::optional<std::size_t> sim_burn;
    // test-*
    std::string input_path;
    bool precomputed = false;
    std::size_t order = 1;
    double alpha = 0.05;
    std::string cells_text;
    // cache simulation knobs
    OmegaSimParams sim_params;
    // power
    int power_m = 0;
    double power_alpha = 0.05;
    double power_lambda2 = -1.0;
    std::string config_path;
    std::string rho_grid, gamma_grid;
    bool empirical = false;
    // experiment
    std::optional<std::uint64_t> seed_override;
    std::string json_dest, csv_dest;
    // shared
    unsigned workers = 1;
    bool recompute = false;
    std::string alphas_text = "0.1,0.05,0.01";
};

int do_simulate(const CliState& st, std::ostream& out) {
    ARParams params{parse_list("--coeffs", st.sim_coeffs)};
    DistModel innov = parse_dist(st.sim_innov);
    std::size_t burn = st.sim_burn.value_or(default_burn_in(params.order()));
    Series s;
    if (!st.sim_q.empty()) {
        MixtureAlternative mix{innov, parse_dist(st.sim_q), st.sim_rho};
        s = simulate_stationary(params, mix, st.sim_n, burn, derive_seed(st.sim_seed, 0));
    } else {
        s = simulate_stationary(params, innov, st.sim_n, burn, derive_seed(st.sim_seed, 0));
    }
    if (st.sim_gamma > 0.0) {
        ContaminationModel cm{st.sim_gamma, parse_dist(st.sim_pi)};
        s = contaminate(s, cm, derive_seed(st.sim_seed, 1));
    }
    for (double v : s.presample) out << fmt_double(v) << '\n';
    for (double v : s.obs) out << fmt_double(v) << '\n';
    return 0;
}

int do_test_omega(const CliState& st, std::ostream& out) {
    ResidualSet rs = residuals_from_file(st.input_path, st.precomputed, st.order);
    double stat = omega_sq(rs);
    double crit = omega_limit_quantile(st.alpha, st.sim_params, st.workers);
    out << "statistic = omega_sq\n";
    out << "n = " << rs.n() << '\n';
    out << "omega_sq = " << fmt_double(stat) << '\n';
    out << "alpha = " << fmt_double(st.alpha) << '\n';
    out << "critical_value = " << fmt_double(crit) << "  # simulated limit quantile, paths="
        << st.sim_params.paths << " grid=" << st.sim_params.grid
        << " seed=" << st.sim_params.seed << '\n';
    out << "rule = reject the symmetry hypothesis at level " << fmt_double(st.alpha)
        << " when omega_sq exceeds the critical value\n";
    out << "decision = " << (stat > crit ? "reject" : "fail to reject") << '\n';
    return 0;
}

int do_test_chisq(const CliState& st, std::ostream& out) {
    if (st.cells_text.empty())
        throw config_error("test-chisq requires --cells (comma list starting at 0)");
    CellPartition cells = make_cell_partition(parse_list("--cells", st.cells_text));
    ResidualSet rs = residuals_from_file(st.input_path, st.precomputed, st.order);
    CellCounts counts = cell_counts(rs, cells);
    double stat = chi_sq(counts);
    const int m = static_cast<int>(cells.m());
    double crit = chisq_quantile(m, 1.0 - st.alpha);
    auto join_counts = [](const std::vector<std::uint64_t>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(v[i]);
        }
        return s;
    };
    out << "statistic = chi_sq\n";
    out << "n = " << rs.n() << '\n';
    out << "m = " << m << '\n';
    out << "nu_plus = " << join_counts(counts.nu_plus) << '\n';
    out << "nu_minus = " << join_counts(counts.nu_minus) << '\n';
    out << "chi_sq = " << fmt_double(stat) << '\n';
    out << "alpha = " << fmt_double(st.alpha) << '\n';
    out << "critical_value = " << fmt_double(crit) << "  # chi-square quantile, m=" << m << '\n';
    out << "rule = reject the symmetry hypothesis at level " << fmt_double(st.alpha)
        << " when chi_sq exceeds the critical value\n";
    out << "decision = " << (stat > crit ? "reject" : "fail to reject") << '\n';
    return 0;
}

int do_critical_values(const CliState& st, std::ostream& out) {
    const std::string path = omega_cache_path();
    std::vector<OmegaCacheRow> rows;
    try {
        rows = load_omega_cache(path);
    } catch (const config_error&) {
        if (!st.recompute) throw;
    }
    if (st.recompute) {
        std::vector<double> alphas = parse_list("--alphas", st.alphas_text);
        for (double a : alphas)
            if (!(a > 0.0 && a < 1.0))
                throw config_error("--alphas entries must lie in (0,1)");
        auto sample = omega_limit_sample(std::nullopt, st.sim_params.grid,
                                         st.sim_params.paths, st.sim_params.seed, st.workers);
        std::sort(sample.begin(), sample.end());
        for (double a : alphas) {
            // alpha here is the test level; the cached quantile is at 1 - alpha
            std::size_t k = static_cast<std::size_t>(
                std::ceil((1.0 - a) * static_cast<double>(sample.size())));
            k = std::min(std::max<std::size_t>(k, 1), sample.size());
            OmegaCacheRow row{a, st.sim_params.paths, st.sim_params.grid,
                              st.sim_params.seed, sample[k - 1]};
            bool replaced = false;
            for (auto& r : rows)
                if (std::fabs(r.alpha - a) <= 1e-12 && r.paths == row.paths &&
                    r.grid == row.grid && r.seed == row.seed) {
                    r = row;
                    replaced = true;
                }
            if (!replaced) rows.push_back(row);
        }
        std::sort(rows.begin(), rows.end(), [](const OmegaCacheRow& a, const OmegaCacheRow& b) {
            if (a.alpha != b.alpha) return a.alpha < b.alpha;
            if (a.paths != b.paths) return a.paths < b.paths;
            if (a.grid != b.grid) return a.grid < b.grid;
            return a.seed < b.seed;
        });
        store_omega_cache(path, rows);
    }
    out << "cache = " << path << '\n';
    out << "alpha\tpaths\tgrid\tseed\tvalue\n";
    for (const auto& r : rows)
        out << fmt_double(r.alpha) << '\t' << r.paths << '\t' << r.grid << '\t' << r.seed
            << '\t' << fmt_double(r.value) << '\n';
    return 0;
}

int do_power(const CliState& st, std::ostream& out) {
    if (st.config_path.empty()) {
        if (st.power_m < 1)
            throw config_error("power needs --m >= 1 (or --config for the grid mode)");
        if (st.power_lambda2 < 0.0)
            throw config_error("power needs --lambda2 >= 0 (or --config for the grid mode)");
        out << fmt_double(asymptotic_power(st.power_m, st.power_alpha, st.power_lambda2))
            << '\n';
        return 0;
    }
    ExperimentConfig cfg = load_config_file(st.config_path);
    std::vector<double> rhos = st.rho_grid.empty() ? std::vector<double>{cfg.rho}
                                                   : parse_list("--rho-grid", st.rho_grid);
    std::vector<double> gammas = st.gamma_grid.empty() ? std::vector<double>{cfg.gamma}
                                                       : parse_list("--gamma-grid", st.gamma_grid);
    CellPartition cells =
        cfg.cells.empty() ? equal_prob_cells(cfg.p_dist, 4) : make_cell_partition(cfg.cells);
    const int m = static_cast<int>(cells.m());
    out << "rho,gamma,empirical,analytic,stderr\n";
    std::size_t point = 0;
    for (double rho : rhos) {
        for (double gamma : gammas) {
            ChiSqAnalysisInput input{cells,       cfg.model, cfg.p_dist, cfg.q_dist,
                                     cfg.pi_dist, rho,       gamma};
            double analytic = asymptotic_power(m, cfg.alpha, noncentrality(input));
            std::string emp, se;
            if (st.empirical) {
                ExperimentConfig pt = cfg;
                pt.scenario = Scenario::power_chisq;
                pt.rho = rho;
                pt.gamma = gamma;
                pt.cells = cells.cuts;
                pt.master_seed = derive_seed(cfg.master_seed, point);
                ExperimentResult r = run_chisq_experiment(pt, st.workers);
                emp = fmt_double(r.rejection_rate);
                se = fmt_double(r.rejection_stderr);
            }
            out << fmt_double(rho) << ',' << fmt_double(gamma) << ',' << emp << ','
                << fmt_double(analytic) << ',' << se << '\n';
            ++point;
        }
    }
    return 0;
}

int do_experiment(const CliState& st, std::ostream& out) {
    ExperimentConfig cfg = load_config_file(st.config_path);
    if (st.seed_override) cfg.master_seed = *st.seed_override;
    ExperimentResult res = run_experiment(cfg, st.workers);
    std::string json = to_json(res);
    if (!st.csv_dest.empty())
        write_text(st.csv_dest, csv_header() + "\n" + to_csv_row(res) + "\n", out);
    if (!st.json_dest.empty())
        write_text(st.json_dest, json, out);
    if (st.csv_dest.empty() && st.json_dest.empty()) out << json;
    return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Symmetry tests for the innovations of a stationary autoregression"};
    app.require_subcommand(1);
    CliState st;

    auto* sim = app.add_subcommand("simulate", "Simulate a stationary AR path (one value per line; presample first)");
    sim->add_option("--coeffs", st.sim_coeffs, "AR coefficients, comma separated");
    sim->add_option("--innov", st.sim_innov, "innovation law, e.g. normal(1)");
    sim->add_option("--q", st.sim_q, "alternative law for a local mixture");
    sim->add_option("--rho", st.sim_rho, "mixture intensity (with --q)");
    sim->add_option("--gamma", st.sim_gamma, "contamination intensity");
    sim->add_option("--pi", st.sim_pi, "outlier law (with --gamma)");
    sim->add_option("--n", st.sim_n, "number of observations");
    sim->add_option("--burn-in", [&st](const std::vector<std::string>& v) {
        st.sim_burn = static_cast<std::size_t>(std::stoull(v.at(0)));
        return true;
    }, "burn-in length (default max(1000, 50p))");
    sim->add_option("--seed", st.sim_seed, "master seed");

    auto* tom = app.add_subcommand("test-omega", "Omega-square symmetry test on residuals or a series file");
    tom->add_option("--input", st.input_path, "newline-separated decimal file")->required();
    tom->add_flag("--precomputed-residuals", st.precomputed,
                  "input already holds residuals (skip the AR fit)");
    tom->add_option("--p", st.order, "AR order when fitting a series file");
    tom->add_option("--alpha", st.alpha, "test level");
    tom->add_option("--paths", st.sim_params.paths, "limit-simulation paths");
    tom->add_option("--grid", st.sim_params.grid, "limit-simulation grid");
    tom->add_option("--sim-seed", st.sim_params.seed, "limit-simulation seed");
    tom->add_option("--workers", st.workers, "worker threads");

    auto* tch = app.add_subcommand("test-chisq", "Chi-square symmetry test on residuals or a series file");
    tch->add_option("--input", st.input_path, "newline-separated decimal file")->required();
    tch->add_flag("--precomputed-residuals", st.precomputed,
                  "input already holds residuals (skip the AR fit)");
    tch->add_option("--p", st.order, "AR order when fitting a series file");
    tch->add_option("--alpha", st.alpha, "test level");
    tch->add_option("--cells", st.cells_text, "cuts, comma separated, starting at 0")->required();

    auto* crit = app.add_subcommand("critical-values", "Print or recompute the omega-square critical-value cache");
    crit->add_flag("--recompute", st.recompute, "simulate and overwrite the cached quantiles");
    crit->add_option("--alphas", st.alphas_text, "test levels to (re)compute");
    crit->add_option("--paths", st.sim_params.paths, "simulation paths");
    crit->add_option("--grid", st.sim_params.grid, "simulation grid");
    crit->add_option("--sim-seed", st.sim_params.seed, "simulation seed");
    crit->add_option("--workers", st.workers, "worker threads");

    auto* pow = app.add_subcommand("power", "Analytic power of the chi-square test; grid mode emits CSV");
    pow->add_option("--m", st.power_m, "degrees of freedom (cell count)");
    pow->add_option("--alpha", st.power_alpha, "test level");
    pow->add_option("--lambda2", st.power_lambda2, "noncentrality");
    pow->add_option("--config", st.config_path, "experiment config for the rho x gamma grid");
    pow->add_option("--rho-grid", st.rho_grid, "comma list of rho values");
    pow->add_option("--gamma-grid", st.gamma_grid, "comma list of gamma values");
    pow->add_flag("--empirical", st.empirical, "also run the Monte Carlo experiment per grid point");
    pow->add_option("--workers", st.workers, "worker threads");

    auto* exp = app.add_subcommand("experiment", "Run an experiment config; prints JSON unless --json/--csv are given");
    exp->add_option("--config", st.config_path, "experiment config file")->required();
    exp->add_option("--workers", st.workers, "worker threads");
    exp->add_option("--seed", [&st](const std::vector<std::string>& v) {
        st.seed_override = std::stoull(v.at(0));
        return true;
    }, "override the config master seed");
    exp->add_option("--json", st.json_dest, "write JSON result here ('-' for stdout)");
    exp->add_option("--csv", st.csv_dest, "write CSV result here ('-' for stdout)");

    std::vector<char*> argv;
    std::vector<std::string> storage = args;
    std::string prog = "arsym";
    argv.push_back(prog.data());
    for (auto& a : storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) return do_simulate(st, out);
        if (tom->parsed()) return do_test_omega(st, out);
        if (tch->parsed()) return do_test_chisq(st, out);
        if (crit->parsed()) return do_critical_values(st, out);
        if (pow->parsed()) return do_power(st, out);
        if (exp->parsed()) return do_experiment(st, out);
    } catch (const config_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const numeric_error& e) {
        err << "numeric error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
    err << "error: no subcommand given\n";
    return 1;
}

}  // namespace arsym
