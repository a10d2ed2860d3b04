#include "arsym/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <limits>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "arsym/errors.hpp"
#include "arsym/util.hpp"

namespace arsym {

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::level_omega: return "level_omega";
        case Scenario::power_omega: return "power_omega";
        case Scenario::level_chisq: return "level_chisq";
        case Scenario::power_chisq: return "power_chisq";
        case Scenario::robustness: return "robustness";
        case Scenario::consistency: return "consistency";
    }
    return "?";
}

Scenario parse_scenario(const std::string& name) {
    for (Scenario s : {Scenario::level_omega, Scenario::power_omega, Scenario::level_chisq,
                       Scenario::power_chisq, Scenario::robustness, Scenario::consistency})
        if (name == scenario_name(s)) return s;
    throw config_error("unknown scenario '" + name + "'");
}

namespace {

constexpr const char* kConfigHeader = "arsym-experiment v1";
// Stream index for the drifted-limit Monte Carlo, far above any
// replication index.
constexpr std::uint64_t kDriftStream = std::numeric_limits<std::uint64_t>::max() - 1;

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double_field(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw config_error("config field '" + key + "' has a bad value '" + value + "'");
    }
}

std::uint64_t parse_u64_field(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw config_error("config field '" + key + "' has a bad value '" + value + "'");
    }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = strip(item);
        if (item.empty())
            throw config_error("config field '" + key + "' has an empty list entry");
        out.push_back(parse_double_field(key, item));
    }
    if (out.empty()) throw config_error("config field '" + key + "' must not be empty");
    return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    cfg.p_dist = make_normal(1.0);
    cfg.q_dist = make_normal(1.0);
    cfg.pi_dist = make_point_mass(0.0);

    bool saw_header = false, saw_scenario = false, saw_coeffs = false, saw_p = false;
    bool saw_q = false, saw_statistic = false;
    std::string section;
    std::string line;
    while (std::getline(in, line)) {
        line = strip(line);
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line != kConfigHeader)
                throw config_error(std::string("config must start with '") + kConfigHeader + "'");
            saw_header = true;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("malformed section header '" + line + "'");
            section = strip(line.substr(1, line.size() - 2));
            if (section != "model" && section != "p_dist" && section != "q_dist" &&
                section != "pi_dist" && section != "cells")
                throw config_error("unknown config section [" + section + "]");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("expected 'key = value', got '" + line + "'");
        std::string key = strip(line.substr(0, eq));
        std::string value = strip(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw config_error("expected 'key = value', got '" + line + "'");

        if (section.empty()) {
            if (key == "scenario") {
                cfg.scenario = parse_scenario(value);
                saw_scenario = true;
            } else if (key == "statistic") {
                if (value == "omega")
                    cfg.statistic = StatKind::omega;
                else if (value == "chisq")
                    cfg.statistic = StatKind::chisq;
                else
                    throw config_error("config field 'statistic' must be omega or chisq");
                saw_statistic = true;
            } else if (key == "rho") {
                cfg.rho = parse_double_field(key, value);
            } else if (key == "gamma") {
                cfg.gamma = parse_double_field(key, value);
            } else if (key == "n") {
                cfg.n = static_cast<std::size_t>(parse_u64_field(key, value));
            } else if (key == "replications") {
                cfg.replications = static_cast<std::size_t>(parse_u64_field(key, value));
            } else if (key == "alpha") {
                cfg.alpha = parse_double_field(key, value);
            } else if (key == "master_seed") {
                cfg.master_seed = parse_u64_field(key, value);
            } else if (key == "estimator") {
                cfg.estimator = value;
            } else if (key == "burn_in") {
                cfg.burn_in = static_cast<std::size_t>(parse_u64_field(key, value));
            } else {
                throw config_error("unknown top-level config key '" + key + "'");
            }
        } else if (section == "model") {
            if (key != "coeffs")
                throw config_error("unknown config key '" + key + "' in section [model]");
            cfg.model.coeffs = parse_double_list(key, value);
            saw_coeffs = true;
        } else if (section == "cells") {
            if (key != "cuts")
                throw config_error("unknown config key '" + key + "' in section [cells]");
            cfg.cells = parse_double_list(key, value);
        } else {
            if (key != "kind")
                throw config_error("unknown config key '" + key + "' in section [" + section + "]");
            DistModel d = parse_dist(value);
            if (section == "p_dist") {
                cfg.p_dist = d;
                saw_p = true;
            } else if (section == "q_dist") {
                cfg.q_dist = d;
                saw_q = true;
            } else {
                cfg.pi_dist = d;
            }
        }
    }
    if (!saw_header) throw config_error(std::string("config must start with '") + kConfigHeader + "'");
    if (!saw_scenario) throw config_error("config is missing required field 'scenario'");
    if (!saw_coeffs) throw config_error("config is missing required field 'coeffs' in [model]");
    if (!saw_p) throw config_error("config is missing required field 'kind' in [p_dist]");
    if (!saw_q) cfg.q_dist = cfg.p_dist;
    if (saw_statistic && cfg.scenario != Scenario::consistency)
        throw config_error("config field 'statistic' is only valid for the consistency scenario");
    return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

namespace {

void validate_common(const ExperimentConfig& cfg) {
    if (cfg.estimator != "ols")
        throw config_error("unknown estimator '" + cfg.estimator + "' (only ols is available)");
    if (cfg.replications < 1) throw config_error("replications must be >= 1");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw config_error("alpha must lie in (0,1)");
    if (!(cfg.rho >= 0.0)) throw config_error("rho must be >= 0");
    if (!(cfg.gamma >= 0.0)) throw config_error("gamma must be >= 0");
    if (cfg.model.coeffs.empty()) throw config_error("model coefficients must not be empty");
    if (!is_stationary(cfg.model.coeffs))
        throw config_error("model coefficients are not stationary");
    if (cfg.n < cfg.model.order() + 1) throw config_error("need n >= p + 1");
    validate_innovation_dist(cfg.p_dist, "p_dist", /*require_symmetric=*/true);
    validate_innovation_dist(cfg.q_dist, "q_dist", /*require_symmetric=*/false);
}

StatKind effective_statistic(const ExperimentConfig& cfg) {
    switch (cfg.scenario) {
        case Scenario::level_omega:
        case Scenario::power_omega:
            return StatKind::omega;
        case Scenario::level_chisq:
        case Scenario::power_chisq:
        case Scenario::robustness:
            return StatKind::chisq;
        case Scenario::consistency:
            return cfg.statistic;
    }
    return StatKind::omega;
}

struct RepOutcome {
    double stat = 0.0;
    bool failed = false;
};

// Simulates one replication path; consistency draws innovations from the
// fixed alternative Q, every other scenario from the local mixture.
Series simulate_rep(const ExperimentConfig& cfg, std::uint64_t rep_seed,
                    std::size_t burn) {
    std::uint64_t sim_seed = derive_seed(rep_seed, 0);
    if (cfg.scenario == Scenario::consistency)
        return simulate_stationary(cfg.model, cfg.q_dist, cfg.n, burn, sim_seed);
    MixtureAlternative mix{cfg.p_dist, cfg.q_dist, cfg.rho};
    return simulate_stationary(cfg.model, mix, cfg.n, burn, sim_seed);
}

template <typename StatFn>
std::vector<RepOutcome> run_replications(const ExperimentConfig& cfg, unsigned workers,
                                         bool contaminated, const StatFn& stat_fn) {
    const std::size_t burn = cfg.burn_in.value_or(default_burn_in(cfg.model.order()));
    const std::size_t p = cfg.model.order();
    std::vector<RepOutcome> out(cfg.replications);
    std::mutex err_mu;
    std::exception_ptr err;
    std::atomic<bool> bail{false};
    parallel_chunks(cfg.replications, workers, [&](std::size_t lo, std::size_t hi) {
        try {
            for (std::size_t r = lo; r < hi && !bail.load(std::memory_order_relaxed); ++r) {
                std::uint64_t rep_seed = derive_seed(cfg.master_seed, r);
                Series s = simulate_rep(cfg, rep_seed, burn);
                if (contaminated && cfg.gamma > 0.0) {
                    ContaminationModel cm{cfg.gamma, cfg.pi_dist};
                    s = contaminate(s, cm, derive_seed(rep_seed, 1));
                }
                try {
                    auto beta = ols_estimate(s, p);
                    auto rs = residuals(s, beta);
                    out[r].stat = stat_fn(rs);
                } catch (const numeric_error&) {
                    // degenerate design or empty positive cell: recorded,
                    // excluded from the rate, and checked against the
                    // abort threshold afterwards
                    out[r].failed = true;
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> g(err_mu);
            if (!err) err = std::current_exception();
            bail.store(true, std::memory_order_relaxed);
        }
    });
    if (err) std::rethrow_exception(err);
    return out;
}

double upper_quantile_sorted(const std::vector<double>& sorted, double q) {
    std::size_t k = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(sorted.size())));
    k = std::min(std::max<std::size_t>(k, 1), sorted.size());
    return sorted[k - 1];
}

ExperimentResult aggregate(const ExperimentConfig& cfg, StatKind kind,
                           const std::vector<RepOutcome>& outcomes,
                           double critical_value) {
    ExperimentResult res;
    res.config = cfg;
    res.statistic = kind;
    res.critical_value = critical_value;

    std::vector<double> stats;
    stats.reserve(outcomes.size());
    std::size_t rejects = 0;
    for (const auto& o : outcomes) {
        if (o.failed) {
            ++res.failed_replications;
            continue;
        }
        stats.push_back(o.stat);
        if (o.stat > critical_value) ++rejects;
    }
    res.valid_replications = stats.size();
    if (res.failed_replications * 100 > cfg.replications)
        throw excessive_empty_cells_error(
            "more than 1% of replications produced an undefined statistic (" +
            std::to_string(res.failed_replications) + " of " +
            std::to_string(cfg.replications) + "); coarsen the partition or enlarge n");
    if (stats.empty()) throw numeric_error("no replication produced a statistic");

    res.rejection_rate = static_cast<double>(rejects) / static_cast<double>(stats.size());
    res.rejection_stderr = std::sqrt(res.rejection_rate * (1.0 - res.rejection_rate) /
                                     static_cast<double>(stats.size()));

    std::sort(stats.begin(), stats.end());
    res.stats.count = stats.size();
    double sum = 0.0;
    for (double v : stats) sum += v;
    res.stats.mean = sum / static_cast<double>(stats.size());
    res.stats.min = stats.front();
    res.stats.max = stats.back();
    res.stats.q25 = upper_quantile_sorted(stats, 0.25);
    res.stats.median = upper_quantile_sorted(stats, 0.5);
    res.stats.q75 = upper_quantile_sorted(stats, 0.75);
    return res;
}

CellPartition resolve_cells(const ExperimentConfig& cfg) {
    if (cfg.cells.empty()) return equal_prob_cells(cfg.p_dist, 4);
    return make_cell_partition(cfg.cells);
}

}  // namespace

ExperimentResult run_omega_experiment(const ExperimentConfig& cfg, unsigned workers) {
    validate_common(cfg);
    if (cfg.scenario != Scenario::level_omega && cfg.scenario != Scenario::power_omega &&
        cfg.scenario != Scenario::consistency)
        throw config_error("run_omega_experiment: scenario must be level_omega, power_omega "
                           "or consistency");
    if (cfg.gamma != 0.0)
        throw config_error("the omega-square pipeline works on clean data; gamma must be 0");

    const double crit = omega_limit_quantile(cfg.alpha, OmegaSimParams{}, workers);
    auto outcomes = run_replications(cfg, workers, /*contaminated=*/false,
                                     [](const ResidualSet& rs) { return omega_sq(rs); });
    ExperimentConfig echo = cfg;
    echo.statistic = StatKind::omega;
    echo.burn_in = cfg.burn_in.value_or(default_burn_in(cfg.model.order()));
    ExperimentResult res = aggregate(echo, StatKind::omega, outcomes, crit);

    if (cfg.scenario == Scenario::level_omega) {
        res.predicted = cfg.alpha;
    } else if (cfg.scenario == Scenario::power_omega) {
        DriftSpec drift{cfg.rho, cfg.p_dist, cfg.q_dist};
        auto sample = omega_limit_sample(drift, 4096, 100000,
                                         derive_seed(cfg.master_seed, kDriftStream), workers);
        std::size_t above = 0;
        for (double v : sample)
            if (v > crit) ++above;
        res.predicted = static_cast<double>(above) / static_cast<double>(sample.size());
    }
    return res;
}

namespace {

struct ChiSqRun {
    ExperimentResult result;
    CellPartition cells;
    std::vector<RepOutcome> outcomes;
};

ChiSqRun run_chisq_core(const ExperimentConfig& cfg, unsigned workers) {
    validate_common(cfg);
    if (cfg.scenario != Scenario::level_chisq && cfg.scenario != Scenario::power_chisq &&
        cfg.scenario != Scenario::robustness && cfg.scenario != Scenario::consistency)
        throw config_error("run_chisq_experiment: scenario must be level_chisq, power_chisq, "
                           "robustness or consistency");
    CellPartition cells = resolve_cells(cfg);
    const int m = static_cast<int>(cells.m());
    const double crit = chisq_quantile(m, 1.0 - cfg.alpha);
    auto outcomes = run_replications(cfg, workers, /*contaminated=*/true,
                                     [&cells](const ResidualSet& rs) {
                                         return chi_sq(cell_counts(rs, cells));
                                     });
    ExperimentConfig echo = cfg;
    echo.statistic = StatKind::chisq;
    echo.cells = cells.cuts;
    echo.burn_in = cfg.burn_in.value_or(default_burn_in(cfg.model.order()));
    ChiSqRun out{aggregate(echo, StatKind::chisq, outcomes, crit), cells,
                 std::move(outcomes)};
    if (cfg.scenario != Scenario::consistency) {
        ChiSqAnalysisInput input{cells,      cfg.model, cfg.p_dist, cfg.q_dist,
                                 cfg.pi_dist, cfg.rho,   cfg.gamma};
        out.result.predicted = asymptotic_power(m, cfg.alpha, noncentrality(input));
    }
    return out;
}

}  // namespace

ExperimentResult run_chisq_experiment(const ExperimentConfig& cfg, unsigned workers) {
    return run_chisq_core(cfg, workers).result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned workers) {
    return effective_statistic(cfg) == StatKind::omega ? run_omega_experiment(cfg, workers)
                                                       : run_chisq_experiment(cfg, workers);
}

double run_cdf_distance(const ExperimentConfig& cfg, unsigned workers) {
    ChiSqRun run = run_chisq_core(cfg, workers);
    ChiSqAnalysisInput input{run.cells,   cfg.model, cfg.p_dist, cfg.q_dist,
                             cfg.pi_dist, cfg.rho,   cfg.gamma};
    const int m = static_cast<int>(run.cells.m());
    NoncentralSpec limit{m, noncentrality(input)};

    std::vector<double> stats;
    stats.reserve(run.outcomes.size());
    for (const auto& o : run.outcomes)
        if (!o.failed) stats.push_back(o.stat);
    std::sort(stats.begin(), stats.end());

    const double x_hi = noncentral_chisq_quantile(limit, 0.9999);
    double sup = 0.0;
    for (int i = 0; i < 512; ++i) {
        double x = x_hi * static_cast<double>(i + 1) / 512.0;
        auto it = std::upper_bound(stats.begin(), stats.end(), x);
        double ecdf = static_cast<double>(it - stats.begin()) /
                      static_cast<double>(stats.size());
        sup = std::max(sup, std::fabs(ecdf - noncentral_chisq_cdf(limit, x)));
    }
    return sup;
}

namespace {

nlohmann::json config_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["scenario"] = scenario_name(cfg.scenario);
    j["statistic"] = cfg.statistic == StatKind::omega ? "omega" : "chisq";
    j["coeffs"] = cfg.model.coeffs;
    j["p_dist"] = describe(cfg.p_dist);
    j["q_dist"] = describe(cfg.q_dist);
    j["pi_dist"] = describe(cfg.pi_dist);
    j["rho"] = cfg.rho;
    j["gamma"] = cfg.gamma;
    j["n"] = cfg.n;
    j["replications"] = cfg.replications;
    j["alpha"] = cfg.alpha;
    j["cells"] = cfg.cells;
    j["master_seed"] = cfg.master_seed;
    j["estimator"] = cfg.estimator;
    j["burn_in"] = cfg.burn_in.value_or(default_burn_in(cfg.model.order()));
    return j;
}

}  // namespace

std::string to_json(const ExperimentResult& r) {
    nlohmann::json j;
    j["schema"] = "arsym-experiment-result v1";
    j["config"] = config_json(r.config);
    j["statistic"] = r.statistic == StatKind::omega ? "omega" : "chisq";
    j["critical_value"] = r.critical_value;
    j["rejection_rate"] = r.rejection_rate;
    j["rejection_stderr"] = r.rejection_stderr;
    if (r.predicted)
        j["predicted"] = *r.predicted;
    else
        j["predicted"] = nullptr;
    j["statistics"] = {{"count", r.stats.count},   {"mean", r.stats.mean},
                       {"min", r.stats.min},       {"q25", r.stats.q25},
                       {"median", r.stats.median}, {"q75", r.stats.q75},
                       {"max", r.stats.max}};
    j["failed_replications"] = r.failed_replications;
    j["valid_replications"] = r.valid_replications;
    return j.dump(2) + "\n";
}

std::string csv_header() {
    return "scenario,statistic,p,n,replications,valid_replications,failed_replications,"
           "alpha,rho,gamma,m,critical_value,rejection_rate,rejection_stderr,predicted,"
           "stat_mean,stat_min,stat_q25,stat_median,stat_q75,stat_max,master_seed";
}

std::string to_csv_row(const ExperimentResult& r) {
    const ExperimentConfig& c = r.config;
    std::string row;
    row += scenario_name(c.scenario);
    row += ',';
    row += r.statistic == StatKind::omega ? "omega" : "chisq";
    row += ',';
    row += std::to_string(c.model.order());
    row += ',';
    row += std::to_string(c.n);
    row += ',';
    row += std::to_string(c.replications);
    row += ',';
    row += std::to_string(r.valid_replications);
    row += ',';
    row += std::to_string(r.failed_replications);
    row += ',';
    row += fmt_double(c.alpha);
    row += ',';
    row += fmt_double(c.rho);
    row += ',';
    row += fmt_double(c.gamma);
    row += ',';
    if (r.statistic == StatKind::chisq) row += std::to_string(c.cells.size());
    row += ',';
    row += fmt_double(r.critical_value);
    row += ',';
    row += fmt_double(r.rejection_rate);
    row += ',';
    row += fmt_double(r.rejection_stderr);
    row += ',';
    if (r.predicted) row += fmt_double(*r.predicted);
    row += ',';
    row += fmt_double(r.stats.mean);
    row += ',';
    row += fmt_double(r.stats.min);
    row += ',';
    row += fmt_double(r.stats.q25);
    row += ',';
    row += fmt_double(r.stats.median);
    row += ',';
    row += fmt_double(r.stats.q75);
    row += ',';
    row += fmt_double(r.stats.max);
    row += ',';
    row += std::to_string(c.master_seed);
    return row;
}

}  // namespace arsym
