#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "arsym/limit_laws.hpp"

namespace arsym {

enum class Scenario {
    level_omega,
    power_omega,
    level_chisq,
    power_chisq,
    robustness,
    consistency,
};

// Which statistic a scenario computes; consistency runs admit either.
enum class StatKind { omega, chisq };

const char* scenario_name(Scenario s);
Scenario parse_scenario(const std::string& name);

struct ExperimentConfig {
    Scenario scenario = Scenario::level_omega;
    // statistic is only consulted for the consistency scenario; the other
    // scenarios imply it.
    StatKind statistic = StatKind::omega;
    ARParams model;
    DistModel p_dist;
    DistModel q_dist;
    DistModel pi_dist;
    double rho = 0.0;
    double gamma = 0.0;
    std::size_t n = 500;
    std::size_t replications = 2000;
    double alpha = 0.05;
    std::vector<double> cells;  // empty means the equal-probability default
    std::uint64_t master_seed = 1;
    std::string estimator = "ols";
    std::optional<std::size_t> burn_in;  // default max(1000, 50 p)
};

struct StatSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double min = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double max = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;  // echo with resolved cells and burn-in
    StatKind statistic = StatKind::omega;
    double critical_value = 0.0;
    double rejection_rate = 0.0;
    double rejection_stderr = 0.0;
    std::optional<double> predicted;
    StatSummary stats;
    std::size_t failed_replications = 0;
    std::size_t valid_replications = 0;
};

// Reads the versioned "arsym-experiment v1" key-value format; throws
// config_error naming the offending line or field.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_text(const std::string& text);

// Clean-data pipeline: mixture innovations, AR path, least squares,
// omega-square residual statistic against the simulated limit quantile.
// Worker count never affects the result.
ExperimentResult run_omega_experiment(const ExperimentConfig& cfg, unsigned workers = 1);

// Contaminated pipeline: mixture innovations, AR path, additive outliers,
// least squares on the contaminated path, chi-square cell statistic
// against the central chi-square quantile.
ExperimentResult run_chisq_experiment(const ExperimentConfig& cfg, unsigned workers = 1);

// Dispatches on scenario (and statistic for consistency runs).
ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned workers = 1);

// Sup distance over a 512-point grid between the empirical CDF of the
// chi-square statistic and its predicted noncentral limit.
double run_cdf_distance(const ExperimentConfig& cfg, unsigned workers = 1);

std::string to_json(const ExperimentResult& r);
std::string csv_header();
std::string to_csv_row(const ExperimentResult& r);

}  // namespace arsym
