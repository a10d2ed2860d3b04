#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "arsym/ar_process.hpp"
#include "arsym/errors.hpp"
#include "arsym/estimation.hpp"
#include "arsym/experiment.hpp"
#include "arsym/limit_laws.hpp"
#include "arsym/symmetry_stats.hpp"

namespace py = pybind11;
using namespace arsym;

namespace {

DistModel dist_from_str(const std::string& desc) { return parse_dist(desc); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "symmetry tests for the innovations of an autoregression";

    py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<numeric_error>(m, "NumericError", PyExc_RuntimeError);

    m.def(
        "simulate_ar",
        [](const std::vector<double>& coeffs, const std::string& innov,
           std::size_t n, std::uint64_t seed, std::optional<std::size_t> burn_in) {
            ARParams params{coeffs};
            if (!is_stationary(coeffs))
                throw invalid_parameter_error("coefficients are not stationary");
            DistModel d = dist_from_str(innov);
            validate_innovation_dist(d, "innov", false);
            std::size_t burn = burn_in ? *burn_in : default_burn_in(params.order());
            Series s = simulate_stationary(params, d, n, burn, seed);
            return py::make_tuple(s.presample, s.obs);
        },
        py::arg("coeffs"), py::arg("innov"), py::arg("n"), py::arg("seed"),
        py::arg("burn_in") = std::nullopt,
        "Simulate a stationary AR path; returns (presample, observations).");

    m.def(
        "ols_fit",
        [](const std::vector<double>& presample, const std::vector<double>& obs) {
            Series s{presample, obs};
            std::vector<double> coeffs = ols_estimate(s, s.p());
            ResidualSet res = residuals(s, coeffs);
            return py::make_tuple(coeffs, res.values);
        },
        py::arg("presample"), py::arg("obs"),
        "Least-squares AR fit; returns (coeffs, residuals).");

    m.def(
        "omega_sq",
        [](const std::vector<double>& values) {
            return omega_sq(make_residual_set(values));
        },
        py::arg("residuals"));

    m.def(
        "d_stat",
        [](const std::vector<double>& values) {
            return d_stat(make_residual_set(values));
        },
        py::arg("residuals"));

    m.def(
        "chi_sq",
        [](const std::vector<double>& values, const std::vector<double>& cuts) {
            CellCounts counts =
                cell_counts(make_residual_set(values), make_cell_partition(cuts));
            return py::make_tuple(chi_sq(counts), counts.nu_plus, counts.nu_minus);
        },
        py::arg("residuals"), py::arg("cuts"),
        "Chi-square cell statistic; returns (value, nu_plus, nu_minus).");

    m.def(
        "omega_critical_value",
        [](double alpha, std::size_t paths, std::size_t grid, std::uint64_t seed,
           unsigned workers) {
            OmegaSimParams sim;
            sim.paths = paths;
            sim.grid = grid;
            sim.seed = seed;
            return omega_limit_quantile(alpha, sim, workers);
        },
        py::arg("alpha"), py::arg("paths") = OmegaSimParams{}.paths,
        py::arg("grid") = OmegaSimParams{}.grid,
        py::arg("seed") = OmegaSimParams{}.seed, py::arg("workers") = 1);

    m.def(
        "chisq_critical_value",
        [](int m_cells, double alpha) { return chisq_quantile(m_cells, 1.0 - alpha); },
        py::arg("m"), py::arg("alpha"));

    m.def(
        "noncentral_chisq_cdf",
        [](int m_cells, double lambda2, double x) {
            return noncentral_chisq_cdf(NoncentralSpec{m_cells, lambda2}, x);
        },
        py::arg("m"), py::arg("lambda2"), py::arg("x"));

    m.def("asymptotic_power", &asymptotic_power, py::arg("m"), py::arg("alpha"),
          py::arg("lambda2"));

    m.def(
        "noncentrality",
        [](const std::vector<double>& cuts, const std::vector<double>& coeffs,
           const std::string& p_dist, const std::string& q_dist,
           const std::string& pi_dist, double rho, double gamma) {
            ChiSqAnalysisInput input{make_cell_partition(cuts),
                                     ARParams{coeffs},
                                     dist_from_str(p_dist),
                                     dist_from_str(q_dist),
                                     dist_from_str(pi_dist),
                                     rho,
                                     gamma};
            return noncentrality(input);
        },
        py::arg("cuts"), py::arg("coeffs"), py::arg("p_dist"), py::arg("q_dist"),
        py::arg("pi_dist"), py::arg("rho"), py::arg("gamma"));

    m.def(
        "run_experiment",
        [](const std::string& config_path, unsigned workers) {
            std::ifstream in(config_path);
            if (!in) throw config_error("cannot open config file: " + config_path);
            std::stringstream buf;
            buf << in.rdbuf();
            ExperimentConfig cfg = parse_config_text(buf.str());
            ExperimentResult result = run_experiment(cfg, workers);
            return to_json(result);
        },
        py::arg("config_path"), py::arg("workers") = 1,
        "Run an experiment config file; returns the result as a JSON string.");
}
