#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arsym/ar_process.hpp"
#include "arsym/symmetry_stats.hpp"

namespace arsym {

// Drift of the limiting process under the local alternative:
// delta(t) = rho [Q(P^{ -1}(t)) - t].
struct DriftSpec {
    double rho = 0.0;
    DistModel p_dist;
    DistModel q_dist;
};

struct NoncentralSpec {
    int m = 1;
    double lambda2 = 0.0;
};

// Everything the chi-square power analysis needs: partition, AR
// coefficients, null law P, alternative Q, outlier law Pi and the local
// intensities rho (asymmetry) and gamma (contamination).
struct ChiSqAnalysisInput {
    CellPartition cells;
    ARParams coeffs;
    DistModel p_dist;
    DistModel q_dist;
    DistModel pi_dist;
    double rho = 0.0;
    double gamma = 0.0;
};

struct CellProbs {
    std::vector<double> plus;
    std::vector<double> minus;
};

double delta_shift(const DriftSpec& spec, double t);

// Residual-EDF shift caused by contamination:
//   Delta(x, Pi) = sum_{j=0..p} [ E P(x + b_j xi) - P(x) ],  b_0 = -1.
// The expectation over xi ~ Pi is an exact finite sum for discrete Pi and
// 256-node Gauss-Legendre quadrature on the quantile scale otherwise.
double drift_Delta(double x, const ARParams& coeffs, const DistModel& p_dist,
                   const DistModel& pi_dist);

// Per-cell contamination shifts
//   delta_j = Delta(x_j) - Delta(x_{j-1}) - [Delta(-x_{j-1}) - Delta(-x_j)]
// with Delta(+-inf) = 0.
std::vector<double> delta_cells(const ChiSqAnalysisInput& input);

// Probabilities of the positive and mirrored negative cells under dist.
// With as_null set, requires every positive-cell probability > 0.
CellProbs cell_probs(const CellPartition& cells, const DistModel& dist,
                     bool as_null = false);

// Noncentrality of the limiting chi-square law:
//   lambda^2 = sum_j [ rho (q_j+ - q_j-) + gamma delta_j ]^2 / (2 p_j+).
double noncentrality(const ChiSqAnalysisInput& input);

// Noncentral chi-square CDF via the Poisson mixture of central CDFs;
// Poisson tail truncated below 1e-12, absolute error <= 1e-9.
double noncentral_chisq_cdf(const NoncentralSpec& spec, double x);

// Central chi-square quantile, |cdf(result) - prob| <= 1e-9.
double chisq_quantile(int m, double prob);

// Quantile of the noncentral law, same bracketed bisection.
double noncentral_chisq_quantile(const NoncentralSpec& spec, double prob);

// W = 1 - F_m(chi_{1-alpha}(m), lambda^2).
double asymptotic_power(int m, double alpha, double lambda2);

// Simulated distribution of the omega-square limit: for each path a
// Brownian bridge v on a uniform grid, w(t) = v(t) + v(1-t) plus the drift
// term delta(t) + delta(1-t) when given, integrated as trapezoid of w^2.
// Per-path seeds are derived from seed, so the result does not depend on
// the worker count.
std::vector<double> omega_limit_sample(const std::optional<DriftSpec>& drift,
                                       std::size_t grid_size, std::size_t paths,
                                       std::uint64_t seed, unsigned workers = 1);

// Pinned simulation settings behind the published critical values.
struct OmegaSimParams {
    std::size_t paths = 200000;
    std::size_t grid = 4096;
    std::uint64_t seed = 20250101;
};

// Empirical (1-alpha) quantile of the null omega-square limit sample.
// Values are cached in a versioned text table; the cache directory is
// taken from the ARSYM_CACHE_DIR environment variable (default "data").
// On a cache miss the value is simulated and the table updated.
double omega_limit_quantile(double alpha, const OmegaSimParams& sim = {},
                            unsigned workers = 1);

// Cache plumbing, exposed for the CLI.
std::string omega_cache_path();
struct OmegaCacheRow {
    double alpha;
    std::size_t paths;
    std::size_t grid;
    std::uint64_t seed;
    double value;
};
std::vector<OmegaCacheRow> load_omega_cache(const std::string& path);
void store_omega_cache(const std::string& path, const std::vector<OmegaCacheRow>& rows);

}  // namespace arsym
