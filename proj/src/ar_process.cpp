#include "arsym/ar_process.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "arsym/errors.hpp"

namespace arsym {

double companion_spectral_radius(const std::vector<double>& coeffs) {
    if (coeffs.empty())
        throw invalid_parameter_error("companion_spectral_radius: empty coefficients");
    for (double c : coeffs)
        if (!std::isfinite(c))
            throw invalid_parameter_error("companion_spectral_radius: non-finite coefficient");
    const auto p = static_cast<Eigen::Index>(coeffs.size());
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) comp(0, j) = coeffs[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 1; i < p; ++i) comp(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stationary(const std::vector<double>& coeffs) {
    return companion_spectral_radius(coeffs) < 1.0 - 1e-8;
}

std::size_t default_burn_in(std::size_t p) { return std::max<std::size_t>(1000, 50 * p); }

namespace {

template <typename Sampler>
Series simulate_impl(const ARParams& params, Sampler&& next_innovation,
                     std::size_t n, std::size_t burn_in) {
    if (!is_stationary(params.coeffs))
        throw invalid_parameter_error("simulate_stationary: coefficients are not stationary");
    const std::size_t p = params.order();
    if (n < p + 1)
        throw invalid_parameter_error("simulate_stationary: need n >= p + 1");
    const std::size_t total = burn_in + p + n;
    std::vector<double> path(total);
    for (std::size_t t = 0; t < total; ++t) {
        double v = next_innovation();
        for (std::size_t j = 0; j < p; ++j)
            if (t > j) v += params.coeffs[j] * path[t - 1 - j];
        path[t] = v;
    }
    Series out;
    out.presample.assign(path.begin() + static_cast<std::ptrdiff_t>(burn_in),
                         path.begin() + static_cast<std::ptrdiff_t>(burn_in + p));
    out.obs.assign(path.begin() + static_cast<std::ptrdiff_t>(burn_in + p), path.end());
    return out;
}

}  // namespace

Series simulate_stationary(const ARParams& params, const DistModel& innov,
                           std::size_t n, std::size_t burn_in, std::uint64_t seed) {
    Rng rng(seed);
    return simulate_impl(params, [&] { return draw(innov, rng); }, n, burn_in);
}

Series simulate_stationary(const ARParams& params, const MixtureAlternative& innov,
                           std::size_t n, std::size_t burn_in, std::uint64_t seed) {
    Rng rng(seed);
    return simulate_impl(params, [&] { return draw_mixture(innov, n, rng); }, n, burn_in);
}

Series contaminate(const Series& series, const ContaminationModel& model,
                   std::uint64_t seed) {
    if (!(model.gamma >= 0.0))
        throw invalid_parameter_error("contaminate: gamma must be >= 0");
    if (model.gamma == 0.0) return series;
    const double g = effective_weight(model.gamma, series.n());
    Series out = series;
    Rng rng(seed);
    auto corrupt = [&](double& v) {
        if (rng.uniform01() < g) v += draw(model.outlier_dist, rng);
    };
    for (double& v : out.presample) corrupt(v);
    for (double& v : out.obs) corrupt(v);
    return out;
}

}  // namespace arsym
