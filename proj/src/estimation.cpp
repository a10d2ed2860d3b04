#include "arsym/estimation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "arsym/errors.hpp"

namespace arsym {

ResidualSet make_residual_set(std::vector<double> values) {
    if (values.empty())
        throw invalid_parameter_error("make_residual_set: need at least one residual");
    for (double v : values)
        if (!std::isfinite(v))
            throw invalid_parameter_error("make_residual_set: non-finite residual");
    ResidualSet r;
    r.sorted_values = values;
    r.values = std::move(values);
    std::stable_sort(r.sorted_values.begin(), r.sorted_values.end());
    return r;
}

namespace {

// u_{t-j} for t = 1..n, j = 0..p indexing into presample/obs.
double lagged(const Series& s, std::size_t t, std::size_t j) {
    // value at time index t - j where t is 1-based over the observations
    std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(j);
    if (idx >= 1) return s.obs[static_cast<std::size_t>(idx - 1)];
    return s.presample[s.p() + static_cast<std::size_t>(idx) - 1];
}

}  // namespace

std::vector<double> ols_estimate(const Series& series, std::size_t p) {
    if (p < 1) throw invalid_parameter_error("ols_estimate: p must be >= 1");
    if (series.p() != p)
        throw invalid_parameter_error("ols_estimate: presample length does not match p");
    const std::size_t n = series.n();
    if (n < p + 1) throw invalid_parameter_error("ols_estimate: need n >= p + 1");

    const auto pe = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(pe, pe);
    Eigen::VectorXd xty = Eigen::VectorXd::Zero(pe);
    for (std::size_t t = 1; t <= n; ++t) {
        for (std::size_t j = 1; j <= p; ++j) {
            double xj = lagged(series, t, j);
            xty(static_cast<Eigen::Index>(j - 1)) += xj * series.obs[t - 1];
            for (std::size_t k = j; k <= p; ++k)
                xtx(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(k - 1)) +=
                    xj * lagged(series, t, k);
        }
    }
    xtx = xtx.selfadjointView<Eigen::Upper>();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(xtx);
    double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    double lmin = es.eigenvalues().minCoeff();
    if (!(lmax > 0.0) || lmin <= 1e-12 * lmax)
        throw degenerate_design_error("ols_estimate: singular normal equations");
    Eigen::VectorXd beta = es.eigenvectors() *
                           (es.eigenvalues().cwiseInverse().asDiagonal() *
                            (es.eigenvectors().transpose() * xty));
    return std::vector<double>(beta.data(), beta.data() + p);
}

ResidualSet residuals(const Series& series, const std::vector<double>& coeffs) {
    const std::size_t p = series.p();
    if (coeffs.size() != p)
        throw invalid_parameter_error("residuals: coefficient count does not match presample length");
    const std::size_t n = series.n();
    std::vector<double> vals(n);
    for (std::size_t t = 1; t <= n; ++t) {
        double e = series.obs[t - 1];
        for (std::size_t j = 1; j <= p; ++j) e -= coeffs[j - 1] * lagged(series, t, j);
        vals[t - 1] = e;
    }
    return make_residual_set(std::move(vals));
}

double edf_eval(const ResidualSet& res, double x) {
    const auto& s = res.sorted_values;
    auto it = std::upper_bound(s.begin(), s.end(), x);
    return static_cast<double>(it - s.begin()) / static_cast<double>(s.size());
}

}  // namespace arsym
