#pragma once

#include <cstddef>
#include <vector>

#include "arsym/ar_process.hpp"

namespace arsym {

// Residuals e_t = u_t - b1 u_{t-1} - ... - bp u_{t-p} together with their
// sorted copy; the sorted order backs the EDF and the ordered-residual
// statistics.
struct ResidualSet {
    std::vector<double> values;
    std::vector<double> sorted_values;

    std::size_t n() const { return values.size(); }
};

ResidualSet make_residual_set(std::vector<double> values);

// Least-squares fit of the AR coefficients from the normal equations.
// Throws degenerate_design_error when the p x p design matrix is singular
// within a relative tolerance of 1e-12.
std::vector<double> ols_estimate(const Series& series, std::size_t p);

ResidualSet residuals(const Series& series, const std::vector<double>& coeffs);

// Empirical distribution function of the residuals at x (weak inequality).
double edf_eval(const ResidualSet& res, double x);

}  // namespace arsym
