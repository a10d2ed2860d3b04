#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "arsym/distributions.hpp"

namespace arsym {

// Coefficients b1..bp of a stationary autoregression
//   u_t = b1 u_{t-1} + ... + bp u_{t-p} + e_t.
struct ARParams {
    std::vector<double> coeffs;

    std::size_t order() const { return coeffs.size(); }
};

// Observed path: p presample values u_{1-p}..u_0 followed by n
// observations u_1..u_n.
struct Series {
    std::vector<double> presample;
    std::vector<double> obs;

    std::size_t p() const { return presample.size(); }
    std::size_t n() const { return obs.size(); }
};

// Additive gross errors: each point of the path independently receives an
// outlier drawn from outlier_dist with probability min{1, gamma/sqrt(n)}.
struct ContaminationModel {
    double gamma = 0.0;
    DistModel outlier_dist;
};

// Spectral radius of the companion matrix of the coefficient vector.
double companion_spectral_radius(const std::vector<double>& coeffs);

// True iff the spectral radius is < 1 - 1e-8; the margin rejects
// numerically-unit roots.
bool is_stationary(const std::vector<double>& coeffs);

std::size_t default_burn_in(std::size_t p);

// Iterates the recursion from an all-zero state, discards burn_in values,
// labels the next p as presample and the following n as observations.
// Deterministic for fixed inputs.
Series simulate_stationary(const ARParams& params, const DistModel& innov,
                           std::size_t n, std::size_t burn_in, std::uint64_t seed);
Series simulate_stationary(const ARParams& params, const MixtureAlternative& innov,
                           std::size_t n, std::size_t burn_in, std::uint64_t seed);

// Applies the contamination scheme to all p + n points, presample included.
Series contaminate(const Series& series, const ContaminationModel& model,
                   std::uint64_t seed);

}  // namespace arsym
