#pragma once

#include <cstddef>
#include <vector>

namespace arsym {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile; rational approximation refined by one Halley
// step against normal_cdf, absolute error well below 1e-10 on (0,1).
double normal_quantile(double t);

// Regularized lower incomplete gamma P(a, x), relative error <= 1e-12.
// Series expansion for x < a + 1, Lentz continued fraction otherwise.
double regularized_gamma_p(double a, double x);

// Central chi-square CDF with k degrees of freedom (k need not be integer).
double central_chisq_cdf(double k, double x);

// Nodes and weights of the N-point Gauss-Legendre rule on (0, 1).
// Computed once per N and cached; thread-safe.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const QuadratureRule& gauss_legendre_01(std::size_t n);

}  // namespace arsym
