#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "arsym/rng.hpp"

namespace arsym {

// Distribution catalogue used for the null law P, the asymmetric
// alternative Q and the outlier law Pi.
//
//   normal(sigma)                  zero-mean Gaussian
//   uniform(a,b)                   uniform on [a,b]
//   centered_exponential(rate)     law of E - 1/rate, E ~ Exp(rate); zero
//                                  mean, smooth and asymmetric
//   two_point(v1,w1,v2,w2)         discrete on {v1,v2} with weights w1,w2
//   point_mass(v)                  degenerate at v
//   shifted_mixture(w,m1,s1,m2,s2) two-component normal mixture
//                                  w N(m1,s1^2) + (1-w) N(m2,s2^2),
//                                  shifted so its mean is exactly 0
enum class DistKind {
    normal,
    uniform,
    centered_exponential,
    two_point,
    point_mass,
    shifted_mixture,
};

struct DistModel {
    DistKind kind;
    std::array<double, 5> par{};  // meaning depends on kind, see factories
};

DistModel make_normal(double sigma);
DistModel make_uniform(double a, double b);
DistModel make_centered_exponential(double rate);
DistModel make_two_point(double v1, double w1, double v2, double w2);
DistModel make_point_mass(double v);
DistModel make_shifted_mixture(double w, double m1, double s1, double m2, double s2);

double cdf(const DistModel& d, double x);

// Generalized inverse inf{x : cdf(x) >= t}, t in (0,1).
double quantile(const DistModel& d, double t);

// One variate by CDF inversion; consumes exactly one uniform.
double draw(const DistModel& d, Rng& rng);

double dist_mean(const DistModel& d);
double dist_variance(const DistModel& d);
bool is_symmetric(const DistModel& d);
bool is_continuous(const DistModel& d);

// "kind(p1,p2,...)" textual form; parse_dist accepts the same syntax.
std::string describe(const DistModel& d);
DistModel parse_dist(const std::string& text);

// Local alternative: innovations follow (1-r)P + rQ where the effective
// weight r shrinks with the sample size.
struct MixtureAlternative {
    DistModel p_dist;  // symmetric about 0
    DistModel q_dist;  // zero mean, asymmetric
    double rho = 0.0;
};

// min{1, rho / sqrt(n)}.
double effective_weight(double rho, std::size_t n);

// Component flag first, then the component draw; consumes two uniforms
// regardless of which component is selected.
double draw_mixture(const MixtureAlternative& mix, std::size_t n, Rng& rng);

// Checks the requirements for an innovation law: zero mean, finite
// variance; when require_symmetric also cdf symmetry about 0.
// Throws invalid_parameter_error with the offending role name.
void validate_innovation_dist(const DistModel& d, const std::string& role,
                              bool require_symmetric);

}  // namespace arsym
