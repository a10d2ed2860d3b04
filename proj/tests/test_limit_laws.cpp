#include "doctest.h"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "arsym/errors.hpp"
#include "arsym/limit_laws.hpp"
#include "arsym/rng.hpp"
#include "arsym/special_functions.hpp"
#include "test_support.hpp"

using namespace arsym;
using test_support::EnvGuard;

namespace {

ChiSqAnalysisInput analysis_input(std::vector<double> cuts, std::vector<double> coeffs,
                                  DistModel p, DistModel q, DistModel pi, double rho,
                                  double gamma) {
    return ChiSqAnalysisInput{make_cell_partition(std::move(cuts)),
                              ARParams{std::move(coeffs)},
                              std::move(p),
                              std::move(q),
                              std::move(pi),
                              rho,
                              gamma};
}

}  // namespace

TEST_SUITE("limit_laws") {

TEST_CASE("drift of the limit process") {
    DriftSpec spec{1.0, make_normal(1), make_centered_exponential(1)};
    CHECK(delta_shift(spec, 0.5) ==
          doctest::Approx(1.0 - std::exp(-1.0) - 0.5).epsilon(1e-12));
    // rho scales linearly
    DriftSpec twice{2.0, make_normal(1), make_centered_exponential(1)};
    CHECK(delta_shift(twice, 0.5) == doctest::Approx(2 * delta_shift(spec, 0.5)).epsilon(1e-13));
    // symmetric Q equal to P gives no drift
    DriftSpec null_spec{3.0, make_normal(1), make_normal(1)};
    for (double t : {0.1, 0.25, 0.5, 0.9})
        CHECK(std::fabs(delta_shift(null_spec, t)) <= 1e-14);
    CHECK_THROWS_AS(delta_shift(spec, 0.0), invalid_parameter_error);
    CHECK_THROWS_AS(delta_shift(spec, 1.0), invalid_parameter_error);
}

TEST_CASE("contamination shift of the residual edf") {
    // p=1, b1=0.5, Pi=point_mass(10), P=uniform(-1,1):
    // Delta(x) = [P(x-10) - P(x)] + [P(x+5) - P(x)]
    ARParams coeffs{{0.5}};
    DistModel p = make_uniform(-1, 1);
    DistModel pi = make_point_mass(10);
    CHECK(drift_Delta(0.0, coeffs, p, pi) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(drift_Delta(0.5, coeffs, p, pi) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(drift_Delta(-0.5, coeffs, p, pi) == doctest::Approx(0.5).epsilon(1e-14));

    // a zero outlier is no outlier
    for (double x : {-2.0, -0.3, 0.0, 1.7})
        CHECK(drift_Delta(x, coeffs, make_normal(1), make_point_mass(0)) ==
              doctest::Approx(0.0).epsilon(1e-13));

    // Delta vanishes far out in both tails
    DistModel pi2 = make_two_point(-5, 0.5, 5, 0.5);
    CHECK(std::fabs(drift_Delta(60.0, coeffs, make_normal(1), pi2)) <= 1e-12);
    CHECK(std::fabs(drift_Delta(-60.0, coeffs, make_normal(1), pi2)) <= 1e-12);
}

TEST_CASE("quadrature path agrees with a closed form") {
    // E Phi(x + b xi) with xi ~ N(0, s^2) equals Phi(x / sqrt(1 + b^2 s^2));
    // exercised through Delta with p=0 so only the b0 = -1 term remains
    // the 256-node rule on the quantile scale carries a 1e-6 error budget
    ARParams none{{}};
    for (double s : {0.5, 1.0, 2.0})
        for (double x : {-1.5, -0.2, 0.0, 0.4, 2.0}) {
            double expect = normal_cdf(x / std::sqrt(1.0 + s * s)) - normal_cdf(x);
            CHECK(std::fabs(drift_Delta(x, none, make_normal(1), make_normal(s)) -
                            expect) <= 1e-6);
        }
}

TEST_CASE("symmetric outlier laws produce no cell shifts") {
    for (const auto& pi : {make_normal(2), make_uniform(-3, 3),
                           make_two_point(-5, 0.5, 5, 0.5), make_point_mass(0)}) {
        auto input = analysis_input({0.0, 0.6, 1.0}, {0.5}, make_normal(1),
                                    make_centered_exponential(1), pi, 0.0, 1.0);
        for (double d : delta_cells(input)) CHECK(std::fabs(d) <= 1e-10);
    }
}

TEST_CASE("asymmetric outliers do shift the cells") {
    // an outlier on the scale of the cells moves mass across them
    auto input = analysis_input({0.0, 0.6, 1.0}, {0.5}, make_normal(1),
                                make_centered_exponential(1), make_point_mass(1), 0.0,
                                1.0);
    auto d = delta_cells(input);
    double norm = 0;
    for (double x : d) norm += std::fabs(x);
    CHECK(norm > 0.05);
}

TEST_CASE("huge outliers saturate and the first-order shift cancels") {
    // point_mass(10) throws every contaminated point far past the last
    // cut in both directions, so Delta is antisymmetric up to Gaussian
    // tail mass (the b1 term leaves Phi(-4) ~ 3e-5) and the delta vector
    // nearly collapses
    auto input = analysis_input({0.0, 0.6, 1.0}, {0.5}, make_normal(1),
                                make_centered_exponential(1), make_point_mass(10), 0.0,
                                1.0);
    for (double d : delta_cells(input)) CHECK(std::fabs(d) <= 1e-4);
}

TEST_CASE("cell probabilities") {
    CellProbs probs =
        cell_probs(make_cell_partition({0.0}), make_centered_exponential(1));
    REQUIRE(probs.plus.size() == 1);
    CHECK(probs.plus[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(probs.minus[0] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));

    CellProbs u = cell_probs(make_cell_partition({0.0, 0.5}), make_uniform(-1, 1));
    for (double v : {u.plus[0], u.plus[1], u.minus[0], u.minus[1]})
        CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

    // probabilities over all cells add to one
    CellProbs n = cell_probs(make_cell_partition({0.0, 0.3, 1.2}), make_normal(1));
    double total = 0;
    for (double v : n.plus) total += v;
    for (double v : n.minus) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    // a null law must charge every positive cell
    CHECK_THROWS_AS(cell_probs(make_cell_partition({0.0, 2.0}), make_uniform(-1, 1),
                               /*as_null=*/true),
                    invalid_parameter_error);
}

TEST_CASE("noncentrality closed form") {
    // m=1, rho=1, gamma=0, P=uniform(-1,1), Q=centered_exponential(1):
    // lambda^2 = (2 e^{-1} - 1)^2
    auto input = analysis_input({0.0}, {0.5}, make_uniform(-1, 1),
                                make_centered_exponential(1), make_point_mass(0), 1.0,
                                0.0);
    double expect = std::pow(2 * std::exp(-1.0) - 1.0, 2);
    CHECK(noncentrality(input) == doctest::Approx(expect).epsilon(1e-9));

    // symmetric alternative: no signal
    auto null_input = analysis_input({0.0, 0.7}, {0.5}, make_normal(1), make_normal(1),
                                     make_point_mass(0), 2.0, 0.0);
    CHECK(std::fabs(noncentrality(null_input)) <= 1e-12);

    // symmetric outliers alone: no signal either
    auto sym_pi = analysis_input({0.0, 0.7}, {0.5}, make_normal(1), make_normal(1),
                                 make_two_point(-5, 0.5, 5, 0.5), 0.0, 3.0);
    CHECK(std::fabs(noncentrality(sym_pi)) <= 1e-9);

    // rho scales lambda quadratically when gamma = 0
    auto one = analysis_input({0.0}, {0.5}, make_normal(1),
                              make_centered_exponential(1), make_point_mass(0), 1.0, 0.0);
    auto three = analysis_input({0.0}, {0.5}, make_normal(1),
                                make_centered_exponential(1), make_point_mass(0), 3.0, 0.0);
    CHECK(noncentrality(three) == doctest::Approx(9 * noncentrality(one)).epsilon(1e-10));
}

TEST_CASE("noncentral chi-square cdf") {
    // zero noncentrality reduces to the central law
    for (int m : {1, 3, 6})
        for (double x : {0.5, 2.0, 5.0, 11.0})
            CHECK(noncentral_chisq_cdf({m, 0.0}, x) ==
                  doctest::Approx(central_chisq_cdf(m, x)).epsilon(1e-12));
    CHECK(noncentral_chisq_cdf({1, 0.0}, 3.841458820694124) ==
          doctest::Approx(0.95).epsilon(1e-9));

    // monotone in x, decreasing in lambda^2
    NoncentralSpec spec{3, 2.0};
    double prev = -1;
    for (double x : {0.0, 1.0, 3.0, 7.0, 15.0}) {
        double v = noncentral_chisq_cdf(spec, x);
        CHECK(v >= prev);
        prev = v;
    }
    for (double x : {2.0, 6.0})
        CHECK(noncentral_chisq_cdf({3, 4.0}, x) < noncentral_chisq_cdf({3, 1.0}, x));

    // Monte Carlo cross-check: (Z + 1)^2 is noncentral chi-square with
    // m=1, lambda^2=1
    Rng rng(2024);
    const int n = 200000;
    for (double x : {1.0, 3.0, 6.0}) {
        int below = 0;
        for (int i = 0; i < n; ++i) {
            double z = normal_quantile(rng.uniform01()) + 1.0;
            if (z * z <= x) ++below;
        }
        double f = noncentral_chisq_cdf({1, 1.0}, x);
        double se = std::sqrt(f * (1 - f) / n);
        CHECK(std::fabs(below / static_cast<double>(n) - f) <= 3.5 * se);
    }
}

TEST_CASE("chi-square quantiles") {
    CHECK(chisq_quantile(1, 0.5) == doctest::Approx(0.454936).epsilon(1e-5));
    CHECK(chisq_quantile(1, 0.95) == doctest::Approx(3.841459).epsilon(1e-6));
    CHECK(chisq_quantile(3, 0.95) == doctest::Approx(7.814728).epsilon(1e-6));
    CHECK(chisq_quantile(2, 0.95) == doctest::Approx(-2 * std::log(0.05)).epsilon(1e-9));
    for (int m : {1, 2, 3, 4, 5, 6})
        for (double p : {0.1, 0.5, 0.9, 0.95, 0.99})
            CHECK(std::fabs(central_chisq_cdf(m, chisq_quantile(m, p)) - p) <= 1e-9);
    CHECK_THROWS_AS(chisq_quantile(0, 0.5), invalid_parameter_error);
    CHECK_THROWS_AS(chisq_quantile(3, 1.0), invalid_parameter_error);
}

TEST_CASE("noncentral quantile inverts the cdf") {
    for (double p : {0.2, 0.8, 0.95}) {
        NoncentralSpec spec{3, 4.0};
        double q = noncentral_chisq_quantile(spec, p);
        CHECK(std::fabs(noncentral_chisq_cdf(spec, q) - p) <= 1e-9);
    }
}

TEST_CASE("asymptotic power") {
    for (int m : {1, 3, 5})
        for (double alpha : {0.01, 0.05, 0.1})
            CHECK(asymptotic_power(m, alpha, 0.0) == doctest::Approx(alpha).epsilon(1e-9));
    // increasing in the noncentrality
    double prev = 0;
    for (double l2 : {0.0, 0.5, 1.0, 2.0, 4.0, 9.0}) {
        double w = asymptotic_power(3, 0.05, l2);
        CHECK(w >= prev);
        prev = w;
    }
    CHECK(asymptotic_power(1, 0.05, 100.0) > 0.99);
}

TEST_CASE("power is lipschitz in the noncentrality root") {
    const double c = std::sqrt(2.0 / 3.14159265358979323846);
    for (int m : {1, 3, 5})
        for (double alpha : {0.05, 0.1})
            for (double l1 : {0.0, 0.3, 0.8, 1.5, 2.5})
                for (double l2 : {0.1, 0.6, 1.2, 2.0, 3.0}) {
                    double w1 = asymptotic_power(m, alpha, l1 * l1);
                    double w2 = asymptotic_power(m, alpha, l2 * l2);
                    CHECK(std::fabs(w1 - w2) <= c * std::fabs(l1 - l2) + 1e-12);
                }
}

TEST_CASE("contamination changes the power by a bounded amount") {
    // triangle bound: |W(rho,gamma) - W(rho,0)| <= sqrt(2/pi) gamma
    // sqrt(sum delta_j^2 / (2 p_j+)), uniformly over the grid
    const double c = std::sqrt(2.0 / 3.14159265358979323846);
    for (const auto& pi : {make_point_mass(10), make_two_point(-1, 0.9, 9, 0.1),
                           make_two_point(-5, 0.5, 5, 0.5)})
        for (double rho : {0.0, 1.0, 2.0})
            for (double gamma : {0.0, 0.5, 1.0, 2.0}) {
                auto with = analysis_input({0.0, 0.6, 1.0}, {0.5}, make_normal(1),
                                           make_centered_exponential(1), pi, rho, gamma);
                auto without = analysis_input({0.0, 0.6, 1.0}, {0.5}, make_normal(1),
                                              make_centered_exponential(1), pi, rho, 0.0);
                double w_g = asymptotic_power(3, 0.05, noncentrality(with));
                double w_0 = asymptotic_power(3, 0.05, noncentrality(without));
                auto deltas = delta_cells(with);
                auto probs = cell_probs(with.cells, with.p_dist, true);
                double bound = 0;
                for (std::size_t j = 0; j < deltas.size(); ++j)
                    bound += deltas[j] * deltas[j] / (2 * probs.plus[j]);
                bound = c * gamma * std::sqrt(bound);
                CHECK(std::fabs(w_g - w_0) <= bound + 1e-9);
            }
}

TEST_CASE("omega limit sample moments and quantile") {
    auto sample = omega_limit_sample(std::nullopt, 2048, 100000, 91, 4);
    REQUIRE(sample.size() == 100000);
    double mean = 0;
    for (double v : sample) mean += v;
    mean /= sample.size();
    double var = 0;
    for (double v : sample) var += (v - mean) * (v - mean);
    var /= sample.size();
    // limit law has mean 1/2 and variance 1/3
    CHECK(mean == doctest::Approx(0.5).epsilon(0.012));
    CHECK(var == doctest::Approx(1.0 / 3).epsilon(0.035));

    std::vector<double> sorted = sample;
    std::sort(sorted.begin(), sorted.end());
    double q95 = sorted[static_cast<std::size_t>(std::ceil(0.95 * sorted.size())) - 1];
    CHECK(q95 == doctest::Approx(1.6533).epsilon(0.012));
}

TEST_CASE("omega limit sample is reproducible and worker-independent") {
    auto a = omega_limit_sample(std::nullopt, 256, 2000, 17, 1);
    auto b = omega_limit_sample(std::nullopt, 256, 2000, 17, 3);
    auto c = omega_limit_sample(std::nullopt, 256, 2000, 18, 1);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("grid refinement has settled at the production size") {
    // the cumulative-sum construction draws fresh paths per grid, so two
    // grids give independent Monte Carlo estimates; tolerances cover the
    // sampling noise at 1e5 paths (median se ~0.0016, q95 se ~0.013) on
    // top of the 0.005 budget for any residual discretization bias
    auto coarse = omega_limit_sample(std::nullopt, 2048, 100000, 29, 4);
    auto fine = omega_limit_sample(std::nullopt, 4096, 100000, 29, 4);
    std::sort(coarse.begin(), coarse.end());
    std::sort(fine.begin(), fine.end());
    std::size_t km = static_cast<std::size_t>(std::ceil(0.5 * coarse.size())) - 1;
    std::size_t k95 = static_cast<std::size_t>(std::ceil(0.95 * coarse.size())) - 1;
    CHECK(std::fabs(coarse[km] - fine[km]) <= 0.005);
    CHECK(std::fabs(coarse[k95] - fine[k95]) <= 0.005 + 3.5 * 0.013);
}

TEST_CASE("drift raises the sample above the null") {
    DriftSpec drift{2.0, make_normal(1), make_centered_exponential(1)};
    auto null_sample = omega_limit_sample(std::nullopt, 512, 20000, 37, 4);
    auto alt_sample = omega_limit_sample(drift, 512, 20000, 37, 4);
    double crit = 1.6533;
    int r0 = 0, r1 = 0;
    for (double v : null_sample)
        if (v > crit) ++r0;
    for (double v : alt_sample)
        if (v > crit) ++r1;
    CHECK(r0 / 20000.0 == doctest::Approx(0.05).epsilon(0.2));
    // rho=2 lifts the rejection rate to roughly 0.075; demand a clearly
    // significant increase rather than a fixed ratio
    CHECK(r1 - r0 > 5 * std::sqrt(static_cast<double>(r0 + r1)));
}

TEST_CASE("critical value cache") {
    std::string dir = test_support::fresh_tmp_dir("cache");
    std::string path = dir + "/omega_critical.tsv";
    std::remove(path.c_str());
    EnvGuard guard("ARSYM_CACHE_DIR", dir);

    CHECK(omega_cache_path() == path);

    OmegaSimParams sim;
    sim.paths = 2000;
    sim.grid = 256;
    sim.seed = 99;
    double v1 = omega_limit_quantile(0.05, sim, 2);
    CHECK(v1 > 0.8);
    CHECK(v1 < 3.0);

    // the miss must have materialized the table
    std::ifstream in(path);
    REQUIRE(static_cast<bool>(in));
    std::string header;
    std::getline(in, header);
    CHECK(header == "arsym-critical-values v1");

    auto rows = load_omega_cache(path);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].alpha == 0.05);
    CHECK(rows[0].paths == 2000);
    CHECK(rows[0].grid == 256);
    CHECK(rows[0].seed == 99);
    CHECK(rows[0].value == v1);

    // a hit returns the stored number without resimulating
    CHECK(omega_limit_quantile(0.05, sim, 2) == v1);

    // different settings do not collide
    OmegaSimParams other = sim;
    other.paths = 3000;
    double v2 = omega_limit_quantile(0.05, other, 2);
    CHECK(load_omega_cache(path).size() == 2);
    CHECK(v2 != v1);

    // store/load round-trip preserves every digit
    auto again = load_omega_cache(path);
    store_omega_cache(path, again);
    auto twice = load_omega_cache(path);
    REQUIRE(twice.size() == again.size());
    for (std::size_t i = 0; i < again.size(); ++i) {
        CHECK(twice[i].alpha == again[i].alpha);
        CHECK(twice[i].value == again[i].value);
    }

    // corrupted header is a loud failure, not a silent resimulation
    {
        std::ofstream out(path);
        out << "bogus v9\n";
    }
    CHECK_THROWS_AS(omega_limit_quantile(0.05, sim, 2), config_error);

    std::remove(path.c_str());
}

TEST_CASE("quantile requests are validated") {
    OmegaSimParams sim;
    sim.paths = 100;
    sim.grid = 64;
    CHECK_THROWS_AS(omega_limit_quantile(0.0, sim, 1), invalid_parameter_error);
    CHECK_THROWS_AS(omega_limit_quantile(1.0, sim, 1), invalid_parameter_error);
    CHECK_THROWS_AS(omega_limit_sample(std::nullopt, 1, 100, 1, 1),
                    invalid_parameter_error);
    CHECK_THROWS_AS(omega_limit_sample(std::nullopt, 64, 0, 1, 1),
                    invalid_parameter_error);
}

}
