#include "arsym/limit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "arsym/errors.hpp"
#include "arsym/special_functions.hpp"
#include "arsym/util.hpp"

namespace arsym {

double delta_shift(const DriftSpec& spec, double t) {
    if (!(t > 0.0 && t < 1.0))
        throw invalid_parameter_error("delta_shift: t must lie in (0,1)");
    if (!(spec.rho >= 0.0))
        throw invalid_parameter_error("delta_shift: rho must be >= 0");
    if (spec.rho == 0.0) return 0.0;
    return spec.rho * (cdf(spec.q_dist, quantile(spec.p_dist, t)) - t);
}

namespace {

// E P(x + b * xi) for xi ~ Pi.
double expected_shifted_cdf(double x, double b, const DistModel& p_dist,
                            const DistModel& pi_dist) {
    if (b == 0.0) return cdf(p_dist, x);
    switch (pi_dist.kind) {
        case DistKind::point_mass:
            return cdf(p_dist, x + b * pi_dist.par[0]);
        case DistKind::two_point:
            return pi_dist.par[1] * cdf(p_dist, x + b * pi_dist.par[0]) +
                   pi_dist.par[3] * cdf(p_dist, x + b * pi_dist.par[2]);
        default: {
            const auto& rule = gauss_legendre_01(256);
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                acc += rule.weights[i] *
                       cdf(p_dist, x + b * quantile(pi_dist, rule.nodes[i]));
            if (!std::isfinite(acc))
                throw integration_error("drift_Delta: quadrature produced a non-finite value");
            return acc;
        }
    }
}

}  // namespace

double drift_Delta(double x, const ARParams& coeffs, const DistModel& p_dist,
                   const DistModel& pi_dist) {
    double px = cdf(p_dist, x);
    double acc = expected_shifted_cdf(x, -1.0, p_dist, pi_dist) - px;
    for (double b : coeffs.coeffs)
        acc += expected_shifted_cdf(x, b, p_dist, pi_dist) - px;
    return acc;
}

std::vector<double> delta_cells(const ChiSqAnalysisInput& input) {
    const auto& cuts = input.cells.cuts;
    const std::size_t m = input.cells.m();
    std::vector<double> dplus(m + 1), dminus(m + 1);  // Delta at +-x_j, j = 0..m
    for (std::size_t j = 0; j < m; ++j) {
        dplus[j] = drift_Delta(cuts[j], input.coeffs, input.p_dist, input.pi_dist);
        dminus[j] = drift_Delta(-cuts[j], input.coeffs, input.p_dist, input.pi_dist);
    }
    dplus[m] = 0.0;   // Delta(+inf)
    dminus[m] = 0.0;  // Delta(-inf)
    std::vector<double> out(m);
    for (std::size_t j = 1; j <= m; ++j)
        out[j - 1] = (dplus[j] - dplus[j - 1]) - (dminus[j - 1] - dminus[j]);
    return out;
}

CellProbs cell_probs(const CellPartition& cells, const DistModel& dist, bool as_null) {
    const auto& cuts = cells.cuts;
    const std::size_t m = cells.m();
    CellProbs out;
    out.plus.resize(m);
    out.minus.resize(m);
    for (std::size_t j = 1; j <= m; ++j) {
        double hi = (j == m) ? 1.0 : cdf(dist, cuts[j]);
        out.plus[j - 1] = hi - cdf(dist, cuts[j - 1]);
        double lo = (j == m) ? 0.0 : cdf(dist, -cuts[j]);
        out.minus[j - 1] = cdf(dist, -cuts[j - 1]) - lo;
    }
    if (as_null)
        for (std::size_t j = 0; j < m; ++j)
            if (!(out.plus[j] > 0.0))
                throw invalid_parameter_error(
                    "cell_probs: positive cell " + std::to_string(j + 1) +
                    " has zero probability under the null law; refine the partition");
    return out;
}

double noncentrality(const ChiSqAnalysisInput& input) {
    if (!(input.rho >= 0.0) || !(input.gamma >= 0.0))
        throw invalid_parameter_error("noncentrality: rho and gamma must be >= 0");
    CellProbs p = cell_probs(input.cells, input.p_dist, /*as_null=*/true);
    const std::size_t m = input.cells.m();
    std::vector<double> qdiff(m, 0.0);
    if (input.rho != 0.0) {
        CellProbs q = cell_probs(input.cells, input.q_dist);
        for (std::size_t j = 0; j < m; ++j) qdiff[j] = q.plus[j] - q.minus[j];
    }
    std::vector<double> dc(m, 0.0);
    if (input.gamma != 0.0) dc = delta_cells(input);
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double num = input.rho * qdiff[j] + input.gamma * dc[j];
        acc += num * num / (2.0 * p.plus[j]);
    }
    return acc;
}

double noncentral_chisq_cdf(const NoncentralSpec& spec, double x) {
    if (spec.m < 1) throw invalid_parameter_error("noncentral_chisq_cdf: m must be >= 1");
    if (!(spec.lambda2 >= 0.0))
        throw invalid_parameter_error("noncentral_chisq_cdf: lambda2 must be >= 0");
    if (x <= 0.0) return 0.0;
    if (spec.lambda2 == 0.0) return central_chisq_cdf(spec.m, x);
    const double h = 0.5 * spec.lambda2;
    double w = std::exp(-h);  // Poisson(h) weight at i = 0
    double cum = 0.0;
    double acc = 0.0;
    for (int i = 0; i < 100000; ++i) {
        acc += w * central_chisq_cdf(spec.m + 2.0 * i, x);
        cum += w;
        if (1.0 - cum < 1e-12) break;
        w *= h / (i + 1.0);
    }
    return std::min(acc, 1.0);
}

namespace {

double bracketed_quantile(const std::function<double(double)>& cdf_fn, double prob,
                          const char* what) {
    if (!(prob > 0.0 && prob < 1.0))
        throw invalid_parameter_error(std::string(what) + ": prob must lie in (0,1)");
    double hi = 1.0;
    while (cdf_fn(hi) < prob) {
        hi *= 2.0;
        if (hi > 1e12)
            throw numeric_error(std::string(what) + ": failed to bracket the quantile");
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (cdf_fn(mid) >= prob)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-13 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double chisq_quantile(int m, double prob) {
    if (m < 1) throw invalid_parameter_error("chisq_quantile: m must be >= 1");
    return bracketed_quantile(
        [m](double x) { return central_chisq_cdf(m, x); }, prob, "chisq_quantile");
}

double noncentral_chisq_quantile(const NoncentralSpec& spec, double prob) {
    return bracketed_quantile(
        [&spec](double x) { return noncentral_chisq_cdf(spec, x); }, prob,
        "noncentral_chisq_quantile");
}

double asymptotic_power(int m, double alpha, double lambda2) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw invalid_parameter_error("asymptotic_power: alpha must lie in (0,1)");
    double crit = chisq_quantile(m, 1.0 - alpha);
    return 1.0 - noncentral_chisq_cdf(NoncentralSpec{m, lambda2}, crit);
}

std::vector<double> omega_limit_sample(const std::optional<DriftSpec>& drift,
                                       std::size_t grid_size, std::size_t paths,
                                       std::uint64_t seed, unsigned workers) {
    if (grid_size < 2)
        throw invalid_parameter_error("omega_limit_sample: grid_size must be >= 2");
    if (paths < 1)
        throw invalid_parameter_error("omega_limit_sample: paths must be >= 1");
    if (workers < 1) workers = 1;

    const std::size_t G = grid_size;
    const double dt = 1.0 / static_cast<double>(G - 1);
    std::vector<double> drift_term(G, 0.0);
    if (drift && drift->rho != 0.0) {
        for (std::size_t i = 1; i + 1 < G; ++i) {
            double t = static_cast<double>(i) * dt;
            drift_term[i] = delta_shift(*drift, t) + delta_shift(*drift, 1.0 - t);
        }
        // delta vanishes at both endpoints by continuity
    }

    std::vector<double> out(paths);
    auto run_range = [&](std::size_t lo, std::size_t hi) {
        std::vector<double> w(G);
        for (std::size_t k = lo; k < hi; ++k) {
            Rng rng(derive_seed(seed, k));
            double acc = 0.0;
            w[0] = 0.0;
            for (std::size_t i = 1; i < G; ++i) {
                acc += normal_quantile(rng.uniform01()) * std::sqrt(dt);
                w[i] = acc;
            }
            const double w1 = w[G - 1];
            // bridge v(t) = W(t) - t W(1); integrand w(t) = v(t) + v(1-t) + drift
            double integral = 0.0;
            for (std::size_t i = 0; i < G; ++i) {
                double t = static_cast<double>(i) * dt;
                double tb = static_cast<double>(G - 1 - i) * dt;
                double v = w[i] - t * w1;
                double vb = w[G - 1 - i] - tb * w1;
                double y = v + vb + drift_term[i];
                double y2 = y * y;
                integral += (i == 0 || i == G - 1) ? 0.5 * y2 : y2;
            }
            out[k] = integral * dt;
        }
    };

    parallel_chunks(paths, workers, run_range);
    return out;
}

namespace {

constexpr const char* kCacheHeader = "arsym-critical-values v1";
constexpr const char* kCacheFile = "omega_critical.tsv";

double empirical_upper_quantile(std::vector<double> sample, double alpha) {
    std::sort(sample.begin(), sample.end());
    const double q = 1.0 - alpha;
    std::size_t k = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(sample.size())));
    k = std::min(std::max<std::size_t>(k, 1), sample.size());
    return sample[k - 1];
}

}  // namespace

std::string omega_cache_path() {
    const char* env = std::getenv("ARSYM_CACHE_DIR");
    std::string dir = (env && *env) ? env : "data";
    return dir + "/" + kCacheFile;
}

std::vector<OmegaCacheRow> load_omega_cache(const std::string& path) {
    std::ifstream in(path);
    std::vector<OmegaCacheRow> rows;
    if (!in) return rows;
    std::string line;
    if (!std::getline(in, line) || line != kCacheHeader)
        throw config_error("critical-value cache '" + path + "' has an unrecognized header");
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        OmegaCacheRow r{};
        if (!(ls >> r.alpha >> r.paths >> r.grid >> r.seed >> r.value))
            throw config_error("critical-value cache '" + path + "' has a malformed row: " + line);
        rows.push_back(r);
    }
    return rows;
}

void store_omega_cache(const std::string& path, const std::vector<OmegaCacheRow>& rows) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw numeric_error("cannot write critical-value cache '" + path + "'");
    out << kCacheHeader << "\n";
    out << "# alpha\tpaths\tgrid\tseed\tvalue\n";
    for (const auto& r : rows)
        out << fmt_double(r.alpha) << '\t' << r.paths << '\t' << r.grid << '\t'
            << r.seed << '\t' << fmt_double(r.value) << '\n';
}

double omega_limit_quantile(double alpha, const OmegaSimParams& sim, unsigned workers) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw invalid_parameter_error("omega_limit_quantile: alpha must lie in (0,1)");
    const std::string path = omega_cache_path();
    std::vector<OmegaCacheRow> rows;
    try {
        rows = load_omega_cache(path);
    } catch (const config_error&) {
        throw;  // a corrupt cache should be noticed, not silently rebuilt
    }
    for (const auto& r : rows)
        if (std::fabs(r.alpha - alpha) <= 1e-12 && r.paths == sim.paths &&
            r.grid == sim.grid && r.seed == sim.seed)
            return r.value;

    auto sample = omega_limit_sample(std::nullopt, sim.grid, sim.paths, sim.seed, workers);
    double value = empirical_upper_quantile(std::move(sample), alpha);
    rows.push_back(OmegaCacheRow{alpha, sim.paths, sim.grid, sim.seed, value});
    std::sort(rows.begin(), rows.end(), [](const OmegaCacheRow& a, const OmegaCacheRow& b) {
        if (a.alpha != b.alpha) return a.alpha < b.alpha;
        if (a.paths != b.paths) return a.paths < b.paths;
        if (a.grid != b.grid) return a.grid < b.grid;
        return a.seed < b.seed;
    });
    try {
        store_omega_cache(path, rows);
    } catch (const numeric_error&) {
        // cache directory not writable; the freshly computed value is still valid
    }
    return value;
}

}  // namespace arsym
