#include "arsym/symmetry_stats.hpp"

#include <algorithm>
#include <cmath>

#include "arsym/errors.hpp"

namespace arsym {

CellPartition make_cell_partition(std::vector<double> cuts) {
    if (cuts.empty())
        throw invalid_parameter_error("cell partition: need at least the zero cut");
    if (cuts[0] != 0.0)
        throw invalid_parameter_error("cell partition: first cut must be exactly 0");
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        if (!std::isfinite(cuts[i]))
            throw invalid_parameter_error("cell partition: cuts must be finite");
        if (cuts[i] <= cuts[i - 1])
            throw invalid_parameter_error("cell partition: cuts must be strictly increasing");
    }
    return CellPartition{std::move(cuts)};
}

CellPartition equal_prob_cells(const DistModel& null_dist, std::size_t m) {
    if (m < 1) throw invalid_parameter_error("equal_prob_cells: m must be >= 1");
    std::vector<double> cuts{0.0};
    for (std::size_t j = 1; j < m; ++j)
        cuts.push_back(quantile(null_dist, 0.5 + static_cast<double>(j) / (2.0 * m)));
    return make_cell_partition(std::move(cuts));
}

double omega_sq(const ResidualSet& res) {
    const auto& s = res.sorted_values;
    const std::size_t n = s.size();
    const double dn = static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
        auto it = std::upper_bound(s.begin(), s.end(), -s[t - 1]);
        double g = static_cast<double>(it - s.begin()) / dn;
        double d = g - static_cast<double>(n - t + 1) / dn;
        acc += d * d;
    }
    return acc;
}

double omega_sq_bruteforce(const ResidualSet& res) {
    const auto& v = res.values;
    const std::size_t n = v.size();
    const double dn = static_cast<double>(n);
    double acc = 0.0;
    // The t-th order statistic is recovered by stable ranking, the EDF by
    // direct counting; quadratic on purpose.
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rank = 0;  // zero-based position of v[i] among the order statistics
        for (std::size_t j = 0; j < n; ++j) {
            if (v[j] < v[i] || (v[j] == v[i] && j < i)) ++rank;
        }
        std::size_t t = rank + 1;
        std::size_t count_le = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (v[j] <= -v[i]) ++count_le;
        double d = static_cast<double>(count_le) / dn -
                   static_cast<double>(n - t + 1) / dn;
        acc += d * d;
    }
    return acc;
}

double d_stat(const ResidualSet& res) {
    const auto& s = res.sorted_values;
    const std::size_t n = s.size();
    const double dn = static_cast<double>(n);
    auto count_le = [&](double x) {
        return static_cast<double>(std::upper_bound(s.begin(), s.end(), x) - s.begin());
    };
    auto count_lt = [&](double x) {
        return static_cast<double>(std::lower_bound(s.begin(), s.end(), x) - s.begin());
    };
    // h(x) = G_n(x) + G_n(-x) - 1 is piecewise constant with breaks at
    // +-residual values; check the value at each break and both one-sided
    // limits around it.
    double sup = 0.0;
    auto consider = [&](double h) { sup = std::max(sup, std::fabs(h)); };
    std::vector<double> breaks;
    breaks.reserve(2 * n);
    for (double v : s) {
        breaks.push_back(v);
        breaks.push_back(-v);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    for (double b : breaks) {
        consider((count_le(b) + count_le(-b)) / dn - 1.0);   // at x = b
        consider((count_lt(b) + count_le(-b)) / dn - 1.0);   // x -> b from below
        consider((count_le(b) + count_lt(-b)) / dn - 1.0);   // x -> b from above
    }
    return std::sqrt(dn) * sup;
}

CellCounts cell_counts(const ResidualSet& res, const CellPartition& cells) {
    const auto& cuts = cells.cuts;
    const std::size_t m = cells.m();
    CellCounts out;
    out.nu_plus.assign(m, 0);
    out.nu_minus.assign(m, 0);
    out.n = res.n();
    for (double v : res.values) {
        if (v > 0.0) {
            // cell j with x_{j-1} < v <= x_j; since cuts[0] = 0 < v the
            // first cut >= v has index j in [1, m-1], or m when v exceeds
            // every finite cut (the last cell is open to +inf).
            auto it = std::lower_bound(cuts.begin(), cuts.end(), v);
            std::size_t j = static_cast<std::size_t>(it - cuts.begin());
            out.nu_plus[j - 1] += 1;
        } else {
            // v <= 0 lies in (-x_j, -x_{j-1}]  <=>  x_{j-1} <= -v < x_j;
            // upper_bound gives the first cut > -v, so -v = 0 lands in the
            // first negative cell.
            auto it = std::upper_bound(cuts.begin(), cuts.end(), -v);
            std::size_t j = static_cast<std::size_t>(it - cuts.begin());
            out.nu_minus[j - 1] += 1;
        }
    }
    return out;
}

double chi_sq(const CellCounts& counts) {
    double acc = 0.0;
    for (std::size_t j = 0; j < counts.nu_plus.size(); ++j) {
        if (counts.nu_plus[j] == 0)
            throw empty_positive_cell_error(
                "chi_sq: positive cell " + std::to_string(j + 1) +
                " is empty; the statistic is undefined (coarsen the partition or enlarge n)");
        double d = static_cast<double>(counts.nu_plus[j]) -
                   static_cast<double>(counts.nu_minus[j]);
        acc += d * d / (2.0 * static_cast<double>(counts.nu_plus[j]));
    }
    return acc;
}

}  // namespace arsym
