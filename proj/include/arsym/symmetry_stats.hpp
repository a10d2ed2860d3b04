#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "arsym/estimation.hpp"

namespace arsym {

// Symmetric cell system around 0.  cuts = (x0=0, x1, ..., x_{m-1}) strictly
// increasing; the implicit x_m = +inf closes the last cell.  Positive cells
// are (x_{j-1}, x_j], mirrored negative cells are (-x_j, -x_{j-1}].
struct CellPartition {
    std::vector<double> cuts;

    std::size_t m() const { return cuts.size(); }
};

CellPartition make_cell_partition(std::vector<double> cuts);

// Equal-probability cuts on the positive side of a symmetric null law:
// cut j sits at the quantile of 0.5 + j/(2m).
CellPartition equal_prob_cells(const DistModel& null_dist, std::size_t m);

struct CellCounts {
    std::vector<std::uint64_t> nu_plus;
    std::vector<std::uint64_t> nu_minus;
    std::size_t n = 0;
};

// Omega-square symmetry statistic, ordered-residual form:
//   sum_t [ G_n(-e_(t)) - (n - t + 1)/n ]^2
// where e_(t) is the t-th order statistic and G_n the residual EDF.
// O(n log n); this form is normative for the whole artifact.
double omega_sq(const ResidualSet& res);

// Same formula by O(n^2) direct counting, no sorting; oracle for omega_sq.
double omega_sq_bruteforce(const ResidualSet& res);

// Kolmogorov-type statistic sqrt(n) sup_x |G_n(x) + G_n(-x) - 1|, exact
// piecewise evaluation over all jump points and their one-sided limits.
double d_stat(const ResidualSet& res);

// Residual counts per positive/negative cell.  A residual exactly 0 falls
// into the first negative cell (-x1, 0].
CellCounts cell_counts(const ResidualSet& res, const CellPartition& cells);

// Chi-square symmetry statistic sum_j (nu_j+ - nu_j-)^2 / (2 nu_j+).
// Throws empty_positive_cell_error when some nu_j+ is zero.
double chi_sq(const CellCounts& counts);

}  // namespace arsym
