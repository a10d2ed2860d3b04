#pragma once

#include <stdexcept>
#include <string>

namespace arsym {

// User-facing input problems: bad parameters, sizes, domains, malformed
// configs and partitions.  The CLI maps these to exit code 1.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct invalid_parameter_error : config_error {
    using config_error::config_error;
};

// Data- or computation-dependent failures: the inputs were well-formed but
// the requested quantity is undefined or not computable.  CLI exit code 2.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Normal-equations matrix singular within tolerance.
struct degenerate_design_error : numeric_error {
    using numeric_error::numeric_error;
};

// A positive cell of the partition received no residuals; the chi-square
// statistic divides by that count and is undefined.
struct empty_positive_cell_error : numeric_error {
    using numeric_error::numeric_error;
};

// More than the tolerated share of replications hit an empty cell.
struct excessive_empty_cells_error : numeric_error {
    using numeric_error::numeric_error;
};

// Quadrature failed to produce a finite value.
struct integration_error : numeric_error {
    using numeric_error::numeric_error;
};

}  // namespace arsym
