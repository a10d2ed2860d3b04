#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace arsym {

// Shortest decimal form that parses back to the same double; used for all
// serialized numbers so that reruns are byte-identical.
std::string fmt_double(double v);

// Runs fn over contiguous index ranges covering [0, count) on up to
// `workers` threads.  Callers own determinism: each index must be
// processed independently and written to its own slot.
void parallel_chunks(std::size_t count, unsigned workers,
                     const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace arsym
