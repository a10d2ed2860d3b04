#include "arsym/util.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <thread>
#include <vector>

namespace arsym {

std::string fmt_double(double v) {
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void parallel_chunks(std::size_t count, unsigned workers,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
    if (count == 0) return;
    if (workers < 1) workers = 1;
    const unsigned W =
        std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::size_t>(
                                        count, std::numeric_limits<unsigned>::max())));
    if (W == 1) {
        fn(0, count);
        return;
    }
    const std::size_t chunk = (count + W - 1) / W;
    std::vector<std::thread> pool;
    pool.reserve(W);
    for (unsigned i = 0; i < W; ++i) {
        std::size_t lo = static_cast<std::size_t>(i) * chunk;
        std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

}  // namespace arsym
