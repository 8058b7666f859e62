#include "mba/rng.hpp"

#include <limits>

#include "mba/errors.hpp"

namespace mba {

std::size_t Rng::uniform_index(std::size_t n) {
    if (n == 0) {
        throw ConfigError("uniform_index requires a positive bound");
    }
    const std::uint64_t bound = n;
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = engine_();
    while (draw >= limit) {
        draw = engine_();
    }
    return static_cast<std::size_t>(draw % bound);
}

int Rng::uniform_int(int lo, int hi) {
    if (hi < lo) {
        throw ConfigError("uniform_int requires lo <= hi");
    }
    const auto span = static_cast<std::size_t>(static_cast<long long>(hi) - lo + 1);
    return lo + static_cast<int>(uniform_index(span));
}

}  // namespace mba
