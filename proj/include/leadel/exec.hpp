#pragma once

#include <cstdint>

namespace leadel {

// Execution mode for the data-parallel kernels. Parallel uses a fixed chunk
// decomposition reduced in chunk order, so its results are identical at any
// worker count (and with OpenMP disabled); Serial is the straight-line
// reference implementation kept for testing and benchmarking.
enum class Exec : uint8_t {
    Serial,
    Parallel,
};

}  // namespace leadel
