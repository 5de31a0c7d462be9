#pragma once

#include <cstddef>
#include <functional>

namespace landau {

/// Worker count: LANDAU_THREADS if set, else hardware concurrency, overridable for tests.
std::size_t thread_count();
void set_thread_count(std::size_t count);

/// Runs body(begin, end) over contiguous blocks of [0, count). Blocks are aligned to
/// `grain` so vectorised bodies see full lanes; each index is visited exactly once, so
/// results do not depend on the thread partition.
void parallel_for(std::size_t count, std::size_t grain, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace landau
