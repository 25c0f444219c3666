#pragma once

#include <cstddef>
#include <functional>

namespace latcov {

// Worker count from LATTICE_COVER_THREADS (0 or unset = hardware concurrency).
int thread_count();
void set_thread_count_override(int n);  // tests; <= 0 clears

// Runs fn(i) for i in [0, n).  Callers write results into slot i so the
// merged output does not depend on scheduling.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace latcov
