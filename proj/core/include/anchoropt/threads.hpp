#pragma once

namespace anchoropt {

// Fixes the number of threads used by matrix kernels. Results are
// reproducible for a fixed thread count.
void set_thread_count(int threads);

// Reads ANCHOROPT_THREADS, falling back to the hardware concurrency.
int thread_count_from_env();

}  // namespace anchoropt
