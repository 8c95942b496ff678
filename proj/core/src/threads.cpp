#include "anchoropt/threads.hpp"

#include <cstdlib>
#include <thread>

#include <Eigen/Core>

namespace anchoropt {

void set_thread_count(int threads) {
  if (threads < 1) {
    threads = 1;
  }
  Eigen::setNbThreads(threads);
}

int thread_count_from_env() {
  if (const char* value = std::getenv("ANCHOROPT_THREADS")) {
    const int parsed = std::atoi(value);
    if (parsed >= 1) {
      return parsed;
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace anchoropt
