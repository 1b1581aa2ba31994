// SPDX-License-Identifier: Apache-2.0
#include "speclab/workqueue.hpp"

#include <cstdlib>
#include <string>

namespace speclab {

int worker_count() {
  if (const char* env = std::getenv("SPECLAB_THREADS")) {
    try {
      std::size_t used = 0;
      const long v = std::stol(env, &used);
      if (used == std::string(env).size() && v > 0) return static_cast<int>(std::min(v, 1024L));
    } catch (const std::exception&) {
      // Fall through to the machine default.
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace speclab
