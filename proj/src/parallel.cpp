// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include "satrecon/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

#include "satrecon/error.hpp"

namespace satrecon {

void set_thread_count(int threads) {
  if (threads < 0) throw InvalidArgument("thread count must be non-negative");
  omp_set_num_threads(threads > 0 ? threads : omp_get_num_procs());
}

int configure_threads_from_env() {
  if (const char* env = std::getenv("SATRECON_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0) {
      throw InvalidArgument(std::string("SATRECON_THREADS must be a non-negative integer, got '") +
                            env + "'");
    }
    set_thread_count(static_cast<int>(v));
  }
  return omp_get_max_threads();
}

}  // namespace satrecon
