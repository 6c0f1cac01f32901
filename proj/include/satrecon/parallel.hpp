// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace satrecon {

/// Caps OpenMP parallelism; 0 restores the runtime default.
void set_thread_count(int threads);

/// Applies SATRECON_THREADS when set (0 = auto). Returns the effective count.
int configure_threads_from_env();

}  // namespace satrecon
