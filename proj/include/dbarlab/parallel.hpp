#pragma once

namespace dbarlab {

// Effective worker count for all parallel loops. Resolution order:
// set_thread_cap() override, then DBARLAB_THREADS, then the OpenMP default.
// Every parallel loop in the library writes each output slot from exactly
// one thread and keeps per-slot summation order fixed, so results are
// bit-identical for any cap.
int thread_count();

// Cap parallelism at runtime (0 restores the environment default).
void set_thread_cap(int n);

}  // namespace dbarlab
