#pragma once

namespace cseval {

// Batch kernels come in two flavors: a plain serial loop kept as the
// reference for tests, and an OpenMP version used by default. Results
// must be identical for both modes.
enum class RunMode { Serial, Parallel };

} // namespace cseval
