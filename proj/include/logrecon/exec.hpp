#pragma once

namespace logrecon {

// Selects between the OpenMP kernels and the plain serial loops. Both paths
// must produce identical results; Serial exists for differential tests and
// the benchmark.
enum class Exec { Serial, Parallel };

}  // namespace logrecon
