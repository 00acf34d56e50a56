#pragma once

namespace nf::parallel {

/// Worker cap: NF_THREADS when set to a positive integer, otherwise the
/// OpenMP default. Results never depend on this value.
int thread_count();

} // namespace nf::parallel
