#include "nf/parallel.hpp"

#include <cstdlib>
#include <omp.h>

namespace nf::parallel {

int thread_count() {
    if (const char* env = std::getenv("NF_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return omp_get_max_threads();
}

} // namespace nf::parallel
