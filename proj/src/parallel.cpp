#include "geoconvex/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace geoconvex {

ExecPolicy ExecPolicy::from_env() {
    ExecPolicy pol;
    if (const char* env = std::getenv("GEOCONVEX_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) {
            pol.max_threads = static_cast<int>(v);
            if (v == 1) pol.parallel = false;
        }
    }
    return pol;
}

int ExecPolicy::resolved_threads() const {
#ifdef _OPENMP
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (max_threads > 0) n = std::min(n, max_threads);
    return std::max(n, 1);
}

}  // namespace geoconvex
