#include "fixlab/report.hpp"

#include <cstdio>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace fixlab {

uint64_t config_hash(const std::string& canonical_config) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical_config) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string Provenance::csv_header() const {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "# config_hash=%016llx seed=%llu version=%s\n",
                  static_cast<unsigned long long>(hash), static_cast<unsigned long long>(seed),
                  kVersion);
    return buf;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char probe[64];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(probe, "%lf", &back);
        if (back == v) return probe;
    }
    return buf;
}

void set_jobs(int n) {
#if defined(_OPENMP)
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

}  // namespace fixlab
