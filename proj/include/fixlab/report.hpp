#ifndef FIXLAB_REPORT_HPP
#define FIXLAB_REPORT_HPP

#include <cstdint>
#include <string>

namespace fixlab {

inline constexpr const char* kVersion = "0.1.0";

// FNV-1a over the canonical config text; stable across runs.
uint64_t config_hash(const std::string& canonical_config);

// "# config_hash=... seed=... version=..." comment block prepended to
// CSV reports; JSON reports carry the same fields in a "provenance"
// object.
struct Provenance {
    uint64_t hash = 0;
    uint64_t seed = 0;

    std::string csv_header() const;
};

// Fixed-format floating point for reports: shortest round-trip decimal.
std::string format_double(double v);

// Sets the OpenMP thread count used by the parallel kernels; n <= 0
// keeps the runtime default.
void set_jobs(int n);

}  // namespace fixlab

#endif
