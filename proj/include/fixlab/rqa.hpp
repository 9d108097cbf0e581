#ifndef FIXLAB_RQA_HPP
#define FIXLAB_RQA_HPP

#include <cstdint>
#include <vector>

#include "fixlab/types.hpp"

namespace fixlab {

struct RqaConfig {
    double radius_px = 0.0;  // recurrence distance threshold
    int min_line_length = 2; // L
};

// Symmetric recurrence matrix; the main diagonal is excluded from all
// counts. For line detection the plot is treated with a self-recurrent
// main diagonal (distance zero), see rqa_measures.
struct RecurrenceMatrix {
    int n = 0;
    std::vector<uint8_t> cells; // n*n, row-major

    bool at(int i, int j) const { return cells[static_cast<size_t>(i) * n + j] != 0; }
};

struct RqaMeasures {
    double recurrence = 0.0;  // %
    double determinism = 0.0; // %
    double laminarity = 0.0;  // %
    double crom = 0.0;        // %
};

// cells[i][j] = (i != j) and dist(f_i, f_j) <= radius. Requires >= 2
// fixations (throws ValidationError otherwise).
RecurrenceMatrix recurrence_matrix(const ScanPath& sp, const RqaConfig& cfg);

// With R = true cells above the diagonal:
//   recurrence  = 100 * 2R / (n(n-1))
//   determinism = 100 * |above-diagonal cells on diagonal lines >= L| / R
//   laminarity  = 100 * (|on horizontal lines >= L| + |on vertical lines >= L|) / 2R
//   crom        = 100 * sum_{i<j} (j-i) / ((n-1) * R)
// All four are 0 when R = 0. Line structures are maximal runs on the
// full symmetric plot with the main diagonal treated as recurrent;
// diagonal lines are detected along both diagonal orientations.
RqaMeasures rqa_measures(const RecurrenceMatrix& m, const RqaConfig& cfg);

}  // namespace fixlab

#endif
