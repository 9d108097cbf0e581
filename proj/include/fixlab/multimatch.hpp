#ifndef FIXLAB_MULTIMATCH_HPP
#define FIXLAB_MULTIMATCH_HPP

#include <utility>
#include <vector>

#include "fixlab/types.hpp"

namespace fixlab {

// Saccade between consecutive fixations. duration is the duration of
// the fixation at the vector's start.
struct SaccadeVector {
    double dx = 0.0, dy = 0.0;
    double start_x = 0.0, start_y = 0.0;
    double duration = 0.0;

    double amplitude() const;
};

struct MultiMatchScore {
    double shape = 0.0;
    double length = 0.0;
    double direction = 0.0;
    double position = 0.0;
    double duration = 0.0;
};

struct MultiMatchConfig {
    double amplitude_threshold_px = 0.0;
    double direction_threshold_deg = 45.0;
    double screen_diagonal_px = 1.0;
    bool simplification_enabled = true;

    // Defaults: amplitude threshold 10% of the diagonal, 45 degrees.
    static MultiMatchConfig defaults(double screen_diagonal_px);
};

// Angle between two vectors in [0, pi]; 0 if either vector is zero.
double angular_difference(const SaccadeVector& a, const SaccadeVector& b);

// Vector i connects fixation i to fixation i+1. Requires >= 2 fixations
// (throws ValidationError otherwise).
std::vector<SaccadeVector> to_vectors(const ScanPath& sp);

// Repeatedly merges adjacent pairs whose combined amplitude |u+v| is
// below the amplitude threshold or whose angular difference is below the
// direction threshold, summing components and durations, scanning left
// to right until a full pass makes no merge.
std::vector<SaccadeVector> simplify(const std::vector<SaccadeVector>& vs,
                                    const MultiMatchConfig& cfg);

// Monotone alignment from (0,0) to (|a|-1,|b|-1) minimizing the summed
// vector difference |u_i - v_j| over visited cells (dynamic programming
// over the alignment lattice; ties prefer the diagonal step).
std::vector<std::pair<size_t, size_t>> align(const std::vector<SaccadeVector>& a,
                                             const std::vector<SaccadeVector>& b);

// Five-dimension similarity over the aligned vector pairs. Both paths
// need >= 2 fixations. All scores lie in [0,1].
MultiMatchScore compare(const ScanPath& a, const ScanPath& b, const MultiMatchConfig& cfg);

}  // namespace fixlab

#endif
