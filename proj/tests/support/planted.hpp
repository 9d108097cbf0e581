#ifndef FIXLAB_TESTS_PLANTED_HPP
#define FIXLAB_TESTS_PLANTED_HPP

#include <cstdint>

#include "fixlab/experiment.hpp"

namespace testsupport {

// Synthetic classification benchmark where the class evidence sits only
// at fixated locations. Every image carries three fixation spots whose
// descriptors bear the image's class signature, plus one decoy spot per
// other class (signatures of the five wrong classes), all placed far
// enough from the fixations that a 30 px fixation window excludes them;
// remaining grid positions hold low-norm background noise. Spot
// positions are random per image, so pyramid cells cannot bind a
// signature to a class, while fixation windows always can.
struct PlantedConfig {
    int classes = 6;
    int images_per_class = 60;
    int width = 128, height = 128;
    int dim = 16;
    uint64_t seed = 42;
};

fixlab::ClassificationDataset make_planted(const PlantedConfig& cfg);

}  // namespace testsupport

#endif
