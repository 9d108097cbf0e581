#ifndef FIXLAB_PREPROCESS_HPP
#define FIXLAB_PREPROCESS_HPP

#include "fixlab/types.hpp"

namespace fixlab {

// Drops the raw first fixation and every fixation with invalid (x,y)
// coordinates; marks the result preprocessed. A returned path may be
// empty: callers exclude empty paths from all analyses.
// Throws StateError if sp is already preprocessed.
ScanPath preprocess(const ScanPath& sp, const ImageAnnotation& ann);

// Applies preprocess to every scanpath of ds. Empty results are kept in
// the dataset (audit trail) but flagged by their empty fixation list.
Dataset preprocess_dataset(const Dataset& ds);

}  // namespace fixlab

#endif
