#ifndef FIXLAB_TESTS_FIXTURES_HPP
#define FIXLAB_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "fixlab/types.hpp"

namespace testsupport {

fixlab::Fixation fx(double x, double y, double onset = 0.0, double duration = 0.2);

fixlab::BoundingBox box(const std::string& cls, int xmin, int ymin, int xmax, int ymax);

fixlab::ImageAnnotation make_ann(const std::string& id, int w, int h,
                                 std::vector<fixlab::BoundingBox> boxes = {});

// A preprocessed scanpath unless raw = true; onsets are assigned
// 0.0, 0.5, 1.0, ... when the fixations carry none (all onset 0).
fixlab::ScanPath make_path(const std::string& image_id, const std::string& subject_id,
                           fixlab::Condition cond, std::vector<fixlab::Fixation> fixations,
                           bool raw = false);

// Fresh empty directory under the current working directory; removed and
// recreated on every call.
std::string temp_dir(const std::string& tag);

}  // namespace testsupport

#endif
