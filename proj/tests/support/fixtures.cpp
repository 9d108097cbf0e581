#include "fixtures.hpp"

#include <filesystem>

namespace testsupport {

fixlab::Fixation fx(double x, double y, double onset, double duration) {
    fixlab::Fixation f;
    f.x = x;
    f.y = y;
    f.onset = onset;
    f.duration = duration;
    return f;
}

fixlab::BoundingBox box(const std::string& cls, int xmin, int ymin, int xmax, int ymax) {
    fixlab::BoundingBox b;
    b.class_label = cls;
    b.xmin = xmin;
    b.ymin = ymin;
    b.xmax = xmax;
    b.ymax = ymax;
    return b;
}

fixlab::ImageAnnotation make_ann(const std::string& id, int w, int h,
                                 std::vector<fixlab::BoundingBox> boxes) {
    fixlab::ImageAnnotation ann;
    ann.image_id = id;
    ann.width = w;
    ann.height = h;
    ann.objects = std::move(boxes);
    return ann;
}

fixlab::ScanPath make_path(const std::string& image_id, const std::string& subject_id,
                           fixlab::Condition cond, std::vector<fixlab::Fixation> fixations,
                           bool raw) {
    fixlab::ScanPath sp;
    sp.image_id = image_id;
    sp.subject_id = subject_id;
    sp.condition = cond;
    sp.fixations = std::move(fixations);
    sp.preprocessed = !raw;
    bool all_zero = true;
    for (const auto& f : sp.fixations)
        if (f.onset != 0.0) all_zero = false;
    if (all_zero && sp.fixations.size() > 1)
        for (size_t i = 0; i < sp.fixations.size(); ++i)
            sp.fixations[i].onset = 0.5 * static_cast<double>(i);
    return sp;
}

std::string temp_dir(const std::string& tag) {
    const std::filesystem::path dir = std::filesystem::path("test_tmp") / tag;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace testsupport
