#ifndef FIXLAB_TYPES_HPP
#define FIXLAB_TYPES_HPP

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace fixlab {

// One fixation in image coordinates. Times are seconds; files store
// integer milliseconds (see io.hpp).
struct Fixation {
    double x = 0.0;        // px, horizontal
    double y = 0.0;        // px, vertical
    double onset = 0.0;    // s since image display
    double duration = 0.0; // s

    // Valid means inside [0,w) x [0,h) with finite coordinates.
    bool valid_for(int image_width, int image_height) const {
        return std::isfinite(x) && std::isfinite(y) &&
               x >= 0.0 && y >= 0.0 &&
               x < static_cast<double>(image_width) &&
               y < static_cast<double>(image_height);
    }
};

enum class Condition { FreeViewing, VisualSearch };

const char* condition_code(Condition c);                // "fv" / "vs"
Condition condition_from_code(const std::string& code); // throws ParseError

// Ordered fixation sequence of one subject on one image under one condition.
struct ScanPath {
    std::string image_id;
    std::string subject_id;
    Condition condition = Condition::FreeViewing;
    std::vector<Fixation> fixations; // strictly increasing onset
    bool preprocessed = false;

    bool empty() const { return fixations.empty(); }
    size_t size() const { return fixations.size(); }
};

struct BoundingBox {
    std::string class_label;
    int xmin = 0, ymin = 0, xmax = 0, ymax = 0;

    // Edge-inclusive membership.
    bool contains(double x, double y) const {
        return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
    }
};

// Default target set: the six animal categories.
const std::set<std::string>& default_target_classes();

struct ImageAnnotation {
    std::string image_id;
    int width = 0, height = 0;
    std::vector<BoundingBox> objects;
    std::set<std::string> target_classes = default_target_classes();

    bool is_target(const BoundingBox& b) const {
        return target_classes.count(b.class_label) > 0;
    }
    std::vector<const BoundingBox*> target_boxes() const;
    size_t target_count() const { return target_boxes().size(); }
    // Set of distinct target class labels present in this image.
    std::set<std::string> present_target_classes() const;
};

struct Dataset {
    std::map<std::string, ImageAnnotation> annotations;
    std::vector<ScanPath> scanpaths;

    // Throws ValidationError if a scanpath references an unknown image.
    void validate() const;
};

}  // namespace fixlab

#endif
