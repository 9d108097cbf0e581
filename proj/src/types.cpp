#include "fixlab/types.hpp"

#include "fixlab/errors.hpp"

namespace fixlab {

const char* condition_code(Condition c) {
    return c == Condition::FreeViewing ? "fv" : "vs";
}

Condition condition_from_code(const std::string& code) {
    if (code == "fv") return Condition::FreeViewing;
    if (code == "vs") return Condition::VisualSearch;
    throw ParseError("unknown condition code '" + code + "' (expected fv or vs)");
}

const std::set<std::string>& default_target_classes() {
    static const std::set<std::string> k = {"bird", "cat", "cow", "dog", "horse", "sheep"};
    return k;
}

std::vector<const BoundingBox*> ImageAnnotation::target_boxes() const {
    std::vector<const BoundingBox*> out;
    for (const auto& b : objects)
        if (is_target(b)) out.push_back(&b);
    return out;
}

std::set<std::string> ImageAnnotation::present_target_classes() const {
    std::set<std::string> out;
    for (const auto& b : objects)
        if (is_target(b)) out.insert(b.class_label);
    return out;
}

void Dataset::validate() const {
    for (const auto& sp : scanpaths) {
        if (annotations.find(sp.image_id) == annotations.end())
            throw ValidationError("scanpath references unknown image '" + sp.image_id + "'");
    }
}

}  // namespace fixlab
