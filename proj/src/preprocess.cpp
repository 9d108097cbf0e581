#include "fixlab/preprocess.hpp"

#include "fixlab/errors.hpp"

namespace fixlab {

ScanPath preprocess(const ScanPath& sp, const ImageAnnotation& ann) {
    if (sp.preprocessed)
        throw StateError("scanpath (" + sp.image_id + ", " + sp.subject_id +
                         ") is already preprocessed");
    ScanPath out;
    out.image_id = sp.image_id;
    out.subject_id = sp.subject_id;
    out.condition = sp.condition;
    out.preprocessed = true;
    for (size_t i = 1; i < sp.fixations.size(); ++i) {
        if (sp.fixations[i].valid_for(ann.width, ann.height))
            out.fixations.push_back(sp.fixations[i]);
    }
    return out;
}

Dataset preprocess_dataset(const Dataset& ds) {
    ds.validate();
    Dataset out;
    out.annotations = ds.annotations;
    out.scanpaths.reserve(ds.scanpaths.size());
    for (const auto& sp : ds.scanpaths)
        out.scanpaths.push_back(preprocess(sp, ds.annotations.at(sp.image_id)));
    return out;
}

}  // namespace fixlab
