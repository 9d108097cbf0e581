#ifndef FIXLAB_IO_HPP
#define FIXLAB_IO_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fixlab/types.hpp"

namespace fixlab {

// Fixation CSV: header `image_id,subject_id,condition,fix_index,x_px,y_px,onset_ms,duration_ms`.
// Lines starting with '#' and blank lines are skipped. One ScanPath per
// distinct (image_id, subject_id, condition), fixations sorted by onset.
// Throws ParseError (with line number) on malformed rows, duplicate
// (image, subject, condition, fix_index) records, or duplicate onsets
// within one path.
std::vector<ScanPath> load_fixation_log(const std::string& path);

// Inverse of load_fixation_log; writes fix_index in stored order.
void save_fixation_log(const std::string& path, const std::vector<ScanPath>& paths,
                       const std::string& provenance_comment = "");

// Annotation JSON: either a top-level array of image objects or one JSON
// object per line. Throws ValidationError on boxes violating invariants.
std::map<std::string, ImageAnnotation> load_annotations(
    const std::string& path,
    const std::set<std::string>& target_classes = default_target_classes());

void save_annotations(const std::string& path,
                      const std::map<std::string, ImageAnnotation>& annotations);

// Atomic write: contents go to <path>.tmp, then rename onto path.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace fixlab

#endif
