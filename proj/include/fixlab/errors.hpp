#ifndef FIXLAB_ERRORS_HPP
#define FIXLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fixlab {

// File contents that cannot be parsed (bad CSV row, bad magic, ...).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Well-formed input that violates a documented invariant.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operation applied to an object in the wrong state (e.g. preprocessing twice).
struct StateError : std::runtime_error {
    explicit StateError(const std::string& msg) : std::runtime_error(msg) {}
};

// Binary file format violations (magic bytes, dimension mismatches).
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Degenerate numerical input (all-zero map, zero variance, ...).
struct DegenerateError : std::runtime_error {
    explicit DegenerateError(const std::string& msg) : std::runtime_error(msg) {}
};

// A fixation-based strategy is missing gaze data for some images.
struct CoverageError : std::runtime_error {
    explicit CoverageError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fixlab

#endif
