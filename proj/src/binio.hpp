#ifndef FIXLAB_SRC_BINIO_HPP
#define FIXLAB_SRC_BINIO_HPP

// Little-endian byte plumbing shared by the binary file formats.

#include <cstdint>
#include <cstring>
#include <istream>
#include <string>

#include "fixlab/errors.hpp"

namespace fixlab::binio {

inline void put_u32le(std::string& s, uint32_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
    s.push_back(static_cast<char>((v >> 16) & 0xff));
    s.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u64le(std::string& s, uint64_t v) {
    put_u32le(s, static_cast<uint32_t>(v & 0xffffffffu));
    put_u32le(s, static_cast<uint32_t>(v >> 32));
}

inline void put_f32le(std::string& s, float f) {
    uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32le(s, v);
}

inline void put_f64le(std::string& s, double d) {
    uint64_t v;
    std::memcpy(&v, &d, 8);
    put_u64le(s, v);
}

inline uint32_t get_u32le(std::istream& in, const char* what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw FormatError(std::string("truncated ") + what);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

inline uint64_t get_u64le(std::istream& in, const char* what) {
    const uint64_t lo = get_u32le(in, what);
    const uint64_t hi = get_u32le(in, what);
    return lo | (hi << 32);
}

inline float get_f32le(std::istream& in, const char* what) {
    uint32_t v = get_u32le(in, what);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}

inline double get_f64le(std::istream& in, const char* what) {
    uint64_t v = get_u64le(in, what);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

inline void expect_magic(std::istream& in, const char* magic, const std::string& path) {
    char buf[4];
    if (!in.read(buf, 4) || std::memcmp(buf, magic, 4) != 0)
        throw FormatError("'" + path + "' is not a " + magic + " file");
}

}  // namespace fixlab::binio

#endif
