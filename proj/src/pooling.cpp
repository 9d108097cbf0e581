#include "fixlab/pooling.hpp"

#include <cmath>
#include <fstream>

#include "binio.hpp"
#include "fixlab/errors.hpp"
#include "fixlab/io.hpp"

namespace fixlab {

std::vector<PoolingRegion> pyramid_regions(int width, int height, const std::vector<int>& levels) {
    if (width <= 0 || height <= 0)
        throw ValidationError("pyramid regions need positive image dimensions");
    if (levels.empty()) throw ValidationError("pyramid regions need at least one level");
    std::vector<PoolingRegion> out;
    for (int k : levels) {
        if (k <= 0) throw ValidationError("pyramid levels must be positive");
        for (int j = 0; j < k; ++j) {
            for (int i = 0; i < k; ++i) {
                PoolingRegion r;
                r.xmin = static_cast<int>(static_cast<long long>(i) * width / k);
                r.xmax = static_cast<int>(static_cast<long long>(i + 1) * width / k) - 1;
                r.ymin = static_cast<int>(static_cast<long long>(j) * height / k);
                r.ymax = static_cast<int>(static_cast<long long>(j + 1) * height / k) - 1;
                r.origin = PoolingRegion::Origin::PyramidCell;
                out.push_back(r);
            }
        }
    }
    return out;
}

std::vector<PoolingRegion> fixation_regions(const std::vector<Fixation>& fixations, int window_px,
                                            int width, int height) {
    if (window_px <= 0) throw ValidationError("fixation window must be positive");
    if (width <= 0 || height <= 0)
        throw ValidationError("fixation regions need positive image dimensions");
    const int half = window_px / 2;
    std::vector<PoolingRegion> out;
    out.reserve(fixations.size());
    for (const Fixation& f : fixations) {
        const int cx = static_cast<int>(std::floor(f.x));
        const int cy = static_cast<int>(std::floor(f.y));
        PoolingRegion r;
        r.xmin = std::max(0, cx - half);
        r.xmax = std::min(width - 1, cx + half);
        r.ymin = std::max(0, cy - half);
        r.ymax = std::min(height - 1, cy + half);
        r.origin = PoolingRegion::Origin::FixationWindow;
        out.push_back(r);
    }
    return out;
}

std::vector<double> pool(const std::vector<PlacedCode>& codes, const PoolingRegion& region,
                         PoolingStrategyKind strategy, int l) {
    if (l <= 0) throw ValidationError("code dimension must be positive");
    std::vector<double> out(static_cast<size_t>(l), 0.0);
    size_t m = 0;
    for (const PlacedCode& pc : codes) {
        if (!region.contains(pc.x, pc.y)) continue;
        if (static_cast<int>(pc.code.size()) != l)
            throw ValidationError("code dimension does not match pool dimension");
        ++m;
        if (strategy == PoolingStrategyKind::Max) {
            for (int k = 0; k < l; ++k) out[k] = std::max(out[k], std::abs(pc.code[k]));
        } else {
            for (int k = 0; k < l; ++k) out[k] += pc.code[k];
        }
    }
    if (strategy == PoolingStrategyKind::Average && m > 0) {
        const double inv = 1.0 / static_cast<double>(m);
        for (double& v : out) v *= inv;
    }
    return out;
}

PooledVector build_representation(const std::vector<PlacedCode>& codes,
                                  const std::vector<PoolingRegion>& regions,
                                  PoolingStrategyKind strategy, int l) {
    if (regions.empty()) throw ValidationError("representation needs at least one region");
    PooledVector out;
    out.region_count = regions.size();
    out.values.reserve(regions.size() * static_cast<size_t>(l));
    for (const PoolingRegion& r : regions) {
        const std::vector<double> p = pool(codes, r, strategy, l);
        out.values.insert(out.values.end(), p.begin(), p.end());
    }
    double n2 = 0.0;
    for (double v : out.values) n2 += v * v;
    if (n2 > 0.0) {
        const double inv = 1.0 / std::sqrt(n2);
        for (double& v : out.values) v *= inv;
    }
    return out;
}

void save_codes(const std::string& path,
                const std::vector<std::pair<std::string, std::vector<PlacedCode>>>& by_image,
                int l) {
    if (l <= 0) throw ValidationError("code dimension must be positive");
    std::string buf;
    buf.append("GCOD", 4);
    binio::put_u32le(buf, static_cast<uint32_t>(l));
    for (const auto& [id, codes] : by_image) {
        binio::put_u32le(buf, static_cast<uint32_t>(id.size()));
        buf.append(id);
        binio::put_u32le(buf, static_cast<uint32_t>(codes.size()));
        for (const PlacedCode& pc : codes) {
            if (static_cast<int>(pc.code.size()) != l)
                throw ValidationError("code dimension mismatch while writing " + path);
            binio::put_f32le(buf, static_cast<float>(pc.x));
            binio::put_f32le(buf, static_cast<float>(pc.y));
            for (double v : pc.code) binio::put_f32le(buf, static_cast<float>(v));
        }
    }
    write_file_atomic(path, buf);
}

std::vector<std::pair<std::string, std::vector<PlacedCode>>> load_codes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    binio::expect_magic(in, "GCOD", path);
    const uint32_t l = binio::get_u32le(in, "code dimension");
    if (l == 0) throw FormatError(path + ": code dimension must be positive");
    std::vector<std::pair<std::string, std::vector<PlacedCode>>> out;
    while (in.peek() != std::char_traits<char>::eof()) {
        const uint32_t id_len = binio::get_u32le(in, "image id length");
        std::string id(id_len, '\0');
        if (!in.read(id.data(), id_len)) throw FormatError(path + ": truncated image id");
        const uint32_t count = binio::get_u32le(in, "code count");
        std::vector<PlacedCode> codes(count);
        for (uint32_t i = 0; i < count; ++i) {
            codes[i].x = binio::get_f32le(in, "code x");
            codes[i].y = binio::get_f32le(in, "code y");
            codes[i].code.resize(l);
            for (uint32_t k = 0; k < l; ++k) codes[i].code[k] = binio::get_f32le(in, "code value");
        }
        out.emplace_back(std::move(id), std::move(codes));
    }
    return out;
}

}  // namespace fixlab
