#ifndef FIXLAB_POOLING_HPP
#define FIXLAB_POOLING_HPP

#include <string>
#include <vector>

#include "fixlab/types.hpp"

namespace fixlab {

enum class PoolingStrategyKind { Max, Average };

// Rectangle with inclusive integer bounds; a point (x,y) belongs to the
// region iff xmin <= x < xmax+1 and ymin <= y < ymax+1.
struct PoolingRegion {
    enum class Origin { PyramidCell, FixationWindow };
    int xmin = 0, ymin = 0, xmax = 0, ymax = 0;
    Origin origin = Origin::PyramidCell;

    bool contains(double x, double y) const {
        return x >= xmin && x < xmax + 1.0 && y >= ymin && y < ymax + 1.0;
    }
};

struct PooledVector {
    std::vector<double> values; // region_count * l
    size_t region_count = 0;
};

// A k x k uniform grid of cells for each level k; default levels
// {1,2,4} produce 21 regions.
std::vector<PoolingRegion> pyramid_regions(int width, int height, const std::vector<int>& levels);

// One square of extent +/- floor(window/2) around each fixation,
// clipped to the image. Empty fixation list yields an empty region list
// (the caller decides whether to fall back to pyramid_regions).
std::vector<PoolingRegion> fixation_regions(const std::vector<Fixation>& fixations, int window_px,
                                            int width, int height);

// Location-tagged sparse code.
struct PlacedCode {
    double x = 0.0, y = 0.0;
    std::vector<double> code;
};

// Over the m codes whose centers fall inside the region:
// Average -> arithmetic mean, Max -> elementwise maximum of absolute
// values; m = 0 -> zero vector.
std::vector<double> pool(const std::vector<PlacedCode>& codes, const PoolingRegion& region,
                         PoolingStrategyKind strategy, int l);

// Concatenation of pool() over regions in order, then global L2
// normalization (skipped for an all-zero vector).
PooledVector build_representation(const std::vector<PlacedCode>& codes,
                                  const std::vector<PoolingRegion>& regions,
                                  PoolingStrategyKind strategy, int l);

// Code file "GCOD": u32 l, then per image u32 id_length + UTF-8 id,
// u32 count, count x (f32 x, f32 y, l x f32), all little-endian.
void save_codes(const std::string& path,
                const std::vector<std::pair<std::string, std::vector<PlacedCode>>>& by_image,
                int l);
std::vector<std::pair<std::string, std::vector<PlacedCode>>> load_codes(const std::string& path);

}  // namespace fixlab

#endif
