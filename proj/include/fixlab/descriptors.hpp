#ifndef FIXLAB_DESCRIPTORS_HPP
#define FIXLAB_DESCRIPTORS_HPP

#include <string>
#include <vector>

namespace fixlab {

struct GrayImage {
    int width = 0, height = 0;
    std::vector<double> intensities; // row-major, [0,1]

    double at(int x, int y) const { return intensities[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return intensities[static_cast<size_t>(y) * width + x]; }
};

struct LocalDescriptor {
    float center_x = 0.0f, center_y = 0.0f;
    std::vector<float> values; // L2 norm <= 1
};

struct DescriptorGridConfig {
    int patch_size = 16;
    int stride = 8;
    int cells = 4;        // per side
    int orientations = 8;

    int dim() const { return cells * cells * orientations; }
    void validate() const; // patch_size divisible by cells, all > 0
};

// One descriptor per grid position: concatenated per-cell gradient
// orientation histograms (central-difference gradients, edge pixels
// clamped; circular linear interpolation between the two nearest bins),
// L2-normalized; an all-zero patch maps to the zero vector. Parallel
// over grid positions. Throws ValidationError if the image is smaller
// than the patch.
std::vector<LocalDescriptor> dense_descriptors(const GrayImage& img,
                                               const DescriptorGridConfig& cfg);

// Descriptor binary format "GDSC": u32 d, then per image a record of
// u32 id_length + UTF-8 id, u32 count, count x (f32 x, f32 y, d f32),
// all little-endian.
void save_descriptors(const std::string& path,
                      const std::vector<std::pair<std::string, std::vector<LocalDescriptor>>>& by_image,
                      int dim);
std::vector<std::pair<std::string, std::vector<LocalDescriptor>>> load_descriptors(
    const std::string& path);

// 8-bit PGM (P2/P5) and PPM (P3/P6); PPM converts to luminance with
// weights 0.299/0.587/0.114.
GrayImage load_image(const std::string& path);
void write_pgm8(const std::string& path, const GrayImage& img);

namespace reference {
// Straightforward per-patch serial implementation for validating the
// parallel kernel.
std::vector<LocalDescriptor> dense_descriptors(const GrayImage& img,
                                               const DescriptorGridConfig& cfg);
}  // namespace reference

}  // namespace fixlab

#endif
