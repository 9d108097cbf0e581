#include "fixlab/descriptors.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "binio.hpp"
#include "fixlab/errors.hpp"
#include "fixlab/io.hpp"

namespace fixlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void DescriptorGridConfig::validate() const {
    if (patch_size <= 0 || stride <= 0 || cells <= 0 || orientations <= 0)
        throw ValidationError("descriptor grid parameters must all be positive");
    if (patch_size % cells != 0)
        throw ValidationError("patch size must be divisible by the cell count per side");
}

namespace {

// Histogram of one patch with top-left (x0, y0). Shared by the parallel
// kernel and the serial reference.
LocalDescriptor patch_descriptor(const GrayImage& img, const DescriptorGridConfig& cfg, int x0,
                                 int y0) {
    const int cell_px = cfg.patch_size / cfg.cells;
    const double bin_width = 2.0 * kPi / cfg.orientations;
    std::vector<double> hist(static_cast<size_t>(cfg.dim()), 0.0);

    for (int py = 0; py < cfg.patch_size; ++py) {
        const int y = y0 + py;
        for (int px = 0; px < cfg.patch_size; ++px) {
            const int x = x0 + px;
            const int xl = x > 0 ? x - 1 : 0;
            const int xr = x < img.width - 1 ? x + 1 : img.width - 1;
            const int yu = y > 0 ? y - 1 : 0;
            const int yd = y < img.height - 1 ? y + 1 : img.height - 1;
            const double gx = 0.5 * (img.at(xr, y) - img.at(xl, y));
            const double gy = 0.5 * (img.at(x, yd) - img.at(x, yu));
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0) continue;

            double angle = std::atan2(gy, gx);
            if (angle < 0.0) angle += 2.0 * kPi;
            const double pos = angle / bin_width;
            int b0 = static_cast<int>(pos);
            if (b0 >= cfg.orientations) b0 = cfg.orientations - 1;  // guard angle == 2*pi
            const int b1 = (b0 + 1) % cfg.orientations;
            const double f = pos - b0;

            const int cx = px / cell_px, cy = py / cell_px;
            const size_t base = static_cast<size_t>(cy * cfg.cells + cx) * cfg.orientations;
            hist[base + b0] += mag * (1.0 - f);
            hist[base + b1] += mag * f;
        }
    }

    double norm2 = 0.0;
    for (double v : hist) norm2 += v * v;
    LocalDescriptor out;
    out.center_x = static_cast<float>(x0 + cfg.patch_size / 2.0);
    out.center_y = static_cast<float>(y0 + cfg.patch_size / 2.0);
    out.values.resize(hist.size());
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (size_t i = 0; i < hist.size(); ++i)
            out.values[i] = static_cast<float>(hist[i] * inv);
    }
    return out;
}

void check_patch_fits(const GrayImage& img, const DescriptorGridConfig& cfg) {
    cfg.validate();
    if (img.width < cfg.patch_size || img.height < cfg.patch_size)
        throw ValidationError("image " + std::to_string(img.width) + "x" +
                              std::to_string(img.height) + " is smaller than the " +
                              std::to_string(cfg.patch_size) + "px patch");
}

}  // namespace

std::vector<LocalDescriptor> dense_descriptors(const GrayImage& img,
                                               const DescriptorGridConfig& cfg) {
    check_patch_fits(img, cfg);
    const int nx = (img.width - cfg.patch_size) / cfg.stride + 1;
    const int ny = (img.height - cfg.patch_size) / cfg.stride + 1;
    std::vector<LocalDescriptor> out(static_cast<size_t>(nx) * ny);
#pragma omp parallel for schedule(static)
    for (int gy = 0; gy < ny; ++gy) {
        for (int gx = 0; gx < nx; ++gx)
            out[static_cast<size_t>(gy) * nx + gx] =
                patch_descriptor(img, cfg, gx * cfg.stride, gy * cfg.stride);
    }
    return out;
}

namespace reference {

std::vector<LocalDescriptor> dense_descriptors(const GrayImage& img,
                                               const DescriptorGridConfig& cfg) {
    check_patch_fits(img, cfg);
    const int nx = (img.width - cfg.patch_size) / cfg.stride + 1;
    const int ny = (img.height - cfg.patch_size) / cfg.stride + 1;
    std::vector<LocalDescriptor> out;
    out.reserve(static_cast<size_t>(nx) * ny);
    for (int gy = 0; gy < ny; ++gy)
        for (int gx = 0; gx < nx; ++gx)
            out.push_back(patch_descriptor(img, cfg, gx * cfg.stride, gy * cfg.stride));
    return out;
}

}  // namespace reference

void save_descriptors(
    const std::string& path,
    const std::vector<std::pair<std::string, std::vector<LocalDescriptor>>>& by_image, int dim) {
    if (dim <= 0) throw ValidationError("descriptor dimension must be positive");
    std::string s;
    s += "GDSC";
    binio::put_u32le(s, static_cast<uint32_t>(dim));
    for (const auto& [id, list] : by_image) {
        binio::put_u32le(s, static_cast<uint32_t>(id.size()));
        s += id;
        binio::put_u32le(s, static_cast<uint32_t>(list.size()));
        for (const LocalDescriptor& d : list) {
            if (static_cast<int>(d.values.size()) != dim)
                throw FormatError("descriptor for image '" + id + "' has dimension " +
                                  std::to_string(d.values.size()) + ", expected " +
                                  std::to_string(dim));
            binio::put_f32le(s, d.center_x);
            binio::put_f32le(s, d.center_y);
            for (float v : d.values) binio::put_f32le(s, v);
        }
    }
    write_file_atomic(path, s);
}

std::vector<std::pair<std::string, std::vector<LocalDescriptor>>> load_descriptors(
    const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    binio::expect_magic(in, "GDSC", path);
    const uint32_t dim = binio::get_u32le(in, "GDSC dimension");
    if (dim == 0) throw FormatError("'" + path + "' declares descriptor dimension 0");

    std::vector<std::pair<std::string, std::vector<LocalDescriptor>>> out;
    while (in.peek() != EOF) {
        const uint32_t id_len = binio::get_u32le(in, "GDSC image id length");
        std::string id(id_len, '\0');
        if (!in.read(id.data(), id_len)) throw FormatError("truncated GDSC image id");
        const uint32_t count = binio::get_u32le(in, "GDSC descriptor count");
        std::vector<LocalDescriptor> list(count);
        for (uint32_t i = 0; i < count; ++i) {
            list[i].center_x = binio::get_f32le(in, "GDSC descriptor x");
            list[i].center_y = binio::get_f32le(in, "GDSC descriptor y");
            list[i].values.resize(dim);
            for (uint32_t k = 0; k < dim; ++k)
                list[i].values[k] = binio::get_f32le(in, "GDSC descriptor value");
        }
        out.emplace_back(std::move(id), std::move(list));
    }
    return out;
}

namespace {

int next_pnm_int(std::istream& in, const std::string& path) {
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
        } else if (!std::isspace(c)) {
            break;
        }
    }
    if (c == EOF) throw FormatError("'" + path + "' has a truncated header");
    int value = 0;
    bool any = false;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        any = true;
        c = in.get();
    }
    if (!any) throw FormatError("'" + path + "' has a malformed header");
    if (c != EOF) in.unget();
    return value;
}

int raw_sample(std::istream& in, int maxval, const std::string& path) {
    int c = in.get();
    if (c == EOF) throw FormatError("'" + path + "' has truncated pixel data");
    if (maxval < 256) return c;
    int lo = in.get();
    if (lo == EOF) throw FormatError("'" + path + "' has truncated pixel data");
    return (c << 8) | lo;  // two-byte samples are big-endian
}

}  // namespace

GrayImage load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    char m0 = static_cast<char>(in.get()), m1 = static_cast<char>(in.get());
    if (m0 != 'P' || (m1 != '2' && m1 != '3' && m1 != '5' && m1 != '6'))
        throw FormatError("'" + path + "' is not a P2/P3/P5/P6 image");
    const bool color = (m1 == '3' || m1 == '6');
    const bool ascii = (m1 == '2' || m1 == '3');

    GrayImage img;
    img.width = next_pnm_int(in, path);
    img.height = next_pnm_int(in, path);
    const int maxval = next_pnm_int(in, path);
    if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 65535)
        throw FormatError("'" + path + "' has invalid dimensions or maxval");
    if (!ascii) in.get();  // single whitespace before the raster

    const size_t n = static_cast<size_t>(img.width) * img.height;
    img.intensities.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double value;
        if (color) {
            const double r = ascii ? next_pnm_int(in, path) : raw_sample(in, maxval, path);
            const double g = ascii ? next_pnm_int(in, path) : raw_sample(in, maxval, path);
            const double b = ascii ? next_pnm_int(in, path) : raw_sample(in, maxval, path);
            value = 0.299 * r + 0.587 * g + 0.114 * b;
        } else {
            value = ascii ? next_pnm_int(in, path) : raw_sample(in, maxval, path);
        }
        img.intensities[i] = value / maxval;
    }
    return img;
}

void write_pgm8(const std::string& path, const GrayImage& img) {
    std::ostringstream os;
    os << "P5\n" << img.width << " " << img.height << "\n255\n";
    for (double v : img.intensities) {
        const double clamped = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        os.put(static_cast<char>(std::lround(clamped * 255.0)));
    }
    write_file_atomic(path, os.str());
}

}  // namespace fixlab
