#include "fixlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "binio.hpp"
#include "fixlab/errors.hpp"
#include "fixlab/io.hpp"

namespace fixlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Shared by the parallel kernel and the serial reference so both paths
// perform bit-identical arithmetic per contribution.
inline double gaussian_term(double dx, double dy, double inv_two_sigma2, double coeff) {
    return coeff * std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
}

void check_geometry(const ViewingGeometry& g) {
    if (g.viewing_distance_cm <= 0 || g.screen_width_cm <= 0 || g.screen_height_cm <= 0 ||
        g.resolution_x <= 0 || g.resolution_y <= 0)
        throw ValidationError("viewing geometry fields must all be positive");
}

}  // namespace

double degrees_to_pixels(const ViewingGeometry& g, double angle_deg) {
    check_geometry(g);
    if (!(angle_deg > 0.0 && angle_deg < 90.0))
        throw ValidationError("visual angle must lie in (0, 90) degrees");
    const double half_rad = angle_deg * kPi / 180.0 / 2.0;
    return static_cast<double>(g.resolution_x) / g.screen_width_cm * 2.0 *
           g.viewing_distance_cm * std::tan(half_rad);
}

double DensityMap::sum() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

double DensityMap::max() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
}

DensityMap density_map(const std::vector<Fixation>& fixations, const ImageAnnotation& ann,
                       const ViewingGeometry& g, double bandwidth_deg, bool duration_weighted) {
    if (fixations.empty()) throw DegenerateError("density map requires at least one fixation");
    const double sigma = degrees_to_pixels(g, bandwidth_deg);
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    const double coeff = 1.0 / (2.0 * kPi * sigma * sigma);
    const double reach = 3.0 * sigma;

    DensityMap m;
    m.image_id = ann.image_id;
    m.width = ann.width;
    m.height = ann.height;
    m.sigma_px = sigma;
    m.values.assign(static_cast<size_t>(ann.width) * ann.height, 0.0);

    // Rows are independent; within a row every pixel accumulates its
    // fixations in list order, so the result does not depend on the
    // thread count.
#pragma omp parallel for schedule(static)
    for (int y = 0; y < m.height; ++y) {
        double* row = m.values.data() + static_cast<size_t>(y) * m.width;
        for (const Fixation& f : fixations) {
            const double dy = y - f.y;
            if (std::abs(dy) > reach) continue;
            const double w = duration_weighted ? f.duration : 1.0;
            const int x0 = std::max(0, static_cast<int>(std::ceil(f.x - reach)));
            const int x1 = std::min(m.width - 1, static_cast<int>(std::floor(f.x + reach)));
            for (int x = x0; x <= x1; ++x) {
                row[x] += w * gaussian_term(x - f.x, dy, inv_two_sigma2, coeff);
            }
        }
    }
    return m;
}

DensityMap normalize_for_display(const DensityMap& m) {
    const double mx = m.max();
    if (mx <= 0.0) throw DegenerateError("cannot normalize an all-zero density map");
    DensityMap out = m;
    for (double& v : out.values) v /= mx;
    return out;
}

void write_density_pgm(const std::string& path, const DensityMap& m) {
    const DensityMap norm = normalize_for_display(m);
    std::ostringstream os;
    os << "P5\n" << m.width << " " << m.height << "\n65535\n";
    for (double v : norm.values) {
        const unsigned val = static_cast<unsigned>(std::lround(v * 65535.0));
        os.put(static_cast<char>((val >> 8) & 0xff)); // big-endian per Netpbm
        os.put(static_cast<char>(val & 0xff));
    }
    write_file_atomic(path, os.str());
}

void write_gmat(const std::string& path, const DensityMap& m) {
    std::string s;
    s.reserve(12 + m.values.size() * 4);
    s += "GMAT";
    binio::put_u32le(s, static_cast<uint32_t>(m.height));
    binio::put_u32le(s, static_cast<uint32_t>(m.width));
    for (double v : m.values) binio::put_f32le(s, static_cast<float>(v));
    write_file_atomic(path, s);
}

DensityMap read_gmat(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "GMAT", 4) != 0)
        throw FormatError("'" + path + "' is not a GMAT file");
    DensityMap m;
    m.height = static_cast<int>(binio::get_u32le(in, "GMAT rows"));
    m.width = static_cast<int>(binio::get_u32le(in, "GMAT cols"));
    m.values.resize(static_cast<size_t>(m.width) * m.height);
    for (double& v : m.values) v = binio::get_f32le(in, "GMAT value");
    return m;
}

namespace reference {

DensityMap density_map(const std::vector<Fixation>& fixations, const ImageAnnotation& ann,
                       const ViewingGeometry& g, double bandwidth_deg, bool duration_weighted) {
    if (fixations.empty()) throw DegenerateError("density map requires at least one fixation");
    const double sigma = degrees_to_pixels(g, bandwidth_deg);
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    const double coeff = 1.0 / (2.0 * kPi * sigma * sigma);
    const double reach = 3.0 * sigma;

    DensityMap m;
    m.image_id = ann.image_id;
    m.width = ann.width;
    m.height = ann.height;
    m.sigma_px = sigma;
    m.values.assign(static_cast<size_t>(ann.width) * ann.height, 0.0);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            double acc = 0.0;
            for (const Fixation& f : fixations) {
                const double dx = x - f.x;
                const double dy = y - f.y;
                if (std::abs(dx) > reach || std::abs(dy) > reach) continue;
                const double w = duration_weighted ? f.duration : 1.0;
                acc += w * gaussian_term(dx, dy, inv_two_sigma2, coeff);
            }
            m.at(x, y) = acc;
        }
    }
    return m;
}

}  // namespace reference

}  // namespace fixlab
