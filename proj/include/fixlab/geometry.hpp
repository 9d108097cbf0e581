#ifndef FIXLAB_GEOMETRY_HPP
#define FIXLAB_GEOMETRY_HPP

#include <string>
#include <vector>

#include "fixlab/types.hpp"

namespace fixlab {

struct ViewingGeometry {
    double viewing_distance_cm = 60.0;
    double screen_width_cm = 34.544;  // 17" 4:3 panel
    double screen_height_cm = 25.908;
    int resolution_x = 1280;
    int resolution_y = 1024;
};

// Size in pixels of a visual angle, using the horizontal pixel pitch:
//   px = resolution_x / screen_width_cm * 2 * distance * tan(angle/2)
// Requires 0 < angle_deg < 90.
double degrees_to_pixels(const ViewingGeometry& g, double angle_deg);

struct DensityMap {
    std::string image_id;
    int width = 0, height = 0;
    std::vector<double> values; // row-major, height*width, >= 0
    double sigma_px = 0.0;

    double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    double sum() const;
    double max() const;
};

// Sum of unit-mass isotropic Gaussians centered at the fixations,
// sigma = degrees_to_pixels(bandwidth), truncated at |dx|,|dy| <= 3*sigma
// and evaluated on the pixel grid. Weights are 1, or the fixation
// duration if duration_weighted. OpenMP-parallel over rows; the
// per-pixel summation order is the fixation order regardless of thread
// count. Throws DegenerateError on an empty fixation list.
DensityMap density_map(const std::vector<Fixation>& fixations, const ImageAnnotation& ann,
                       const ViewingGeometry& g, double bandwidth_deg,
                       bool duration_weighted = false);

// Scales values so the maximum is 1. Throws DegenerateError on an
// all-zero map.
DensityMap normalize_for_display(const DensityMap& m);

// 16-bit P5 PGM of the display-normalized map.
void write_density_pgm(const std::string& path, const DensityMap& m);

// Raw matrix file: "GMAT", u32 rows, u32 cols (LE), rows*cols f32 LE row-major.
void write_gmat(const std::string& path, const DensityMap& m);
DensityMap read_gmat(const std::string& path);

namespace reference {
// Serial per-pixel implementation used to validate the parallel kernel.
DensityMap density_map(const std::vector<Fixation>& fixations, const ImageAnnotation& ann,
                       const ViewingGeometry& g, double bandwidth_deg,
                       bool duration_weighted = false);
}  // namespace reference

}  // namespace fixlab

#endif
