// Times the OpenMP kernels against their serial reference counterparts
// and checks that both produce identical output.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "fixlab/descriptors.hpp"
#include "fixlab/geometry.hpp"
#include "fixlab/sparse_coding.hpp"
#include "fixlab/types.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
    std::printf("%-18s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   %s\n", name, serial_s,
                parallel_s, serial_s / parallel_s, identical ? "identical" : "MISMATCH");
}

void bench_density(std::mt19937_64& rng) {
    fixlab::ImageAnnotation ann;
    ann.image_id = "bench";
    ann.width = 640;
    ann.height = 480;
    std::uniform_real_distribution<double> ux(0.0, ann.width - 1.0), uy(0.0, ann.height - 1.0);
    std::vector<fixlab::Fixation> fx(400);
    for (auto& f : fx) {
        f.x = ux(rng);
        f.y = uy(rng);
        f.duration = 0.2;
    }
    const fixlab::ViewingGeometry g;

    auto t0 = Clock::now();
    const fixlab::DensityMap serial = fixlab::reference::density_map(fx, ann, g, 2.0);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const fixlab::DensityMap parallel = fixlab::density_map(fx, ann, g, 2.0);
    const double tp = seconds_since(t0);
    report("density_map", ts, tp, serial.values == parallel.values);
}

void bench_descriptors(std::mt19937_64& rng) {
    fixlab::GrayImage img;
    img.width = 960;
    img.height = 720;
    img.intensities.resize(static_cast<size_t>(img.width) * img.height);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : img.intensities) v = u(rng);
    const fixlab::DescriptorGridConfig cfg;

    auto t0 = Clock::now();
    const auto serial = fixlab::reference::dense_descriptors(img, cfg);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const auto parallel = fixlab::dense_descriptors(img, cfg);
    const double tp = seconds_since(t0);
    bool same = serial.size() == parallel.size();
    for (size_t i = 0; same && i < serial.size(); ++i)
        same = serial[i].values == parallel[i].values &&
               serial[i].center_x == parallel[i].center_x &&
               serial[i].center_y == parallel[i].center_y;
    report("dense_descriptors", ts, tp, same);
}

void bench_encode(std::mt19937_64& rng) {
    const int d = 64, l = 128, n = 2000;
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::vector<double>> xs(n, std::vector<double>(d));
    for (auto& x : xs)
        for (auto& v : x) v = g(rng);
    fixlab::Dictionary D;
    D.l = l;
    D.d = d;
    D.rows.resize(static_cast<size_t>(l) * d);
    for (auto& v : D.rows) v = g(rng);
    for (int j = 0; j < l; ++j) {
        double n2 = 0.0;
        for (int t = 0; t < d; ++t) n2 += D.row(j)[t] * D.row(j)[t];
        if (n2 > 1.0)
            for (int t = 0; t < d; ++t) D.row(j)[t] /= std::sqrt(n2);
    }
    const fixlab::SparseCodingConfig cfg;

    auto t0 = Clock::now();
    std::vector<std::vector<double>> serial(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) serial[i] = fixlab::encode(xs[i], D, cfg);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const auto parallel = fixlab::encode_all(xs, D, cfg);
    const double tp = seconds_since(t0);
    report("encode_all", ts, tp, serial == parallel);
}

} // namespace

int main() {
    std::mt19937_64 rng(20240901);
    bench_density(rng);
    bench_descriptors(rng);
    bench_encode(rng);
    return 0;
}
