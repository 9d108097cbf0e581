#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fixlab/descriptors.hpp"
#include "fixlab/errors.hpp"
#include "support/fixtures.hpp"

using namespace fixlab;
using testsupport::temp_dir;

namespace {

GrayImage ramp_image(int w, int h, bool horizontal) {
    GrayImage img;
    img.width = w;
    img.height = h;
    img.intensities.resize(static_cast<size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(x, y) = 0.01 * (horizontal ? x : y);
    return img;
}

GrayImage random_image(int w, int h, uint64_t seed) {
    GrayImage img;
    img.width = w;
    img.height = h;
    img.intensities.resize(static_cast<size_t>(w) * h);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : img.intensities) v = u(rng);
    return img;
}

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("grid covers the image at the configured stride") {
    const DescriptorGridConfig cfg; // 16px patch, stride 8
    const auto ds = dense_descriptors(ramp_image(40, 24, true), cfg);
    REQUIRE(ds.size() == 8); // 4 x 2 grid
    CHECK(ds[0].center_x == 8.0f);
    CHECK(ds[0].center_y == 8.0f);
    CHECK(ds[1].center_x == 16.0f); // row-major, x fastest
    CHECK(ds[4].center_y == 16.0f);
    CHECK(ds[7].center_x == 32.0f);
    for (const auto& d : ds) CHECK(d.values.size() == static_cast<size_t>(cfg.dim()));
}

TEST_CASE("uniform horizontal gradient concentrates in orientation bin zero") {
    const DescriptorGridConfig cfg;
    const auto ds = dense_descriptors(ramp_image(32, 32, true), cfg);
    // Patch with top-left (8,8) touches no image border, so every pixel
    // has gradient (0.01, 0): each of the 16 cells puts all mass in bin 0
    // and normalization makes each entry exactly 0.25.
    const LocalDescriptor* inner = nullptr;
    for (const auto& d : ds)
        if (d.center_x == 16.0f && d.center_y == 16.0f) inner = &d;
    REQUIRE(inner != nullptr);
    for (int cell = 0; cell < 16; ++cell)
        for (int b = 0; b < 8; ++b)
            CHECK(inner->values[cell * 8 + b] == doctest::Approx(b == 0 ? 0.25 : 0.0));
}

TEST_CASE("uniform vertical gradient lands in the quarter-turn bin") {
    const DescriptorGridConfig cfg;
    const auto ds = dense_descriptors(ramp_image(32, 32, false), cfg);
    const LocalDescriptor* inner = nullptr;
    for (const auto& d : ds)
        if (d.center_x == 16.0f && d.center_y == 16.0f) inner = &d;
    REQUIRE(inner != nullptr);
    for (int cell = 0; cell < 16; ++cell)
        for (int b = 0; b < 8; ++b)
            CHECK(inner->values[cell * 8 + b] == doctest::Approx(b == 2 ? 0.25 : 0.0));
}

TEST_CASE("descriptors are unit length except for flat patches") {
    const DescriptorGridConfig cfg;
    const auto ds = dense_descriptors(random_image(48, 48, 31), cfg);
    for (const auto& d : ds) {
        double n2 = 0.0;
        for (float v : d.values) n2 += static_cast<double>(v) * v;
        CHECK(std::sqrt(n2) == doctest::Approx(1.0).epsilon(1e-5));
    }
    GrayImage flat;
    flat.width = flat.height = 16;
    flat.intensities.assign(256, 0.5);
    const auto fds = dense_descriptors(flat, cfg);
    REQUIRE(fds.size() == 1);
    for (float v : fds[0].values) CHECK(v == 0.0f);
    CHECK(fds[0].center_x == 8.0f);
}

TEST_CASE("parallel and reference descriptor kernels agree exactly") {
    const DescriptorGridConfig cfg;
    const GrayImage img = random_image(97, 61, 32);
    const auto par = dense_descriptors(img, cfg);
    const auto ser = reference::dense_descriptors(img, cfg);
    REQUIRE(par.size() == ser.size());
    for (size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].center_x == ser[i].center_x);
        CHECK(par[i].center_y == ser[i].center_y);
        REQUIRE(par[i].values.size() == ser[i].values.size());
        for (size_t k = 0; k < par[i].values.size(); ++k)
            CHECK(par[i].values[k] == ser[i].values[k]);
    }
}

TEST_CASE("grid configuration and image size are validated") {
    DescriptorGridConfig bad;
    bad.patch_size = 15; // not divisible by 4 cells
    CHECK_THROWS_AS(dense_descriptors(ramp_image(32, 32, true), bad), ValidationError);
    bad.patch_size = -1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    const DescriptorGridConfig cfg;
    CHECK_THROWS_AS(dense_descriptors(ramp_image(15, 32, true), cfg), ValidationError);
}

TEST_CASE("descriptor files round-trip exactly") {
    const std::string dir = temp_dir("gdsc");
    std::vector<std::pair<std::string, std::vector<LocalDescriptor>>> by_image;
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 3; ++i) {
        std::vector<LocalDescriptor> list(static_cast<size_t>(1 + i));
        for (auto& d : list) {
            d.center_x = static_cast<float>(u(rng) * 100);
            d.center_y = static_cast<float>(u(rng) * 100);
            d.values.resize(5);
            for (auto& v : d.values) v = static_cast<float>(u(rng));
        }
        by_image.emplace_back("img" + std::to_string(i), std::move(list));
    }
    const std::string path = dir + "/d.gdsc";
    save_descriptors(path, by_image, 5);
    const auto back = load_descriptors(path);
    REQUIRE(back.size() == by_image.size());
    for (size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].first == by_image[i].first);
        REQUIRE(back[i].second.size() == by_image[i].second.size());
        for (size_t j = 0; j < back[i].second.size(); ++j) {
            CHECK(back[i].second[j].center_x == by_image[i].second[j].center_x);
            CHECK(back[i].second[j].values == by_image[i].second[j].values);
        }
    }
}

TEST_CASE("descriptor file writing validates dimensions") {
    const std::string dir = temp_dir("gdsc_bad");
    std::vector<std::pair<std::string, std::vector<LocalDescriptor>>> by_image(1);
    by_image[0].first = "img";
    by_image[0].second.resize(1);
    by_image[0].second[0].values.resize(4);
    CHECK_THROWS_AS(save_descriptors(dir + "/d.gdsc", by_image, 5), FormatError);
    CHECK_THROWS_AS(save_descriptors(dir + "/d.gdsc", by_image, 0), ValidationError);
    write_bytes(dir + "/junk.gdsc", "NOPE");
    CHECK_THROWS_AS(load_descriptors(dir + "/junk.gdsc"), FormatError);
    CHECK_THROWS_AS(load_descriptors(dir + "/missing.gdsc"), FormatError);
}

TEST_CASE("ASCII and binary PGM load identically, comments skipped") {
    const std::string dir = temp_dir("pnm");
    write_bytes(dir + "/a.pgm", "P2\n# a comment\n3 2\n255\n0 128 255\n64 32 16\n");
    write_bytes(dir + "/b.pgm", std::string("P5\n3 2\n255\n") +
                                    std::string("\x00\x80\xff\x40\x20\x10", 6));
    const GrayImage a = load_image(dir + "/a.pgm");
    const GrayImage b = load_image(dir + "/b.pgm");
    REQUIRE(a.width == 3);
    REQUIRE(a.height == 2);
    CHECK(a.at(1, 0) == doctest::Approx(128.0 / 255.0));
    for (size_t i = 0; i < a.intensities.size(); ++i)
        CHECK(a.intensities[i] == doctest::Approx(b.intensities[i]));
}

TEST_CASE("color images convert to luminance") {
    const std::string dir = temp_dir("pnm_color");
    write_bytes(dir + "/c.ppm", "P3\n1 1\n255\n255 0 0\n");
    CHECK(load_image(dir + "/c.ppm").at(0, 0) == doctest::Approx(0.299));
    write_bytes(dir + "/d.ppm", std::string("P6\n2 1\n255\n") +
                                    std::string("\xff\x00\x00\x00\xff\x00", 6));
    const GrayImage d = load_image(dir + "/d.ppm");
    CHECK(d.at(0, 0) == doctest::Approx(0.299));
    CHECK(d.at(1, 0) == doctest::Approx(0.587));
}

TEST_CASE("sixteen-bit samples are big-endian and scaled by maxval") {
    const std::string dir = temp_dir("pnm16");
    write_bytes(dir + "/w.pgm", std::string("P5\n2 1\n65535\n") +
                                    std::string("\x12\x34\xff\xff", 4));
    const GrayImage img = load_image(dir + "/w.pgm");
    CHECK(img.at(0, 0) == doctest::Approx(0x1234 / 65535.0));
    CHECK(img.at(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("malformed image files are rejected") {
    const std::string dir = temp_dir("pnm_bad");
    write_bytes(dir + "/bad.pgm", "P7\n1 1\n255\n ");
    CHECK_THROWS_AS(load_image(dir + "/bad.pgm"), FormatError);
    write_bytes(dir + "/trunc.pgm", "P5\n2 2\n255\n\x01");
    CHECK_THROWS_AS(load_image(dir + "/trunc.pgm"), FormatError);
    CHECK_THROWS_AS(load_image(dir + "/missing.pgm"), FormatError);
}

TEST_CASE("eight-bit PGM output reloads with quantization error only") {
    const std::string dir = temp_dir("pgm_out");
    const GrayImage img = random_image(9, 7, 34);
    write_pgm8(dir + "/out.pgm", img);
    const GrayImage back = load_image(dir + "/out.pgm");
    REQUIRE(back.width == img.width);
    REQUIRE(back.height == img.height);
    for (size_t i = 0; i < img.intensities.size(); ++i)
        CHECK(std::abs(back.intensities[i] - img.intensities[i]) <= 0.5 / 255.0 + 1e-12);
}
