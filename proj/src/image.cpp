// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace glint {

namespace {
uint8_t encode(float v) {
    if (!(v > 0.0f)) return 0;
    if (v > 1.0f) v = 1.0f;
    const float g = std::pow(v, 1.0f / 2.2f);
    return static_cast<uint8_t>(g * 255.0f + 0.5f);
}
}  // namespace

Image tonemap(std::span<const Rgb> radiance, int width, int height) {
    if (static_cast<std::size_t>(width) * height != radiance.size())
        throw std::invalid_argument("tonemap: size mismatch");
    Image img;
    img.width = width;
    img.height = height;
    img.rgb8.resize(radiance.size() * 3);
    for (std::size_t i = 0; i < radiance.size(); ++i) {
        img.rgb8[3 * i + 0] = encode(radiance[i].r);
        img.rgb8[3 * i + 1] = encode(radiance[i].g);
        img.rgb8[3 * i + 2] = encode(radiance[i].b);
    }
    return img;
}

void write_ppm(const Image& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_ppm: cannot open " + path);
    out << "P6\n" << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.rgb8.data()),
              static_cast<std::streamsize>(image.rgb8.size()));
    if (!out) throw std::runtime_error("write_ppm: write failed for " + path);
}

Image read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_ppm: cannot open " + path);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P6" || w <= 0 || h <= 0 || maxval != 255)
        throw std::runtime_error("read_ppm: unsupported header in " + path);
    in.get();  // single whitespace after header
    Image img;
    img.width = w;
    img.height = h;
    img.rgb8.resize(static_cast<std::size_t>(w) * h * 3);
    in.read(reinterpret_cast<char*>(img.rgb8.data()),
            static_cast<std::streamsize>(img.rgb8.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.rgb8.size()))
        throw std::runtime_error("read_ppm: truncated file " + path);
    return img;
}

}  // namespace glint
