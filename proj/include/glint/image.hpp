// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef GLINT_IMAGE_HPP
#define GLINT_IMAGE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "glint/vec.hpp"

namespace glint {

struct Image {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgb8;  // row-major, 3 bytes per pixel
};

/// Clamp to [0,1], gamma 2.2, round to 8 bits.
Image tonemap(std::span<const Rgb> radiance, int width, int height);

/// Binary PPM (P6). Throws std::runtime_error on I/O failure.
void write_ppm(const Image& image, const std::string& path);
Image read_ppm(const std::string& path);

}  // namespace glint

#endif
