// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/prng.hpp"

#include <cmath>
#include <stdexcept>

namespace glint {

float PrngState::next() {
    for (int i = 0; i < 4; ++i) {
        // Schrage-style update: s' = a*(s mod q) - r*floor(s/q), plus m when
        // the result is not positive. All terms stay below 2^23.
        const float beta = std::floor(lane[i] / kPrngQ[i]);
        float p = kPrngA[i] * (lane[i] - beta * kPrngQ[i]) - beta * kPrngR[i];
        if (p <= 0.0f) p += kPrngM[i];
        lane[i] = p;
    }
    float v = lane[0] / kPrngM[0] - lane[1] / kPrngM[1] + lane[2] / kPrngM[2] -
              lane[3] / kPrngM[3];
    v -= std::floor(v);
    // fract of a tiny negative sum can round up to exactly 1.0f; fold it back
    // so the contract [0, 1) holds.
    if (v >= 1.0f) v = 0.0f;
    return v;
}

bool PrngState::valid() const {
    for (int i = 0; i < 4; ++i) {
        const float s = lane[i];
        if (!(s >= 1.0f && s <= kPrngM[i] - 1.0f)) return false;
        if (s != std::floor(s)) return false;
    }
    return true;
}

std::vector<PrngState> seed_streams(std::size_t count, uint32_t master_seed) {
    if (master_seed == 0) throw std::invalid_argument("seed_streams: master_seed must be nonzero");

    SeedStream bits(master_seed);
    std::vector<PrngState> streams(count);
    for (auto& s : streams) {
        for (int i = 0; i < 4; ++i) {
            const auto m = static_cast<uint32_t>(kPrngM[i]);
            s.lane[i] = static_cast<float>(1u + bits.next() % (m - 1u));
        }
    }
    return streams;
}

}  // namespace glint
