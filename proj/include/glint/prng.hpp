// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef GLINT_PRNG_HPP
#define GLINT_PRNG_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace glint {

// Four multiplicative linear congruential generators, combined. Every state
// variable and every intermediate is a non-negative integer small enough to
// be exact in float32 (< 2^23), so the generator runs entirely in
// single-precision floating point and still behaves like exact integer
// arithmetic. Each modulus m_i is prime and factored as m_i = a_i*q_i + r_i
// with r_i < q_i, which keeps a_i*(s mod q_i) and beta_i*r_i in range.
inline constexpr std::array<float, 4> kPrngQ{1225.0f, 1585.0f, 2457.0f, 2098.0f};
inline constexpr std::array<float, 4> kPrngR{1112.0f, 367.0f, 92.0f, 265.0f};
inline constexpr std::array<float, 4> kPrngA{3423.0f, 2646.0f, 1707.0f, 1999.0f};
inline constexpr std::array<float, 4> kPrngM{4194287.0f, 4194277.0f, 4194191.0f, 4194167.0f};

struct PrngState {
    std::array<float, 4> lane{1.0f, 2.0f, 3.0f, 4.0f};

    /// Advances all four lanes one step and returns a variate in [0, 1).
    float next();

    /// True when every lane is an integer inside [1, m_i - 1].
    bool valid() const;

    bool operator==(const PrngState& o) const { return lane == o.lane; }
};

/// 32-bit xorshift used only to spread a master seed into per-stream lane
/// seeds. The all-zero state is a fixed point, hence seed != 0.
struct SeedStream {
    uint32_t state;
    explicit SeedStream(uint32_t seed) : state(seed) {}
    uint32_t next() {
        state ^= state << 13;
        state ^= state >> 17;
        state ^= state << 5;
        return state;
    }
};

/// `count` decorrelated streams derived from one master seed. Throws
/// std::invalid_argument when master_seed == 0.
std::vector<PrngState> seed_streams(std::size_t count, uint32_t master_seed);

}  // namespace glint

#endif
