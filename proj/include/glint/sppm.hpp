// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef GLINT_SPPM_HPP
#define GLINT_SPPM_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "glint/bvh.hpp"
#include "glint/image.hpp"
#include "glint/prng.hpp"
#include "glint/scene.hpp"

namespace glint {

/// Per-pixel progressive estimator state. position/normal/weight/albedo/valid
/// describe the current iteration's eye hit; radius2, n_accum, tau and direct
/// accumulate across iterations.
struct MeasurementPoint {
    uint32_t pixel = 0;
    Vec3 position;
    Vec3 normal;
    Rgb weight{0.0f, 0.0f, 0.0f};  // eye-path throughput up to the diffuse hit
    Rgb albedo{0.0f, 0.0f, 0.0f};
    float radius2 = 0.0f;
    float n_accum = 0.0f;
    Rgb tau{0.0f, 0.0f, 0.0f};
    Rgb direct{0.0f, 0.0f, 0.0f};
    bool valid = false;
};

/// One photon path slot. Slots are never reallocated; a dead slot regenerates
/// from the light in the next pass, which keeps every pass the same shape.
struct PhotonState {
    Ray ray;
    Rgb flux{0.0f, 0.0f, 0.0f};
    uint32_t depth = 0;  // completed path segments
    bool alive = false;
    PrngState prng;
};

struct PhotonRecord {
    Vec3 position;
    Vec3 incident;  // direction of travel at the surface
    Rgb flux;
    float survival_depth = 0.0f;  // uniform draw deciding hash survival
};

/// One slot of the photon hash table. Of all records mapped here, the one
/// with the smallest survival_depth survives (ties: lowest record index);
/// collisions counts every record mapped here, survivor included, and scales
/// the survivor's contribution so the expectation stays unbiased.
struct HashCell {
    PhotonRecord record;
    uint32_t collisions = 0;
    uint32_t winner = 0;
};

struct HashGridConfig {
    float cell_size = 1.0f;
    uint32_t table_size = 1024;  // power of two
};

struct HashGrid {
    float cell_size = 1.0f;
    uint32_t mask = 0;
    std::vector<HashCell> cells;

    /// Table slot of the grid cell containing p: per-axis quantization,
    /// large odd multipliers, summed, masked.
    uint32_t entry_of_cell(int ix, int iy, int iz) const {
        const uint32_t h = static_cast<uint32_t>(ix) * 0x8da6b343u +
                           static_cast<uint32_t>(iy) * 0xd8163841u +
                           static_cast<uint32_t>(iz) * 0xcb1ab31fu;
        return h & mask;
    }
    int cell_coord(float x) const { return static_cast<int>(std::floor(x / cell_size)); }
    uint32_t entry_of(const Vec3& p) const {
        return entry_of_cell(cell_coord(p.x), cell_coord(p.y), cell_coord(p.z));
    }
};

/// Builds the table in record order. Requires cell_size > 0 and a
/// power-of-two table_size. The surviving record per slot depends only on
/// (survival_depth, index) pairs, not on insertion order.
HashGrid hash_build(std::span<const PhotonRecord> records, const HashGridConfig& config);

struct QueryHit {
    const PhotonRecord* record = nullptr;
    uint32_t collisions = 0;
};

/// All surviving records within sqrt(radius2) of position, each with its
/// slot's collision count. Scans the 3x3x3 cell neighborhood; duplicate
/// table slots (two cells hashing together) are visited once.
std::vector<QueryHit> hash_query(const HashGrid& grid, const Vec3& position, float radius2);

template <typename Fn>
void hash_query_visit(const HashGrid& grid, const Vec3& position, float radius2, Fn&& fn) {
    if (grid.cells.empty()) return;
    const int cx = grid.cell_coord(position.x);
    const int cy = grid.cell_coord(position.y);
    const int cz = grid.cell_coord(position.z);

    std::array<uint32_t, 27> seen{};
    int seen_count = 0;
    for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const uint32_t e = grid.entry_of_cell(cx + dx, cy + dy, cz + dz);
                bool dup = false;
                for (int i = 0; i < seen_count; ++i)
                    if (seen[i] == e) {
                        dup = true;
                        break;
                    }
                if (dup) continue;
                seen[seen_count++] = e;

                const HashCell& cell = grid.cells[e];
                if (cell.collisions == 0) continue;
                if (length_squared(cell.record.position - position) <= radius2)
                    fn(cell.record, cell.collisions);
            }
}

struct IterationStats {
    int iteration = 0;
    uint64_t emitted_total = 0;    // photons emitted so far, all iterations
    std::size_t stored_records = 0;
    std::size_t live_slots = 0;
    double mean_radius = 0.0;      // over points valid this iteration
    double seconds = 0.0;
};

struct SppmConfig {
    int iterations = 64;
    std::size_t photon_slots = 16384;
    int max_depth = 8;
    float alpha = 0.7f;
    uint32_t seed = 1;
    int workers = 0;  // 0 = all hardware threads
    std::function<void(const IterationStats&, std::span<const MeasurementPoint>)> observer;
};

/// Traces one eye path per pixel (jittered through the pixel, mirrors
/// followed up to max_depth) and parks the measurement point on the first
/// diffuse hit. Iteration 0 also sets the initial gather radius from the
/// pixel footprint at the hit distance, clamped to [1e-4, 1e-2] of the scene
/// diagonal.
void eye_pass(const Scene& scene, const Mtbvh& bvh, std::span<PrngState> pixel_prngs,
              std::span<MeasurementPoint> points, int iteration, int max_depth, int workers);

/// Advances every slot by one step: dead slots regenerate at a light (that
/// emission is counted in the return value), live ones trace one segment and
/// either deposit a record (diffuse), reflect (mirror), or die (escape,
/// roulette, depth limit). At most one record per slot per pass.
std::size_t photon_pass(const Scene& scene, const Mtbvh& bvh, std::span<PhotonState> slots,
                        std::span<std::optional<PhotonRecord>> deposits, int max_depth,
                        int workers);

/// Progressive radius/flux update. For each valid point with M > 0 gathered
/// photons: g = (N + alpha*M) / (N + M); radius2 *= g; N += alpha*M;
/// tau = (tau + weight * albedo/pi * sum(flux_i * collisions_i)) * g.
void update_statistics(std::span<MeasurementPoint> points, const HashGrid& grid, float alpha,
                       int workers);

/// direct/iterations + tau / (pi * radius2 * total_emitted).
Rgb radiance_estimate(const MeasurementPoint& point, uint64_t total_emitted, int iterations);

struct RenderResult {
    std::vector<Rgb> radiance;
    Image image;
    std::vector<IterationStats> per_iteration;
    uint64_t total_emitted = 0;
};

/// Full progressive render: per iteration one eye pass, max_depth photon
/// passes pooled into one hash grid (cell size twice the largest gather
/// radius), then the statistics update. Deterministic for a fixed seed
/// regardless of the worker count.
RenderResult render(const Scene& scene, const SppmConfig& config);

}  // namespace glint

#endif
