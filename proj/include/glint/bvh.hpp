// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef GLINT_BVH_HPP
#define GLINT_BVH_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glint/geometry.hpp"

namespace glint {

inline constexpr uint32_t kEndLink = 0xffffffffu;

/// Binary SAH tree as produced by build_sah. Node 0 is the root; interior
/// nodes have two children, leaves reference a range of triangle_order.
struct BuildNode {
    Aabb box;
    int32_t left = -1;
    int32_t right = -1;
    uint32_t begin = 0;
    uint32_t end = 0;

    bool is_leaf() const { return left < 0; }
};

struct BuildTree {
    std::vector<BuildNode> nodes;
    std::vector<uint32_t> triangle_order;  // triangle indices grouped by leaf
};

/// Sweep SAH build over all three axes (traversal cost 1, intersection cost 1
/// per triangle). A range becomes a leaf when it is a single triangle, or
/// when it fits max_leaf_size and the leaf cost does not exceed the best
/// split cost. Throws std::invalid_argument on an empty input.
BuildTree build_sah(std::span<const Triangle> triangles, uint32_t max_leaf_size = 4);

struct LinkPair {
    uint32_t hit = kEndLink;
    uint32_t miss = kEndLink;
};

/// The same tree threaded six times, one hit/miss overlay per signed
/// dominant axis (+x, -x, +y, -y, +z, -z in link slots 0..5). Nodes are
/// stored in the +x overlay's visit order, so overlay 0 walks the array
/// front to back.
struct MtbvhNode {
    Aabb box;
    uint32_t begin = 0;
    uint32_t end = 0;  // leaf iff begin < end
    std::array<LinkPair, 6> links{};

    bool is_leaf() const { return begin < end; }
};

struct Mtbvh {
    std::vector<MtbvhNode> nodes;  // root at 0
    std::vector<uint32_t> triangle_order;
};

Mtbvh thread_links(const BuildTree& tree);

/// Link slot for a ray direction: dominant axis (ties resolved x before y
/// before z), negative component selects the odd slot. Throws
/// std::invalid_argument for the zero vector.
int select_link_set(const Vec3& direction);

struct TraversalStats {
    uint64_t aabb_tests = 0;
    uint64_t triangle_tests = 0;
    uint64_t nodes_visited = 0;

    void merge(const TraversalStats& o) {
        aabb_tests += o.aabb_tests;
        triangle_tests += o.triangle_tests;
        nodes_visited += o.nodes_visited;
    }
};

/// Stackless nearest-hit traversal using the overlay picked per ray by
/// select_link_set. Equal-t ties resolve to the lower triangle index.
std::optional<Hit> traverse(const Mtbvh& bvh, std::span<const Triangle> triangles, const Ray& ray,
                            TraversalStats* stats = nullptr);

/// Same, but with a caller-pinned overlay. Forcing set 0 for every ray is the
/// single-threaded-layout (TBVH) baseline.
std::optional<Hit> traverse_with_set(const Mtbvh& bvh, std::span<const Triangle> triangles,
                                     const Ray& ray, int link_set,
                                     TraversalStats* stats = nullptr);

/// Reference nearest hit by scanning every triangle; shares no traversal
/// logic with the trees. Ties resolve to the lower triangle index.
std::optional<Hit> brute_force_nearest(std::span<const Triangle> triangles, const Ray& ray);

enum class TraversalMode { Tbvh, Mtbvh };

struct MeasureResult {
    TraversalStats stats;
    std::size_t rays = 0;
    std::size_t hits = 0;
    double seconds = 0.0;
    double rays_per_second = 0.0;
    uint64_t hit_hash = 0;      // FNV-1a over per-ray hit ids, 0 for a miss
    double shade_checksum = 0.0;
};

/// Times a ray batch on one thread. `shade` adds a Lambert term per hit so
/// the timed loop includes a little shading work.
MeasureResult measure(const Mtbvh& bvh, std::span<const Triangle> triangles,
                      std::span<const Ray> rays, TraversalMode mode, bool shade = false);
MeasureResult measure_forced_set(const Mtbvh& bvh, std::span<const Triangle> triangles,
                                 std::span<const Ray> rays, int link_set, bool shade = false);

/// Storage accounting in 16-byte records: a triangle takes 6, a node takes 2
/// for the box plus 1 per link pair (1 pair for the single-overlay layout,
/// 6 for the full one).
struct StorageReport {
    uint64_t triangle_records = 0;
    uint64_t tbvh_node_records = 0;
    uint64_t mtbvh_node_records = 0;
    uint64_t tbvh_total = 0;
    uint64_t mtbvh_total = 0;
    double ratio = 0.0;  // mtbvh_total / tbvh_total
};

StorageReport storage_report(const Mtbvh& bvh, std::size_t triangle_count);

/// Structural checks used by tests and the self-test: box nesting, leaf
/// partition, and that every overlay visits every node exactly once. Returns
/// an empty string when the tree is well formed, else a description.
std::string validate_tree(const BuildTree& tree, std::span<const Triangle> triangles,
                          uint32_t max_leaf_size);
std::string validate_links(const Mtbvh& bvh);

}  // namespace glint

#endif
