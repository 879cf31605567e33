// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/bvh.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace glint {

namespace {

struct Prim {
    Aabb box;
    Vec3 center;
    uint32_t index = 0;
};

struct AxisLess {
    int axis;
    bool operator()(const Prim& a, const Prim& b) const {
        const float ca = a.center[axis];
        const float cb = b.center[axis];
        if (ca != cb) return ca < cb;
        return a.index < b.index;  // deterministic across equal centers
    }
};

}  // namespace

BuildTree build_sah(std::span<const Triangle> triangles, uint32_t max_leaf_size) {
    if (triangles.empty()) throw std::invalid_argument("build_sah: no triangles");
    if (max_leaf_size == 0) max_leaf_size = 1;

    std::vector<Prim> prims(triangles.size());
    for (uint32_t i = 0; i < triangles.size(); ++i) {
        prims[i].box = triangles[i].bounds();
        prims[i].center = prims[i].box.center();
        prims[i].index = i;
    }

    BuildTree tree;
    tree.nodes.reserve(2 * triangles.size());
    std::vector<float> right_area(triangles.size());

    auto build = [&](auto&& self, uint32_t begin, uint32_t end) -> int32_t {
        const uint32_t n = end - begin;
        Aabb box;
        for (uint32_t i = begin; i < end; ++i) box.extend(prims[i].box);

        const auto node_id = static_cast<int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[node_id].box = box;

        auto make_leaf = [&] {
            auto& nd = tree.nodes[node_id];
            nd.begin = begin;
            nd.end = end;
        };

        if (n == 1) {
            make_leaf();
            return node_id;
        }

        // Full sweep on each axis: sort by centroid, then evaluate
        // cost(i) = 1 + (SA_left(i)*i + SA_right(i)*(n-i)) / SA_parent.
        const float parent_area = box.surface_area();
        int best_axis = -1;
        uint32_t best_pos = 0;
        float best_cost = kInfinity;

        for (int axis = 0; axis < 3; ++axis) {
            std::sort(prims.begin() + begin, prims.begin() + end, AxisLess{axis});
            Aabb acc;
            for (uint32_t i = n; i-- > 1;) {
                acc.extend(prims[begin + i].box);
                right_area[i] = acc.surface_area();
            }
            Aabb left;
            for (uint32_t i = 1; i < n; ++i) {
                left.extend(prims[begin + i - 1].box);
                const float cost =
                    1.0f + (left.surface_area() * static_cast<float>(i) +
                            right_area[i] * static_cast<float>(n - i)) /
                               parent_area;
                if (cost < best_cost) {
                    best_cost = cost;
                    best_axis = axis;
                    best_pos = i;
                }
            }
        }

        const float leaf_cost = static_cast<float>(n);
        if (n <= max_leaf_size && (best_axis < 0 || leaf_cost <= best_cost)) {
            make_leaf();
            return node_id;
        }

        uint32_t mid;
        if (best_axis < 0) {
            // All sweeps degenerate (identical flat boxes); fall back to an
            // index-order median so the build still terminates.
            std::sort(prims.begin() + begin, prims.begin() + end, AxisLess{0});
            mid = begin + n / 2;
        } else {
            std::sort(prims.begin() + begin, prims.begin() + end, AxisLess{best_axis});
            mid = begin + best_pos;
        }

        const int32_t l = self(self, begin, mid);
        const int32_t r = self(self, mid, end);
        tree.nodes[node_id].left = l;
        tree.nodes[node_id].right = r;
        return node_id;
    };
    build(build, 0, static_cast<uint32_t>(triangles.size()));

    tree.triangle_order.resize(prims.size());
    for (std::size_t i = 0; i < prims.size(); ++i) tree.triangle_order[i] = prims[i].index;
    return tree;
}

namespace {

// Child visit order for one overlay: nearer box center along the overlay
// axis goes first; equal centers keep the left child first.
std::pair<int32_t, int32_t> near_order(const std::vector<BuildNode>& nodes, int32_t left,
                                       int32_t right, int set) {
    const int axis = set >> 1;
    const float cl = nodes[left].box.center()[axis];
    const float cr = nodes[right].box.center()[axis];
    bool left_first;
    if (cl == cr)
        left_first = true;
    else if (set & 1)
        left_first = cl > cr;
    else
        left_first = cl < cr;
    return left_first ? std::pair{left, right} : std::pair{right, left};
}

}  // namespace

Mtbvh thread_links(const BuildTree& tree) {
    const auto& tn = tree.nodes;
    if (tn.empty()) throw std::invalid_argument("thread_links: empty tree");

    // Flat storage order is the +x overlay's visit order.
    std::vector<uint32_t> flat_of(tn.size());
    std::vector<int32_t> order;
    order.reserve(tn.size());
    {
        std::vector<int32_t> stack{0};
        while (!stack.empty()) {
            const int32_t id = stack.back();
            stack.pop_back();
            flat_of[id] = static_cast<uint32_t>(order.size());
            order.push_back(id);
            if (!tn[id].is_leaf()) {
                auto [first, second] = near_order(tn, tn[id].left, tn[id].right, 0);
                stack.push_back(second);
                stack.push_back(first);
            }
        }
    }

    Mtbvh bvh;
    bvh.triangle_order = tree.triangle_order;
    bvh.nodes.resize(tn.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const BuildNode& src = tn[order[i]];
        bvh.nodes[i].box = src.box;
        if (src.is_leaf()) {
            bvh.nodes[i].begin = src.begin;
            bvh.nodes[i].end = src.end;
        }
    }

    for (int set = 0; set < 6; ++set) {
        std::vector<std::pair<int32_t, uint32_t>> stack{{0, kEndLink}};
        while (!stack.empty()) {
            const auto [id, succ] = stack.back();
            stack.pop_back();
            auto& dst = bvh.nodes[flat_of[id]];
            if (tn[id].is_leaf()) {
                dst.links[set] = {succ, succ};
            } else {
                auto [first, second] = near_order(tn, tn[id].left, tn[id].right, set);
                dst.links[set] = {flat_of[first], succ};
                stack.emplace_back(second, succ);
                stack.emplace_back(first, flat_of[second]);
            }
        }
    }
    return bvh;
}

int select_link_set(const Vec3& direction) {
    const float ax = std::fabs(direction.x);
    const float ay = std::fabs(direction.y);
    const float az = std::fabs(direction.z);
    if (ax == 0.0f && ay == 0.0f && az == 0.0f)
        throw std::invalid_argument("select_link_set: zero direction");
    int axis = 0;
    float m = ax;
    if (ay > m) {
        axis = 1;
        m = ay;
    }
    if (az > m) axis = 2;
    return axis * 2 + (direction[axis] < 0.0f ? 1 : 0);
}

namespace {

inline bool slab_hit(const Aabb& box, const Vec3& origin, const Vec3& inv, float t_lo,
                     float t_hi) {
    float lo = t_lo;
    float hi = t_hi;
    for (int axis = 0; axis < 3; ++axis) {
        float t0 = (box.lo[axis] - origin[axis]) * inv[axis];
        float t1 = (box.hi[axis] - origin[axis]) * inv[axis];
        if (t0 > t1) std::swap(t0, t1);
        if (t0 > lo) lo = t0;
        if (t1 < hi) hi = t1;
    }
    return lo <= hi * kSlabSlack;
}

}  // namespace

std::optional<Hit> traverse_with_set(const Mtbvh& bvh, std::span<const Triangle> triangles,
                                     const Ray& ray, int link_set, TraversalStats* stats) {
    if (link_set < 0 || link_set > 5)
        throw std::invalid_argument("traverse_with_set: link set out of range");

    const Vec3 inv{1.0f / ray.direction.x, 1.0f / ray.direction.y, 1.0f / ray.direction.z};
    const float t_lo = ray.t_min > 0.0f ? ray.t_min : 0.0f;
    float t_best = ray.t_max;

    Hit best;
    bool found = false;
    TraversalStats local;

    uint32_t node = 0;
    while (node != kEndLink) {
        const MtbvhNode& n = bvh.nodes[node];
        ++local.nodes_visited;
        ++local.aabb_tests;
        if (slab_hit(n.box, ray.origin, inv, t_lo, t_best)) {
            if (n.is_leaf()) {
                for (uint32_t i = n.begin; i < n.end; ++i) {
                    const uint32_t tri = bvh.triangle_order[i];
                    ++local.triangle_tests;
                    if (auto h = intersect_ray_triangle(ray, triangles[tri])) {
                        if (!found || h->t < best.t ||
                            (h->t == best.t && tri < best.triangle)) {
                            best = *h;
                            best.triangle = tri;
                            t_best = best.t;
                            found = true;
                        }
                    }
                }
            }
            node = n.links[link_set].hit;
        } else {
            node = n.links[link_set].miss;
        }
    }

    if (stats) stats->merge(local);
    return found ? std::optional<Hit>(best) : std::nullopt;
}

std::optional<Hit> traverse(const Mtbvh& bvh, std::span<const Triangle> triangles, const Ray& ray,
                            TraversalStats* stats) {
    return traverse_with_set(bvh, triangles, ray, select_link_set(ray.direction), stats);
}

std::optional<Hit> brute_force_nearest(std::span<const Triangle> triangles, const Ray& ray) {
    std::optional<Hit> best;
    for (uint32_t i = 0; i < triangles.size(); ++i) {
        if (auto h = intersect_ray_triangle(ray, triangles[i])) {
            if (!best || h->t < best->t) {
                best = *h;
                best->triangle = i;
            }
        }
    }
    return best;
}

namespace {

MeasureResult measure_impl(const Mtbvh& bvh, std::span<const Triangle> triangles,
                           std::span<const Ray> rays, int forced_set, bool shade) {
    MeasureResult res;
    res.rays = rays.size();
    uint64_t hash = 1469598103934665603ull;  // FNV-1a
    double shade_sum = 0.0;

    const auto t0 = std::chrono::steady_clock::now();
    for (const Ray& ray : rays) {
        const auto hit = forced_set < 0
                             ? traverse(bvh, triangles, ray, &res.stats)
                             : traverse_with_set(bvh, triangles, ray, forced_set, &res.stats);
        hash ^= hit ? static_cast<uint64_t>(hit->triangle) + 1 : 0;
        hash *= 1099511628211ull;
        if (hit) {
            ++res.hits;
            if (shade) shade_sum += std::fabs(dot(ray.direction, hit->normal));
        }
    }
    const auto t1 = std::chrono::steady_clock::now();

    res.seconds = std::chrono::duration<double>(t1 - t0).count();
    res.rays_per_second = res.seconds > 0.0 ? static_cast<double>(res.rays) / res.seconds : 0.0;
    res.hit_hash = hash;
    res.shade_checksum = shade_sum;
    return res;
}

}  // namespace

MeasureResult measure(const Mtbvh& bvh, std::span<const Triangle> triangles,
                      std::span<const Ray> rays, TraversalMode mode, bool shade) {
    return measure_impl(bvh, triangles, rays, mode == TraversalMode::Tbvh ? 0 : -1, shade);
}

MeasureResult measure_forced_set(const Mtbvh& bvh, std::span<const Triangle> triangles,
                                 std::span<const Ray> rays, int link_set, bool shade) {
    if (link_set < 0 || link_set > 5)
        throw std::invalid_argument("measure_forced_set: link set out of range");
    return measure_impl(bvh, triangles, rays, link_set, shade);
}

StorageReport storage_report(const Mtbvh& bvh, std::size_t triangle_count) {
    StorageReport r;
    const auto n = static_cast<uint64_t>(bvh.nodes.size());
    r.triangle_records = 6ull * triangle_count;
    r.tbvh_node_records = 3ull * n;
    r.mtbvh_node_records = 8ull * n;
    r.tbvh_total = r.triangle_records + r.tbvh_node_records;
    r.mtbvh_total = r.triangle_records + r.mtbvh_node_records;
    r.ratio = r.tbvh_total > 0 ? static_cast<double>(r.mtbvh_total) / static_cast<double>(r.tbvh_total)
                               : 0.0;
    return r;
}

std::string validate_tree(const BuildTree& tree, std::span<const Triangle> triangles,
                          uint32_t max_leaf_size) {
    if (tree.nodes.empty()) return "tree has no nodes";
    if (tree.triangle_order.size() != triangles.size()) return "triangle_order size mismatch";

    std::vector<bool> seen(triangles.size(), false);
    for (uint32_t t : tree.triangle_order) {
        if (t >= triangles.size()) return "triangle_order index out of range";
        if (seen[t]) return "triangle_order repeats an index";
        seen[t] = true;
    }

    std::size_t visited = 0;
    uint32_t next_begin = 0;
    std::string error;

    auto walk = [&](auto&& self, int32_t id) -> void {
        if (!error.empty()) return;
        if (id < 0 || static_cast<std::size_t>(id) >= tree.nodes.size()) {
            error = "child index out of range";
            return;
        }
        ++visited;
        const BuildNode& nd = tree.nodes[id];
        if (nd.is_leaf()) {
            if (nd.right >= 0) {
                error = "half-interior node";
                return;
            }
            if (nd.begin >= nd.end) {
                error = "empty leaf";
                return;
            }
            if (nd.end - nd.begin > std::max(max_leaf_size, 1u)) {
                error = "leaf exceeds max_leaf_size";
                return;
            }
            if (nd.begin != next_begin) {
                error = "leaf ranges do not tile the triangle order";
                return;
            }
            next_begin = nd.end;
            for (uint32_t i = nd.begin; i < nd.end; ++i) {
                const Aabb b = triangles[tree.triangle_order[i]].bounds();
                if (!nd.box.contains(b)) {
                    error = "leaf box does not contain its triangles";
                    return;
                }
            }
        } else {
            if (nd.right < 0) {
                error = "half-interior node";
                return;
            }
            if (!nd.box.contains(tree.nodes[nd.left].box) ||
                !nd.box.contains(tree.nodes[nd.right].box)) {
                error = "parent box does not contain child boxes";
                return;
            }
            self(self, nd.left);
            self(self, nd.right);
        }
    };
    walk(walk, 0);

    if (!error.empty()) return error;
    if (visited != tree.nodes.size()) return "unreachable nodes present";
    if (next_begin != tree.triangle_order.size()) return "leaves do not cover all triangles";
    return {};
}

std::string validate_links(const Mtbvh& bvh) {
    const std::size_t n = bvh.nodes.size();
    if (n == 0) return "no nodes";

    for (int set = 0; set < 6; ++set) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& lp = bvh.nodes[i].links[set];
            if (lp.hit != kEndLink && lp.hit >= n) return "hit link out of range";
            if (lp.miss != kEndLink && lp.miss >= n) return "miss link out of range";
            if (bvh.nodes[i].is_leaf() && lp.hit != lp.miss)
                return "leaf hit link differs from miss link";
        }

        // Following hit links from the root is the overlay's full visit
        // order: every node exactly once, then the end sentinel.
        std::vector<bool> seen(n, false);
        std::size_t count = 0;
        uint32_t node = 0;
        while (node != kEndLink) {
            if (node >= n) return "walk left the node array";
            if (seen[node]) return "overlay walk revisits a node";
            seen[node] = true;
            ++count;
            if (set == 0 && count - 1 != node) return "+x overlay order is not the array order";
            node = bvh.nodes[node].links[set].hit;
        }
        if (count != n) return "overlay walk skips nodes";

        // All-miss walk must terminate without cycles as well.
        std::size_t steps = 0;
        node = 0;
        while (node != kEndLink) {
            if (++steps > n) return "miss chain does not terminate";
            node = bvh.nodes[node].links[set].miss;
        }
    }
    return {};
}

}  // namespace glint
