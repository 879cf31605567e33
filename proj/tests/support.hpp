// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0
//
// Shared test fixtures and reference oracles. The oracles here deliberately
// avoid the library's algorithms: triangle intersection goes through a
// double-precision plane solve, and the generator reference runs in 64-bit
// integers.

#ifndef GLINT_TESTS_SUPPORT_HPP
#define GLINT_TESTS_SUPPORT_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "glint/geometry.hpp"
#include "glint/scene.hpp"

namespace glint::test {

// ---- triangle oracle -------------------------------------------------------

struct PlaneClipHit {
    double t = 0.0;
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;  // barycentric coordinates
    double denom = 0.0;                    // plane-alignment measure
};

/// Double-precision reference: solve for the plane parameter, then clip the
/// point against the three edge half-spaces via barycentric coordinates.
inline std::optional<PlaneClipHit> plane_clip_intersect(const Ray& ray, const Triangle& tri) {
    const double p0[3] = {tri.p0.x, tri.p0.y, tri.p0.z};
    const double e1[3] = {tri.p1.x - tri.p0.x, tri.p1.y - tri.p0.y, tri.p1.z - tri.p0.z};
    const double e2[3] = {tri.p2.x - tri.p0.x, tri.p2.y - tri.p0.y, tri.p2.z - tri.p0.z};
    const double n[3] = {e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2],
                         e1[0] * e2[1] - e1[1] * e2[0]};
    const double d[3] = {ray.direction.x, ray.direction.y, ray.direction.z};
    const double o[3] = {ray.origin.x, ray.origin.y, ray.origin.z};

    const double denom = n[0] * d[0] + n[1] * d[1] + n[2] * d[2];
    if (denom == 0.0) return std::nullopt;

    const double t =
        (n[0] * (p0[0] - o[0]) + n[1] * (p0[1] - o[1]) + n[2] * (p0[2] - o[2])) / denom;
    if (!(t >= ray.t_min && t <= ray.t_max)) return std::nullopt;

    const double hit[3] = {o[0] + d[0] * t - p0[0], o[1] + d[1] * t - p0[1],
                           o[2] + d[2] * t - p0[2]};
    // Barycentric solve via the Gram system of (e1, e2).
    const double d11 = e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2];
    const double d12 = e1[0] * e2[0] + e1[1] * e2[1] + e1[2] * e2[2];
    const double d22 = e2[0] * e2[0] + e2[1] * e2[1] + e2[2] * e2[2];
    const double h1 = hit[0] * e1[0] + hit[1] * e1[1] + hit[2] * e1[2];
    const double h2 = hit[0] * e2[0] + hit[1] * e2[1] + hit[2] * e2[2];
    const double det = d11 * d22 - d12 * d12;
    if (det == 0.0) return std::nullopt;

    PlaneClipHit res;
    res.b1 = (d22 * h1 - d12 * h2) / det;
    res.b2 = (d11 * h2 - d12 * h1) / det;
    res.b0 = 1.0 - res.b1 - res.b2;
    res.t = t;
    res.denom = denom;
    if (res.b1 < 0.0 || res.b2 < 0.0 || res.b0 < 0.0) return std::nullopt;
    return res;
}

/// True when a float/oracle disagreement sits in the numerically ambiguous
/// zone: a barycentric coordinate within eps of an edge, or a nearly
/// plane-parallel ray.
inline bool near_edge_case(const Ray& ray, const Triangle& tri, double eps = 1e-3) {
    const Ray wide{ray.origin, ray.direction, -kInfinity, kInfinity};
    const auto h = plane_clip_intersect(wide, tri);
    if (!h) return true;  // parallel or degenerate
    const double area2 = [&] {
        const Vec3 c = cross(tri.p1 - tri.p0, tri.p2 - tri.p0);
        return std::sqrt(static_cast<double>(length_squared(c)));
    }();
    const double dir_len = std::sqrt(static_cast<double>(length_squared(ray.direction)));
    if (std::fabs(h->denom) < 1e-4 * area2 * dir_len) return true;
    if (std::fabs(h->b0) < eps || std::fabs(h->b1) < eps || std::fabs(h->b2) < eps) return true;
    if (std::fabs(h->t - ray.t_min) < eps * std::fabs(h->t) + 1e-9) return true;
    if (ray.t_max < kInfinity && std::fabs(h->t - ray.t_max) < eps * std::fabs(h->t) + 1e-9)
        return true;
    return false;
}

// ---- generator oracle ------------------------------------------------------

/// 64-bit integer twin of the float recurrence.
struct IntGenerator {
    static constexpr std::array<int64_t, 4> q{1225, 1585, 2457, 2098};
    static constexpr std::array<int64_t, 4> r{1112, 367, 92, 265};
    static constexpr std::array<int64_t, 4> a{3423, 2646, 1707, 1999};
    static constexpr std::array<int64_t, 4> m{4194287, 4194277, 4194191, 4194167};

    std::array<int64_t, 4> lane{1, 2, 3, 4};

    void step() {
        for (int i = 0; i < 4; ++i) {
            const int64_t beta = lane[i] / q[i];
            int64_t p = a[i] * (lane[i] - beta * q[i]) - beta * r[i];
            if (p <= 0) p += m[i];
            lane[i] = p;
        }
    }
};

// ---- scene builders --------------------------------------------------------

inline Triangle make_triangle(const Vec3& a, const Vec3& b, const Vec3& c, uint32_t mat = 0) {
    Triangle tri;
    tri.p0 = a;
    tri.p1 = b;
    tri.p2 = c;
    tri.n0 = tri.n1 = tri.n2 = normalize(cross(b - a, c - a));
    tri.material = mat;
    return tri;
}

/// Quad (p, p+u, p+u+v, p+v) as two triangles.
inline void push_quad(std::vector<Triangle>& tris, const Vec3& p, const Vec3& u, const Vec3& v,
                      uint32_t mat = 0) {
    tris.push_back(make_triangle(p, p + u, p + u + v, mat));
    tris.push_back(make_triangle(p, p + u + v, p + v, mat));
}

inline std::vector<Triangle> random_soup(std::size_t count, uint32_t seed, float extent = 10.0f,
                                         float size = 1.5f) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> pos(0.0f, extent);
    std::uniform_real_distribution<float> jit(-0.5f * size, 0.5f * size);
    std::vector<Triangle> tris;
    tris.reserve(count);
    while (tris.size() < count) {
        const Vec3 base{pos(rng), pos(rng), pos(rng)};
        const Vec3 a = base + Vec3{jit(rng), jit(rng), jit(rng)};
        const Vec3 b = base + Vec3{jit(rng), jit(rng), jit(rng)};
        const Vec3 c = base + Vec3{jit(rng), jit(rng), jit(rng)};
        if (length_squared(cross(b - a, c - a)) < 1e-12f) continue;
        tris.push_back(make_triangle(a, b, c));
    }
    return tris;
}

/// n x n axis-aligned quads tiling [0,1]^2 at z = 0.5; every box is flat in z.
inline std::vector<Triangle> coplanar_grid(int n) {
    std::vector<Triangle> tris;
    const float s = 1.0f / static_cast<float>(n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            push_quad(tris, {x * s, y * s, 0.5f}, {s, 0, 0}, {0, s, 0});
    return tris;
}

/// Parallel unit quads stacked along z.
inline std::vector<Triangle> parallel_slabs(int count) {
    std::vector<Triangle> tris;
    for (int i = 0; i < count; ++i) {
        const float z = static_cast<float>(i) / static_cast<float>(count);
        push_quad(tris, {0, 0, z}, {1, 0, 0}, {0, 1, 0});
    }
    return tris;
}

inline std::vector<Ray> random_rays(std::size_t count, uint32_t seed, const Aabb& bounds,
                                    float pad_fraction = 0.25f) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> uni(0.0f, 1.0f);
    Aabb box = bounds;
    const Vec3 pad = box.extent() * pad_fraction;
    box.lo = box.lo - pad;
    box.hi = box.hi + pad;
    const Vec3 ext = box.extent();

    std::vector<Ray> rays;
    rays.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const Vec3 origin{box.lo.x + uni(rng) * ext.x, box.lo.y + uni(rng) * ext.y,
                          box.lo.z + uni(rng) * ext.z};
        const float z = 1.0f - 2.0f * uni(rng);
        const float r = std::sqrt(std::fmax(0.0f, 1.0f - z * z));
        const float phi = 2.0f * kPi * uni(rng);
        rays.push_back(Ray{origin, {r * std::cos(phi), r * std::sin(phi), z}});
    }
    return rays;
}

/// Closed box with every wall both emissive and diffuse; the steady state
/// radiance is emission / (1 - albedo) everywhere, independent of shape.
inline Scene furnace_scene(float albedo, float emission, int image_size = 64) {
    Scene s;
    s.materials = {{"walls", MaterialKind::Diffuse, Rgb{albedo, albedo, albedo},
                    Rgb{emission, emission, emission}}};
    std::vector<Triangle>& t = s.triangles;
    push_quad(t, {0, 0, 0}, {0, 0, 1}, {1, 0, 0});  // floor (+y)
    push_quad(t, {0, 1, 0}, {1, 0, 0}, {0, 0, 1});  // ceiling (-y)
    push_quad(t, {0, 0, 1}, {0, 1, 0}, {1, 0, 0});  // back (-z)
    push_quad(t, {0, 0, 0}, {1, 0, 0}, {0, 1, 0});  // front (+z)
    push_quad(t, {0, 0, 0}, {0, 1, 0}, {0, 0, 1});  // left (+x)
    push_quad(t, {1, 0, 0}, {0, 0, 1}, {0, 1, 0});  // right (-x)

    s.camera.eye = {0.5f, 0.5f, 0.15f};
    s.camera.look_at = {0.5f, 0.5f, 1.0f};
    s.camera.up = {0, 1, 0};
    s.camera.vertical_fov = 60.0f;
    s.camera.width = image_size;
    s.camera.height = image_size;
    s.finalize();
    return s;
}

// ---- statistics ------------------------------------------------------------

/// Pearson chi-square statistic for equally likely bins.
inline double chi_square_uniform(const std::vector<uint64_t>& counts, double total) {
    const double expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (const uint64_t c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

// Frozen critical values (p = 0.001 upper tail).
inline constexpr double kChi2Crit99 = 148.230;  // 99 degrees of freedom
inline constexpr double kChi2Crit15 = 37.697;   // 15 degrees of freedom

}  // namespace glint::test

#endif
