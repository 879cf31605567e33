// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef GLINT_GEOMETRY_HPP
#define GLINT_GEOMETRY_HPP

#include <cstdint>
#include <optional>

#include "glint/vec.hpp"

namespace glint {

struct Ray {
    Vec3 origin;
    Vec3 direction;
    float t_min = 0.0f;
    float t_max = kInfinity;

    Vec3 at(float t) const { return origin + direction * t; }
};

/// Axis-aligned box. Default-constructed boxes are empty (min > max) and
/// behave as the identity under extend().
struct Aabb {
    Vec3 lo{kInfinity, kInfinity, kInfinity};
    Vec3 hi{-kInfinity, -kInfinity, -kInfinity};

    bool empty() const { return lo.x > hi.x || lo.y > hi.y || lo.z > hi.z; }

    void extend(const Vec3& p) {
        lo = min(lo, p);
        hi = max(hi, p);
    }
    void extend(const Aabb& b) {
        lo = min(lo, b.lo);
        hi = max(hi, b.hi);
    }

    bool contains(const Aabb& b) const {
        return lo.x <= b.lo.x && lo.y <= b.lo.y && lo.z <= b.lo.z && hi.x >= b.hi.x &&
               hi.y >= b.hi.y && hi.z >= b.hi.z;
    }
    bool contains(const Vec3& p) const {
        return lo.x <= p.x && lo.y <= p.y && lo.z <= p.z && hi.x >= p.x && hi.y >= p.y &&
               hi.z >= p.z;
    }

    Vec3 center() const { return (lo + hi) * 0.5f; }
    Vec3 extent() const { return hi - lo; }

    float surface_area() const {
        if (empty()) return 0.0f;
        const Vec3 d = extent();
        return 2.0f * (d.x * d.y + d.y * d.z + d.z * d.x);
    }

    float diagonal() const { return empty() ? 0.0f : length(extent()); }
};

struct Triangle {
    Vec3 p0, p1, p2;
    Vec3 n0, n1, n2;     // shading normals (unit)
    uint32_t material = 0;

    Vec3 geometric_normal() const { return normalize(cross(p1 - p0, p2 - p0)); }
    float area() const { return 0.5f * length(cross(p1 - p0, p2 - p0)); }
    Aabb bounds() const {
        Aabb b;
        b.extend(p0);
        b.extend(p1);
        b.extend(p2);
        return b;
    }
};

struct Hit {
    float t = kInfinity;
    uint32_t triangle = 0;
    float u = 0.0f, v = 0.0f;   // barycentric weights of p1 and p2
    Vec3 position;
    Vec3 normal;                // geometric normal, unit length, winding side
};

/// Moller-Trumbore intersection. Returns nothing for rays parallel to the
/// triangle plane (|det| < 1e-7) or hits outside [t_min, t_max]. The caller
/// fills Hit::triangle; it is left 0 here.
std::optional<Hit> intersect_ray_triangle(const Ray& ray, const Triangle& tri);

// Multiplicative slack applied to the slab interval so that boxes that are
// flat in one axis, and hits lying exactly on the current best t, are not
// culled by rounding.
inline constexpr float kSlabSlack = 1.00002f;

/// Slab test against [max(t_min, 0), min(t_max, t_best)]. Deliberately
/// conservative: flat boxes and hits exactly at t_best still pass.
bool intersect_ray_aabb(const Ray& ray, const Aabb& box, float t_best = kInfinity);

/// Cosine-weighted direction about `normal` from two unit uniforms.
/// u = (0,0) maps to the normal itself.
Vec3 sample_cosine_hemisphere(const Vec3& normal, float u1, float u2);

/// Mirror reflection of incident direction `d` about unit normal `n`.
inline Vec3 reflect(const Vec3& d, const Vec3& n) { return d - 2.0f * dot(d, n) * n; }

/// Ray leaving a surface at `pos` in direction `dir`, origin nudged off the
/// surface along the geometric normal on the departure side.
inline Ray offset_ray(const Vec3& pos, const Vec3& dir, const Vec3& geo_normal, float eps) {
    const Vec3 n = dot(geo_normal, dir) >= 0.0f ? geo_normal : -geo_normal;
    return Ray{pos + n * eps, dir, 0.0f, kInfinity};
}

/// Right-handed orthonormal frame with `n` as the third axis.
void orthonormal_basis(const Vec3& n, Vec3& tangent, Vec3& bitangent);

}  // namespace glint

#endif
