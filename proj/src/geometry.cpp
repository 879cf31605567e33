// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/geometry.hpp"

namespace glint {

namespace {
constexpr float kDetEpsilon = 1e-7f;
}  // namespace

std::optional<Hit> intersect_ray_triangle(const Ray& ray, const Triangle& tri) {
    const Vec3 e1 = tri.p1 - tri.p0;
    const Vec3 e2 = tri.p2 - tri.p0;
    const Vec3 pvec = cross(ray.direction, e2);
    const float det = dot(e1, pvec);
    if (std::fabs(det) < kDetEpsilon) return std::nullopt;

    const float inv_det = 1.0f / det;
    const Vec3 tvec = ray.origin - tri.p0;
    const float u = dot(tvec, pvec) * inv_det;
    if (u < 0.0f || u > 1.0f) return std::nullopt;

    const Vec3 qvec = cross(tvec, e1);
    const float v = dot(ray.direction, qvec) * inv_det;
    if (v < 0.0f || u + v > 1.0f) return std::nullopt;

    const float t = dot(e2, qvec) * inv_det;
    if (!(t >= ray.t_min && t <= ray.t_max)) return std::nullopt;

    Hit hit;
    hit.t = t;
    hit.u = u;
    hit.v = v;
    hit.position = ray.at(t);
    hit.normal = normalize(cross(e1, e2));
    return hit;
}

bool intersect_ray_aabb(const Ray& ray, const Aabb& box, float t_best) {
    const Vec3 inv{1.0f / ray.direction.x, 1.0f / ray.direction.y, 1.0f / ray.direction.z};

    float lo = ray.t_min > 0.0f ? ray.t_min : 0.0f;
    float hi = ray.t_max < t_best ? ray.t_max : t_best;

    for (int axis = 0; axis < 3; ++axis) {
        float t0 = (box.lo[axis] - ray.origin[axis]) * inv[axis];
        float t1 = (box.hi[axis] - ray.origin[axis]) * inv[axis];
        if (t0 > t1) std::swap(t0, t1);
        // NaN from 0 * inf falls through both comparisons, leaving the
        // interval untouched, which is the conservative choice.
        if (t0 > lo) lo = t0;
        if (t1 < hi) hi = t1;
    }
    return lo <= hi * kSlabSlack;
}

Vec3 sample_cosine_hemisphere(const Vec3& normal, float u1, float u2) {
    const float r = std::sqrt(u1);
    const float phi = 2.0f * kPi * u2;
    const float x = r * std::cos(phi);
    const float y = r * std::sin(phi);
    const float z = std::sqrt(std::fmax(0.0f, 1.0f - u1));

    Vec3 t, b;
    orthonormal_basis(normal, t, b);
    return normalize(t * x + b * y + normal * z);
}

void orthonormal_basis(const Vec3& n, Vec3& tangent, Vec3& bitangent) {
    // Duff et al., "Building an Orthonormal Basis, Revisited".
    const float sign = std::copysign(1.0f, n.z);
    const float a = -1.0f / (sign + n.z);
    const float b = n.x * n.y * a;
    tangent = Vec3{1.0f + sign * n.x * n.x * a, sign * b, -sign * n.x};
    bitangent = Vec3{b, sign + n.y * n.y * a, -n.y};
}

}  // namespace glint
