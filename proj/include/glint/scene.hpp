// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef GLINT_SCENE_HPP
#define GLINT_SCENE_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "glint/geometry.hpp"

namespace glint {

enum class MaterialKind { Diffuse, Mirror };

struct Material {
    std::string name;
    MaterialKind kind = MaterialKind::Diffuse;
    Rgb albedo{0.5f, 0.5f, 0.5f};
    Rgb emission{0.0f, 0.0f, 0.0f};

    bool emissive() const { return !emission.is_black(); }
};

struct Camera {
    Vec3 eye{0.0f, 0.0f, -1.0f};
    Vec3 look_at{0.0f, 0.0f, 0.0f};
    Vec3 up{0.0f, 1.0f, 0.0f};
    float vertical_fov = 45.0f;  // degrees
    int width = 512;
    int height = 512;

    /// Ray through pixel (px, py) at sub-pixel offset (jx, jy) in [0,1)^2.
    Ray primary_ray(int px, int py, float jx, float jy) const;
};

struct LightRef {
    uint32_t triangle = 0;
    float area = 0.0f;
    float weight = 0.0f;  // area * luminance(emission)
};

struct Scene {
    std::vector<Triangle> triangles;
    std::vector<Material> materials;
    std::vector<LightRef> lights;
    float total_light_weight = 0.0f;
    Camera camera;
    Aabb bounds;

    /// Recomputes bounds and the light list; call after editing triangles.
    void finalize();

    const Material& material_of(const Triangle& tri) const { return materials[tri.material]; }

    /// Offset used to nudge secondary ray origins off surfaces.
    float ray_epsilon() const { return 1e-4f * bounds.diagonal(); }
};

struct SceneParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Text scene format, one directive per line, '#' starts a comment:
///   camera ex ey ez  lx ly lz  ux uy uz  vfov width height
///   material <name> diffuse|mirror r g b [emit r g b]
///   tri x0 y0 z0 x1 y1 z1 x2 y2 z2 <material>
///   obj <path> <material>
/// Errors carry the offending line number. Zero-area triangles are skipped
/// with a warning on stderr.
Scene load_scene(const std::string& path);
Scene parse_scene(std::istream& in, const std::string& origin);

/// Serialization that parses back to an identical scene (obj references are
/// flattened to tri directives).
std::string serialize_scene(const Scene& scene);
void save_scene(const Scene& scene, const std::string& path);

/// A closed box with one diffuse red wall, one diffuse green wall, white
/// walls elsewhere, an area light slightly below the ceiling, and a mirror
/// block standing off-center on the floor.
Scene builtin_cornell_metal();

struct LightEmissionSample {
    Vec3 origin;
    Vec3 normal;
    Vec3 direction;
    Rgb flux;          // photon flux; expectation over samples is total power
    uint32_t triangle = 0;
};

/// Emission sampling: light picked proportional to area * luminance, uniform
/// point on it, cosine-distributed direction about its normal. Consumes
/// exactly the four uniforms. Requires total_light_weight > 0.
LightEmissionSample sample_light_emission(const Scene& scene, float u0, float u1, float u2,
                                          float u3);

}  // namespace glint

#endif
