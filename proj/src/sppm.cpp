// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/sppm.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "glint/parallel.hpp"

namespace glint {

HashGrid hash_build(std::span<const PhotonRecord> records, const HashGridConfig& config) {
    if (!(config.cell_size > 0.0f))
        throw std::invalid_argument("hash_build: cell_size must be positive");
    if (config.table_size == 0 || (config.table_size & (config.table_size - 1)) != 0)
        throw std::invalid_argument("hash_build: table_size must be a power of two");

    HashGrid grid;
    grid.cell_size = config.cell_size;
    grid.mask = config.table_size - 1;
    grid.cells.assign(config.table_size, HashCell{});

    for (uint32_t i = 0; i < records.size(); ++i) {
        const PhotonRecord& rec = records[i];
        HashCell& cell = grid.cells[grid.entry_of(rec.position)];
        ++cell.collisions;
        if (cell.collisions == 1 || rec.survival_depth < cell.record.survival_depth ||
            (rec.survival_depth == cell.record.survival_depth && i < cell.winner)) {
            cell.record = rec;
            cell.winner = i;
        }
    }
    return grid;
}

std::vector<QueryHit> hash_query(const HashGrid& grid, const Vec3& position, float radius2) {
    std::vector<QueryHit> out;
    hash_query_visit(grid, position, radius2,
                     [&](const PhotonRecord& rec, uint32_t collisions) {
                         out.push_back({&rec, collisions});
                     });
    return out;
}

namespace {

Vec3 shading_normal(const Triangle& tri, float u, float v, bool front) {
    const Vec3 n = normalize(tri.n0 * (1.0f - u - v) + tri.n1 * u + tri.n2 * v);
    return front ? n : -n;
}

struct RadiusBounds {
    float lo = 0.0f;
    float hi = 0.0f;
    float pixel_scale = 0.0f;  // footprint per unit hit distance

    static RadiusBounds of(const Scene& scene) {
        RadiusBounds rb;
        const float diag = scene.bounds.diagonal();
        rb.lo = 1e-4f * diag;
        rb.hi = 1e-2f * diag;
        const float tan_half = std::tan(scene.camera.vertical_fov * kPi / 360.0f);
        rb.pixel_scale = 2.0f * tan_half / static_cast<float>(scene.camera.height);
        return rb;
    }

    float initial_radius(float hit_distance) const {
        return std::clamp(2.0f * hit_distance * pixel_scale, lo, hi);
    }
};

}  // namespace

void eye_pass(const Scene& scene, const Mtbvh& bvh, std::span<PrngState> pixel_prngs,
              std::span<MeasurementPoint> points, int iteration, int max_depth, int workers) {
    const Camera& cam = scene.camera;
    const float eps = scene.ray_epsilon();
    const RadiusBounds rb = RadiusBounds::of(scene);

    parallel_for(points.size(), workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            MeasurementPoint& pt = points[i];
            if (iteration == 0) {
                pt = MeasurementPoint{};
                pt.pixel = static_cast<uint32_t>(i);
            }
            pt.valid = false;

            PrngState& prng = pixel_prngs[i];
            const float jx = prng.next();
            const float jy = prng.next();
            const int px = static_cast<int>(i) % cam.width;
            const int py = static_cast<int>(i) / cam.width;

            Ray ray = cam.primary_ray(px, py, jx, jy);
            Rgb weight{1.0f, 1.0f, 1.0f};
            float path_t = 0.0f;

            for (int depth = 0;; ++depth) {
                const auto hit = traverse(bvh, scene.triangles, ray);
                if (!hit) break;
                path_t += hit->t;

                const Triangle& tri = scene.triangles[hit->triangle];
                const Material& mat = scene.material_of(tri);
                const bool front = dot(ray.direction, hit->normal) < 0.0f;

                if (mat.emissive() && front) pt.direct += weight * mat.emission;

                if (mat.kind == MaterialKind::Diffuse) {
                    pt.position = hit->position;
                    pt.normal = shading_normal(tri, hit->u, hit->v, front);
                    pt.weight = weight;
                    pt.albedo = mat.albedo;
                    pt.valid = true;
                    if (iteration == 0) {
                        const float r0 = rb.initial_radius(path_t);
                        pt.radius2 = r0 * r0;
                    }
                    break;
                }

                if (depth == max_depth) break;  // unresolved mirror chain
                weight *= mat.albedo;
                const Vec3 ns = shading_normal(tri, hit->u, hit->v, front);
                const Vec3 reflected = normalize(reflect(ray.direction, ns));
                ray = offset_ray(hit->position, reflected, hit->normal, eps);
            }

            if (iteration == 0 && pt.radius2 == 0.0f) pt.radius2 = rb.hi * rb.hi;
        }
    });
}

std::size_t photon_pass(const Scene& scene, const Mtbvh& bvh, std::span<PhotonState> slots,
                        std::span<std::optional<PhotonRecord>> deposits, int max_depth,
                        int workers) {
    if (deposits.size() != slots.size())
        throw std::invalid_argument("photon_pass: deposits span must match slots");
    const float eps = scene.ray_epsilon();
    std::vector<uint8_t> regenerated(slots.size(), 0);

    parallel_for(slots.size(), workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            PhotonState& st = slots[s];
            deposits[s].reset();

            if (!st.alive) {
                const float u0 = st.prng.next();
                const float u1 = st.prng.next();
                const float u2 = st.prng.next();
                const float u3 = st.prng.next();
                const auto em = sample_light_emission(scene, u0, u1, u2, u3);
                st.ray = Ray{em.origin + em.normal * eps, em.direction, 0.0f, kInfinity};
                st.flux = em.flux;
                st.depth = 0;
                st.alive = true;
                regenerated[s] = 1;
                continue;
            }

            const auto hit = traverse(bvh, scene.triangles, st.ray);
            if (!hit) {
                st.alive = false;
                continue;
            }

            const Triangle& tri = scene.triangles[hit->triangle];
            const Material& mat = scene.material_of(tri);
            const bool front = dot(st.ray.direction, hit->normal) < 0.0f;
            const Vec3 ns = shading_normal(tri, hit->u, hit->v, front);

            if (mat.kind == MaterialKind::Mirror) {
                st.flux *= mat.albedo;
                ++st.depth;
                if (st.depth >= static_cast<uint32_t>(max_depth)) {
                    st.alive = false;
                    continue;
                }
                const Vec3 reflected = normalize(reflect(st.ray.direction, ns));
                st.ray = offset_ray(hit->position, reflected, hit->normal, eps);
                continue;
            }

            PhotonRecord rec;
            rec.position = hit->position;
            rec.incident = st.ray.direction;
            rec.flux = st.flux;
            rec.survival_depth = st.prng.next();
            deposits[s] = rec;

            // Roulette with the survivor reweighted by albedo/p keeps the
            // scattered flux unbiased.
            const float p = std::clamp(luminance(mat.albedo), 0.05f, 0.95f);
            const float u = st.prng.next();
            ++st.depth;
            if (u >= p || st.depth >= static_cast<uint32_t>(max_depth)) {
                st.alive = false;
                continue;
            }
            st.flux = st.flux * mat.albedo / p;
            const Vec3 dir =
                sample_cosine_hemisphere(ns, st.prng.next(), st.prng.next());
            st.ray = offset_ray(hit->position, dir, hit->normal, eps);
        }
    });

    std::size_t emitted = 0;
    for (const uint8_t r : regenerated) emitted += r;
    return emitted;
}

void update_statistics(std::span<MeasurementPoint> points, const HashGrid& grid, float alpha,
                       int workers) {
    if (!(alpha > 0.0f && alpha <= 1.0f))
        throw std::invalid_argument("update_statistics: alpha must be in (0, 1]");

    parallel_for(points.size(), workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            MeasurementPoint& pt = points[i];
            if (!pt.valid) continue;

            float m = 0.0f;
            Rgb phi{};
            hash_query_visit(grid, pt.position, pt.radius2,
                             [&](const PhotonRecord& rec, uint32_t collisions) {
                                 m += static_cast<float>(collisions);
                                 phi += rec.flux * static_cast<float>(collisions);
                             });
            if (m <= 0.0f) continue;

            const float n = pt.n_accum;
            const float g = (n + alpha * m) / (n + m);
            pt.radius2 *= g;
            pt.n_accum = n + alpha * m;
            phi = phi * pt.weight * (pt.albedo / kPi);
            pt.tau = (pt.tau + phi) * g;
        }
    });
}

Rgb radiance_estimate(const MeasurementPoint& point, uint64_t total_emitted, int iterations) {
    if (iterations <= 0) throw std::invalid_argument("radiance_estimate: iterations must be > 0");
    Rgb out = point.direct / static_cast<float>(iterations);
    if (total_emitted > 0 && point.radius2 > 0.0f)
        out += point.tau / (kPi * point.radius2 * static_cast<float>(total_emitted));
    return out;
}

RenderResult render(const Scene& scene, const SppmConfig& config) {
    if (config.iterations < 1) throw std::invalid_argument("render: iterations must be >= 1");
    if (config.max_depth < 1) throw std::invalid_argument("render: max_depth must be >= 1");
    if (!(config.alpha > 0.0f && config.alpha <= 1.0f))
        throw std::invalid_argument("render: alpha must be in (0, 1]");
    if (scene.triangles.empty()) throw std::invalid_argument("render: scene has no geometry");
    if (config.photon_slots > 0 && !(scene.total_light_weight > 0.0f))
        throw std::invalid_argument("render: photon slots requested but scene has no lights");

    const BuildTree tree = build_sah(scene.triangles);
    const Mtbvh bvh = thread_links(tree);

    const std::size_t pixels =
        static_cast<std::size_t>(scene.camera.width) * scene.camera.height;
    const auto streams = seed_streams(pixels + config.photon_slots, config.seed);

    std::vector<PrngState> pixel_prngs(streams.begin(), streams.begin() + pixels);
    std::vector<PhotonState> slots(config.photon_slots);
    for (std::size_t s = 0; s < slots.size(); ++s) slots[s].prng = streams[pixels + s];

    std::vector<MeasurementPoint> points(pixels);
    std::vector<std::optional<PhotonRecord>> deposits(slots.size());
    std::vector<PhotonRecord> records;

    RenderResult result;
    uint64_t emitted = 0;

    for (int iter = 0; iter < config.iterations; ++iter) {
        const auto t0 = std::chrono::steady_clock::now();

        eye_pass(scene, bvh, pixel_prngs, points, iter, config.max_depth, config.workers);

        records.clear();
        if (!slots.empty()) {
            for (int sub = 0; sub < config.max_depth; ++sub) {
                emitted += photon_pass(scene, bvh, slots, deposits, config.max_depth,
                                       config.workers);
                for (const auto& d : deposits)
                    if (d) records.push_back(*d);
            }
        }

        float rmax = 0.0f;
        double radius_sum = 0.0;
        std::size_t valid = 0;
        for (const MeasurementPoint& pt : points) {
            if (!pt.valid) continue;
            const float r = std::sqrt(pt.radius2);
            rmax = std::max(rmax, r);
            radius_sum += r;
            ++valid;
        }

        if (!records.empty() && rmax > 0.0f) {
            HashGridConfig gc;
            gc.cell_size = 2.0f * rmax;
            gc.table_size = static_cast<uint32_t>(
                std::bit_ceil(std::max<std::size_t>(64, 2 * records.size())));
            const HashGrid grid = hash_build(records, gc);
            update_statistics(points, grid, config.alpha, config.workers);
        }

        const auto t1 = std::chrono::steady_clock::now();
        IterationStats st;
        st.iteration = iter;
        st.emitted_total = emitted;
        st.stored_records = records.size();
        st.live_slots = static_cast<std::size_t>(
            std::count_if(slots.begin(), slots.end(), [](const PhotonState& s) { return s.alive; }));
        st.mean_radius = valid > 0 ? radius_sum / static_cast<double>(valid) : 0.0;
        st.seconds = std::chrono::duration<double>(t1 - t0).count();
        result.per_iteration.push_back(st);
        if (config.observer) config.observer(st, points);
    }

    result.total_emitted = emitted;
    result.radiance.resize(pixels);
    for (std::size_t i = 0; i < pixels; ++i)
        result.radiance[i] = radiance_estimate(points[i], emitted, config.iterations);
    result.image = tonemap(result.radiance, scene.camera.width, scene.camera.height);
    return result;
}

}  // namespace glint
