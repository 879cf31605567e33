// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "glint/bvh.hpp"
#include "glint/image.hpp"
#include "glint/prng.hpp"
#include "glint/scene.hpp"
#include "glint/sppm.hpp"

namespace {

using namespace glint;

struct SceneOptions {
    std::string scene_path;
    std::string builtin = "cornell-metal";
};

void add_scene_options(CLI::App* cmd, SceneOptions& opt) {
    auto* scene = cmd->add_option("--scene", opt.scene_path, "Scene description file");
    cmd->add_option("--builtin", opt.builtin, "Built-in scene (cornell-metal)")
        ->excludes(scene);
}

Scene make_scene(const SceneOptions& opt) {
    if (!opt.scene_path.empty()) return load_scene(opt.scene_path);
    if (opt.builtin == "cornell-metal") return builtin_cornell_metal();
    throw CLI::ValidationError("--builtin", "unknown built-in scene '" + opt.builtin + "'");
}

bool parse_size(const std::string& text, int& w, int& h) {
    int tw = 0, th = 0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%dx%d%c", &tw, &th, &extra) != 2) return false;
    if (tw < 1 || th < 1) return false;
    w = tw;
    h = th;
    return true;
}

int cmd_render(const SceneOptions& sopt, const std::string& size_text, int iterations,
               std::size_t photons, int max_depth, float alpha, uint32_t seed, int workers,
               const std::string& output, const std::string& dump_scene) {
    Scene scene = make_scene(sopt);
    if (!size_text.empty()) {
        if (!parse_size(size_text, scene.camera.width, scene.camera.height))
            throw CLI::ValidationError("--size", "expected WIDTHxHEIGHT, got '" + size_text + "'");
    }
    if (!dump_scene.empty()) save_scene(scene, dump_scene);

    std::printf(
        "# glint render size=%dx%d iterations=%d photons=%zu max-depth=%d alpha=%g seed=%u "
        "workers=%d output=%s\n",
        scene.camera.width, scene.camera.height, iterations, photons, max_depth,
        static_cast<double>(alpha), seed, workers, output.c_str());

    SppmConfig cfg;
    cfg.iterations = iterations;
    cfg.photon_slots = photons;
    cfg.max_depth = max_depth;
    cfg.alpha = alpha;
    cfg.seed = seed;
    cfg.workers = workers;
    cfg.observer = [](const IterationStats& st, std::span<const MeasurementPoint>) {
        std::printf("iter=%d emitted=%" PRIu64 " records=%zu live=%zu mean_radius=%.6g "
                    "seconds=%.3f\n",
                    st.iteration, st.emitted_total, st.stored_records, st.live_slots,
                    st.mean_radius, st.seconds);
        std::fflush(stdout);
    };

    const RenderResult result = render(scene, cfg);
    write_ppm(result.image, output);
    std::printf("# wrote %s (emitted %" PRIu64 " photons)\n", output.c_str(),
                result.total_emitted);
    return 0;
}

std::vector<Ray> make_workload(const Scene& scene, const std::string& workload, std::size_t count,
                               uint32_t seed) {
    std::vector<Ray> rays;
    rays.reserve(count);
    PrngState prng = seed_streams(1, seed)[0];

    Aabb box = scene.bounds;
    const Vec3 pad = box.extent() * 0.25f;
    box.lo = box.lo - pad;
    box.hi = box.hi + pad;
    const Vec3 ext = box.extent();

    auto in_box = [&](float ux, float uy, float uz) {
        return Vec3{box.lo.x + ux * ext.x, box.lo.y + uy * ext.y, box.lo.z + uz * ext.z};
    };

    if (workload == "eye") {
        const Camera& cam = scene.camera;
        for (std::size_t i = 0; i < count; ++i) {
            const auto pixel = i % (static_cast<std::size_t>(cam.width) * cam.height);
            const int px = static_cast<int>(pixel) % cam.width;
            const int py = static_cast<int>(pixel) / cam.width;
            rays.push_back(cam.primary_ray(px, py, prng.next(), prng.next()));
        }
    } else if (workload == "random") {
        for (std::size_t i = 0; i < count; ++i) {
            const Vec3 origin = in_box(prng.next(), prng.next(), prng.next());
            const float z = 1.0f - 2.0f * prng.next();
            const float r = std::sqrt(std::fmax(0.0f, 1.0f - z * z));
            const float phi = 2.0f * kPi * prng.next();
            rays.push_back(Ray{origin, {r * std::cos(phi), r * std::sin(phi), z}});
        }
    } else if (workload.rfind("axis:", 0) == 0) {
        const std::string spec = workload.substr(5);
        if (spec.size() != 2 || (spec[0] != '+' && spec[0] != '-') ||
            (spec[1] != 'x' && spec[1] != 'y' && spec[1] != 'z'))
            throw CLI::ValidationError("--workload", "expected axis:[+-][xyz], got '" + workload + "'");
        const int axis = spec[1] - 'x';
        const float sign = spec[0] == '+' ? 1.0f : -1.0f;
        Vec3 dir{0, 0, 0};
        if (axis == 0) dir.x = sign;
        if (axis == 1) dir.y = sign;
        if (axis == 2) dir.z = sign;
        for (std::size_t i = 0; i < count; ++i) {
            // Origins on the upstream face of the padded box so every ray
            // crosses the whole scene.
            Vec3 origin = in_box(prng.next(), prng.next(), prng.next());
            if (axis == 0) origin.x = sign > 0 ? box.lo.x : box.hi.x;
            if (axis == 1) origin.y = sign > 0 ? box.lo.y : box.hi.y;
            if (axis == 2) origin.z = sign > 0 ? box.lo.z : box.hi.z;
            rays.push_back(Ray{origin, dir});
        }
    } else {
        throw CLI::ValidationError("--workload",
                                   "expected eye, random or axis:[+-][xyz], got '" + workload + "'");
    }
    return rays;
}

void csv_row(std::FILE* f, const char* mode, const MeasureResult& r) {
    std::fprintf(f, "%s,%zu,%.6f,%.1f,%" PRIu64 ",%" PRIu64 ",%" PRIu64 "\n", mode, r.rays,
                 r.seconds, r.rays_per_second, r.stats.aabb_tests, r.stats.triangle_tests,
                 r.stats.nodes_visited);
}

int cmd_bench(const SceneOptions& sopt, const std::string& workload, std::size_t ray_count,
              uint32_t seed, const std::string& csv_path) {
    const Scene scene = make_scene(sopt);

    const auto t0 = std::chrono::steady_clock::now();
    const BuildTree tree = build_sah(scene.triangles);
    const auto t1 = std::chrono::steady_clock::now();
    const Mtbvh bvh = thread_links(tree);
    const auto t2 = std::chrono::steady_clock::now();

    std::printf("# bench scene: %zu triangles, %zu nodes (build %.3f ms, threading %.3f ms)\n",
                scene.triangles.size(), bvh.nodes.size(),
                std::chrono::duration<double, std::milli>(t1 - t0).count(),
                std::chrono::duration<double, std::milli>(t2 - t1).count());

    const StorageReport storage = storage_report(bvh, scene.triangles.size());
    std::printf("# storage: single-overlay %" PRIu64 " records, six-overlay %" PRIu64
                " records, ratio %.4f\n",
                storage.tbvh_total, storage.mtbvh_total, storage.ratio);

    const std::vector<Ray> rays = make_workload(scene, workload, ray_count, seed);

    const MeasureResult tbvh = measure(bvh, scene.triangles, rays, TraversalMode::Tbvh);
    const MeasureResult mtbvh = measure(bvh, scene.triangles, rays, TraversalMode::Mtbvh);
    const MeasureResult tbvh_shade =
        measure(bvh, scene.triangles, rays, TraversalMode::Tbvh, true);
    const MeasureResult mtbvh_shade =
        measure(bvh, scene.triangles, rays, TraversalMode::Mtbvh, true);

    std::printf("mode,rays,seconds,rays_per_second,aabb_tests,triangle_tests,nodes_visited\n");
    csv_row(stdout, "tbvh", tbvh);
    csv_row(stdout, "mtbvh", mtbvh);
    csv_row(stdout, "tbvh_shade", tbvh_shade);
    csv_row(stdout, "mtbvh_shade", mtbvh_shade);

    if (!csv_path.empty()) {
        std::FILE* f = std::fopen(csv_path.c_str(), "w");
        if (!f) {
            std::fprintf(stderr, "cannot open %s for writing\n", csv_path.c_str());
            return 1;
        }
        std::fprintf(f, "mode,rays,seconds,rays_per_second,aabb_tests,triangle_tests,nodes_visited\n");
        csv_row(f, "tbvh", tbvh);
        csv_row(f, "mtbvh", mtbvh);
        csv_row(f, "tbvh_shade", tbvh_shade);
        csv_row(f, "mtbvh_shade", mtbvh_shade);
        std::fclose(f);
        std::printf("# wrote %s\n", csv_path.c_str());
    }

    std::printf("# hit hashes: tbvh=%016" PRIx64 " mtbvh=%016" PRIx64 " (%s)\n", tbvh.hit_hash,
                mtbvh.hit_hash, tbvh.hit_hash == mtbvh.hit_hash ? "identical" : "MISMATCH");
    std::printf("# node visits: mtbvh/tbvh = %.4f\n",
                tbvh.stats.nodes_visited > 0
                    ? static_cast<double>(mtbvh.stats.nodes_visited) /
                          static_cast<double>(tbvh.stats.nodes_visited)
                    : 0.0);
    std::printf("# throughput: mtbvh/tbvh = %.4f\n",
                tbvh.rays_per_second > 0 ? mtbvh.rays_per_second / tbvh.rays_per_second : 0.0);

    return tbvh.hit_hash == mtbvh.hit_hash ? 0 : 1;
}

// ---- selftest ------------------------------------------------------------

std::vector<Triangle> random_triangles(std::size_t count, uint32_t seed, float extent,
                                       float size) {
    PrngState prng = seed_streams(1, seed)[0];
    std::vector<Triangle> tris;
    tris.reserve(count);
    while (tris.size() < count) {
        const Vec3 base{extent * prng.next(), extent * prng.next(), extent * prng.next()};
        auto jitter = [&] {
            return Vec3{size * (prng.next() - 0.5f), size * (prng.next() - 0.5f),
                        size * (prng.next() - 0.5f)};
        };
        Triangle tri;
        tri.p0 = base + jitter();
        tri.p1 = base + jitter();
        tri.p2 = base + jitter();
        const Vec3 n = cross(tri.p1 - tri.p0, tri.p2 - tri.p0);
        const float len = length(n);
        if (!(len > 1e-12f)) continue;
        tri.n0 = tri.n1 = tri.n2 = n / len;
        tri.material = 0;
        tris.push_back(tri);
    }
    return tris;
}

bool check(bool ok, const char* name, std::string detail = {}) {
    std::printf("[%s] %s%s%s\n", ok ? "ok" : "FAIL", name, detail.empty() ? "" : ": ",
                detail.c_str());
    return ok;
}

int cmd_selftest(bool corrupt_links) {
    bool all = true;

    {  // generator output range and lane invariants
        bool ok = true;
        auto streams = seed_streams(100, 7);
        for (auto& s : streams) {
            for (int i = 0; i < 2000 && ok; ++i) {
                const float v = s.next();
                ok = v >= 0.0f && v < 1.0f && s.valid();
            }
            if (!ok) break;
        }
        all &= check(ok, "prng range and lane invariants");
    }

    {  // traversal equivalence against the exhaustive reference
        const auto tris = random_triangles(100, 11, 10.0f, 2.5f);
        const BuildTree tree = build_sah(tris);
        Mtbvh bvh = thread_links(tree);
        if (corrupt_links)
            for (auto& node : bvh.nodes)
                for (auto& lp : node.links) lp.hit = lp.miss;  // never descend

        PrngState prng = seed_streams(1, 13)[0];
        bool ok = validate_links(bvh).empty() || corrupt_links;
        std::size_t mismatches = 0;
        for (int r = 0; r < 10000; ++r) {
            const Vec3 origin{12.0f * prng.next() - 1.0f, 12.0f * prng.next() - 1.0f,
                              12.0f * prng.next() - 1.0f};
            const float z = 1.0f - 2.0f * prng.next();
            const float rad = std::sqrt(std::fmax(0.0f, 1.0f - z * z));
            const float phi = 2.0f * kPi * prng.next();
            const Ray ray{origin, {rad * std::cos(phi), rad * std::sin(phi), z}};

            const auto a = traverse(bvh, tris, ray);
            const auto b = brute_force_nearest(tris, ray);
            if (a.has_value() != b.has_value()) {
                ++mismatches;
                continue;
            }
            if (a && (a->triangle != b->triangle ||
                      std::fabs(a->t - b->t) > 1e-4f * std::fmax(1.0f, b->t)))
                ++mismatches;
        }
        ok = ok && mismatches == 0;
        all &= check(ok, "traversal matches exhaustive reference",
                     mismatches ? std::to_string(mismatches) + " mismatching rays" : "");
    }

    {  // hash survival fairness at reduced scale
        PrngState prng = seed_streams(1, 17)[0];
        std::vector<PhotonRecord> records(128);
        for (auto& rec : records) {
            rec.position = {prng.next(), prng.next(), prng.next()};
            rec.flux = {1, 1, 1};
        }
        HashGridConfig gc;
        gc.cell_size = 0.25f;
        gc.table_size = 64;

        const int draws = 400;
        std::vector<int> wins(records.size(), 0);
        std::vector<uint32_t> collisions(records.size(), 0);
        for (int d = 0; d < draws; ++d) {
            for (auto& rec : records) rec.survival_depth = prng.next();
            const HashGrid grid = hash_build(records, gc);
            for (std::size_t i = 0; i < records.size(); ++i) {
                const HashCell& cell = grid.cells[grid.entry_of(records[i].position)];
                collisions[i] = cell.collisions;
                if (cell.winner == i) ++wins[i];
            }
        }
        bool ok = true;
        double worst = 0.0;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const double p = 1.0 / collisions[i];
            const double sigma = std::sqrt(p * (1.0 - p) * draws);
            const double dev = std::fabs(wins[i] - p * draws);
            worst = std::max(worst, sigma > 0 ? dev / sigma : 0.0);
            if (dev > 3.0 * sigma + 1e-9) ok = false;
        }
        char buf[64];
        std::snprintf(buf, sizeof(buf), "worst deviation %.2f sigma", worst);
        all &= check(ok, "hash survival fairness", buf);
    }

    std::printf("%s\n", all ? "selftest passed" : "selftest FAILED");
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"glint: stochastic progressive photon mapper on a multi-threaded-layout BVH"};
    app.require_subcommand(1);

    // render
    auto* render_cmd = app.add_subcommand("render", "Render a scene to a PPM image");
    SceneOptions render_scene;
    add_scene_options(render_cmd, render_scene);
    std::string size_text;
    int iterations = 64;
    std::size_t photons = 16384;
    int max_depth = 8;
    float alpha = 0.7f;
    uint32_t seed = 1;
    int workers = 0;
    std::string output = "out.ppm";
    std::string dump_scene;
    render_cmd->add_option("--size", size_text, "Override image size, e.g. 512x512");
    render_cmd->add_option("--iterations", iterations, "Progressive iterations")
        ->check(CLI::PositiveNumber);
    render_cmd->add_option("--photons", photons, "Photon path slots");
    render_cmd->add_option("--max-depth", max_depth, "Path depth limit")
        ->check(CLI::PositiveNumber);
    render_cmd->add_option("--alpha", alpha, "Radius reduction parameter in (0,1]")
        ->check(CLI::Range(1e-6, 1.0));
    render_cmd->add_option("--seed", seed, "Master seed (nonzero)")
        ->check(CLI::Range(1u, 0xffffffffu));
    render_cmd->add_option("--workers", workers, "Worker threads, 0 = hardware")
        ->check(CLI::NonNegativeNumber);
    render_cmd->add_option("--output", output, "Output PPM path");
    render_cmd->add_option("--save-scene", dump_scene, "Also write the scene as text");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Compare traversal layouts on a ray batch");
    SceneOptions bench_scene;
    add_scene_options(bench_cmd, bench_scene);
    std::string workload = "eye";
    std::size_t ray_count = 1000000;
    uint32_t bench_seed = 1;
    std::string csv_path;
    bench_cmd->add_option("--workload", workload, "eye, random, or axis:[+-][xyz]");
    bench_cmd->add_option("--rays", ray_count, "Number of rays")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench_seed, "Master seed (nonzero)")
        ->check(CLI::Range(1u, 0xffffffffu));
    bench_cmd->add_option("--csv", csv_path, "Write the result table to this CSV file");

    // selftest
    auto* self_cmd = app.add_subcommand("selftest", "Run the built-in smoke checks");
    bool corrupt = false;
    self_cmd->add_flag("--corrupt-links", corrupt, "Damage the traversal links first")
        ->group("");

    CLI11_PARSE(app, argc, argv);

    try {
        if (render_cmd->parsed())
            return cmd_render(render_scene, size_text, iterations, photons, max_depth, alpha,
                              seed, workers, output, dump_scene);
        if (bench_cmd->parsed())
            return cmd_bench(bench_scene, workload, ray_count, bench_seed, csv_path);
        if (self_cmd->parsed()) return cmd_selftest(corrupt);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
