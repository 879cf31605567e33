// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "glint/sppm.hpp"
#include "support.hpp"

using namespace glint;

namespace {

Scene lamp_over_floor(float lamp_y, bool lamp_down, float floor_albedo, Rgb emission) {
    Scene s;
    s.materials = {
        {"floor", MaterialKind::Diffuse, {floor_albedo, floor_albedo, floor_albedo}, {}},
        {"lamp", MaterialKind::Diffuse, {0.75f, 0.75f, 0.75f}, emission},
    };
    // Wide floor so grazing photons from the unit lamp still land on it.
    test::push_quad(s.triangles, {-20, 0, -20}, {0, 0, 41}, {41, 0, 0}, 0);  // floor, +y
    if (lamp_down)
        test::push_quad(s.triangles, {0, lamp_y, 0}, {1, 0, 0}, {0, 0, 1}, 1);  // -y
    else
        test::push_quad(s.triangles, {0, lamp_y, 0}, {0, 0, 1}, {1, 0, 0}, 1);  // +y
    s.camera.eye = {0.5f, 0.5f * lamp_y, -2.0f};
    s.camera.look_at = {0.5f, 0.5f * lamp_y, 0.5f};
    s.camera.width = 4;
    s.camera.height = 4;
    s.finalize();
    return s;
}

}  // namespace

TEST_CASE("hash grid worked examples") {
    SUBCASE("same cell: lowest survival depth survives, collisions counted") {
        std::vector<PhotonRecord> records(2);
        records[0].position = {0.2f, 0.2f, 0.2f};
        records[0].flux = {1, 0, 0};
        records[0].survival_depth = 0.7f;
        records[1].position = {0.3f, 0.3f, 0.3f};
        records[1].flux = {0, 1, 0};
        records[1].survival_depth = 0.3f;

        const HashGrid grid = hash_build(records, {1.0f, 8});
        const auto hits = hash_query(grid, {0.25f, 0.25f, 0.25f}, 1.0f);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].collisions == 2);
        CHECK(hits[0].record->flux.g == 1.0f);  // record 1 won

        // Equal depths fall back to the lower index.
        records[1].survival_depth = 0.7f;
        const HashGrid grid2 = hash_build(records, {1.0f, 8});
        const auto hits2 = hash_query(grid2, {0.25f, 0.25f, 0.25f}, 1.0f);
        REQUIRE(hits2.size() == 1);
        CHECK(hits2[0].record->flux.r == 1.0f);  // record 0 won
        CHECK(hits2[0].collisions == 2);
    }

    SUBCASE("distinct cells are independent") {
        std::vector<PhotonRecord> records(2);
        records[0].position = {0.5f, 0.5f, 0.5f};
        records[0].flux = {1, 0, 0};
        records[1].position = {3.5f, 0.5f, 0.5f};
        records[1].flux = {0, 1, 0};
        const HashGrid grid = hash_build(records, {1.0f, 64});

        const auto near0 = hash_query(grid, {0.6f, 0.5f, 0.5f}, 0.25f);
        REQUIRE(near0.size() == 1);
        CHECK(near0[0].collisions == 1);
        CHECK(near0[0].record->flux.r == 1.0f);
    }

    SUBCASE("radius boundary is inclusive") {
        std::vector<PhotonRecord> records(1);
        records[0].position = {0.5f, 0.5f, 0.5f};
        const HashGrid grid = hash_build(records, {1.0f, 8});
        CHECK(hash_query(grid, {0.75f, 0.5f, 0.5f}, 0.0625f).size() == 1);
        CHECK(hash_query(grid, {0.75f, 0.5f, 0.5f}, 0.06f).empty());
    }

    SUBCASE("a one-entry table returns each survivor once") {
        std::vector<PhotonRecord> records(5);
        for (int i = 0; i < 5; ++i) {
            records[i].position = {static_cast<float>(i) * 3.0f, 0, 0};
            records[i].survival_depth = 0.1f * static_cast<float>(i + 1);
        }
        const HashGrid grid = hash_build(records, {1.0f, 1});
        const auto hits = hash_query(grid, {0.0f, 0.0f, 0.0f}, 0.25f);
        REQUIRE(hits.size() == 1);  // deduplicated despite 27 aliased cells
        CHECK(hits[0].collisions == 5);
        CHECK(hits[0].record->survival_depth == doctest::Approx(0.1));
    }

    SUBCASE("configuration is validated") {
        std::vector<PhotonRecord> records(1);
        CHECK_THROWS_AS(hash_build(records, {0.0f, 8}), std::invalid_argument);
        CHECK_THROWS_AS(hash_build(records, {1.0f, 48}), std::invalid_argument);
    }
}

TEST_CASE("hash query equals a full-table scan") {
    PrngState prng = seed_streams(1, 21)[0];
    std::vector<PhotonRecord> records(500);
    for (std::size_t i = 0; i < records.size(); ++i) {
        records[i].position = {2.0f * prng.next(), 2.0f * prng.next(), 2.0f * prng.next()};
        records[i].flux = {prng.next(), prng.next(), prng.next()};
        records[i].survival_depth = prng.next();
    }
    const float cell = 0.3f;
    const HashGrid grid = hash_build(records, {cell, 64});

    for (int trial = 0; trial < 200; ++trial) {
        const Vec3 pos{2.0f * prng.next(), 2.0f * prng.next(), 2.0f * prng.next()};
        const float radius = cell * prng.next();
        const float radius2 = radius * radius;

        const auto fast = hash_query(grid, pos, radius2);

        // Reference: walk every table entry directly.
        std::vector<const HashCell*> slow;
        for (const HashCell& c : grid.cells)
            if (c.collisions > 0 && length_squared(c.record.position - pos) <= radius2)
                slow.push_back(&c);

        REQUIRE(fast.size() == slow.size());
        for (const auto& qh : fast) {
            const bool found = std::any_of(slow.begin(), slow.end(), [&](const HashCell* c) {
                return &c->record == qh.record && c->collisions == qh.collisions;
            });
            CHECK(found);
        }
    }
}

TEST_CASE("stochastic survival is fair and the scaled flux is unbiased") {
    PrngState prng = seed_streams(1, 23)[0];
    const std::size_t photon_count = 256;
    std::vector<PhotonRecord> records(photon_count);
    for (auto& rec : records) {
        rec.position = {prng.next(), prng.next(), prng.next()};
        const float f = 0.5f + prng.next();
        rec.flux = {f, f, f};
    }
    const HashGridConfig gc{0.25f, 64};

    // True per-entry flux totals (what an exhaustive cell list would hold).
    std::map<uint32_t, double> true_sum;
    {
        HashGrid layout;
        layout.cell_size = gc.cell_size;
        layout.mask = gc.table_size - 1;
        layout.cells.resize(gc.table_size);
        for (const auto& rec : records) true_sum[layout.entry_of(rec.position)] += rec.flux.r;
    }

    const int draws = 300;
    std::map<uint32_t, double> est_sum;
    for (int d = 0; d < draws; ++d) {
        for (auto& rec : records) rec.survival_depth = prng.next();
        const HashGrid grid = hash_build(records, gc);
        for (uint32_t e = 0; e < grid.cells.size(); ++e) {
            const HashCell& c = grid.cells[e];
            if (c.collisions > 0)
                est_sum[e] += static_cast<double>(c.record.flux.r) * c.collisions;
        }
    }

    REQUIRE(est_sum.size() == true_sum.size());
    double rms = 0.0;
    for (const auto& [entry, truth] : true_sum) {
        const double mean = est_sum[entry] / draws;
        const double rel = (mean - truth) / truth;
        rms += rel * rel;
    }
    rms = std::sqrt(rms / true_sum.size());
    CAPTURE(rms);
    CHECK(rms < 0.05);
}

TEST_CASE("update_statistics applies the progressive shrink rule") {
    SUBCASE("no photons leaves the point untouched") {
        std::vector<MeasurementPoint> pts(1);
        pts[0].valid = true;
        pts[0].position = {100, 100, 100};
        pts[0].radius2 = 2.0f;
        pts[0].n_accum = 5.0f;
        pts[0].tau = {1, 2, 3};

        std::vector<PhotonRecord> far(1);
        far[0].position = {0, 0, 0};
        const HashGrid grid = hash_build(far, {1.0f, 16});
        update_statistics(pts, grid, 0.7f, 1);
        CHECK(pts[0].radius2 == 2.0f);
        CHECK(pts[0].n_accum == 5.0f);
        CHECK(pts[0].tau.g == 2.0f);
    }

    SUBCASE("N=8, M=4, alpha=0.7 shrinks by 0.9") {
        std::vector<PhotonRecord> records(4);
        records[0].position = {0.5f, 0.5f, 0.5f};
        records[1].position = {1.5f, 0.5f, 0.5f};
        records[2].position = {0.5f, 1.5f, 0.5f};
        records[3].position = {0.5f, 0.5f, 1.5f};
        for (auto& r : records) r.flux = {kPi, kPi, kPi};
        const HashGrid grid = hash_build(records, {1.0f, 64});

        std::vector<MeasurementPoint> pts(1);
        pts[0].valid = true;
        pts[0].position = {0.5f, 0.5f, 0.5f};
        pts[0].weight = {1, 1, 1};
        pts[0].albedo = {1, 1, 1};
        pts[0].radius2 = 1.0f;
        pts[0].n_accum = 8.0f;
        pts[0].tau = {1, 1, 1};

        update_statistics(pts, grid, 0.7f, 1);

        CHECK(pts[0].radius2 == doctest::Approx(0.9).epsilon(1e-6));
        CHECK(pts[0].n_accum == doctest::Approx(10.8).epsilon(1e-6));
        // tau' = (1 + 4) * 0.9
        CHECK(pts[0].tau.r == doctest::Approx(4.5).epsilon(1e-5));
        CHECK(pts[0].tau.b == doctest::Approx(4.5).epsilon(1e-5));
    }

    SUBCASE("invalid points never update") {
        std::vector<PhotonRecord> records(1);
        records[0].position = {0, 0, 0};
        records[0].flux = {1, 1, 1};
        const HashGrid grid = hash_build(records, {1.0f, 16});

        std::vector<MeasurementPoint> pts(1);
        pts[0].valid = false;
        pts[0].position = {0, 0, 0};
        pts[0].radius2 = 1.0f;
        update_statistics(pts, grid, 0.7f, 1);
        CHECK(pts[0].n_accum == 0.0f);
        CHECK(pts[0].tau.r == 0.0f);
    }
}

TEST_CASE("radiance_estimate identities") {
    MeasurementPoint pt;
    pt.direct = {2, 4, 6};
    pt.tau = {kPi, kPi, kPi};
    pt.radius2 = 1.0f;

    const Rgb a = radiance_estimate(pt, 1, 2);
    CHECK(a.r == doctest::Approx(1.0 + 1.0));
    CHECK(a.g == doctest::Approx(2.0 + 1.0));
    CHECK(a.b == doctest::Approx(3.0 + 1.0));

    // Twice the emitted photons halves the indirect part.
    const Rgb b = radiance_estimate(pt, 2, 2);
    CHECK(b.r == doctest::Approx(1.0 + 0.5));

    // No photons: direct visualization only.
    MeasurementPoint dark;
    dark.direct = {3, 0, 0};
    const Rgb c = radiance_estimate(dark, 0, 3);
    CHECK(c.r == doctest::Approx(1.0));
    CHECK(c.g == 0.0f);

    CHECK_THROWS_AS(radiance_estimate(pt, 1, 0), std::invalid_argument);
}

TEST_CASE("eye pass parks points on the first diffuse hit") {
    SUBCASE("camera staring at a diffuse floor") {
        Scene s;
        s.materials = {{"floor", MaterialKind::Diffuse, {0.6f, 0.5f, 0.4f}, {}}};
        test::push_quad(s.triangles, {-5, 0, -5}, {0, 0, 10}, {10, 0, 0}, 0);
        s.camera.eye = {0.5f, 2.0f, 0.5f};
        s.camera.look_at = {0.5f, 0.0f, 0.5f};
        s.camera.up = {0, 0, 1};
        s.camera.vertical_fov = 20.0f;
        s.camera.width = 2;
        s.camera.height = 2;
        s.finalize();
        const Mtbvh bvh = thread_links(build_sah(s.triangles));

        auto prngs = seed_streams(4, 5);
        std::vector<MeasurementPoint> pts(4);
        eye_pass(s, bvh, prngs, pts, 0, 8, 1);

        for (const auto& pt : pts) {
            CHECK(pt.valid);
            CHECK(pt.position.y == doctest::Approx(0.0).epsilon(1e-5));
            CHECK(pt.normal.y == doctest::Approx(1.0).epsilon(1e-5));
            CHECK(pt.weight == Rgb{1, 1, 1});
            CHECK(pt.albedo == Rgb{0.6f, 0.5f, 0.4f});
            CHECK(pt.radius2 > 0.0f);
            CHECK(pt.direct.is_black());
        }
    }

    SUBCASE("a mirror bounce carries its albedo into the weight") {
        Scene s;
        s.materials = {
            {"mirror", MaterialKind::Mirror, {0.8f, 0.9f, 1.0f}, {}},
            {"ceiling", MaterialKind::Diffuse, {0.4f, 0.5f, 0.6f}, {}},
        };
        test::push_quad(s.triangles, {-5, 0, -5}, {0, 0, 10}, {10, 0, 0}, 0);  // mirror floor
        test::push_quad(s.triangles, {-5, 2, -5}, {10, 0, 0}, {0, 0, 10}, 1);  // ceiling, -y
        s.camera.eye = {0.5f, 1.0f, 0.5f};
        s.camera.look_at = {0.5f, 0.0f, 0.5f};
        s.camera.up = {0, 0, 1};
        s.camera.vertical_fov = 10.0f;
        s.camera.width = 1;
        s.camera.height = 1;
        s.finalize();
        const Mtbvh bvh = thread_links(build_sah(s.triangles));

        auto prngs = seed_streams(1, 5);
        std::vector<MeasurementPoint> pts(1);
        eye_pass(s, bvh, prngs, pts, 0, 8, 1);

        REQUIRE(pts[0].valid);
        CHECK(pts[0].position.y == doctest::Approx(2.0).epsilon(1e-4));
        CHECK(pts[0].weight == Rgb{0.8f, 0.9f, 1.0f});
        CHECK(pts[0].albedo == Rgb{0.4f, 0.5f, 0.6f});
        CHECK(pts[0].normal.y == doctest::Approx(-1.0).epsilon(1e-5));
    }

    SUBCASE("escaping rays leave the point invalid but initialized") {
        Scene s;
        s.materials = {{"mirror", MaterialKind::Mirror, {0.9f, 0.9f, 0.9f}, {}}};
        test::push_quad(s.triangles, {-5, 0, -5}, {0, 0, 10}, {10, 0, 0}, 0);
        s.camera.eye = {0.5f, 1.0f, 0.5f};
        s.camera.look_at = {0.5f, 0.0f, 0.5f};
        s.camera.up = {0, 0, 1};
        s.camera.vertical_fov = 10.0f;
        s.camera.width = 1;
        s.camera.height = 1;
        s.finalize();
        const Mtbvh bvh = thread_links(build_sah(s.triangles));

        auto prngs = seed_streams(1, 5);
        std::vector<MeasurementPoint> pts(1);
        eye_pass(s, bvh, prngs, pts, 0, 8, 1);
        CHECK(!pts[0].valid);
        CHECK(pts[0].radius2 > 0.0f);  // fallback radius still set
    }

    SUBCASE("two parallel mirrors exhaust max_depth and stay invalid") {
        Scene s;
        s.materials = {{"mirror", MaterialKind::Mirror, {0.9f, 0.9f, 0.9f}, {}}};
        test::push_quad(s.triangles, {-5, 0, -5}, {0, 0, 10}, {10, 0, 0}, 0);
        test::push_quad(s.triangles, {-5, 2, -5}, {10, 0, 0}, {0, 0, 10}, 0);
        s.camera.eye = {0.5f, 1.0f, 0.5f};
        s.camera.look_at = {0.5f, 0.0f, 0.5f};
        s.camera.up = {0, 0, 1};
        s.camera.vertical_fov = 10.0f;
        s.camera.width = 1;
        s.camera.height = 1;
        s.finalize();
        const Mtbvh bvh = thread_links(build_sah(s.triangles));
        auto prngs = seed_streams(1, 5);
        std::vector<MeasurementPoint> pts(1);
        eye_pass(s, bvh, prngs, pts, 0, 4, 1);
        CHECK(!pts[0].valid);
    }

    SUBCASE("direct emission accumulates when the path sees a lamp") {
        const Scene s = lamp_over_floor(1.0f, true, 0.5f, {4, 5, 6});
        // Aim the camera straight at the lamp from below.
        Scene view = s;
        view.camera.eye = {0.5f, 0.5f, 0.5f};
        view.camera.look_at = {0.5f, 1.0f, 0.5f};
        view.camera.up = {0, 0, 1};
        view.camera.vertical_fov = 5.0f;
        view.camera.width = 1;
        view.camera.height = 1;
        view.finalize();
        const Mtbvh bvh = thread_links(build_sah(view.triangles));

        auto prngs = seed_streams(1, 5);
        std::vector<MeasurementPoint> pts(1);
        eye_pass(view, bvh, prngs, pts, 0, 8, 1);
        REQUIRE(pts[0].valid);  // the lamp itself is diffuse
        CHECK(pts[0].direct == Rgb{4, 5, 6});

        // A second iteration adds the emission again.
        eye_pass(view, bvh, prngs, pts, 1, 8, 1);
        CHECK(pts[0].direct == Rgb{8, 10, 12});
    }
}

TEST_CASE("photon pass lifecycle") {
    const Scene s = lamp_over_floor(1.0f, true, 0.5f, {3, 3, 3});
    const Mtbvh bvh = thread_links(build_sah(s.triangles));
    const float expected_flux = kPi * 3.0f;  // pi * emission * area(=1)

    const std::size_t n = 64;
    auto streams = seed_streams(n, 9);
    std::vector<PhotonState> slots(n);
    for (std::size_t i = 0; i < n; ++i) slots[i].prng = streams[i];
    std::vector<std::optional<PhotonRecord>> deposits(n);

    SUBCASE("pass 1 regenerates every dead slot without deposits") {
        const std::size_t emitted = photon_pass(s, bvh, slots, deposits, 8, 1);
        CHECK(emitted == n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(slots[i].alive);
            CHECK(slots[i].depth == 0);
            CHECK(!deposits[i].has_value());
            CHECK(slots[i].flux.r == doctest::Approx(expected_flux).epsilon(1e-5));
            CHECK(slots[i].ray.direction.y < 0.0f);      // cosine lobe about -y
            CHECK(slots[i].ray.origin.y < 1.0f);         // nudged off the lamp
            CHECK(slots[i].ray.origin.y > 0.98f);
        }
    }

    SUBCASE("pass 2 deposits exactly one record per slot on the floor") {
        photon_pass(s, bvh, slots, deposits, 8, 1);
        const std::size_t emitted = photon_pass(s, bvh, slots, deposits, 8, 1);
        CHECK(emitted == 0);

        std::size_t alive = 0, missed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!deposits[i].has_value()) {
                ++missed;  // grazing emission can clear even the wide floor
                CHECK(!slots[i].alive);
                continue;
            }
            const PhotonRecord& rec = *deposits[i];
            CHECK(rec.position.y == doctest::Approx(0.0).epsilon(1e-4));
            CHECK(rec.flux.r == doctest::Approx(expected_flux).epsilon(1e-5));
            CHECK(rec.incident.y < 0.0f);
            CHECK(rec.survival_depth >= 0.0f);
            CHECK(rec.survival_depth < 1.0f);
            if (slots[i].alive) {
                ++alive;
                CHECK(slots[i].depth == 1);
                // Gray albedo 0.5 and survival probability 0.5 cancel.
                CHECK(slots[i].flux.r == doctest::Approx(expected_flux).epsilon(1e-4));
                CHECK(slots[i].ray.direction.y > 0.0f);  // scattered off the floor
            }
        }
        // Roulette keeps roughly half; 64 slots give sigma = 4.
        CHECK(missed <= 2);
        CHECK(alive > 10);
        CHECK(alive < 54);
    }

    SUBCASE("escaping photons die and regenerate next pass") {
        const Scene open = lamp_over_floor(0.0f, false, 0.5f, {3, 3, 3});
        // Lamp on the floor emitting upward with nothing above.
        const Mtbvh obvh = thread_links(build_sah(open.triangles));
        std::vector<PhotonState> oslots(n);
        for (std::size_t i = 0; i < n; ++i) oslots[i].prng = streams[i];
        std::vector<std::optional<PhotonRecord>> odep(n);

        CHECK(photon_pass(open, obvh, oslots, odep, 8, 1) == n);
        CHECK(photon_pass(open, obvh, oslots, odep, 8, 1) == 0);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(!oslots[i].alive);
            CHECK(!odep[i].has_value());
        }
        CHECK(photon_pass(open, obvh, oslots, odep, 8, 1) == n);  // regenerated
    }
}

TEST_CASE("render determinism across runs and worker counts") {
    const Scene s = builtin_cornell_metal();
    Scene small = s;
    small.camera.width = 16;
    small.camera.height = 16;
    small.finalize();

    SppmConfig cfg;
    cfg.iterations = 3;
    cfg.photon_slots = 512;
    cfg.max_depth = 4;
    cfg.seed = 42;
    cfg.workers = 1;

    const RenderResult a = render(small, cfg);
    const RenderResult b = render(small, cfg);
    cfg.workers = 3;
    const RenderResult c = render(small, cfg);
    cfg.workers = 7;
    const RenderResult d = render(small, cfg);

    REQUIRE(a.radiance.size() == b.radiance.size());
    for (std::size_t i = 0; i < a.radiance.size(); ++i) {
        REQUIRE(a.radiance[i] == b.radiance[i]);
        REQUIRE(a.radiance[i] == c.radiance[i]);
        REQUIRE(a.radiance[i] == d.radiance[i]);
    }
    CHECK(a.total_emitted == c.total_emitted);
    REQUIRE(a.per_iteration.size() == c.per_iteration.size());
    for (std::size_t i = 0; i < a.per_iteration.size(); ++i) {
        CHECK(a.per_iteration[i].emitted_total == c.per_iteration[i].emitted_total);
        CHECK(a.per_iteration[i].stored_records == c.per_iteration[i].stored_records);
        CHECK(a.per_iteration[i].live_slots == c.per_iteration[i].live_slots);
    }
    CHECK(a.image.rgb8 == d.image.rgb8);

    // A different seed must change the image.
    cfg.seed = 43;
    const RenderResult e = render(small, cfg);
    CHECK(e.radiance != a.radiance);
}

TEST_CASE("gather radii never grow and photon counts never shrink") {
    Scene small = builtin_cornell_metal();
    small.camera.width = 12;
    small.camera.height = 12;
    small.finalize();

    std::vector<std::vector<float>> radius_history;
    std::vector<std::vector<float>> n_history;
    SppmConfig cfg;
    cfg.iterations = 8;
    cfg.photon_slots = 1024;
    cfg.max_depth = 5;
    cfg.seed = 11;
    cfg.workers = 2;
    cfg.observer = [&](const IterationStats&, std::span<const MeasurementPoint> pts) {
        std::vector<float> r, nn;
        for (const auto& p : pts) {
            r.push_back(p.radius2);
            nn.push_back(p.n_accum);
        }
        radius_history.push_back(std::move(r));
        n_history.push_back(std::move(nn));
    };
    (void)render(small, cfg);

    REQUIRE(radius_history.size() == 8);
    for (std::size_t it = 1; it < radius_history.size(); ++it) {
        for (std::size_t px = 0; px < radius_history[it].size(); ++px) {
            CHECK(radius_history[it][px] <= radius_history[it - 1][px]);
            CHECK(n_history[it][px] >= n_history[it - 1][px]);
        }
    }

    // Some pixels actually gathered photons.
    const auto& last = n_history.back();
    CHECK(*std::max_element(last.begin(), last.end()) > 0.0f);
}

TEST_CASE("photonless render is the direct visualization") {
    Scene small = builtin_cornell_metal();
    small.camera.width = 16;
    small.camera.height = 16;
    small.finalize();

    SppmConfig cfg;
    cfg.iterations = 1;
    cfg.photon_slots = 0;
    cfg.seed = 5;
    cfg.workers = 1;

    const RenderResult res = render(small, cfg);
    CHECK(res.total_emitted == 0);

    std::size_t zero = 0, lamp_like = 0;
    for (const Rgb& v : res.radiance) {
        if (v.is_black()) ++zero;
        if (v.r > 10.0f) ++lamp_like;  // direct lamp sighting
    }
    CHECK(lamp_like > 0);
    CHECK(zero > res.radiance.size() / 2);
}

TEST_CASE("furnace smoke test approaches the analytic value") {
    const Scene box = test::furnace_scene(0.5f, 0.25f, 12);
    SppmConfig cfg;
    cfg.iterations = 16;
    cfg.photon_slots = 4096;
    cfg.max_depth = 8;
    cfg.seed = 2;
    cfg.workers = 2;

    const RenderResult res = render(box, cfg);
    // Every wall radiates emission / (1 - albedo) = 0.5.
    double mean = 0.0;
    for (const Rgb& v : res.radiance) mean += (v.r + v.g + v.b) / 3.0;
    mean /= static_cast<double>(res.radiance.size());
    CAPTURE(mean);
    CHECK(mean == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("render validates its configuration") {
    const Scene s = test::furnace_scene(0.5f, 0.25f, 4);
    SppmConfig cfg;
    cfg.iterations = 0;
    CHECK_THROWS_AS(render(s, cfg), std::invalid_argument);
    cfg.iterations = 1;
    cfg.alpha = 0.0f;
    CHECK_THROWS_AS(render(s, cfg), std::invalid_argument);
    cfg.alpha = 0.7f;
    cfg.seed = 0;
    CHECK_THROWS_AS(render(s, cfg), std::invalid_argument);

    Scene dark;
    dark.materials = {{"m", MaterialKind::Diffuse, {0.5f, 0.5f, 0.5f}, {}}};
    test::push_quad(dark.triangles, {0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    dark.camera.width = 2;
    dark.camera.height = 2;
    dark.finalize();
    SppmConfig wants_photons;
    wants_photons.iterations = 1;
    wants_photons.photon_slots = 8;
    CHECK_THROWS_AS(render(dark, wants_photons), std::invalid_argument);
}
