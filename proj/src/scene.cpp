// Copyright (c) 2026 the glint authors.
// SPDX-License-Identifier: Apache-2.0

#include "glint/scene.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace glint {

Ray Camera::primary_ray(int px, int py, float jx, float jy) const {
    const Vec3 forward = normalize(look_at - eye);
    const Vec3 right = normalize(cross(up, forward));
    const Vec3 view_up = cross(forward, right);

    const float tan_half = std::tan(vertical_fov * kPi / 360.0f);
    const float aspect = static_cast<float>(width) / static_cast<float>(height);

    const float sx = (2.0f * (static_cast<float>(px) + jx) / static_cast<float>(width) - 1.0f) *
                     tan_half * aspect;
    const float sy =
        (1.0f - 2.0f * (static_cast<float>(py) + jy) / static_cast<float>(height)) * tan_half;

    return Ray{eye, normalize(forward + right * sx + view_up * sy), 0.0f, kInfinity};
}

void Scene::finalize() {
    bounds = Aabb{};
    lights.clear();
    total_light_weight = 0.0f;
    for (uint32_t i = 0; i < triangles.size(); ++i) {
        const Triangle& tri = triangles[i];
        bounds.extend(tri.bounds());
        const Material& mat = materials.at(tri.material);
        if (mat.emissive()) {
            const float area = tri.area();
            const float weight = area * luminance(mat.emission);
            lights.push_back({i, area, weight});
            total_light_weight += weight;
        }
    }
}

namespace {

// Shared by tri and obj loading so both produce bit-identical normals for
// identical vertex positions.
bool append_triangle(Scene& scene, const Vec3& a, const Vec3& b, const Vec3& c, uint32_t mat) {
    const Vec3 n = cross(b - a, c - a);
    const float len = length(n);
    if (!(len > 0.0f) || !std::isfinite(len)) return false;
    Triangle tri;
    tri.p0 = a;
    tri.p1 = b;
    tri.p2 = c;
    tri.n0 = tri.n1 = tri.n2 = n / len;
    tri.material = mat;
    scene.triangles.push_back(tri);
    return true;
}

[[noreturn]] void fail_at(const std::string& origin, int line, const std::string& msg) {
    throw SceneParseError(origin + ":" + std::to_string(line) + ": " + msg);
}

float read_float(std::istringstream& iss, const std::string& origin, int line,
                 const char* what) {
    std::string tok;
    if (!(iss >> tok)) fail_at(origin, line, std::string("missing ") + what);
    try {
        std::size_t used = 0;
        const float v = std::stof(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        fail_at(origin, line, std::string("bad number '") + tok + "' for " + what);
    }
}

int read_int(std::istringstream& iss, const std::string& origin, int line, const char* what) {
    const float v = read_float(iss, origin, line, what);
    const int i = static_cast<int>(v);
    if (static_cast<float>(i) != v) fail_at(origin, line, std::string(what) + " must be integer");
    return i;
}

void expect_end(std::istringstream& iss, const std::string& origin, int line) {
    std::string extra;
    if (iss >> extra) fail_at(origin, line, "unexpected trailing token '" + extra + "'");
}

void load_obj(Scene& scene, const std::string& path, uint32_t mat) {
    std::ifstream in(path);
    if (!in) throw SceneParseError("cannot open obj file '" + path + "'");

    std::vector<Vec3> verts;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream iss(line);
        std::string word;
        if (!(iss >> word)) continue;
        if (word == "v") {
            Vec3 p;
            p.x = read_float(iss, path, line_no, "vertex x");
            p.y = read_float(iss, path, line_no, "vertex y");
            p.z = read_float(iss, path, line_no, "vertex z");
            verts.push_back(p);
        } else if (word == "f") {
            std::vector<uint32_t> idx;
            std::string tok;
            while (iss >> tok) {
                const std::string head = tok.substr(0, tok.find('/'));
                long v = 0;
                try {
                    v = std::stol(head);
                } catch (const std::exception&) {
                    fail_at(path, line_no, "bad face index '" + tok + "'");
                }
                if (v < 0) v += static_cast<long>(verts.size()) + 1;
                if (v < 1 || v > static_cast<long>(verts.size()))
                    fail_at(path, line_no, "face index out of range");
                idx.push_back(static_cast<uint32_t>(v - 1));
            }
            if (idx.size() < 3) fail_at(path, line_no, "face needs at least 3 vertices");
            for (std::size_t i = 2; i < idx.size(); ++i) {
                if (!append_triangle(scene, verts[idx[0]], verts[idx[i - 1]], verts[idx[i]],
                                     mat))
                    std::fprintf(stderr, "%s:%d: warning: zero-area triangle skipped\n",
                                 path.c_str(), line_no);
            }
        }
        // Any other obj directive (vn, vt, usemtl, ...) is ignored.
    }
}

}  // namespace

Scene parse_scene(std::istream& in, const std::string& origin) {
    Scene scene;
    std::unordered_map<std::string, uint32_t> mat_ids;
    const std::filesystem::path base_dir = std::filesystem::path(origin).parent_path();

    auto material_id = [&](const std::string& name, int line) -> uint32_t {
        const auto it = mat_ids.find(name);
        if (it == mat_ids.end()) fail_at(origin, line, "unknown material '" + name + "'");
        return it->second;
    };

    std::string line;
    int line_no = 0;
    bool have_camera = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream iss(line);
        std::string word;
        if (!(iss >> word)) continue;

        if (word == "camera") {
            Camera& cam = scene.camera;
            cam.eye.x = read_float(iss, origin, line_no, "eye x");
            cam.eye.y = read_float(iss, origin, line_no, "eye y");
            cam.eye.z = read_float(iss, origin, line_no, "eye z");
            cam.look_at.x = read_float(iss, origin, line_no, "look x");
            cam.look_at.y = read_float(iss, origin, line_no, "look y");
            cam.look_at.z = read_float(iss, origin, line_no, "look z");
            cam.up.x = read_float(iss, origin, line_no, "up x");
            cam.up.y = read_float(iss, origin, line_no, "up y");
            cam.up.z = read_float(iss, origin, line_no, "up z");
            cam.vertical_fov = read_float(iss, origin, line_no, "vertical fov");
            cam.width = read_int(iss, origin, line_no, "width");
            cam.height = read_int(iss, origin, line_no, "height");
            expect_end(iss, origin, line_no);
            if (!(cam.vertical_fov > 0.0f && cam.vertical_fov < 180.0f))
                fail_at(origin, line_no, "vertical fov must be in (0, 180)");
            if (cam.width < 1 || cam.height < 1)
                fail_at(origin, line_no, "image size must be at least 1x1");
            if (length_squared(cam.look_at - cam.eye) == 0.0f)
                fail_at(origin, line_no, "camera eye and look-at coincide");
            have_camera = true;
        } else if (word == "material") {
            Material mat;
            std::string kind;
            if (!(iss >> mat.name >> kind)) fail_at(origin, line_no, "malformed material line");
            if (kind == "diffuse")
                mat.kind = MaterialKind::Diffuse;
            else if (kind == "mirror")
                mat.kind = MaterialKind::Mirror;
            else
                fail_at(origin, line_no, "unknown material kind '" + kind + "'");
            mat.albedo.r = read_float(iss, origin, line_no, "albedo r");
            mat.albedo.g = read_float(iss, origin, line_no, "albedo g");
            mat.albedo.b = read_float(iss, origin, line_no, "albedo b");
            std::string tail;
            if (iss >> tail) {
                if (tail != "emit") fail_at(origin, line_no, "expected 'emit', got '" + tail + "'");
                mat.emission.r = read_float(iss, origin, line_no, "emission r");
                mat.emission.g = read_float(iss, origin, line_no, "emission g");
                mat.emission.b = read_float(iss, origin, line_no, "emission b");
                expect_end(iss, origin, line_no);
            }
            for (const float c : {mat.albedo.r, mat.albedo.g, mat.albedo.b})
                if (!(c >= 0.0f && c <= 1.0f))
                    fail_at(origin, line_no, "albedo components must be in [0, 1]");
            for (const float c : {mat.emission.r, mat.emission.g, mat.emission.b})
                if (!(c >= 0.0f) || !std::isfinite(c))
                    fail_at(origin, line_no, "emission components must be non-negative");
            if (mat_ids.count(mat.name)) fail_at(origin, line_no, "duplicate material '" + mat.name + "'");
            mat_ids.emplace(mat.name, static_cast<uint32_t>(scene.materials.size()));
            scene.materials.push_back(std::move(mat));
        } else if (word == "tri") {
            float c[9];
            for (int i = 0; i < 9; ++i) c[i] = read_float(iss, origin, line_no, "coordinate");
            std::string mat_name;
            if (!(iss >> mat_name)) fail_at(origin, line_no, "missing material name");
            expect_end(iss, origin, line_no);
            const uint32_t mat = material_id(mat_name, line_no);
            if (!append_triangle(scene, {c[0], c[1], c[2]}, {c[3], c[4], c[5]},
                                 {c[6], c[7], c[8]}, mat))
                std::fprintf(stderr, "%s:%d: warning: zero-area triangle skipped\n",
                             origin.c_str(), line_no);
        } else if (word == "obj") {
            std::string path, mat_name;
            if (!(iss >> path >> mat_name)) fail_at(origin, line_no, "malformed obj line");
            expect_end(iss, origin, line_no);
            const uint32_t mat = material_id(mat_name, line_no);
            const std::filesystem::path resolved = std::filesystem::path(path).is_absolute()
                                                       ? std::filesystem::path(path)
                                                       : base_dir / path;
            load_obj(scene, resolved.string(), mat);
        } else {
            fail_at(origin, line_no, "unknown directive '" + word + "'");
        }
    }

    if (!have_camera) throw SceneParseError(origin + ": missing camera directive");
    scene.finalize();
    return scene;
}

Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SceneParseError("cannot open scene file '" + path + "'");
    return parse_scene(in, path);
}

namespace {
std::string fmt_float(float v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
    return buf;
}
}  // namespace

std::string serialize_scene(const Scene& scene) {
    std::ostringstream out;
    const Camera& cam = scene.camera;
    out << "camera";
    for (const float v : {cam.eye.x, cam.eye.y, cam.eye.z, cam.look_at.x, cam.look_at.y,
                          cam.look_at.z, cam.up.x, cam.up.y, cam.up.z, cam.vertical_fov})
        out << " " << fmt_float(v);
    out << " " << cam.width << " " << cam.height << "\n";

    for (const Material& mat : scene.materials) {
        out << "material " << mat.name << " "
            << (mat.kind == MaterialKind::Diffuse ? "diffuse" : "mirror");
        for (const float v : {mat.albedo.r, mat.albedo.g, mat.albedo.b})
            out << " " << fmt_float(v);
        if (mat.emissive()) {
            out << " emit";
            for (const float v : {mat.emission.r, mat.emission.g, mat.emission.b})
                out << " " << fmt_float(v);
        }
        out << "\n";
    }

    for (const Triangle& tri : scene.triangles) {
        out << "tri";
        for (const Vec3* p : {&tri.p0, &tri.p1, &tri.p2})
            out << " " << fmt_float(p->x) << " " << fmt_float(p->y) << " " << fmt_float(p->z);
        out << " " << scene.materials[tri.material].name << "\n";
    }
    return out.str();
}

void save_scene(const Scene& scene, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SceneParseError("cannot open '" + path + "' for writing");
    out << serialize_scene(scene);
    if (!out) throw SceneParseError("write failed for '" + path + "'");
}

namespace {
// Quad (p, p+u, p+u+v, p+v) as two triangles; u x v picks the normal side.
void add_quad(Scene& scene, const Vec3& p, const Vec3& u, const Vec3& v, uint32_t mat) {
    append_triangle(scene, p, p + u, p + u + v, mat);
    append_triangle(scene, p, p + u + v, p + v, mat);
}
}  // namespace

Scene builtin_cornell_metal() {
    Scene s;
    s.materials = {
        {"white", MaterialKind::Diffuse, {0.73f, 0.73f, 0.73f}, {}},
        {"red", MaterialKind::Diffuse, {0.63f, 0.065f, 0.05f}, {}},
        {"green", MaterialKind::Diffuse, {0.14f, 0.45f, 0.091f}, {}},
        {"metal", MaterialKind::Mirror, {0.91f, 0.92f, 0.92f}, {}},
        {"lamp", MaterialKind::Diffuse, {0.78f, 0.78f, 0.78f}, {17.0f, 12.0f, 5.0f}},
    };
    const uint32_t white = 0, red = 1, green = 2, metal = 3, lamp = 4;

    // Unit box, open toward the camera at -z; normals face the interior.
    add_quad(s, {0, 0, 0}, {0, 0, 1}, {1, 0, 0}, white);  // floor
    add_quad(s, {0, 1, 0}, {1, 0, 0}, {0, 0, 1}, white);  // ceiling
    add_quad(s, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}, white);  // back wall
    add_quad(s, {0, 0, 0}, {0, 1, 0}, {0, 0, 1}, red);    // left wall
    add_quad(s, {1, 0, 0}, {0, 0, 1}, {0, 1, 0}, green);  // right wall

    // Area light slightly below the ceiling, facing down.
    add_quad(s, {0.375f, 0.9995f, 0.375f}, {0.25f, 0, 0}, {0, 0, 0.25f}, lamp);

    // Mirror block standing on the floor, left of center; no bottom face.
    const float x0 = 0.16f, x1 = 0.46f, z0 = 0.45f, z1 = 0.75f, y1 = 0.6f;
    add_quad(s, {x0, y1, z0}, {0, 0, z1 - z0}, {x1 - x0, 0, 0}, metal);  // top
    add_quad(s, {x0, 0, z0}, {0, 0, z1 - z0}, {0, y1, 0}, metal);        // -x side
    add_quad(s, {x1, 0, z0}, {0, y1, 0}, {0, 0, z1 - z0}, metal);        // +x side
    add_quad(s, {x0, 0, z0}, {0, y1, 0}, {x1 - x0, 0, 0}, metal);        // -z side
    add_quad(s, {x0, 0, z1}, {x1 - x0, 0, 0}, {0, y1, 0}, metal);        // +z side

    s.camera.eye = {0.5f, 0.5f, -1.4f};
    s.camera.look_at = {0.5f, 0.5f, 0.5f};
    s.camera.up = {0.0f, 1.0f, 0.0f};
    s.camera.vertical_fov = 39.3f;
    s.camera.width = 512;
    s.camera.height = 512;

    s.finalize();
    return s;
}

LightEmissionSample sample_light_emission(const Scene& scene, float u0, float u1, float u2,
                                          float u3) {
    if (!(scene.total_light_weight > 0.0f))
        throw std::logic_error("sample_light_emission: scene has no emissive area");

    // Pick a light by cumulative weight, then rescale u0 into the chosen bin
    // so it can be reused for the surface point.
    const float target = u0 * scene.total_light_weight;
    std::size_t k = 0;
    float below = 0.0f;
    while (k + 1 < scene.lights.size() && target >= below + scene.lights[k].weight)
        below += scene.lights[k++].weight;
    const LightRef& light = scene.lights[k];

    float up = (target - below) / light.weight;
    if (!(up >= 0.0f)) up = 0.0f;
    if (up >= 1.0f) up = 0.99999994f;

    const Triangle& tri = scene.triangles[light.triangle];
    const float su = std::sqrt(up);
    const float b1 = su * (1.0f - u1);
    const float b2 = su * u1;
    LightEmissionSample sample;
    sample.triangle = light.triangle;
    sample.origin = tri.p0 * (1.0f - su) + tri.p1 * b1 + tri.p2 * b2;
    sample.normal = tri.geometric_normal();
    sample.direction = sample_cosine_hemisphere(sample.normal, u2, u3);

    const Rgb emission = scene.material_of(tri).emission;
    sample.flux = emission * (kPi * scene.total_light_weight / luminance(emission));
    return sample;
}

}  // namespace glint
