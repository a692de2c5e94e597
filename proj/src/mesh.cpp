#include "geosketch/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "geosketch/error.hpp"
#include "geosketch/json_format.hpp"

namespace geosketch {

namespace {

using Vertex = std::array<double, 3>;
using Triangle = std::array<std::uint32_t, 3>;

/// Grid boundary nodes as (i, j), counter-clockwise seen from +z.
std::vector<std::pair<std::size_t, std::size_t>> boundary_loop(const GridSpec& spec) {
    std::vector<std::pair<std::size_t, std::size_t>> loop;
    for (std::size_t i = 0; i + 1 < spec.nx; ++i) loop.emplace_back(i, 0);
    for (std::size_t j = 0; j + 1 < spec.ny; ++j) loop.emplace_back(spec.nx - 1, j);
    for (std::size_t i = spec.nx - 1; i > 0; --i) loop.emplace_back(i, spec.ny - 1);
    for (std::size_t j = spec.ny - 1; j > 0; --j) loop.emplace_back(0, j);
    return loop;
}

}  // namespace

double triangle_area(const TriMesh& mesh, const Triangle& tri) {
    const Vertex& a = mesh.vertices[tri[0]];
    const Vertex& b = mesh.vertices[tri[1]];
    const Vertex& c = mesh.vertices[tri[2]];
    const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
    const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
    const double cx = uy * vz - uz * vy;
    const double cy = uz * vx - ux * vz;
    const double cz = ux * vy - uy * vx;
    return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
}

void clean_mesh(TriMesh& mesh) {
    std::vector<Triangle> kept;
    kept.reserve(mesh.triangles.size());
    for (const auto& t : mesh.triangles) {
        if (triangle_area(mesh, t) > 1e-12) {
            kept.push_back(t);
        }
    }
    std::vector<std::int64_t> remap(mesh.vertices.size(), -1);
    std::vector<Vertex> vertices;
    for (auto& t : kept) {
        for (auto& v : t) {
            if (remap[v] < 0) {
                remap[v] = static_cast<std::int64_t>(vertices.size());
                vertices.push_back(mesh.vertices[v]);
            }
            v = static_cast<std::uint32_t>(remap[v]);
        }
    }
    mesh.vertices = std::move(vertices);
    mesh.triangles = std::move(kept);
}

TriMesh heightfield_to_mesh(const Heightfield& hf, const std::string& name) {
    const GridSpec& spec = hf.spec;
    TriMesh mesh;
    mesh.name = name;
    mesh.vertices.reserve(spec.size());
    for (std::size_t j = 0; j < spec.ny; ++j) {
        for (std::size_t i = 0; i < spec.nx; ++i) {
            const Point2 p = spec.node(i, j);
            mesh.vertices.push_back({p.x, p.y, hf.at(i, j)});
        }
    }
    mesh.triangles.reserve(2 * (spec.nx - 1) * (spec.ny - 1));
    for (std::size_t j = 0; j + 1 < spec.ny; ++j) {
        for (std::size_t i = 0; i + 1 < spec.nx; ++i) {
            const auto v00 = static_cast<std::uint32_t>(spec.index(i, j));
            const auto v10 = static_cast<std::uint32_t>(spec.index(i + 1, j));
            const auto v11 = static_cast<std::uint32_t>(spec.index(i + 1, j + 1));
            const auto v01 = static_cast<std::uint32_t>(spec.index(i, j + 1));
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }
    }
    return mesh;
}

std::vector<TriMesh> model_to_meshes(const LayeredModel& model) {
    const GridSpec& spec = model.spec;
    std::vector<TriMesh> meshes;
    meshes.push_back(heightfield_to_mesh(model.terrain, "terrain"));

    // Layer interfaces as the columns see them: base, clamped horizons, terrain.
    std::vector<Heightfield> levels;
    levels.push_back({spec, std::vector<double>(spec.size(), model.model_base)});
    for (std::size_t k = 0; k < model.effective_horizons.size(); ++k) {
        Heightfield h = model.effective_horizons[k];
        const auto& below = levels.back().z;
        for (std::size_t n = 0; n < h.z.size(); ++n) {
            h.z[n] = std::max(h.z[n], below[n]);
        }
        meshes.push_back(heightfield_to_mesh(h, "horizon:" + model.horizon_ids[k]));
        levels.push_back(std::move(h));
    }
    levels.push_back(model.terrain);

    TriMesh base = heightfield_to_mesh(levels.front(), "base");
    for (auto& t : base.triangles) {
        std::swap(t[1], t[2]);
    }
    meshes.push_back(std::move(base));

    // Layer k lies between levels[k] and levels[k+1].
    std::vector<std::string> layer_units = model.horizon_units;
    layer_units.push_back(model.cover_unit);
    std::vector<std::string> skirt_order;
    std::map<std::string, TriMesh> skirts;
    const auto loop = boundary_loop(spec);
    for (std::size_t k = 0; k < layer_units.size(); ++k) {
        const std::string& unit = layer_units[k];
        auto [it, inserted] = skirts.try_emplace(unit);
        TriMesh& skirt = it->second;
        if (inserted) {
            skirt.name = "skirt:" + unit;
            skirt_order.push_back(unit);
        }
        const auto first = static_cast<std::uint32_t>(skirt.vertices.size());
        for (const auto& [i, j] : loop) {
            const Point2 p = spec.node(i, j);
            skirt.vertices.push_back({p.x, p.y, levels[k].at(i, j)});
            skirt.vertices.push_back({p.x, p.y, levels[k + 1].at(i, j)});
        }
        const auto n = static_cast<std::uint32_t>(loop.size());
        for (std::uint32_t e = 0; e < n; ++e) {
            const std::uint32_t a_bot = first + 2 * e, a_top = a_bot + 1;
            const std::uint32_t b_bot = first + 2 * ((e + 1) % n), b_top = b_bot + 1;
            // Outward facing for a counter-clockwise loop.
            skirt.triangles.push_back({a_bot, b_bot, b_top});
            skirt.triangles.push_back({a_bot, b_top, a_top});
        }
    }
    for (const auto& unit : skirt_order) {
        TriMesh& skirt = skirts[unit];
        clean_mesh(skirt);
        if (!skirt.triangles.empty()) {
            meshes.push_back(std::move(skirt));
        }
    }
    return meshes;
}

void write_obj(const std::vector<TriMesh>& meshes, std::ostream& out) {
    std::size_t offset = 1;
    std::string line;
    for (const auto& mesh : meshes) {
        out << "o " << mesh.name << '\n';
        for (const auto& v : mesh.vertices) {
            line = "v " + format_number(v[0]) + ' ' + format_number(v[1]) + ' ' + format_number(v[2]) + '\n';
            out << line;
        }
        for (const auto& t : mesh.triangles) {
            out << "f " << (t[0] + offset) << ' ' << (t[1] + offset) << ' ' << (t[2] + offset) << '\n';
        }
        offset += mesh.vertices.size();
    }
    if (!out) {
        throw IoError("failed to write OBJ output");
    }
}

std::string obj_string(const std::vector<TriMesh>& meshes) {
    std::ostringstream out;
    write_obj(meshes, out);
    return out.str();
}

void write_obj_file(const std::vector<TriMesh>& meshes, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    write_obj(meshes, out);
    out.flush();
    if (!out) {
        throw IoError("failed to write '" + path.string() + "'");
    }
}

}  // namespace geosketch
