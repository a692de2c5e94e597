#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "geosketch/geomodel.hpp"
#include "geosketch/terrain.hpp"

namespace geosketch {

struct TriMesh {
    std::string name;
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
};

double triangle_area(const TriMesh& mesh, const std::array<std::uint32_t, 3>& tri);

/// Drops triangles with area <= 1e-12 m² and vertices no triangle uses.
void clean_mesh(TriMesh& mesh);

/// One vertex per node; each cell split along (i,j)→(i+1,j+1), counter-clockwise from +z.
TriMesh heightfield_to_mesh(const Heightfield& hf, const std::string& name);

/// "terrain", one "horizon:<id>" per effective horizon, a downward-facing
/// "base" plate, and "skirt:<unit>" walls around the grid boundary closing
/// each unit's layer. Skirts with no area are omitted.
std::vector<TriMesh> model_to_meshes(const LayeredModel& model);

/// Wavefront OBJ subset (o, v, f). Throws IoError if the stream fails.
void write_obj(const std::vector<TriMesh>& meshes, std::ostream& out);
std::string obj_string(const std::vector<TriMesh>& meshes);
void write_obj_file(const std::vector<TriMesh>& meshes, const std::filesystem::path& path);

}  // namespace geosketch
