#pragma once

#include "lodforge/mesh.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace lodforge {

enum class InputFormat { Obj, Ply };

/// Infers the format from the file extension (case-insensitive).
std::optional<InputFormat> format_from_path(const std::filesystem::path& path);
std::optional<InputFormat> parse_format(const std::string& name);

/// Reads an OBJ or PLY file. OBJ files without `f` records but with one `vn`
/// per `v` load as point clouds. Meshes get face normals from their winding;
/// point-cloud normals are renormalized.
/// Throws ParseError on malformed input and MissingNormals for a cloud
/// without normals.
InputModel load_input(const std::filesystem::path& path, InputFormat format);
InputModel load_input(const std::filesystem::path& path);

void save_obj(const std::filesystem::path& path, const PolygonMesh& mesh);
void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh);
/// Point cloud as `v` + `vn` records.
void save_obj(const std::filesystem::path& path, const PointCloud& cloud);

enum class PlyEncoding { Ascii, BinaryLittleEndian };
void save_ply(const std::filesystem::path& path, const PointCloud& cloud,
              PlyEncoding encoding = PlyEncoding::Ascii);
void save_ply(const std::filesystem::path& path, const TriangleMesh& mesh,
              PlyEncoding encoding = PlyEncoding::Ascii);

/// Reads an OBJ polygon mesh as-is (no triangulation), e.g. a candidate model.
PolygonMesh load_polygon_obj(const std::filesystem::path& path);

}  // namespace lodforge
