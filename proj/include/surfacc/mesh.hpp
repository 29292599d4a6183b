#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "surfacc/bounds.hpp"
#include "surfacc/geom.hpp"

namespace surfacc {

struct TriangleMesh {
    std::vector<Point> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<double> vertex_values;  // optional extra number per vertex, empty when absent
};

// OFF or OBJ chosen by file extension. With `extra_column`, every vertex line carries one more
// number after its coordinates (OFF) or after "v x y z" (OBJ). Non-triangle faces are a format error.
TriangleMesh read_mesh(const std::string& path, bool extra_column = false);
TriangleMesh read_off(std::istream& in, bool extra_column = false);
TriangleMesh read_obj(std::istream& in, bool extra_column = false);

struct TriangleAnalysis {
    double circumradius;
    double min_radius;      // smallest enclosing ball
    double largest_angle;   // radians
    std::array<BoundResult, 3> tnl;
    double kappa;           // max over vertices of R / lfs(v)
    BoundResult etnl;
};

struct VertexFeatures {
    double lfs;
    double ebs;
};

// Per-triangle bounds from vertex feature sizes. Degenerate triangles get infinite radii and
// invalid bounds.
std::vector<TriangleAnalysis> analyze_mesh(const TriangleMesh& mesh,
                                           const std::function<VertexFeatures(int)>& features, int codim,
                                           double phi);

}  // namespace surfacc
