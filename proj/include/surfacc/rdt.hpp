#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "surfacc/surfaces.hpp"

namespace surfacc {

using Vec3 = Eigen::Vector3d;

// Delaunay tetrahedralization of a point set in R^3 built by incremental insertion inside a far
// bounding tetrahedron. Predicates are exact; cospherical ties are broken by a consistent
// symbolic lifting perturbation ordered by point index.
class Delaunay3 {
public:
    explicit Delaunay3(std::vector<Vec3> points);

    struct Face {
        std::array<int, 3> v;         // input point indices, ascending
        std::array<int, 2> opposite;  // apex of each incident tetrahedron; >= size() marks a bounding vertex
    };

    std::size_t size() const { return n_; }
    const std::vector<Vec3>& points() const { return pts_; }  // input points followed by the bounding vertices
    bool is_bounding(int v) const { return v >= static_cast<int>(n_); }
    // Positively oriented tetrahedra whose vertices are all input points.
    std::vector<std::array<int, 4>> tetrahedra() const;
    // Triangles with three input vertices, each with its two incident tetrahedra.
    std::vector<Face> faces() const;

private:
    struct Tet {
        std::array<int, 4> v;
        std::array<int, 4> n;  // neighbor across the face opposite v[i], -1 on the bounding hull
    };

    void insert(int p);
    int locate(int p);
    bool conflict(const Tet& t, int p) const;

    std::size_t n_;
    std::vector<Vec3> pts_;
    std::vector<Tet> tets_;
    std::vector<char> alive_;
    std::vector<std::uint32_t> mark_;  // 2*epoch: in the cavity, 2*epoch+1: tested outside
    std::uint32_t epoch_ = 0;
    std::uint32_t walk_state_ = 0x9e3779b9u;
    int last_ = 0;
};

struct DualPoint {
    Vec3 u;
    double s;  // common distance from u to the triangle's vertices
};

struct RestrictedTriangle {
    std::array<int, 3> v;  // sample indices, oriented so the normal points out of the surface
    std::vector<DualPoint> duals;
};

struct RestrictedDelaunay {
    std::vector<Vec3> vertices;
    std::vector<RestrictedTriangle> triangles;
    std::vector<std::string> warnings;  // grazing Voronoi edges, excluded from the output
};

struct RdtOptions {
    int subdivisions = 64;
    double bisection_tol = 1e-12;
    double ray_truncation = 4.0;  // multiple of the model's bounding radius
};

// Triangles of Del V whose dual Voronoi edge meets the (codimension-1) surface in R^3.
RestrictedDelaunay restricted_delaunay(const SurfaceModel& s, const std::vector<Point>& vertices,
                                       const RdtOptions& opts = {});

// Edge -> number of incident restricted triangles; closed meshes have every count equal to 2.
bool is_closed_mesh(const RestrictedDelaunay& rdt);

void write_off(std::ostream& out, const RestrictedDelaunay& rdt, const std::vector<std::string>& comments = {});
// Lines "triangle ux uy uz s".
void write_dual_table(std::ostream& out, const RestrictedDelaunay& rdt, const std::vector<std::string>& comments = {});

}  // namespace surfacc
