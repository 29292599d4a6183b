#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "surfacc/errors.hpp"
#include "surfacc/mesh.hpp"

using namespace surfacc;

namespace {

const std::string kData = SURFACC_TEST_DATA;

std::vector<TriangleAnalysis> analyze_const(const TriangleMesh& m, double lfs, int codim = 1, double phi_deg = 49.0) {
    return analyze_mesh(m, [lfs](int) { return VertexFeatures{lfs, lfs}; }, codim, phi_deg * std::numbers::pi / 180.0);
}

}  // namespace

TEST_CASE("icosahedron rows are identical") {
    const TriangleMesh off = read_mesh(kData + "/icosahedron.off");
    const TriangleMesh obj = read_mesh(kData + "/icosahedron.obj", true);
    REQUIRE(off.triangles.size() == 20);
    REQUIRE(off.vertices.size() == 12);
    REQUIRE(obj.vertex_values.size() == 12);
    for (double v : obj.vertex_values) CHECK(v == 1.0);
    for (const auto& v : off.vertices) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-15));

    const auto rows = analyze_const(off, 1.0);
    // Edge of the unit-circumradius icosahedron and the circumradius of its equilateral faces.
    const double edge = 4.0 / std::sqrt(10.0 + 2.0 * std::sqrt(5.0));
    const double face_r = edge / std::sqrt(3.0);
    for (const auto& r : rows) {
        CHECK(r.circumradius == doctest::Approx(face_r).epsilon(1e-14));
        CHECK(r.min_radius == doctest::Approx(face_r).epsilon(1e-14));
        CHECK(r.largest_angle == doctest::Approx(std::numbers::pi / 3.0).epsilon(1e-14));
        CHECK(r.kappa == doctest::Approx(face_r).epsilon(1e-14));
        for (const auto& b : r.tnl) CHECK_FALSE(b.valid);
        CHECK(r.etnl.valid == rows[0].etnl.valid);
        if (r.etnl.valid) CHECK(r.etnl.value == doctest::Approx(rows[0].etnl.value).epsilon(1e-13));
    }
    const auto from_obj = analyze_mesh(
        obj, [&](int v) { return VertexFeatures{obj.vertex_values[v], obj.vertex_values[v]}; }, 1,
        49.0 * std::numbers::pi / 180.0);
    for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(from_obj[i].circumradius == doctest::Approx(rows[i].circumradius).epsilon(1e-14));

    // A large feature size makes every bound valid.
    for (const auto& r : analyze_const(off, 10.0))
        for (const auto& b : r.tnl) CHECK(b.valid);
}

TEST_CASE("thin cap triangle is flagged while its neighbours pass") {
    const TriangleMesh m = read_mesh(kData + "/cap.off");
    const auto rows = analyze_const(m, 1.0);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].circumradius > 1.0);
    for (const auto& b : rows[0].tnl) CHECK_FALSE(b.valid);
    for (std::size_t i = 1; i < rows.size(); ++i)
        for (const auto& b : rows[i].tnl) CHECK(b.valid);
    CHECK(rows[0].largest_angle > 3.1);
}

TEST_CASE("mesh parsing") {
    CHECK(read_mesh(kData + "/empty.off").triangles.empty());
    CHECK(analyze_const(read_mesh(kData + "/empty.off"), 1.0).empty());
    CHECK_THROWS_AS(read_mesh(kData + "/quad.off"), FormatError);
    CHECK_THROWS_AS(read_mesh(kData + "/missing.off"), FormatError);
    CHECK_THROWS_AS(read_mesh(kData + "/icosahedron.ply"), FormatError);

    std::istringstream with_lfs("OFF\n3 1 0\n0 0 0 0.5\n1 0 0 0.6\n0 1 0 0.7\n3 0 1 2\n");
    const TriangleMesh m = read_off(with_lfs, true);
    REQUIRE(m.vertex_values.size() == 3);
    CHECK(m.vertex_values[2] == 0.7);

    std::istringstream out_of_range("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 3\n");
    CHECK_THROWS_AS(read_off(out_of_range), FormatError);
    std::istringstream truncated("OFF\n3 1 0\n0 0 0\n1 0 0\n");
    CHECK_THROWS_AS(read_off(truncated), FormatError);
    std::istringstream obj_quad("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    CHECK_THROWS_AS(read_obj(obj_quad), FormatError);
    std::istringstream obj_neg("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n");
    const TriangleMesh neg = read_obj(obj_neg);
    REQUIRE(neg.triangles.size() == 1);
    CHECK(neg.triangles[0] == std::array<int, 3>{0, 1, 2});
}

TEST_CASE("degenerate triangles get invalid bounds") {
    TriangleMesh m;
    m.vertices = {Point::Zero(3), Point::Unit(3, 0), 2.0 * Point::Unit(3, 0)};
    m.triangles = {{0, 1, 2}};
    const auto rows = analyze_const(m, 1.0);
    REQUIRE(rows.size() == 1);
    CHECK(std::isinf(rows[0].circumradius));
    CHECK_FALSE(rows[0].etnl.valid);
    for (const auto& b : rows[0].tnl) CHECK_FALSE(b.valid);
    m.vertices[2] = Point::Unit(3, 1);
    CHECK_THROWS_AS(analyze_const(m, 0.0), PreconditionError);
}
