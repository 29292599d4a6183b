#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "predicates.hpp"
#include "surfacc/errors.hpp"
#include "surfacc/rdt.hpp"
#include "surfacc/sampling.hpp"

using namespace surfacc;

namespace {

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return (b - a).cross(c - a).dot(d - a) / 6.0;
}

// Convex hull volume by brute force: a triple is a hull facet when no point lies strictly on its
// far side; each facet contributes a cone to an interior point.
double hull_volume(const std::vector<Vec3>& p) {
    Vec3 inside = Vec3::Zero();
    for (const auto& x : p) inside += x;
    inside /= static_cast<double>(p.size());
    const int n = static_cast<int>(p.size());
    double vol = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                const Vec3 nrm = (p[j] - p[i]).cross(p[k] - p[i]);
                int pos = 0, neg = 0;
                for (int m = 0; m < n; ++m) {
                    const double s = nrm.dot(p[m] - p[i]);
                    if (s > 1e-12) ++pos;
                    else if (s < -1e-12) ++neg;
                }
                if (pos == 0 || neg == 0) vol += std::abs(signed_volume(p[i], p[j], p[k], inside));
            }
    return vol;
}

Point to_point(const Vec3& v) { return Point(v); }

}  // namespace

TEST_CASE("insphere sign convention") {
    const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0), d(0, 0, 1);
    REQUIRE(detail::orient3d(a, b, c, d) > 0);
    CHECK(detail::insphere(a, b, c, d, Vec3(0.25, 0.25, 0.25)) == 1);
    CHECK(detail::insphere(a, b, c, d, Vec3(3, 3, 3)) == -1);
    CHECK(detail::insphere(a, b, c, d, Vec3(1, 1, 1)) == 0);
    CHECK(detail::orient3d(a, c, b, d) < 0);
    CHECK(detail::collinear(a, b, Vec3(3, 0, 0)));
    CHECK_FALSE(detail::collinear(a, b, c));

    std::mt19937_64 rng(31);
    int compared = 0;
    while (compared < 1000) {
        const Vec3 p = oracle::random_vector(3, rng), q = oracle::random_vector(3, rng),
                   r = oracle::random_vector(3, rng), s = oracle::random_vector(3, rng),
                   e = oracle::random_vector(3, rng);
        const int o = detail::orient3d(p, q, r, s);
        if (std::abs(signed_volume(p, q, r, s)) < 1e-3) continue;
        const Vec3 center = oracle::circumcenter({p, q, r, s});
        if (std::abs((e - center).norm() - (p - center).norm()) < 1e-6) continue;
        const int expected = oracle::insphere_sign(p, q, r, s, e);
        CHECK((o > 0 ? detail::insphere(p, q, r, s, e) : detail::insphere(p, r, q, s, e)) == expected);
        ++compared;
    }
}

TEST_CASE("star of an interior point") {
    std::vector<Vec3> pts = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}, {0, 0, 0}};
    const Delaunay3 del(pts);
    const auto tets = del.tetrahedra();
    CHECK(tets.size() == 4);
    for (const auto& t : tets) {
        CHECK(std::count(t.begin(), t.end(), 4) == 1);
        CHECK(signed_volume(pts[t[0]], pts[t[1]], pts[t[2]], pts[t[3]]) > 0.0);
    }
}

TEST_CASE("random points have empty circumballs") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<Vec3> pts(50);
        for (auto& p : pts) p = Vec3(u(rng), u(rng), u(rng));
        const Delaunay3 del(pts);
        const auto tets = del.tetrahedra();
        double vol = 0.0;
        for (const auto& t : tets) {
            const double v = signed_volume(pts[t[0]], pts[t[1]], pts[t[2]], pts[t[3]]);
            CHECK(v > 0.0);
            vol += v;
            const Vec3 c = oracle::circumcenter({pts[t[0]], pts[t[1]], pts[t[2]], pts[t[3]]});
            const double r = (pts[t[0]] - c).norm();
            for (int m = 0; m < 50; ++m) {
                if (std::find(t.begin(), t.end(), m) != t.end()) continue;
                CHECK((pts[m] - c).norm() >= r * (1.0 - 1e-12));
            }
        }
        CHECK(vol == doctest::Approx(hull_volume(pts)).epsilon(1e-10));
        // Each interior face has two real apexes, each hull face one.
        for (const auto& f : del.faces()) {
            const int real = !del.is_bounding(f.opposite[0]) + !del.is_bounding(f.opposite[1]);
            CHECK(real >= 1);
        }
    }
}

TEST_CASE("cospherical points are triangulated") {
    // Eight cube corners share one circumsphere; symbolic perturbation must still tile the cube.
    std::vector<Vec3> pts;
    for (int i = 0; i < 8; ++i) pts.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
    const Delaunay3 del(pts);
    double vol = 0.0;
    for (const auto& t : del.tetrahedra()) vol += signed_volume(pts[t[0]], pts[t[1]], pts[t[2]], pts[t[3]]);
    CHECK(vol == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("invalid point sets") {
    CHECK_THROWS_AS(Delaunay3({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 0}}), DuplicatePointError);
    CHECK_THROWS_AS(Delaunay3({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {2, 3, 0}}), DegeneracyError);
    CHECK_THROWS_AS(Delaunay3({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}), PreconditionError);
}

TEST_CASE("four points on a sphere patch") {
    // Any four points on the unit sphere have the origin as circumcenter, so each face's Voronoi ray
    // leaves the origin along the face's outward normal and meets the sphere at that unit vector.
    const SphereModel s(1.0, 2, 3);
    const double th = 0.1;
    std::vector<Point> pts = {to_point(Vec3(0, 0, 1))};
    for (int i = 0; i < 3; ++i) {
        const double ph = 2.0 * std::numbers::pi * i / 3.0 + 0.2 * i;
        pts.push_back(to_point(Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th))));
    }
    const RestrictedDelaunay rdt = restricted_delaunay(s, pts);
    CHECK(rdt.warnings.empty());
    REQUIRE(rdt.triangles.size() == 4);
    for (const auto& t : rdt.triangles) {
        const Vec3 a = pts[t.v[0]], b = pts[t.v[1]], c = pts[t.v[2]];
        int opp = 0;
        while (opp == t.v[0] || opp == t.v[1] || opp == t.v[2]) ++opp;
        Vec3 n = (b - a).cross(c - a).normalized();
        if (n.dot(Vec3(pts[opp]) - a) > 0) n = -n;
        REQUIRE(t.duals.size() == 1);
        CHECK((t.duals[0].u - n).norm() < 1e-10);
        CHECK(t.duals[0].s == doctest::Approx((n - a).norm()).epsilon(1e-10));
    }
}

TEST_CASE("restricted Delaunay of a sphere sample") {
    const SphereModel s(1.0, 2, 3);
    const double eps = 0.2;
    const SampleSet set = generate_eps_sample(s, eps, 33);
    const RestrictedDelaunay rdt = restricted_delaunay(s, set.vertices);
    CHECK(rdt.warnings.empty());
    CHECK(is_closed_mesh(rdt));
    // Euler characteristic of a sphere.
    std::set<std::pair<int, int>> edges;
    for (const auto& t : rdt.triangles)
        for (int i = 0; i < 3; ++i) edges.insert(std::minmax(t.v[i], t.v[(i + 1) % 3]));
    CHECK(static_cast<long>(rdt.vertices.size()) - static_cast<long>(edges.size()) +
              static_cast<long>(rdt.triangles.size()) == 2);

    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (const auto& t : rdt.triangles) {
        const Vec3 a = rdt.vertices[t.v[0]], b = rdt.vertices[t.v[1]], c = rdt.vertices[t.v[2]];
        CHECK((b - a).cross(c - a).dot(a + b + c) > 0.0);
        REQUIRE_FALSE(t.duals.empty());
        for (const auto& d : t.duals) {
            CHECK(s.residual(to_point(d.u)) < 1e-10);
            for (const Vec3& v : {a, b, c}) CHECK(std::abs((v - d.u).norm() - d.s) <= 1e-8 * std::max(1.0, d.s));
            CHECK(d.s <= eps * s.lfs(to_point(d.u)));
            for (const Vec3& w : rdt.vertices) CHECK((w - d.u).norm() >= d.s - 1e-8);
            // Projections of triangle points stay in the dual ball, and near some vertex.
            for (int k = 0; k < 5; ++k) {
                double l0 = uni(rng), l1 = uni(rng);
                if (l0 + l1 > 1.0) l0 = 1.0 - l0, l1 = 1.0 - l1;
                const Vec3 x = a + l0 * (b - a) + l1 * (c - a);
                const Vec3 xt = s.project(to_point(x));
                CHECK((xt - d.u).norm() <= d.s + 1e-8);
                double best = std::numeric_limits<double>::infinity();
                for (const Vec3& v : {a, b, c}) best = std::min(best, (v - xt).norm() - (v - d.u).norm());
                CHECK(best <= 1e-8);
            }
        }
    }
}

TEST_CASE("torus restricted Delaunay is closed") {
    const TorusModel t(2.0, 0.5);
    SampleOptions gen;
    gen.pool_refinement = 4.0;
    const SampleSet set = generate_eps_sample(t, 0.25, 35, gen);
    const RestrictedDelaunay rdt = restricted_delaunay(t, set.vertices);
    CHECK(is_closed_mesh(rdt));
    std::set<std::pair<int, int>> edges;
    for (const auto& tr : rdt.triangles)
        for (int i = 0; i < 3; ++i) edges.insert(std::minmax(tr.v[i], tr.v[(i + 1) % 3]));
    CHECK(static_cast<long>(rdt.vertices.size()) - static_cast<long>(edges.size()) +
              static_cast<long>(rdt.triangles.size()) == 0);
}

TEST_CASE("OFF and dual table output") {
    const SphereModel s(1.0, 2, 3);
    const SampleSet set = generate_eps_sample(s, 0.3, 36);
    const RestrictedDelaunay rdt = restricted_delaunay(s, set.vertices);
    std::stringstream off;
    write_off(off, rdt, {"closed: true"});
    std::string line;
    std::getline(off, line);
    CHECK(line == "OFF");
    std::getline(off, line);
    CHECK(line == "# closed: true");
    std::size_t nv = 0, nf = 0, ne = 1;
    off >> nv >> nf >> ne;
    CHECK(nv == rdt.vertices.size());
    CHECK(nf == rdt.triangles.size());
    CHECK(ne == 0);
    for (std::size_t i = 0; i < nv; ++i) {
        Vec3 v;
        off >> v(0) >> v(1) >> v(2);
        CHECK(v == rdt.vertices[i]);
    }
    for (std::size_t i = 0; i < nf; ++i) {
        int k = 0, a = 0, b = 0, c = 0;
        off >> k >> a >> b >> c;
        CHECK(k == 3);
        CHECK(std::array<int, 3>{a, b, c} == rdt.triangles[i].v);
    }

    std::stringstream duals;
    write_dual_table(duals, rdt);
    std::getline(duals, line);
    CHECK(line == "# triangle ux uy uz s");
    std::size_t rows = 0, expected = 0;
    for (const auto& t : rdt.triangles) expected += t.duals.size();
    std::size_t tri = 0;
    double ux = 0, uy = 0, uz = 0, sv = 0;
    while (duals >> tri >> ux >> uy >> uz >> sv) {
        CHECK(tri < rdt.triangles.size());
        ++rows;
    }
    CHECK(rows == expected);
}
