#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "surfacc/errors.hpp"
#include "surfacc/sampling.hpp"

using namespace surfacc;

TEST_CASE("sphere sample size is near the packing estimate") {
    const SphereModel s(1.0, 2, 3);
    const double eps = 0.3;
    const SampleSet set = generate_eps_sample(s, eps, 1);
    // Vertices are about eps apart, so disks of radius eps/2 pack the area.
    const double packing = 4.0 * std::numbers::pi / (std::numbers::pi * eps * eps / 4.0);
    const double n = static_cast<double>(set.vertices.size());
    CHECK(n >= packing / 4.0);
    CHECK(n <= packing * 4.0);
    for (const Point& v : set.vertices) CHECK(s.residual(v) < 1e-12);
    CHECK(set.dim == 3);
    CHECK(set.model == "sphere");
}

TEST_CASE("samples nest and are deterministic") {
    const SphereModel s(1.0, 2, 3);
    const SampleSet a = generate_eps_sample(s, 0.2, 7);
    const SampleSet b = generate_eps_sample(s, 0.2, 7);
    REQUIRE(a.vertices.size() == b.vertices.size());
    for (std::size_t i = 0; i < a.vertices.size(); ++i) CHECK(a.vertices[i] == b.vertices[i]);

    const CoverageReport at02 = verify_eps_sample(s, a.vertices, 0.2);
    CHECK(at02.pass);
    CHECK(at02.worst_ratio <= 0.2);
    CHECK_FALSE(verify_eps_sample(s, a.vertices, 0.1).pass);
    // Same pool, same answer.
    CHECK(verify_eps_sample(s, a.vertices, 0.2).worst_ratio == at02.worst_ratio);
}

TEST_CASE("single vertex fails at the antipode") {
    const SphereModel s(1.0, 2, 3);
    Point v(3);
    v << 0, 0, 1;
    const CoverageReport r = verify_eps_sample(s, {v}, 0.5);
    CHECK_FALSE(r.pass);
    CHECK(r.worst_ratio == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(r.witness(2) < -0.999);
}

TEST_CASE("supersets of a passing sample pass") {
    const TorusModel t(2.0, 0.5);
    SampleOptions gen;
    gen.pool_refinement = 4.0;
    const SampleSet base = generate_eps_sample(t, 0.3, 3, gen);
    CoverageOptions cov;
    cov.generation = gen;
    const CoverageReport r0 = verify_eps_sample(t, base.vertices, 0.3, cov);
    REQUIRE(r0.pass);
    std::mt19937_64 rng(4);
    for (int k = 0; k < 5; ++k) {
        std::vector<Point> sup = base.vertices;
        for (int i = 0; i < 20; ++i) sup.push_back(t.random_point(rng));
        std::shuffle(sup.begin(), sup.end(), rng);
        const CoverageReport r = verify_eps_sample(t, sup, 0.3, cov);
        CHECK(r.pass);
        CHECK(r.worst_ratio <= r0.worst_ratio);
    }
}

TEST_CASE("torus coverage agrees with a 100x validation pool") {
    const TorusModel t(2.0, 0.5);
    SampleOptions gen;
    gen.pool_refinement = 4.0;
    const double eps = 0.15;
    const SampleSet set = generate_eps_sample(t, eps, 5, gen);
    CoverageOptions cov;
    cov.generation = gen;
    const CoverageReport r10 = verify_eps_sample(t, set.vertices, eps, cov);
    cov.density_factor = 100.0;
    const CoverageReport r100 = verify_eps_sample(t, set.vertices, eps, cov);
    CHECK(r100.pool_size >= 9 * r10.pool_size);
    CHECK(r10.pass == r100.pass);
    CHECK(r100.pass);
    CHECK(r100.worst_ratio >= r10.worst_ratio - eps * 1e-3);
    CHECK(r100.worst_ratio <= eps * (1.0 + 1e-3));
}

TEST_CASE("configuration and precondition errors") {
    const SphereModel s(1.0, 2, 3);
    SampleOptions o;
    o.pool_refinement = 3.0;
    CHECK_THROWS_AS(generate_eps_sample(s, 0.2, 1, o), ConfigError);
    CHECK_THROWS_AS(generate_eps_sample(s, 0.5, 1), PreconditionError);
    CHECK_THROWS_AS(generate_eps_sample(s, 0.0, 1), PreconditionError);
}

TEST_CASE("sample table round trip") {
    const CliffordTorusModel c(1.0);
    const SampleSet set = generate_eps_sample(c, 0.4, 9);
    std::stringstream ss;
    write_sample(ss, set, {"note"});
    const std::string text = ss.str();
    CHECK(text.rfind("# d=4 eps=0.4 seed=9 model=clifford\n", 0) == 0);
    const SampleSet back = read_sample(ss);
    CHECK(back.dim == 4);
    CHECK(back.eps == 0.4);
    CHECK(back.seed == 9);
    CHECK(back.model == "clifford");
    REQUIRE(back.vertices.size() == set.vertices.size());
    for (std::size_t i = 0; i < set.vertices.size(); ++i) CHECK(back.vertices[i] == set.vertices[i]);

    std::istringstream bad("# d=3 eps=0.2 seed=1 model=sphere\n1 2\n");
    CHECK_THROWS_AS(read_sample(bad), FormatError);
    std::istringstream headless("1 2 3\n");
    CHECK_THROWS_AS(read_sample(headless), FormatError);
}
