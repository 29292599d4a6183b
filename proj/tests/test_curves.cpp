#include <doctest.h>

#include <cmath>
#include <sstream>

#include "surfacc/bounds.hpp"
#include "surfacc/curves.hpp"
#include "surfacc/errors.hpp"
#include "surfacc/geom.hpp"

using namespace surfacc;

namespace {

std::size_t column(const CurveTable& t, const std::string& name) {
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i] == name) return i;
    FAIL("missing column " << name);
    return 0;
}

}  // namespace

TEST_CASE("grids are inclusive and snap to the upper end") {
    const auto g = GridSpec{0.0, 1.0, 0.3}.values();
    REQUIRE(g.size() == 5);
    CHECK(g[3] == doctest::Approx(0.9));
    CHECK(g.back() == 1.0);
    const auto h = GridSpec{0.0, 0.99, 0.001}.values();
    CHECK(h.size() == 991);
    CHECK(h.back() == 0.99);
    CHECK(GridSpec{0.5, 0.5, 0.1}.values().size() == 1);
    CHECK_THROWS_AS((GridSpec{1.0, 0.0, 0.1}.values()), ConfigError);
    CHECK_THROWS_AS((GridSpec{0.0, 1.0, 0.0}.values()), ConfigError);
}

TEST_CASE("normal variation curves") {
    const CurveTable t = figure_curves("figure-4", {0.0, 0.99, 0.001}, {});
    REQUIRE(t.columns.size() == 5);
    REQUIRE(t.rows.size() == 991);
    const std::size_t e1 = column(t, "eta1_deg"), e2 = column(t, "eta2_deg");
    for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i][0] > t.rows[i - 1][0]);
    for (const auto& row : t.rows) {
        const double d = row[0];
        CHECK(std::isnan(row[e1]) == (d >= eta1_limit()));
        CHECK(std::isnan(row[e2]) == (d >= eta2_limit()));
        if (!std::isnan(row[e1])) CHECK(row[e1] == doctest::Approx(to_degrees(eta1(d).value)).epsilon(1e-14));
        for (std::size_t c = 3; c < row.size(); ++c)
            if (!std::isnan(row[c])) CHECK(row[e1] <= row[c] + 1e-12);
    }
    CHECK(std::isnan(t.rows.back()[3]));
    CHECK(std::isnan(t.rows.back()[4]));
}

TEST_CASE("triangle normal curves vanish at R = 0") {
    const CurveTable t = figure_curves("figure-5-left", {0.0, 0.4, 0.1}, {});
    for (std::size_t c = 1; c < t.columns.size(); ++c) CHECK(t.rows[0][c] == 0.0);
    const CurveTable f = figure_curves("figure-5-right", {0.0, 0.3, 0.1}, {10.0, 60.0, 10.0});
    CHECK(f.rows.size() == 4 * 6);
    for (const auto& row : f.rows)
        if (row[0] == 0.0) CHECK(row[2] == 0.0);
}

TEST_CASE("extended triangle normal curves reach a right angle") {
    const CurveTable t = figure_curves("figure-7", {0.3734, 0.3734, 0.1}, {});
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][1] == doctest::Approx(90.0).epsilon(0.5 / 90.0));
    const CurveTable e = figure_curves("figure-15", {0.2, 0.2, 0.1}, {});
    CHECK(e.rows[0][1] < 47.95);
    CHECK(e.rows[0][1] > 47.94);
}

TEST_CASE("every catalog figure renders on its default grid") {
    for (const auto& f : figure_catalog()) {
        CAPTURE(f.id);
        const CurveTable t = figure_curves(f.id, f.x, f.y);
        const std::size_t nx = f.x.values().size();
        CHECK(t.rows.size() == (f.two_dimensional ? nx * f.y.values().size() : nx));
        for (const auto& row : t.rows) CHECK(row.size() == t.columns.size());
    }
    CHECK_THROWS_AS(figure_info("figure-99"), ConfigError);
    CHECK_THROWS_AS((figure_curves("figure-99", {0, 1, 0.1}, {})), ConfigError);
}

TEST_CASE("CSV output") {
    CurveTable t;
    t.columns = {"x", "y"};
    t.rows = {{0.5, std::nan("")}, {1.0 / 3.0, 2.0}};
    std::ostringstream os;
    write_csv(os, t, {"note"});
    CHECK(os.str() == "# note\nx,y\n0.5,\n0.333333333333,2\n");
}
