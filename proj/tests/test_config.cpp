#include <doctest.h>

#include <sstream>

#include "surfacc/config.hpp"
#include "surfacc/errors.hpp"
#include "surfacc/verify.hpp"

using namespace surfacc;

TEST_CASE("key-value parsing") {
    const auto c = KeyValueConfig::parse("# comment\n\na = 1\nb=2.5 # trailing\nlist = 0.1, 0.2,0.3\nempty =\n");
    CHECK(c.get("a") == "1");
    CHECK(c.get_int("a") == 1);
    CHECK(c.get_double("b") == 2.5);
    CHECK(c.get_doubles("list") == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(c.get("empty").empty());
    CHECK_FALSE(c.has("missing"));
    CHECK_THROWS_AS(c.get("missing"), ConfigError);
    CHECK_THROWS_AS(c.get_int("b"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse("novalue\n"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::parse("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/surfacc.conf"), ConfigError);
}

TEST_CASE("overrides accept known keys only") {
    auto c = KeyValueConfig::parse("x.a = 1\nx.b = 2\ny.a = 3\n");
    c.override_with(KeyValueConfig::parse("x.a = 10\n"));
    c.override_with(std::string("y.a=30"));
    CHECK(c.get("x.a") == "10");
    CHECK(c.get("y.a") == "30");
    CHECK_THROWS_AS(c.override_with(std::string("z=1")), ConfigError);
    CHECK_THROWS_AS(c.override_with(std::string("no-equals")), ConfigError);
    const auto sec = c.section("x");
    CHECK(sec.size() == 2);
    CHECK(sec.at("b") == "2");
    std::ostringstream os;
    c.write(os, "# ");
    CHECK(os.str() == "# x.a = 10\n# x.b = 2\n# y.a = 30\n");
}

TEST_CASE("the lemma defaults cover the catalog") {
    const KeyValueConfig d = default_lemma_config();
    CHECK(d.get_int("seed") == 1);
    CHECK(d.get_int("sharpness.trials") == 1000);
    CHECK(d.get_double("corollary16.eps") == 0.2);
    for (const auto& lemma : lemma_catalog()) {
        if (lemma == "nvl-codim2") continue;
        CAPTURE(lemma);
        CHECK_FALSE(d.section(lemma).empty());
    }
}
