#include <doctest.h>

#include <cmath>

#include "rfcrn/config.hpp"
#include "rfcrn/traffic.hpp"
#include "support.hpp"

using namespace rfcrn;

TEST_CASE("parse_quantity resolves unit suffixes")
{
    CHECK(parse_quantity("100ms") == doctest::Approx(0.1));
    CHECK(parse_quantity("2 ms") == doctest::Approx(2e-3));
    CHECK(parse_quantity("110mW") == doctest::Approx(0.11));
    CHECK(parse_quantity("1mJ") == doctest::Approx(1e-3));
    CHECK(parse_quantity("1MHz") == doctest::Approx(1e6));
    CHECK(parse_quantity("5us") == doctest::Approx(5e-6));
    CHECK(parse_quantity("0.5") == doctest::Approx(0.5));
    CHECK(parse_quantity("1e-8") == doctest::Approx(1e-8));
}

TEST_CASE("decibel values become linear ratios")
{
    CHECK(parse_quantity("-5.65dB") == doctest::Approx(std::pow(10.0, -0.565)));
    CHECK(parse_quantity("10dB") == doctest::Approx(10.0));
    CHECK(parse_quantity("-10 dB") == doctest::Approx(0.1));
}

TEST_CASE("malformed quantities name the key")
{
    try {
        parse_quantity("12 parsecs", "P_t");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "P_t");
    }
    CHECK_THROWS_AS(parse_quantity(""), ValidationError);
    CHECK_THROWS_AS(parse_quantity("ms"), ValidationError);
}

TEST_CASE("config text: comments, whitespace and later assignments")
{
    const Config c = Config::parse("# comment\n  P_t = 50mW\n\nP_t=60mW\nname = x\n");
    CHECK(c.get_double("P_t") == doctest::Approx(0.06));
    CHECK(c.get_string("name") == "x");
    CHECK_FALSE(c.has("comment"));
    CHECK_THROWS_AS(Config::parse("no equals sign"), ValidationError);
    CHECK_THROWS_AS(c.get_string("missing"), ValidationError);
}

TEST_CASE("overrides and typed getters")
{
    Config c = Config::preset("default");
    c.set("N_s=500");
    CHECK(c.get_int("N_s") == 500);
    c.set("N_s", "2.5");
    CHECK_THROWS_AS(c.get_int("N_s"), ValidationError);
    CHECK_THROWS_AS(c.set(std::string_view("no-assignment")), ValidationError);
    c.set("grid", "1, 2ms ,3");
    const auto v = c.get_list("grid");
    REQUIRE(v.size() == 3);
    CHECK(v[1] == doctest::Approx(2e-3));
    CHECK(c.get_double("absent", 4.0) == 4.0);
}

TEST_CASE("dump round-trips through parse")
{
    const Config c = Config::preset("cluster-overlap");
    CHECK(Config::parse(c.dump()).values() == c.values());
}

TEST_CASE("every preset validates")
{
    for (const auto& name : Config::preset_names()) {
        CAPTURE(name);
        const Config c = Config::preset(name);
        CHECK_NOTHROW(params_from(c));
        CHECK_NOTHROW(profiles_from(c));
    }
    CHECK_THROWS_AS(Config::preset("nope"), ValidationError);
}

TEST_CASE("the two traffic presets differ only in the harvest-channel idle probability")
{
    Config voip = Config::preset("voip");
    Config game = Config::preset("game");
    CHECK(voip.get_double("p_i_h") == doctest::Approx(0.2));
    CHECK(game.get_double("p_i_h") == doctest::Approx(0.5));
    voip.set("p_i_h", "0");
    game.set("p_i_h", "0");
    CHECK(voip.values() == game.values());
}

TEST_CASE("config files load from disk")
{
    test::TempDir dir("config");
    const auto path = dir.write("a.cfg", "P_s = 120mW\n");
    CHECK(Config::load(path.string()).get_double("P_s") == doctest::Approx(0.12));
    CHECK_THROWS(Config::load((dir.path() / "missing.cfg").string()));
}
