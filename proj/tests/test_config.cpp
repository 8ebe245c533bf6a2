#include <doctest.h>

#include "fringe/config.hpp"

using namespace fringe;
using config::Config;

TEST_CASE("config: sections, comments, typed getters") {
    const std::string text =
        "# comment line\n"
        "top_key = 3.5\n"
        "[mc.local]\n"
        "trials_per_point = 1000  # trailing comment\n"
        "sigmas_rad = 0.1, 0.2, 0.3\n"
        "name = local-run\n"
        "[budget.col-a]\n"
        "snr = 8.8\n"
        "[budget.col-b]\n"
        "snr = 3.23\n";
    const auto cfg = Config::parse(text, "inline");
    CHECK(cfg.get_double("top_key") == doctest::Approx(3.5));
    CHECK(cfg.get_long("mc.local.trials_per_point") == 1000);
    CHECK(cfg.get_string("mc.local.name") == "local-run");
    const auto list = cfg.get_double_list("mc.local.sigmas_rad");
    REQUIRE(list.size() == 3);
    CHECK(list[1] == doctest::Approx(0.2));
    CHECK(cfg.get_double_or("missing", 7.0) == doctest::Approx(7.0));

    const auto cols = cfg.sections("budget");
    REQUIRE(cols.size() == 2);
    CHECK(cols[0] == "col-a");
    CHECK(cols[1] == "col-b");
}

TEST_CASE("config: parse errors carry line numbers") {
    try {
        Config::parse("a = 1\nbroken line\n", "test.cfg");
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::parse);
        CHECK(std::string(e.what()).find("test.cfg:2") != std::string::npos);
    }
    CHECK_THROWS_AS(Config::parse("[unterminated\n", "x"), Error);
    CHECK_THROWS_AS(Config::parse("key =\n", "x"), Error);
}

TEST_CASE("config: missing keys name the key") {
    const auto cfg = Config::parse("a = 1\n", "x");
    try {
        cfg.get_double("budget.local.snr");
        FAIL("expected missing-key error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::missing_key);
        CHECK(std::string(e.what()).find("budget.local.snr") !=
              std::string::npos);
    }
}

TEST_CASE("config: overrides replace and insert") {
    auto cfg = Config::parse("a = 1\n", "x");
    cfg.apply_override("a=2.5");
    cfg.apply_override("new.key=4");
    CHECK(cfg.get_double("a") == doctest::Approx(2.5));
    CHECK(cfg.get_double("new.key") == doctest::Approx(4.0));
    CHECK_THROWS_AS(cfg.apply_override("no_equals"), Error);
}

TEST_CASE("config: numeric validation") {
    const auto cfg = Config::parse("a = 1.5x\nb = 2.5\n", "x");
    CHECK_THROWS_AS(cfg.get_double("a"), Error);
    CHECK_THROWS_AS(cfg.get_long("b"), Error);
}

TEST_CASE("format_number uses 12 significant digits") {
    CHECK(config::format_number(0.5894) == "0.5894");
    CHECK(config::format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(config::csv_row({"a", "b"}) == "a,b\n");
}
