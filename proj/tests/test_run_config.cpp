#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bcl/run_config.hpp"

using namespace bcl;
using nlohmann::json;

TEST_CASE("grid specification") {
    const auto g = GridSpec::parse("0.05:0.15:11");
    CHECK(g.start == 0.05);
    CHECK(g.stop == 0.15);
    CHECK(g.points == 11);
    CHECK(g.values().size() == 11);
    CHECK(GridSpec::parse("1e-2:2e-1:3").stop == 0.2);
    for (const char *bad : {"", "0.1", "0.1:0.2", "0.1:0.2:3:4", "a:0.2:3", "0.1:0.2:3.5",
                            "0.1:0.2:x", "0.1x:0.2:3"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(GridSpec::parse(bad), ConfigError);
    }
    CHECK_THROWS_AS(GridSpec::parse("0.2:0.1:3").values(), ConfigError);
}

TEST_CASE("J bound in J units") {
    CHECK(two_j_from_jmax(10) == 20);
    CHECK(two_j_from_jmax(7.5) == 15);
    CHECK(two_j_from_jmax(0) == 0);
    CHECK_THROWS_AS(two_j_from_jmax(7.3), ConfigError);
    CHECK_THROWS_AS(two_j_from_jmax(-1), ConfigError);
}

TEST_CASE("output format names") {
    CHECK(parse_format("csv") == OutputFormat::Csv);
    CHECK(parse_format("json") == OutputFormat::Json);
    CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}

TEST_CASE("reading a configuration") {
    const json j = {{"n_atoms", 400},
                    {"gamma", 0.2},
                    {"w", 0.25},
                    {"method", "cumulant3"},
                    {"grid", "0.1:0.3:5"},
                    {"bracket", {0.1, 0.4}},
                    {"truncation", {{"auto", false}, {"jmax", 40.5}}},
                    {"threads", 2},
                    {"format", "json"}};
    const RunConfig c = config_from_json(j);
    CHECK(c.params.n_atoms == 400);
    CHECK(c.params.gamma == 0.2);
    CHECK(c.params.w == 0.25);
    CHECK(c.params.gamma_c == 1.0);
    CHECK(c.method == Method::Cumulant3);
    REQUIRE(c.grid);
    CHECK(c.grid->points == 5);
    REQUIRE(c.bracket);
    CHECK(c.bracket->second == 0.4);
    CHECK_FALSE(c.truncation.automatic);
    CHECK(c.truncation.two_j_max == 81);
    CHECK(c.threads == 2);
    CHECK(c.format == OutputFormat::Json);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("strict keys and types") {
    CHECK_THROWS_AS(config_from_json({{"n_atom", 10}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"truncation", {{"jmx", 3}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"n_atoms", "ten"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"n_atoms", 10.5}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"w", true}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"method", "exact"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"bracket", {0.1}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
}

TEST_CASE("validation") {
    RunConfig c;
    c.params.gamma = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.threads = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.bracket = std::pair{0.3, 0.1};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.method = Method::Inhom;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.inhom = InhomSpec{};
    c.inhom->positions = {0.0, 1.0};
    c.inhom->counts = {1, 2};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.inhom->counts = {1, 1};
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("bin layouts") {
    InhomSpec s;
    s.bins = 3;
    CHECK(s.layout(10).counts == std::vector<int>{4, 3, 3});
    InhomSpec e;
    e.positions = {0.0, 0.5, 1.0, 1.5};
    CHECK(e.layout(10).counts == std::vector<int>{3, 3, 2, 2});
    CHECK_THROWS_AS(InhomSpec{}.layout(10), ConfigError);
}

TEST_CASE("pump scheme overrides the rates") {
    RunConfig c;
    c.params.w = 5.0;
    c.pump = PumpLevelScheme{1.0, 1.0, 0.5, 2.0};
    const ModelParams p = c.model();
    const EffectivePump e = effective_pump_rates(*c.pump);
    CHECK(p.w == e.w);
    CHECK(p.t2_inv == e.t2_inv);
    CHECK(c.params.w == 5.0);
}

TEST_CASE("configuration round trip") {
    RunConfig c;
    c.params = ModelParams{123, 0.3, 0.45, 1.5, 0.01};
    c.alpha = 0.5;
    c.method = Method::Inhom;
    c.grid = GridSpec{0.1, 0.5, 7};
    c.n_list = {100, 200};
    c.bracket = std::pair{0.1, 0.9};
    c.min_tol = 1e-5;
    c.truncation.automatic = false;
    c.truncation.two_j_max = 31;
    c.truncation.depth_max = 40;
    c.inhom = InhomSpec{};
    c.inhom->bins = 7;
    c.pump = PumpLevelScheme{0.5, 1.0, 0.1, 3.0};
    c.threads = 4;
    c.out = "x.csv";
    c.format = OutputFormat::Json;
    const json j = config_to_json(c);
    const RunConfig r = config_from_json(j);
    CHECK(config_to_json(r) == j);
    CHECK(r.truncation.two_j_max == 31);
    CHECK(r.inhom->bins == 7);
    CHECK(*r.alpha == 0.5);
}

TEST_CASE("output sidecars are accepted as configurations") {
    RunConfig c;
    c.params.n_atoms = 77;
    const json meta = {{"tool", "bcl"}, {"command", "steady"}, {"config", config_to_json(c)}};
    CHECK(config_from_json(meta).params.n_atoms == 77);

    const auto path = std::filesystem::temp_directory_path() / "bcl_config_test.json";
    std::ofstream(path) << meta.dump();
    CHECK(load_config(path.string()).params.n_atoms == 77);
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_config(path.string()), ConfigError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_config(path.string()), ConfigError);
}
