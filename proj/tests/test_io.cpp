#include "doctest.h"
#include "qrep/config.hpp"
#include "qrep/report_io.hpp"

#include <sstream>

using namespace qrep;

TEST_CASE("text config") {
    const auto tree = config::parse_text(R"(# comment
[channel]
L0_km = 10   # trailing comment
total_length_km = 80
[source]
mode = remote_generation
chi = 0.01
[purification]
schedule = 0:2, 3
[run]
seed = 9
trials = 50
)");
    const auto c = config::repeater_config(tree);
    CHECK(c.levels() == 3);
    CHECK(c.mode == sim::GenerationMode::remote_generation);
    CHECK(c.chi == 0.01);
    REQUIRE(c.purification_schedule.size() == 2);
    CHECK(c.purification_schedule[0].level == 0);
    CHECK(c.purification_schedule[0].rounds == 2);
    CHECK(c.purification_schedule[1].rounds == 1);
    CHECK(c.seed == 9);
    CHECK(c.trials == 50);

    const auto back = config::repeater_config(config::to_tree(c));
    CHECK(back.chi == c.chi);
    CHECK(back.eta_r == c.eta_r);
    CHECK(back.purification_schedule.size() == 2);
    CHECK(config::render(config::to_tree(back)) == config::render(config::to_tree(c)));
}

TEST_CASE("config errors name the field") {
    CHECK_THROWS_WITH(config::parse_text("L0_km = 3"), doctest::Contains("outside of a [section]"));
    CHECK_THROWS_WITH(config::parse_text("[a]\nx = 1\nx = 2"), doctest::Contains("duplicate key a.x"));
    CHECK_THROWS_WITH(config::parse_text("[a\n"), doctest::Contains("line 1"));
    CHECK_THROWS_WITH(config::repeater_config(config::parse_text("[channel]\nL0_km = ten")),
                      doctest::Contains("channel.L0_km"));
    CHECK_THROWS_WITH(config::repeater_config(config::parse_text("[channel]\ncolour = 1")),
                      doctest::Contains("unknown key channel.colour"));
    CHECK_THROWS_WITH(config::repeater_config(config::parse_text("[nope]\n")), doctest::Contains("[nope]"));
    CHECK_THROWS_WITH(config::repeater_config(config::parse_text("[channel]\ntotal_length_km = 30")),
                      doctest::Contains("2^n"));
    CHECK_THROWS_WITH(config::repeater_config(config::parse_text("[purification]\nschedule = a:b")),
                      doctest::Contains("purification.schedule"));
    CHECK_THROWS_WITH(config::repeater_config(config::parse_text("[source]\nmode = fast")),
                      doctest::Contains("source.mode"));
}

TEST_CASE("JSON config and manifests read the same tree") {
    const auto t = config::parse_text("[channel]\nL0_km = 10\n[efficiency]\neta1 = 0.9\n[purification]\nschedule = 1:1\n");
    const auto j = config::parse_json(R"({"channel": {"L0_km": 10}, "efficiency": {"eta1": 0.9},
                                          "purification": {"schedule": "1:1"}})");
    CHECK(config::repeater_config(t).eta1 == config::repeater_config(j).eta1);
    const auto m = config::parse_json(R"({"command": "simulate", "config": {"efficiency": {"eta1": "0.9"}}})");
    CHECK(config::repeater_config(m).eta1 == 0.9);
    CHECK_THROWS(config::parse_json("{"));
    CHECK_THROWS(config::parse_json("[1, 2]"));
}

TEST_CASE("phase config") {
    const auto c = config::phase_config(config::parse_text("[channel]\nloss_db_per_km = 2\n[phase]\nsigmas = 0, 0.5\n"));
    CHECK(c.channel.loss_db_per_km == 2.0);
    CHECK(c.sigmas.size() == 2);
    CHECK_THROWS(config::phase_config(config::parse_text("[phase]\nchi = 0\n")));
    CHECK_THROWS(config::phase_config(config::parse_text("[channel]\nmedium = water\n")));
}

TEST_CASE("content hash and report encodings") {
    CHECK(io::git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
    io::RunManifest m;
    m.config = config::to_tree(sim::RepeaterConfig{});
    const auto h = m.config_hash();
    m.config["run"]["seed"] = "2";
    CHECK(m.config_hash() != h);

    sim::RepeaterConfig c;
    c.total_length_km = 40;
    c.trials = 20;
    const auto r = sim::monte_carlo_run(c);
    std::ostringstream js, csv, lv;
    io::write_report_json(js, r);
    io::write_report_csv(csv, r);
    io::write_per_level_csv(lv, r);
    const auto j = nlohmann::json::parse(js.str());
    CHECK(j["total_time_s"]["mean"].get<double>() == r.total_time.mean);
    CHECK(j["per_level"].size() == 3);
    CHECK(csv.str().rfind("key,value\n", 0) == 0);
    CHECK(lv.str().rfind("level,success,analytic_time_s,simulated_mean_time_s\n", 0) == 0);
}
