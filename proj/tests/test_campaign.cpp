#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "sr/campaign.hpp"

using namespace sr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("sr_campaign_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

// Tiny campaign: 2 configs x 2 runs on a small synthetic dataset.
std::string tiny_campaign_json() {
    return R"({
      "datasets": ["poly2@60"],
      "selectors": ["Tourn/4", "BTS/4/4"],
      "batch_sizes": [], "tourn_sizes": [], "shuffle": [],
      "tournament_grid": false,
      "runs": 2, "master_seed": 11,
      "population": 30, "generations": 5
    })";
}

// Snapshot of the deterministic parts of every record in a campaign dir.
std::map<std::string, std::string> campaign_fingerprint(const fs::path& root) {
    std::map<std::string, std::string> fp;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.path().filename() != "record.json") continue;
        std::ifstream in(e.path());
        nlohmann::json j;
        in >> j;
        for (auto& row : j["per_generation"]) {
            row.erase("selection_wall_time_s");
            row.erase("total_wall_time_s");
        }
        j.erase("total_seconds");
        fp[fs::relative(e.path(), root).string()] = j.dump();
    }
    return fp;
}

}  // namespace

TEST_CASE("default campaign config reproduces the stock grid") {
    CampaignConfig c;
    const auto ids = c.expand_config_ids();
    // Ae-Lex + 7 tournament sizes + 7x7 batch/tournament sizes x {BTS, BTSS}
    CHECK(ids.size() == 1 + 7 + 2 * 49);
    CHECK(c.population == 1000);
    CHECK(c.generations == 1000);
    CHECK(c.runs == 25);
    CHECK(c.variation.crossover_rate == 0.9);
    CHECK(c.variation.mutation_rate == 0.1);
    CHECK(c.variation.max_initial_depth == 3);
    CHECK(c.variation.max_depth == 7);
    CHECK(c.variation.elite_count == 1);
    const std::set<std::string> set(ids.begin(), ids.end());
    CHECK(set.count("Ae-Lex"));
    CHECK(set.count("Tourn/128"));
    CHECK(set.count("BTS/2/2"));
    CHECK(set.count("BTSS/128/128"));
}

TEST_CASE("grid expansion: 2 batch sizes x 2 tournament sizes x 2 shuffles") {
    CampaignConfig c;
    c.selectors.clear();
    c.tournament_grid = false;
    c.batch_sizes = {4, 8};
    c.tourn_sizes = {16, 32};
    c.shuffle = {false, true};
    const auto ids = c.expand_config_ids();
    CHECK(ids.size() == 8);
}

TEST_CASE("cell seeds are stable and distinct") {
    const auto s1 = cell_seed(1, "poly2@600", "BTS/8/16", 0);
    CHECK(s1 == cell_seed(1, "poly2@600", "BTS/8/16", 0));
    CHECK(s1 != cell_seed(1, "poly2@600", "BTS/8/16", 1));
    CHECK(s1 != cell_seed(1, "poly2@600", "BTS/8/32", 0));
    CHECK(s1 != cell_seed(2, "poly2@600", "BTS/8/16", 0));
    CHECK(s1 != cell_seed(1, "trig1@600", "BTS/8/16", 0));
}

TEST_CASE("campaign config file parsing with defaults") {
    TempDir tmp;
    write_file(tmp.path / "c.json", R"({"datasets": ["poly2@100"], "population": 50})");
    const auto c = load_campaign_config((tmp.path / "c.json").string());
    CHECK(c.datasets == std::vector<std::string>{"poly2@100"});
    CHECK(c.population == 50);
    CHECK(c.generations == 1000);  // untouched default
    CHECK_THROWS(load_campaign_config((tmp.path / "missing.json").string()));
    write_file(tmp.path / "bad.json", "{nope");
    CHECK_THROWS(load_campaign_config((tmp.path / "bad.json").string()));
}

TEST_CASE("prepare_dataset: synthetic specs split and normalize") {
    CampaignConfig c;
    c.data_seed = 5;
    auto [train, test] = prepare_dataset(c, "poly2@100", "", "");
    CHECK(train.case_count() == 80);
    CHECK(test.case_count() == 20);
    CHECK(train.feature_count() == 2);
    // Normalized training columns: mean ~0.
    for (std::size_t col = 0; col < 2; ++col) {
        double mean = 0.0;
        for (const auto& row : train.features) mean += row[col];
        CHECK(std::abs(mean / 80.0) < 1e-9);
    }
    CHECK_THROWS_AS(prepare_dataset(c, "unknown_name", "", ""), DataError);
}

TEST_CASE("cmd_run writes record files and reports errors by exit code") {
    TempDir tmp;
    const auto out = (tmp.path / "out").string();
    CHECK(cmd_run("", "poly2@60", 7, out, "", "") == 0);
    CHECK(fs::exists(fs::path(out) / "record.json"));
    CHECK(fs::exists(fs::path(out) / "record.csv"));

    std::ifstream in(fs::path(out) / "record.json");
    nlohmann::json j;
    in >> j;
    CHECK(j["config_id"] == "Ae-Lex");  // stock default selector

    // Bad dataset -> data error exit code.
    CHECK(cmd_run("", "no_such_thing", 7, out, "", "") == 2);
    // Bad config -> usage/config error exit code.
    write_file(tmp.path / "bad.json", "{nope");
    CHECK(cmd_run((tmp.path / "bad.json").string(), "poly2@60", 7, out, "", "") == 1);
}

TEST_CASE("cmd_run is reproducible apart from wall times") {
    TempDir tmp;
    write_file(tmp.path / "cfg.json",
               R"({"selectors": ["Tourn/4"], "population": 30, "generations": 5})");
    const auto out1 = (tmp.path / "r1").string();
    const auto out2 = (tmp.path / "r2").string();
    REQUIRE(cmd_run((tmp.path / "cfg.json").string(), "poly2@60", 3, out1, "", "") == 0);
    REQUIRE(cmd_run((tmp.path / "cfg.json").string(), "poly2@60", 3, out2, "", "") == 0);
    const auto fp1 = campaign_fingerprint(out1);
    const auto fp2 = campaign_fingerprint(out2);
    CHECK(fp1.at("record.json") == fp2.at("record.json"));
}

TEST_CASE("grid runs cells, resumes, and reports") {
    TempDir tmp;
    write_file(tmp.path / "campaign.json", tiny_campaign_json());
    const auto dir = (tmp.path / "campaign").string();

    REQUIRE(cmd_grid((tmp.path / "campaign.json").string(), dir, 2, "", "") == 0);
    CHECK(fs::exists(fs::path(dir) / "poly2@60" / "Tourn-4" / "run_0" / "record.json"));
    CHECK(fs::exists(fs::path(dir) / "poly2@60" / "BTS-4-4" / "run_1" / "record.csv"));
    const auto before = campaign_fingerprint(dir);
    CHECK(before.size() == 4);

    // Simulate an interrupted campaign: drop one cell, re-invoke, and the
    // directory converges to the same deterministic content.
    fs::remove_all(fs::path(dir) / "BTS-4-4");  // nothing matches, harmless
    fs::remove_all(fs::path(dir) / "poly2@60" / "BTS-4-4" / "run_0");
    REQUIRE(cmd_grid((tmp.path / "campaign.json").string(), dir, 1, "", "") == 0);
    const auto after = campaign_fingerprint(dir);
    CHECK(before == after);

    // Aggregation against the named baseline.
    REQUIRE(cmd_report(dir, "Tourn/4") == 0);
    const fs::path report = fs::path(dir) / "report" / "poly2@60";
    CHECK(fs::exists(report / "comparison.csv"));
    CHECK(fs::exists(report / "report.json"));
    CHECK(fs::exists(report / "curves" / "Tourn-4.csv"));
    CHECK(fs::exists(report / "boxplot_data.csv"));

    std::ifstream in(report / "report.json");
    nlohmann::json j;
    in >> j;
    CHECK(j["baseline"] == "Tourn/4");
    CHECK(j["comparison"][0]["speedup"] == 1.0);

    // Missing baseline -> warn path, nonzero exit because nothing written.
    CHECK(cmd_report(dir + "_nope", "Tourn/4") == 1);
}

TEST_CASE("collect_config_results aggregates runs and warns on missing cells") {
    TempDir tmp;
    write_file(tmp.path / "campaign.json", tiny_campaign_json());
    const auto dir = (tmp.path / "campaign").string();
    REQUIRE(cmd_grid((tmp.path / "campaign.json").string(), dir, 2, "", "") == 0);
    // Remove one record to simulate a missing cell; aggregation proceeds.
    fs::remove(fs::path(dir) / "poly2@60" / "BTS-4-4" / "run_1" / "record.json");

    const auto results = collect_config_results(dir, "poly2@60");
    REQUIRE(results.size() == 2);
    for (const auto& r : results) {
        if (r.config_id == "BTS/4/4")
            CHECK(r.per_run_final_test_mae.size() == 1);
        else
            CHECK(r.per_run_final_test_mae.size() == 2);
        CHECK(r.per_generation_median_curve.size() == 6);
    }
}

TEST_CASE("selbench times the requested selectors") {
    const auto rows = selbench(40, 16, 40, {"Lex", "Ae-Lex", "Tourn/4", "BTS/4/4", "BTSS/4/4"},
                               3, 9);
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) {
        CHECK(r.median_seconds > 0.0);
        CHECK(r.n == 40);
        CHECK(r.cases == 16);
        CHECK(r.k == 40);
        CHECK(r.reps == 3);
    }
    CHECK(rows[0].selector == "Lex");
    CHECK(rows[3].selector == "BTS/4/4");
}

TEST_CASE("cmd_selbench writes a timing csv") {
    TempDir tmp;
    const auto out = (tmp.path / "bench.csv").string();
    REQUIRE(cmd_selbench(20, 8, 20, {"Lex", "BTS/4/4"}, 2, 3, out) == 0);
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "selector,n,cases,k,reps,median_seconds");
    std::size_t rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
    CHECK(cmd_selbench(20, 8, 20, {"bogus/1"}, 2, 3, out) == 1);
}

TEST_CASE("validate-data distinguishes ok, mismatch, and missing") {
    TempDir tmp;
    const Dataset ds = synthetic_dataset("poly2", 30, 2);
    write_csv((tmp.path / "ok.csv").string(), ds);
    write_csv((tmp.path / "short.csv").string(), ds);
    write_file(tmp.path / "registry.json", R"({
      "good": {"path": "ok.csv", "target_column": "target",
               "expected_rows": 30, "expected_features": 2},
      "absent": {"path": "gone.csv", "target_column": "target",
                 "expected_rows": 5, "expected_features": 1}
    })");
    CHECK(cmd_validate_data((tmp.path / "registry.json").string(), tmp.path.string()) == 0);

    write_file(tmp.path / "registry_bad.json", R"({
      "bad": {"path": "short.csv", "target_column": "target",
              "expected_rows": 31, "expected_features": 2}
    })");
    CHECK(cmd_validate_data((tmp.path / "registry_bad.json").string(), tmp.path.string()) == 2);
    CHECK(cmd_validate_data((tmp.path / "registry_missing.json").string(), "") == 2);
}
