#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "sr/dataset.hpp"
#include "sr/exprtree.hpp"
#include "sr/rng.hpp"

using namespace sr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("sr_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("csv loading") {
    TempDir tmp;
    SUBCASE("three rows, two feature columns") {
        write_file(tmp.path / "a.csv", "x,y,t\n1,2,3\n4,5,6\n7,8,9\n");
        const auto ds = load_csv((tmp.path / "a.csv").string(), TargetColumn::by_name("t"), true);
        CHECK(ds.case_count() == 3);
        CHECK(ds.feature_count() == 2);
        CHECK(ds.targets == std::vector<double>{3, 6, 9});
        CHECK(ds.features[1] == std::vector<double>{4, 5});
    }
    SUBCASE("target by index, no header") {
        write_file(tmp.path / "b.csv", "1,2,3\n4,5,6\n");
        const auto ds = load_csv((tmp.path / "b.csv").string(), TargetColumn::by_index(0), false);
        CHECK(ds.targets == std::vector<double>{1, 4});
        CHECK(ds.features[0] == std::vector<double>{2, 3});
    }
    SUBCASE("default target is the last column") {
        write_file(tmp.path / "c.csv", "1,2\n3,4\n");
        const auto ds = load_csv((tmp.path / "c.csv").string(), {}, false);
        CHECK(ds.targets == std::vector<double>{2, 4});
    }
    SUBCASE("NaN cell rejected with location") {
        write_file(tmp.path / "d.csv", "1,2\n3,NaN\n");
        try {
            load_csv((tmp.path / "d.csv").string(), {}, false);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("row 2") != std::string::npos);
            CHECK(msg.find("column 2") != std::string::npos);
        }
    }
    SUBCASE("unparseable cell rejected") {
        write_file(tmp.path / "e.csv", "1,2\nx,4\n");
        CHECK_THROWS_AS(load_csv((tmp.path / "e.csv").string(), {}, false), DataError);
    }
    SUBCASE("empty file rejected") {
        write_file(tmp.path / "f.csv", "");
        CHECK_THROWS_AS(load_csv((tmp.path / "f.csv").string(), {}, false), DataError);
    }
    SUBCASE("ragged row rejected") {
        write_file(tmp.path / "g.csv", "1,2\n3\n");
        CHECK_THROWS_AS(load_csv((tmp.path / "g.csv").string(), {}, false), DataError);
    }
    SUBCASE("missing file rejected") {
        CHECK_THROWS_AS(load_csv((tmp.path / "nope.csv").string(), {}, false), DataError);
    }
}

TEST_CASE("airfoil-shaped file loads with the expected shape") {
    TempDir tmp;
    Rng rng(1);
    std::string text = "f0,f1,f2,f3,f4,target\n";
    for (int i = 0; i < 1503; ++i) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%g,%g,%g,%g,%g,%g\n", rng.uniform01(), rng.uniform01(),
                      rng.uniform01(), rng.uniform01(), rng.uniform01(), rng.uniform01());
        text += buf;
    }
    write_file(tmp.path / "airfoil.csv", text);
    const auto ds =
        load_csv((tmp.path / "airfoil.csv").string(), TargetColumn::by_name("target"), true);
    CHECK(ds.case_count() == 1503);
    CHECK(ds.feature_count() == 5);
}

TEST_CASE("normalization: z-scores from training statistics") {
    Dataset train;
    train.features = {{1.0}, {2.0}, {3.0}};
    train.targets = {10.0, 20.0, 30.0};
    Dataset other;
    other.features = {{2.0}, {4.0}};
    other.targets = {1.0, 2.0};

    const auto targets_before = train.targets;
    normalize_features(train, {&other});

    CHECK(train.features[0][0] == doctest::Approx(-1.2247).epsilon(1e-4));
    CHECK(train.features[1][0] == doctest::Approx(0.0));
    CHECK(train.features[2][0] == doctest::Approx(1.2247).epsilon(1e-4));
    // Others use the train statistics: (4 - 2) / 0.8165 = 2.4495
    CHECK(other.features[1][0] == doctest::Approx(2.4495).epsilon(1e-4));
    CHECK(train.targets == targets_before);  // bit-identical
    CHECK(other.targets == std::vector<double>{1.0, 2.0});
}

TEST_CASE("normalization: constant columns map to zeros") {
    Dataset train;
    train.features = {{5.0, 1.0}, {5.0, 2.0}, {5.0, 3.0}};
    train.targets = {0, 0, 0};
    normalize_features(train, {});
    for (const auto& row : train.features) CHECK(row[0] == 0.0);
}

TEST_CASE("normalized training columns have mean 0 and variance 1") {
    Rng rng(17);
    for (int iter = 0; iter < 20; ++iter) {
        const std::size_t n = 5 + rng.uniform_index(200);
        const std::size_t d = 1 + rng.uniform_index(6);
        Dataset ds;
        ds.features.assign(n, std::vector<double>(d));
        ds.targets.assign(n, 0.0);
        for (auto& row : ds.features)
            for (auto& x : row) x = rng.uniform(-50, 50);
        normalize_features(ds, {});
        for (std::size_t c = 0; c < d; ++c) {
            double mean = 0.0;
            for (const auto& row : ds.features) mean += row[c];
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (const auto& row : ds.features) var += (row[c] - mean) * (row[c] - mean);
            var /= static_cast<double>(n);
            CHECK(std::abs(mean) < 1e-9);
            CHECK(std::abs(var - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("fold assignment balance") {
    SUBCASE("exact division") {
        const auto split = make_folds(10, 5, 1);
        std::vector<int> sizes(5, 0);
        for (int f : split.fold_assignments) ++sizes[f];
        for (int s : sizes) CHECK(s == 2);
    }
    SUBCASE("remainder spread +-1") {
        const auto split = make_folds(11, 5, 1);
        std::vector<int> sizes(5, 0);
        for (int f : split.fold_assignments) ++sizes[f];
        std::sort(sizes.begin(), sizes.end());
        CHECK(sizes == std::vector<int>{2, 2, 2, 2, 3});
    }
}

TEST_CASE("fold views partition the dataset") {
    Rng rng(23);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t n = 5 + rng.uniform_index(300);
        const std::uint64_t seed = rng.next_u64();
        const Dataset ds = synthetic_dataset("linear2", n, seed);
        const auto split = make_folds(n, 5, seed);

        std::size_t total_test = 0;
        for (int f = 0; f < 5; ++f) {
            auto [train, test] = fold_view(ds, split, f);
            CHECK(train.case_count() + test.case_count() == n);
            total_test += test.case_count();
            // Disjointness: every test target must come from cases assigned
            // to this fold, all others to train.
            std::size_t ti = 0, ri = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (split.fold_assignments[i] == f) {
                    CHECK(test.targets[ti] == ds.targets[i]);
                    ++ti;
                } else {
                    CHECK(train.targets[ri] == ds.targets[i]);
                    ++ri;
                }
            }
        }
        CHECK(total_test == n);  // exhaustive across folds
    }
}

TEST_CASE("synthetic datasets are deterministic and match their formula") {
    const Dataset a = synthetic_dataset("poly2", 100, 42);
    const Dataset b = synthetic_dataset("poly2", 100, 42);
    CHECK(a.features == b.features);
    CHECK(a.targets == b.targets);
    for (std::size_t i = 0; i < a.case_count(); ++i)
        CHECK(a.targets[i] == a.features[i][0] * a.features[i][0] + a.features[i][1]);
    CHECK_THROWS_AS(synthetic_dataset("nope", 10, 1), DataError);
}

TEST_CASE("the generating tree reaches MAE zero on its own dataset") {
    // poly2: x0*x0 + x1 is a depth-2 tree.
    const ExprTree truth = ExprNode::make_op(
        OpKind::Add, {ExprNode::make_op(OpKind::Mul, {ExprNode::variable(0), ExprNode::variable(0)}),
                      ExprNode::variable(1)});
    CHECK(tree_depth(truth) <= 7);
    const Dataset ds = synthetic_dataset("poly2", 500, 7);
    CHECK(evaluate(truth, ds.features, ds.targets).mae == 0.0);

    // trig1: sin(x0) + cos(x1).
    const ExprTree trig = ExprNode::make_op(
        OpKind::Add, {ExprNode::make_op(OpKind::Sin, {ExprNode::variable(0)}),
                      ExprNode::make_op(OpKind::Cos, {ExprNode::variable(1)})});
    const Dataset ds2 = synthetic_dataset("trig1", 200, 8);
    CHECK(evaluate(trig, ds2.features, ds2.targets).mae == 0.0);
}

TEST_CASE("csv round trip preserves values") {
    TempDir tmp;
    const Dataset ds = synthetic_dataset("trig1", 50, 3);
    const auto p = (tmp.path / "round.csv").string();
    write_csv(p, ds);
    const Dataset back = load_csv(p, TargetColumn::by_name("target"), true);
    CHECK(back.features == ds.features);
    CHECK(back.targets == ds.targets);
}

TEST_CASE("registry validation") {
    TempDir tmp;
    const Dataset ds = synthetic_dataset("poly2", 60, 5);
    write_csv((tmp.path / "poly.csv").string(), ds);
    write_file(tmp.path / "registry.json", R"({
      "poly": {"path": "poly.csv", "target_column": "target",
               "expected_rows": 60, "expected_features": 2},
      "wrong": {"path": "poly.csv", "target_column": "target",
                "expected_rows": 61, "expected_features": 2},
      "absent": {"path": "missing.csv", "target_column": "target",
                 "expected_rows": 10, "expected_features": 1}
    })");
    const auto entries = load_registry((tmp.path / "registry.json").string());
    REQUIRE(entries.size() == 3);
    for (const auto& e : entries) {
        const auto r = validate_registry_entry(e, tmp.path.string());
        if (e.name == "poly") {
            CHECK(r.present);
            CHECK(r.ok);
        } else if (e.name == "wrong") {
            CHECK(r.present);
            CHECK(!r.ok);
            CHECK(r.detail.find("row count") != std::string::npos);
        } else {
            CHECK(!r.present);
        }
    }
}
