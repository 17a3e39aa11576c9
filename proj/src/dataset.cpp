#include "sr/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sr/exprtree.hpp"
#include "sr/rng.hpp"

namespace sr {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
    const std::string s = trim(raw);
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw DataError("cannot parse cell at row " + std::to_string(row) + ", column " +
                        std::to_string(col) + ": '" + s + "'");
    if (!std::isfinite(v))
        throw DataError("non-finite value at row " + std::to_string(row) + ", column " +
                        std::to_string(col));
    return v;
}

}  // namespace

Dataset load_csv(const std::string& path, const TargetColumn& target, bool has_header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::string line;
    std::size_t row = 0;
    std::size_t n_cols = 0;
    std::optional<std::size_t> target_idx = target.index;

    if (has_header) {
        if (!std::getline(in, line)) throw DataError("empty file: '" + path + "'");
        ++row;
        const auto header = split_csv_line(line);
        n_cols = header.size();
        if (target.name) {
            for (std::size_t i = 0; i < header.size(); ++i)
                if (trim(header[i]) == *target.name) target_idx = i;
            if (!target_idx)
                throw DataError("target column '" + *target.name + "' not found in header");
        }
    } else if (target.name) {
        throw DataError("target column by name requires a header row");
    }

    Dataset ds;
    ds.name = std::filesystem::path(path).stem().string();
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (n_cols == 0) n_cols = cells.size();
        if (cells.size() != n_cols)
            throw DataError("row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(n_cols));
        if (!target_idx) target_idx = n_cols - 1;
        if (*target_idx >= n_cols)
            throw DataError("target column index " + std::to_string(*target_idx) +
                            " out of range (" + std::to_string(n_cols) + " columns)");
        std::vector<double> feats;
        feats.reserve(n_cols - 1);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const double v = parse_cell(cells[c], row, c + 1);
            if (c == *target_idx)
                ds.targets.push_back(v);
            else
                feats.push_back(v);
        }
        ds.features.push_back(std::move(feats));
    }
    if (ds.features.empty()) throw DataError("no data rows in '" + path + "'");
    return ds;
}

void write_csv(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    const std::size_t d = ds.feature_count();
    for (std::size_t c = 0; c < d; ++c) out << "x" << c << ",";
    out << "target\n";
    char buf[40];
    for (std::size_t i = 0; i < ds.case_count(); ++i) {
        for (std::size_t c = 0; c < d; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", ds.features[i][c]);
            out << buf << ",";
        }
        std::snprintf(buf, sizeof(buf), "%.17g", ds.targets[i]);
        out << buf << "\n";
    }
}

void normalize_features(Dataset& train, std::vector<Dataset*> others) {
    const std::size_t d = train.feature_count();
    const std::size_t n = train.case_count();
    std::vector<double> mean(d, 0.0);
    std::vector<double> std_dev(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += train.features[i][c];
        mean[c] = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dv = train.features[i][c] - mean[c];
            ss += dv * dv;
        }
        std_dev[c] = std::sqrt(ss / static_cast<double>(n));  // population std
    }
    auto apply = [&](Dataset& ds) {
        for (auto& row : ds.features)
            for (std::size_t c = 0; c < d; ++c)
                row[c] = std_dev[c] == 0.0 ? 0.0 : (row[c] - mean[c]) / std_dev[c];
    };
    apply(train);
    for (Dataset* o : others) apply(*o);
}

FoldSplit make_folds(std::size_t n_cases, int n_folds, std::uint64_t seed) {
    if (n_folds < 1 || static_cast<std::size_t>(n_folds) > n_cases)
        throw std::invalid_argument("make_folds: need 1 <= n_folds <= n_cases");
    Rng rng(seed);
    const auto perm = rng.permutation(n_cases);
    FoldSplit split;
    split.n_folds = n_folds;
    split.seed = seed;
    split.fold_assignments.resize(n_cases);
    for (std::size_t pos = 0; pos < n_cases; ++pos)
        split.fold_assignments[perm[pos]] = static_cast<int>(pos % static_cast<std::size_t>(n_folds));
    return split;
}

std::pair<Dataset, Dataset> fold_view(const Dataset& ds, const FoldSplit& split, int fold_index) {
    if (split.fold_assignments.size() != ds.case_count())
        throw std::invalid_argument("fold_view: split does not match dataset");
    Dataset train;
    Dataset test;
    train.name = ds.name + "/train";
    test.name = ds.name + "/test";
    for (std::size_t i = 0; i < ds.case_count(); ++i) {
        Dataset& dst = split.fold_assignments[i] == fold_index ? test : train;
        dst.features.push_back(ds.features[i]);
        dst.targets.push_back(ds.targets[i]);
    }
    return {std::move(train), std::move(test)};
}

std::vector<std::string> synthetic_names() { return {"poly2", "trig1", "linear2"}; }

Dataset synthetic_dataset(const std::string& name, std::size_t n_cases, std::uint64_t seed) {
    Dataset ds;
    ds.name = name;
    Rng rng(seed);
    auto gen_case = [&](auto&& target_fn, std::size_t n_features) {
        for (std::size_t i = 0; i < n_cases; ++i) {
            std::vector<double> row(n_features);
            for (auto& x : row) x = rng.uniform(-3.0, 3.0);
            ds.targets.push_back(target_fn(row));
            ds.features.push_back(std::move(row));
        }
    };
    if (name == "poly2") {
        gen_case([](const std::vector<double>& x) { return x[0] * x[0] + x[1]; }, 2);
    } else if (name == "trig1") {
        gen_case([](const std::vector<double>& x) { return std::sin(x[0]) + std::cos(x[1]); }, 2);
    } else if (name == "linear2") {
        gen_case([](const std::vector<double>& x) { return 0.75 * x[0] - 0.5 * x[1]; }, 2);
    } else {
        throw DataError("unknown synthetic dataset '" + name + "'");
    }
    return ds;
}

std::vector<RegistryEntry> load_registry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open registry '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError("registry parse error: " + std::string(e.what()));
    }
    std::vector<RegistryEntry> entries;
    for (auto& [name, spec] : j.items()) {
        RegistryEntry e;
        e.name = name;
        e.path = spec.at("path").get<std::string>();
        e.target_column = spec.value("target_column", std::string("target"));
        e.expected_rows = spec.value("expected_rows", 0u);
        e.expected_features = spec.value("expected_features", 0u);
        entries.push_back(std::move(e));
    }
    return entries;
}

ValidationResult validate_registry_entry(const RegistryEntry& entry, const std::string& root_dir) {
    ValidationResult r;
    r.name = entry.name;
    std::filesystem::path p(entry.path);
    if (p.is_relative() && !root_dir.empty()) p = std::filesystem::path(root_dir) / p;
    if (!std::filesystem::exists(p)) {
        r.detail = "file not found: " + p.string();
        return r;
    }
    r.present = true;
    try {
        const Dataset ds = load_csv(p.string(), TargetColumn::by_name(entry.target_column), true);
        if (entry.expected_rows && ds.case_count() != entry.expected_rows) {
            r.detail = "row count " + std::to_string(ds.case_count()) + ", expected " +
                       std::to_string(entry.expected_rows);
        } else if (entry.expected_features && ds.feature_count() != entry.expected_features) {
            r.detail = "feature count " + std::to_string(ds.feature_count()) + ", expected " +
                       std::to_string(entry.expected_features);
        } else {
            r.ok = true;
            r.detail = std::to_string(ds.case_count()) + " cases, " +
                       std::to_string(ds.feature_count()) + " features";
        }
    } catch (const std::exception& e) {
        r.detail = e.what();
    }
    return r;
}

}  // namespace sr
