#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sr {

// Thrown on unreadable/odd input files; the CLI maps it to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Dataset {
    std::vector<std::vector<double>> features;  // case-major, N_cases x D
    std::vector<double> targets;
    std::string name;

    std::size_t case_count() const { return features.size(); }
    std::size_t feature_count() const { return features.empty() ? 0 : features[0].size(); }
};

// Target column by 0-based index or by header name.
struct TargetColumn {
    std::optional<std::size_t> index;
    std::optional<std::string> name;

    static TargetColumn by_index(std::size_t i) { return {i, std::nullopt}; }
    static TargetColumn by_name(std::string n) { return {std::nullopt, std::move(n)}; }
};

// Comma-separated file of finite decimal reals, optional single header
// row. Every parse failure reports the 1-based row and column.
Dataset load_csv(const std::string& path, const TargetColumn& target, bool has_header);

// Inverse of load_csv for round-tripping; writes a header then full
// precision values, target as the last column.
void write_csv(const std::string& path, const Dataset& ds);

// Z-scores every feature column using statistics of `train` only
// (population standard deviation); zero-variance columns map to zeros.
// Targets are untouched.
void normalize_features(Dataset& train, std::vector<Dataset*> others);

struct FoldSplit {
    std::vector<int> fold_assignments;  // in [0, n_folds)
    int n_folds = 5;
    std::uint64_t seed = 0;
};

// Uniform random assignment balanced to +-1 across folds.
FoldSplit make_folds(std::size_t n_cases, int n_folds, std::uint64_t seed);

// Held-out fold as test, remainder as train, in original case order.
std::pair<Dataset, Dataset> fold_view(const Dataset& ds, const FoldSplit& split, int fold_index);

// Closed-form generators for desk-scale experiments. Deterministic per
// (name, n_cases, seed). Registered names, inputs uniform in [-3, 3):
//   poly2    target = x0*x0 + x1            (2 features)
//   trig1    target = sin(x0) + cos(x1)     (2 features)
//   linear2  target = 0.75*x0 - 0.5*x1      (2 features)
std::vector<std::string> synthetic_names();
Dataset synthetic_dataset(const std::string& name, std::size_t n_cases, std::uint64_t seed);

// Registry of named datasets: JSON mapping name -> {path, target_column,
// expected_rows, expected_features}. Paths resolve against root_dir when
// relative.
struct RegistryEntry {
    std::string name;
    std::string path;
    std::string target_column;
    std::size_t expected_rows = 0;
    std::size_t expected_features = 0;
};

std::vector<RegistryEntry> load_registry(const std::string& path);

struct ValidationResult {
    std::string name;
    bool present = false;
    bool ok = false;
    std::string detail;
};

ValidationResult validate_registry_entry(const RegistryEntry& entry, const std::string& root_dir);

}  // namespace sr
