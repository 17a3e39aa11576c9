#pragma once

#include <string>
#include <vector>

namespace sr {

// Aggregated outcomes of one configuration across its runs.
struct ConfigResult {
    std::string config_id;  // "BTS/8/16", "BTSS/4/64", "Tourn/8", "Ae-Lex"
    std::vector<double> per_run_final_train_mae;
    std::vector<double> per_run_final_test_mae;
    std::vector<double> per_run_total_seconds;
    std::vector<double> per_generation_median_curve;  // median test MAE per generation
};

enum class SignificanceMark { None, Plus, Minus };

struct ComparisonRow {
    std::string config_id;
    double mmae = 0.0;  // median of per-run final test MAE
    double speedup = 1.0;
    SignificanceMark mark = SignificanceMark::None;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
};

struct ComparisonTable {
    std::string baseline_id;
    std::vector<ComparisonRow> rows;  // baseline first, then by mmae ascending
};

// Median; even-length lists average the two central values.
double mmae(std::vector<double> values);

// IDs of the k configs with lowest train MMAE, ties lexicographic.
std::vector<std::string> top_k_configs(const std::vector<ConfigResult>& all, std::size_t k);

// median(baseline.total_seconds) / median(other.total_seconds).
double speedup(const ConfigResult& baseline, const ConfigResult& other);

// Two-sided Wilcoxon rank-sum p-value. Exact enumeration when
// |a| + |b| <= 12 and there are no ties, otherwise the normal
// approximation with tie and continuity corrections. Fully degenerate
// input (one common value everywhere) yields p = 1.
double wilcoxon_rank_sum(const std::vector<double>& a, const std::vector<double>& b);

// Normal-approximation path on its own, for calibration against the
// exact enumeration.
double wilcoxon_rank_sum_normal(const std::vector<double>& a, const std::vector<double>& b);

// Holm step-down adjustment: monotone, capped at 1, input order preserved.
std::vector<double> holm_adjust(const std::vector<double>& p_values);

ComparisonTable build_comparison_table(const ConfigResult& baseline,
                                       const std::vector<ConfigResult>& others,
                                       double alpha = 0.05);

// Writers for the report artifacts. Slashes in config ids become '-' in
// file names.
std::string sanitize_config_id(const std::string& id);
void write_comparison_csv(const std::string& path, const ComparisonTable& table);
void write_curves(const std::string& dir, const std::vector<ConfigResult>& configs);
void write_boxplot_data(const std::string& path, const std::vector<ConfigResult>& configs);
void write_report_json(const std::string& path, const ComparisonTable& table,
                       const std::vector<ConfigResult>& configs);

}  // namespace sr
