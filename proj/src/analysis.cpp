#include "sr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace sr {

double mmae(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("mmae: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::vector<std::string> top_k_configs(const std::vector<ConfigResult>& all, std::size_t k) {
    std::vector<std::pair<double, std::string>> keyed;
    keyed.reserve(all.size());
    for (const auto& c : all) keyed.emplace_back(mmae(c.per_run_final_train_mae), c.config_id);
    std::sort(keyed.begin(), keyed.end());
    if (k > keyed.size()) k = keyed.size();
    std::vector<std::string> ids;
    ids.reserve(k);
    for (std::size_t i = 0; i < k; ++i) ids.push_back(keyed[i].second);
    return ids;
}

double speedup(const ConfigResult& baseline, const ConfigResult& other) {
    return mmae(baseline.per_run_total_seconds) / mmae(other.per_run_total_seconds);
}

namespace {

struct RankedSamples {
    std::vector<double> ranks_a;  // average ranks of sample a
    std::size_t n = 0, m = 0;
    bool has_ties = false;
    double tie_term = 0.0;  // sum of (t^3 - t) over tie groups
};

RankedSamples rank(const std::vector<double>& a, const std::vector<double>& b) {
    struct Item {
        double v;
        bool from_a;
    };
    std::vector<Item> items;
    items.reserve(a.size() + b.size());
    for (double v : a) items.push_back({v, true});
    for (double v : b) items.push_back({v, false});
    std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) { return x.v < y.v; });

    RankedSamples r;
    r.n = a.size();
    r.m = b.size();
    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t j = i;
        while (j < items.size() && items[j].v == items[i].v) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        const double t = static_cast<double>(j - i);
        if (j - i > 1) {
            r.has_ties = true;
            r.tie_term += t * t * t - t;
        }
        for (std::size_t p = i; p < j; ++p)
            if (items[p].from_a) r.ranks_a.push_back(avg_rank);
        i = j;
    }
    return r;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Number of n-subsets of ranks {1..total} with each achievable rank sum.
std::vector<std::vector<double>> rank_sum_counts(std::size_t n, std::size_t total) {
    const std::size_t max_sum = total * (total + 1) / 2;
    std::vector<std::vector<double>> dp(n + 1, std::vector<double>(max_sum + 1, 0.0));
    dp[0][0] = 1.0;
    for (std::size_t r = 1; r <= total; ++r)
        for (std::size_t c = std::min(n, r); c >= 1; --c)
            for (std::size_t s = max_sum; s >= r; --s)
                if (dp[c - 1][s - r] > 0) dp[c][s] += dp[c - 1][s - r];
    return dp;
}

double exact_two_sided(double w, std::size_t n, std::size_t total) {
    const auto dp = rank_sum_counts(n, total);
    const auto& dist = dp[n];
    double all = 0.0, le = 0.0, ge = 0.0;
    for (std::size_t s = 0; s < dist.size(); ++s) {
        all += dist[s];
        if (static_cast<double>(s) <= w + 1e-9) le += dist[s];
        if (static_cast<double>(s) >= w - 1e-9) ge += dist[s];
    }
    return std::min(1.0, 2.0 * std::min(le, ge) / all);
}

}  // namespace

double wilcoxon_rank_sum_normal(const std::vector<double>& a, const std::vector<double>& b) {
    const RankedSamples r = rank(a, b);
    const double n = static_cast<double>(r.n);
    const double m = static_cast<double>(r.m);
    const double big_n = n + m;
    double w = 0.0;
    for (double rk : r.ranks_a) w += rk;
    const double mean = n * (big_n + 1.0) / 2.0;
    const double var =
        n * m * (big_n + 1.0) / 12.0 - n * m * r.tie_term / (12.0 * big_n * (big_n - 1.0));
    if (var <= 0.0) return 1.0;
    double z;
    if (w > mean)
        z = (w - mean - 0.5) / std::sqrt(var);
    else if (w < mean)
        z = (w - mean + 0.5) / std::sqrt(var);
    else
        z = 0.0;
    return std::min(1.0, 2.0 * (1.0 - normal_cdf(std::abs(z))));
}

double wilcoxon_rank_sum(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 3 || b.size() < 3)
        throw std::invalid_argument("wilcoxon_rank_sum: need at least 3 values per sample");
    const RankedSamples r = rank(a, b);
    if (!r.has_ties && r.n + r.m <= 12) {
        double w = 0.0;
        for (double rk : r.ranks_a) w += rk;
        return exact_two_sided(w, r.n, r.n + r.m);
    }
    return wilcoxon_rank_sum_normal(a, b);
}

std::vector<double> holm_adjust(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return p_values[x] < p_values[y]; });

    std::vector<double> adjusted(m, 0.0);
    double running = 0.0;
    for (std::size_t rank_pos = 0; rank_pos < m; ++rank_pos) {
        const std::size_t idx = order[rank_pos];
        const double scaled = static_cast<double>(m - rank_pos) * p_values[idx];
        running = std::max(running, std::min(1.0, scaled));
        adjusted[idx] = running;
    }
    return adjusted;
}

ComparisonTable build_comparison_table(const ConfigResult& baseline,
                                       const std::vector<ConfigResult>& others, double alpha) {
    ComparisonTable table;
    table.baseline_id = baseline.config_id;
    const double base_mmae = mmae(baseline.per_run_final_test_mae);

    ComparisonRow base_row;
    base_row.config_id = baseline.config_id;
    base_row.mmae = base_mmae;
    base_row.speedup = 1.0;
    table.rows.push_back(base_row);

    std::vector<double> raw;
    raw.reserve(others.size());
    for (const auto& other : others) {
        // Fewer than 3 runs on either side: no test possible, keep p = 1.
        if (baseline.per_run_final_test_mae.size() < 3 ||
            other.per_run_final_test_mae.size() < 3)
            raw.push_back(1.0);
        else
            raw.push_back(wilcoxon_rank_sum(baseline.per_run_final_test_mae,
                                            other.per_run_final_test_mae));
    }
    const auto adjusted = holm_adjust(raw);

    std::vector<ComparisonRow> rows;
    for (std::size_t i = 0; i < others.size(); ++i) {
        ComparisonRow row;
        row.config_id = others[i].config_id;
        row.mmae = mmae(others[i].per_run_final_test_mae);
        row.speedup = speedup(baseline, others[i]);
        row.p_raw = raw[i];
        row.p_adjusted = adjusted[i];
        if (adjusted[i] < alpha && row.mmae < base_mmae)
            row.mark = SignificanceMark::Minus;
        else if (adjusted[i] < alpha && row.mmae > base_mmae)
            row.mark = SignificanceMark::Plus;
        rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end(), [](const ComparisonRow& x, const ComparisonRow& y) {
        if (x.mmae != y.mmae) return x.mmae < y.mmae;
        return x.config_id < y.config_id;
    });
    for (auto& row : rows) table.rows.push_back(std::move(row));
    return table;
}

std::string sanitize_config_id(const std::string& id) {
    std::string s = id;
    for (char& c : s)
        if (c == '/') c = '-';
    return s;
}

namespace {

const char* mark_str(SignificanceMark m) {
    switch (m) {
        case SignificanceMark::Plus: return "+";
        case SignificanceMark::Minus: return "-";
        default: return "";
    }
}

}  // namespace

void write_comparison_csv(const std::string& path, const ComparisonTable& table) {
    std::ofstream out(path);
    out << "config_id,mmae,speedup,mark\n";
    char buf[128];
    for (const auto& row : table.rows) {
        std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,", row.mmae, row.speedup);
        out << row.config_id << buf << mark_str(row.mark) << "\n";
    }
}

void write_curves(const std::string& dir, const std::vector<ConfigResult>& configs) {
    std::filesystem::create_directories(dir);
    char buf[64];
    for (const auto& c : configs) {
        std::ofstream out(std::filesystem::path(dir) /
                          (sanitize_config_id(c.config_id) + ".csv"));
        out << "gen,median_test_mae\n";
        for (std::size_t g = 0; g < c.per_generation_median_curve.size(); ++g) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", g, c.per_generation_median_curve[g]);
            out << buf;
        }
    }
}

void write_boxplot_data(const std::string& path, const std::vector<ConfigResult>& configs) {
    std::ofstream out(path);
    out << "config_id,run_index,final_test_mae,total_seconds\n";
    char buf[128];
    for (const auto& c : configs) {
        for (std::size_t i = 0; i < c.per_run_final_test_mae.size(); ++i) {
            std::snprintf(buf, sizeof(buf), ",%zu,%.17g,%.17g\n", i, c.per_run_final_test_mae[i],
                          c.per_run_total_seconds[i]);
            out << c.config_id << buf;
        }
    }
}

void write_report_json(const std::string& path, const ComparisonTable& table,
                       const std::vector<ConfigResult>& configs) {
    nlohmann::json j;
    j["baseline"] = table.baseline_id;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        rows.push_back({{"config_id", row.config_id},
                        {"mmae", row.mmae},
                        {"speedup", row.speedup},
                        {"mark", mark_str(row.mark)},
                        {"p_raw", row.p_raw},
                        {"p_adjusted", row.p_adjusted}});
    }
    j["comparison"] = std::move(rows);
    nlohmann::json cfgs = nlohmann::json::object();
    for (const auto& c : configs) {
        cfgs[c.config_id] = {{"final_train_mae", c.per_run_final_train_mae},
                             {"final_test_mae", c.per_run_final_test_mae},
                             {"total_seconds", c.per_run_total_seconds},
                             {"median_test_curve", c.per_generation_median_curve}};
    }
    j["configs"] = std::move(cfgs);
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

}  // namespace sr
