#include "sr/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

namespace fs = std::filesystem;

namespace sr {

namespace {

nlohmann::json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config parse error in '" + path + "': " + e.what());
    }
    return j;
}

std::string registry_default(const std::string& explicit_path, const std::string& data_root) {
    if (!explicit_path.empty()) return explicit_path;
    if (!data_root.empty()) {
        const fs::path p = fs::path(data_root) / "registry.json";
        if (fs::exists(p)) return p.string();
    }
    if (fs::exists("data/registry.json")) return "data/registry.json";
    return "";
}

void write_record_files(const fs::path& dir, const RunRecord& record) {
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "record.json");
        out << record.to_json() << "\n";
    }
    {
        std::ofstream out(dir / "record.csv");
        out << record.to_csv();
    }
}

}  // namespace

std::vector<std::string> CampaignConfig::expand_config_ids() const {
    std::vector<std::string> ids;
    std::set<std::string> seen;
    auto push = [&](const std::string& id) {
        if (seen.insert(id).second) ids.push_back(id);
    };
    for (const auto& s : selectors) push(selector_id(parse_selector(s)));
    if (tournament_grid)
        for (std::size_t ts : tourn_sizes) push("Tourn/" + std::to_string(ts));
    for (bool sh : shuffle)
        for (std::size_t bs : batch_sizes)
            for (std::size_t ts : tourn_sizes)
                push((sh ? "BTSS/" : "BTS/") + std::to_string(bs) + "/" + std::to_string(ts));
    return ids;
}

CampaignConfig load_campaign_config(const std::string& path) {
    const nlohmann::json j = parse_json_file(path);
    CampaignConfig c;
    c.datasets = j.value("datasets", c.datasets);
    c.selectors = j.value("selectors", c.selectors);
    c.batch_sizes = j.value("batch_sizes", c.batch_sizes);
    c.tourn_sizes = j.value("tourn_sizes", c.tourn_sizes);
    if (j.contains("shuffle")) c.shuffle = j.at("shuffle").get<std::vector<bool>>();
    c.tournament_grid = j.value("tournament_grid", c.tournament_grid);
    c.runs = j.value("runs", c.runs);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.population = j.value("population", c.population);
    c.generations = j.value("generations", c.generations);
    c.variation.crossover_rate = j.value("crossover_rate", c.variation.crossover_rate);
    c.variation.mutation_rate = j.value("mutation_rate", c.variation.mutation_rate);
    c.variation.max_initial_depth = j.value("max_initial_depth", c.variation.max_initial_depth);
    c.variation.max_depth = j.value("max_depth", c.variation.max_depth);
    c.variation.elite_count = j.value("elite", c.variation.elite_count);
    c.n_folds = j.value("folds", c.n_folds);
    c.fold_index = j.value("fold_index", c.fold_index);
    c.normalize = j.value("normalize", c.normalize);
    c.data_seed = j.value("data_seed", c.master_seed);
    c.target_column = j.value("target_column", c.target_column);
    c.csv_header = j.value("csv_header", c.csv_header);
    return c;
}

std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& dataset,
                        const std::string& config_id, std::size_t run_index) {
    return mix_seed(master_seed,
                    fnv1a64(dataset + "|" + config_id + "|run_" + std::to_string(run_index)));
}

std::pair<Dataset, Dataset> prepare_dataset(const CampaignConfig& cfg, const std::string& spec,
                                            const std::string& registry_path,
                                            const std::string& data_root) {
    Dataset full;
    const auto at = spec.find('@');
    const bool is_csv = spec.size() > 4 && spec.substr(spec.size() - 4) == ".csv";
    if (!is_csv && at != std::string::npos) {
        const std::string name = spec.substr(0, at);
        const std::size_t n = std::stoul(spec.substr(at + 1));
        full = synthetic_dataset(name, n, cfg.data_seed);
    } else if (is_csv) {
        const TargetColumn target = cfg.target_column.empty()
                                        ? TargetColumn{}
                                        : TargetColumn::by_name(cfg.target_column);
        fs::path p(spec);
        if (p.is_relative() && !data_root.empty() && !fs::exists(p))
            p = fs::path(data_root) / p;
        full = load_csv(p.string(), target, cfg.csv_header);
    } else {
        const std::string reg = registry_default(registry_path, data_root);
        if (reg.empty())
            throw DataError("dataset '" + spec + "' is not synthetic and no registry was found");
        const auto entries = load_registry(reg);
        const auto it = std::find_if(entries.begin(), entries.end(),
                                     [&](const RegistryEntry& e) { return e.name == spec; });
        if (it == entries.end())
            throw DataError("dataset '" + spec + "' not present in registry '" + reg + "'");
        fs::path p(it->path);
        if (p.is_relative() && !data_root.empty()) p = fs::path(data_root) / p;
        full = load_csv(p.string(), TargetColumn::by_name(it->target_column), true);
    }
    full.name = spec;

    const FoldSplit split = make_folds(full.case_count(), cfg.n_folds, cfg.data_seed);
    auto [train, test] = fold_view(full, split, cfg.fold_index);
    if (cfg.normalize) normalize_features(train, {&test});
    return {std::move(train), std::move(test)};
}

int cmd_run(const std::string& config_path, const std::string& dataset_spec,
            std::uint64_t seed, const std::string& out_dir, const std::string& registry_path,
            const std::string& data_root) {
    CampaignConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_campaign_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        auto [train, test] = prepare_dataset(cfg, dataset_spec, registry_path, data_root);

        EngineConfig engine;
        engine.population_size = cfg.population;
        engine.generations = cfg.generations;
        engine.variation = cfg.variation;
        engine.selector = parse_selector(cfg.selectors.empty() ? "Ae-Lex" : cfg.selectors[0]);
        engine.seed = seed;
        engine.validate();

        const RunRecord record = run(engine, train, test);
        write_record_files(out_dir.empty() ? fs::path(".") : fs::path(out_dir), record);

        const auto& last = record.per_generation.back();
        std::printf("%s on %s: best train MAE %.6g, test MAE %.6g (%.2fs)\n",
                    record.config_id.c_str(), dataset_spec.c_str(), last.best_train_mae,
                    last.best_test_mae, record.total_seconds);
        return 0;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_grid(const std::string& config_path, const std::string& out_dir, int jobs,
             const std::string& registry_path, const std::string& data_root) {
    CampaignConfig cfg;
    try {
        cfg = load_campaign_config(config_path);
        if (cfg.datasets.empty())
            throw std::invalid_argument("campaign config lists no datasets");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    struct Cell {
        std::string dataset;
        std::string config_id;
        std::size_t run_index;
    };
    std::vector<Cell> todo;
    const auto config_ids = cfg.expand_config_ids();
    for (const auto& ds : cfg.datasets)
        for (const auto& id : config_ids)
            for (std::size_t r = 0; r < cfg.runs; ++r) todo.push_back({ds, id, r});

    const fs::path root(out_dir);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::atomic<bool> failed{false};
    std::mutex io_mutex;
    std::mutex data_mutex;
    std::map<std::string, std::pair<Dataset, Dataset>> data_cache;

    auto worker = [&]() {
        while (!failed) {
            const std::size_t i = next.fetch_add(1);
            if (i >= todo.size()) return;
            const Cell& cell = todo[i];
            const fs::path dir =
                root / cell.dataset / sanitize_config_id(cell.config_id) /
                ("run_" + std::to_string(cell.run_index));
            if (fs::exists(dir / "record.json")) {
                ++done;
                continue;  // resumable: completed cells are skipped
            }
            try {
                const std::pair<Dataset, Dataset>* data = nullptr;
                {
                    std::lock_guard<std::mutex> lock(data_mutex);
                    auto it = data_cache.find(cell.dataset);
                    if (it == data_cache.end())
                        it = data_cache
                                 .emplace(cell.dataset, prepare_dataset(cfg, cell.dataset,
                                                                        registry_path, data_root))
                                 .first;
                    data = &it->second;
                }
                EngineConfig engine;
                engine.population_size = cfg.population;
                engine.generations = cfg.generations;
                engine.variation = cfg.variation;
                engine.selector = parse_selector(cell.config_id);
                engine.seed = cell_seed(cfg.master_seed, cell.dataset, cell.config_id,
                                        cell.run_index);
                const RunRecord record = run(engine, data->first, data->second);
                write_record_files(dir, record);
                const std::size_t d = ++done;
                std::lock_guard<std::mutex> lock(io_mutex);
                std::fprintf(stderr, "[%zu/%zu] %s %s run %zu (%.2fs)\n", d, todo.size(),
                             cell.dataset.c_str(), cell.config_id.c_str(), cell.run_index,
                             record.total_seconds);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cerr << "cell " << cell.dataset << "/" << cell.config_id << "/run_"
                          << cell.run_index << " failed: " << e.what() << "\n";
                failed = true;
            }
        }
    };

    const int n_threads = std::max(1, jobs);
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return failed ? 2 : 0;
}

std::vector<ConfigResult> collect_config_results(const std::string& campaign_dir,
                                                 const std::string& dataset) {
    std::vector<ConfigResult> results;
    const fs::path ds_dir = fs::path(campaign_dir) / dataset;
    if (!fs::exists(ds_dir)) return results;
    for (const auto& entry : fs::directory_iterator(ds_dir)) {
        if (!entry.is_directory()) continue;
        ConfigResult cr;
        std::vector<std::vector<double>> curves;
        for (const auto& run_dir : fs::directory_iterator(entry.path())) {
            const fs::path rec_path = run_dir.path() / "record.json";
            if (!fs::exists(rec_path)) {
                std::cerr << "warning: missing record " << rec_path.string() << ", skipping\n";
                continue;
            }
            std::ifstream in(rec_path);
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            const RunRecord rec = RunRecord::from_json(text);
            cr.config_id = rec.config_id;
            cr.per_run_final_train_mae.push_back(rec.per_generation.back().best_train_mae);
            cr.per_run_final_test_mae.push_back(rec.per_generation.back().best_test_mae);
            cr.per_run_total_seconds.push_back(rec.total_seconds);
            std::vector<double> curve;
            curve.reserve(rec.per_generation.size());
            for (const auto& g : rec.per_generation) curve.push_back(g.best_test_mae);
            curves.push_back(std::move(curve));
        }
        if (cr.per_run_final_test_mae.empty()) {
            std::cerr << "warning: no complete runs under " << entry.path().string() << "\n";
            continue;
        }
        std::size_t min_len = curves[0].size();
        for (const auto& c : curves) min_len = std::min(min_len, c.size());
        for (std::size_t g = 0; g < min_len; ++g) {
            std::vector<double> column;
            column.reserve(curves.size());
            for (const auto& c : curves) column.push_back(c[g]);
            cr.per_generation_median_curve.push_back(mmae(std::move(column)));
        }
        results.push_back(std::move(cr));
    }
    std::sort(results.begin(), results.end(),
              [](const ConfigResult& a, const ConfigResult& b) { return a.config_id < b.config_id; });
    return results;
}

int cmd_report(const std::string& campaign_dir, const std::string& baseline_id) {
    if (!fs::exists(campaign_dir)) {
        std::cerr << "error: campaign directory '" << campaign_dir << "' not found\n";
        return 1;
    }
    bool wrote_any = false;
    for (const auto& ds_entry : fs::directory_iterator(campaign_dir)) {
        if (!ds_entry.is_directory() || ds_entry.path().filename() == "report") continue;
        const std::string dataset = ds_entry.path().filename().string();
        auto results = collect_config_results(campaign_dir, dataset);
        if (results.empty()) continue;

        const auto base_it =
            std::find_if(results.begin(), results.end(),
                         [&](const ConfigResult& c) { return c.config_id == baseline_id; });
        if (base_it == results.end()) {
            std::cerr << "warning: baseline '" << baseline_id << "' has no runs for dataset '"
                      << dataset << "', skipping\n";
            continue;
        }
        const ConfigResult baseline = *base_it;

        // Top five non-baseline configs by train MMAE, as compared set.
        std::vector<ConfigResult> candidates;
        for (const auto& c : results)
            if (c.config_id != baseline_id) candidates.push_back(c);
        const auto top_ids = top_k_configs(candidates, 5);
        std::vector<ConfigResult> compared;
        for (const auto& id : top_ids) {
            const auto it = std::find_if(candidates.begin(), candidates.end(),
                                         [&](const ConfigResult& c) { return c.config_id == id; });
            compared.push_back(*it);
        }

        const ComparisonTable table = build_comparison_table(baseline, compared);
        const fs::path out = fs::path(campaign_dir) / "report" / dataset;
        fs::create_directories(out);
        write_comparison_csv((out / "comparison.csv").string(), table);
        std::vector<ConfigResult> all_emitted = compared;
        all_emitted.push_back(baseline);
        write_curves((out / "curves").string(), all_emitted);
        write_boxplot_data((out / "boxplot_data.csv").string(), all_emitted);
        write_report_json((out / "report.json").string(), table, all_emitted);
        std::printf("report for %s: %zu configs compared against %s -> %s\n", dataset.c_str(),
                    compared.size(), baseline_id.c_str(), out.string().c_str());
        wrote_any = true;
    }
    if (!wrote_any) {
        std::cerr << "error: no reportable data under '" << campaign_dir << "'\n";
        return 1;
    }
    return 0;
}

std::vector<SelBenchRow> selbench(std::size_t n, std::size_t cases, std::size_t k,
                                  const std::vector<std::string>& selector_specs,
                                  std::size_t reps, std::uint64_t seed) {
    Rng data_rng(seed);
    ErrorMatrix em(n, cases);
    std::vector<double> row(cases);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : row) v = data_rng.uniform01();
        em.set_row(i, row);
    }

    std::vector<SelBenchRow> out;
    for (const auto& spec_str : selector_specs) {
        const SelectorSpec spec = parse_selector(spec_str);
        auto invoke = [&](Rng& rng) {
            if (const auto* t = std::get_if<TournamentSelector>(&spec))
                return select_tournament(em, t->tourn_size, k, rng);
            if (std::holds_alternative<LexicaseSelector>(spec))
                return select_lexicase(em, k, rng);
            if (std::holds_alternative<AutoEpsilonLexicaseSelector>(spec))
                return select_epsilon_lexicase(em, compute_auto_epsilon(em), k, rng);
            const auto& b = std::get<BatchTournamentSelector>(spec);
            return select_batch_tournament(em, {b.batch_size, b.tourn_size, b.shuffle, k}, rng);
        };

        {
            Rng warm(mix_seed(seed, 0xabcd));
            volatile std::size_t sink = invoke(warm).size();
            (void)sink;
        }
        std::vector<double> times;
        times.reserve(reps);
        for (std::size_t r = 0; r < reps; ++r) {
            Rng rng(mix_seed(seed, r + 1));
            const auto t0 = std::chrono::steady_clock::now();
            const auto picked = invoke(rng);
            const auto t1 = std::chrono::steady_clock::now();
            if (picked.size() != k) throw std::logic_error("selbench: wrong selection count");
            times.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
        out.push_back({selector_id(spec), n, cases, k, reps, mmae(std::move(times))});
    }
    return out;
}

int cmd_selbench(std::size_t n, std::size_t cases, std::size_t k,
                 const std::vector<std::string>& selector_specs, std::size_t reps,
                 std::uint64_t seed, const std::string& out_path) {
    try {
        const auto rows = selbench(n, cases, k, selector_specs, reps, seed);
        std::ostream* out = &std::cout;
        std::ofstream file;
        if (!out_path.empty()) {
            file.open(out_path);
            out = &file;
        }
        *out << "selector,n,cases,k,reps,median_seconds\n";
        char buf[64];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof(buf), ",%zu,%zu,%zu,%zu,%.9g\n", r.n, r.cases, r.k, r.reps,
                          r.median_seconds);
            *out << r.selector << buf;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_validate_data(const std::string& registry_path, const std::string& data_root) {
    try {
        const std::string reg = registry_default(registry_path, data_root);
        if (reg.empty()) {
            std::cerr << "error: no registry file found\n";
            return 1;
        }
        const auto entries = load_registry(reg);
        bool any_bad = false;
        for (const auto& e : entries) {
            const auto r = validate_registry_entry(e, data_root);
            const char* status = r.ok ? "ok" : (r.present ? "MISMATCH" : "missing");
            std::printf("%-14s %-9s %s\n", r.name.c_str(), status, r.detail.c_str());
            if (r.present && !r.ok) any_bad = true;
        }
        return any_bad ? 2 : 0;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace sr
