#include "sr/engine.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sr {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string selector_id(const SelectorSpec& spec) {
    if (const auto* t = std::get_if<TournamentSelector>(&spec))
        return "Tourn/" + std::to_string(t->tourn_size);
    if (std::holds_alternative<LexicaseSelector>(spec)) return "Lex";
    if (std::holds_alternative<AutoEpsilonLexicaseSelector>(spec)) return "Ae-Lex";
    const auto& b = std::get<BatchTournamentSelector>(spec);
    return (b.shuffle ? "BTSS/" : "BTS/") + std::to_string(b.batch_size) + "/" +
           std::to_string(b.tourn_size);
}

SelectorSpec parse_selector(const std::string& id) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : id) {
        if (c == '/') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    const std::string head = lower(parts[0]);

    auto num = [&](std::size_t i) -> std::size_t {
        const long v = std::stol(parts.at(i));
        if (v < 1) throw std::invalid_argument("selector '" + id + "': sizes must be >= 1");
        return static_cast<std::size_t>(v);
    };

    if (head == "tourn" || head == "tournament") return TournamentSelector{num(1)};
    if (head == "lex" || head == "lexicase") return LexicaseSelector{};
    if (head == "ae-lex" || head == "aelex" || head == "auto-epsilon-lexicase")
        return AutoEpsilonLexicaseSelector{};
    if (head == "bts") return BatchTournamentSelector{num(1), num(2), false};
    if (head == "btss") return BatchTournamentSelector{num(1), num(2), true};
    throw std::invalid_argument("unknown selector '" + id + "'");
}

void EngineConfig::validate() const {
    if (population_size == 0) throw std::invalid_argument("population_size must be > 0");
    if (variation.elite_count < 0 ||
        population_size <= static_cast<std::size_t>(variation.elite_count))
        throw std::invalid_argument("population_size must exceed elite_count >= 0");
    if (variation.crossover_rate + variation.mutation_rate > 1.0 + 1e-12)
        throw std::invalid_argument("crossover_rate + mutation_rate must be <= 1");
    if (variation.max_initial_depth < 1 || variation.max_initial_depth > variation.max_depth)
        throw std::invalid_argument("need 0 < max_initial_depth <= max_depth");
}

double diversity(const ErrorMatrix& em) {
    std::set<std::string> classes;
    char buf[40];
    for (std::size_t i = 0; i < em.individuals(); ++i) {
        // %.11e carries 12 significant digits.
        std::snprintf(buf, sizeof(buf), "%.11e", em.row_mae(i));
        classes.insert(buf);
    }
    return static_cast<double>(classes.size()) / static_cast<double>(em.individuals());
}

namespace {

std::vector<std::size_t> run_selector(const SelectorSpec& spec, const ErrorMatrix& em,
                                      std::size_t k, Rng& rng) {
    if (const auto* t = std::get_if<TournamentSelector>(&spec))
        return select_tournament(em, t->tourn_size, k, rng);
    if (std::holds_alternative<LexicaseSelector>(spec)) return select_lexicase(em, k, rng);
    if (std::holds_alternative<AutoEpsilonLexicaseSelector>(spec))
        return select_epsilon_lexicase(em, compute_auto_epsilon(em), k, rng);
    const auto& b = std::get<BatchTournamentSelector>(spec);
    return select_batch_tournament(em, {b.batch_size, b.tourn_size, b.shuffle, k}, rng);
}

// Indices of the `count` lowest-MAE rows, ties toward lower index.
std::vector<std::size_t> best_indices(const ErrorMatrix& em, std::size_t count) {
    std::vector<std::size_t> idx(em.individuals());
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (em.row_mae(a) != em.row_mae(b)) return em.row_mae(a) < em.row_mae(b);
                          return a < b;
                      });
    idx.resize(count);
    return idx;
}

}  // namespace

RunRecord run(const EngineConfig& config, const Dataset& train, const Dataset& test) {
    config.validate();
    if (train.feature_count() != test.feature_count())
        throw std::invalid_argument("train/test feature counts differ");
    const int n_features = static_cast<int>(train.feature_count());
    const std::size_t elite = static_cast<std::size_t>(config.variation.elite_count);
    const std::size_t k = config.population_size - elite;

    const BatchEvaluator train_eval(train.features, train.targets);
    const BatchEvaluator test_eval(test.features, test.targets);

    Rng rng(config.seed);
    std::vector<ExprTree> pop =
        init_population(config.population_size, n_features, config.variation, rng);

    RunRecord record;
    record.config_id = selector_id(config.selector);
    const auto t_start = std::chrono::steady_clock::now();

    for (std::size_t gen = 0;; ++gen) {
        if (pop.size() != config.population_size)
            throw std::logic_error("population size drifted");

        ErrorMatrix em(pop.size(), train_eval.case_count());
        for (std::size_t i = 0; i < pop.size(); ++i)
            em.set_row(i, train_eval.evaluate(pop[i]).case_errors);

        const std::size_t best = best_indices(em, 1)[0];

        GenerationRecord gr;
        gr.gen = gen;
        gr.best_train_mae = em.row_mae(best);
        gr.best_test_mae = test_eval.evaluate(pop[best]).mae;
        gr.diversity = diversity(em);

        if (gen == config.generations) {
            gr.total_wall_time_s = seconds_since(t_start);
            record.per_generation.push_back(gr);
            record.final_best = to_string(pop[best]);
            break;
        }

        const auto t_sel = std::chrono::steady_clock::now();
        const auto parents = run_selector(config.selector, em, k, rng);
        gr.selection_wall_time_s = seconds_since(t_sel);

        std::vector<ExprTree> parent_trees;
        parent_trees.reserve(parents.size());
        for (std::size_t p : parents) parent_trees.push_back(pop[p]);
        auto offspring = make_offspring(parent_trees, n_features, config.variation, rng);

        std::vector<ExprTree> next;
        next.reserve(config.population_size);
        for (std::size_t e : best_indices(em, elite)) next.push_back(pop[e]);
        for (auto& child : offspring) next.push_back(std::move(child));
        pop = std::move(next);

        gr.total_wall_time_s = seconds_since(t_start);
        record.per_generation.push_back(gr);
    }

    record.total_seconds = record.per_generation.back().total_wall_time_s;
    return record;
}

std::string RunRecord::to_json() const {
    nlohmann::json j;
    j["config_id"] = config_id;
    j["final_best"] = final_best;
    j["total_seconds"] = total_seconds;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& g : per_generation) {
        rows.push_back({{"gen", g.gen},
                        {"best_train_mae", g.best_train_mae},
                        {"best_test_mae", g.best_test_mae},
                        {"diversity", g.diversity},
                        {"selection_wall_time_s", g.selection_wall_time_s},
                        {"total_wall_time_s", g.total_wall_time_s}});
    }
    j["per_generation"] = std::move(rows);
    return j.dump(2);
}

RunRecord RunRecord::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    RunRecord r;
    r.config_id = j.at("config_id").get<std::string>();
    r.final_best = j.at("final_best").get<std::string>();
    r.total_seconds = j.at("total_seconds").get<double>();
    for (const auto& row : j.at("per_generation")) {
        GenerationRecord g;
        g.gen = row.at("gen").get<std::size_t>();
        g.best_train_mae = row.at("best_train_mae").get<double>();
        g.best_test_mae = row.at("best_test_mae").get<double>();
        g.diversity = row.at("diversity").get<double>();
        g.selection_wall_time_s = row.at("selection_wall_time_s").get<double>();
        g.total_wall_time_s = row.at("total_wall_time_s").get<double>();
        r.per_generation.push_back(g);
    }
    return r;
}

std::string RunRecord::to_csv() const {
    std::ostringstream out;
    out << "gen,best_train_mae,best_test_mae,diversity,selection_wall_time_s,total_wall_time_s\n";
    char buf[200];
    for (const auto& g : per_generation) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", g.gen,
                      g.best_train_mae, g.best_test_mae, g.diversity, g.selection_wall_time_s,
                      g.total_wall_time_s);
        out << buf;
    }
    return out.str();
}

}  // namespace sr
