#include "sr/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sr {

ErrorMatrix::ErrorMatrix(std::size_t individuals, std::size_t cases)
    : n_(individuals), t_(cases), e_(individuals * cases, 0.0), row_mae_(individuals, 0.0) {
    if (individuals == 0 || cases == 0)
        throw std::invalid_argument("ErrorMatrix: empty dimension");
}

ErrorMatrix ErrorMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("ErrorMatrix: no rows");
    ErrorMatrix em(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) em.set_row(i, rows[i]);
    return em;
}

void ErrorMatrix::set_row(std::size_t i, std::span<const double> errors) {
    if (errors.size() != t_) throw std::invalid_argument("ErrorMatrix: row length mismatch");
    double sum = 0.0;
    for (std::size_t t = 0; t < t_; ++t) {
        const double v = errors[t];
        if (!(std::isfinite(v) && v >= 0.0))
            throw std::invalid_argument("ErrorMatrix: errors must be finite and >= 0");
        e_[i * t_ + t] = v;
        sum += v;
    }
    row_mae_[i] = sum / static_cast<double>(t_);
}

std::vector<std::size_t> select_tournament(const ErrorMatrix& em, std::size_t tourn_size,
                                           std::size_t k, Rng& rng) {
    if (tourn_size == 0) throw std::invalid_argument("select_tournament: tourn_size must be >= 1");
    const std::size_t n = em.individuals();
    std::vector<std::size_t> selected;
    selected.reserve(k);
    for (std::size_t round = 0; round < k; ++round) {
        std::size_t winner = rng.uniform_index(n);
        double best = em.row_mae(winner);
        for (std::size_t c = 1; c < tourn_size; ++c) {
            const std::size_t cand = rng.uniform_index(n);
            const double mae = em.row_mae(cand);
            if (mae < best) {  // strict: ties keep the earlier draw
                best = mae;
                winner = cand;
            }
        }
        selected.push_back(winner);
    }
    return selected;
}

std::vector<std::size_t> lexicase_walk(const ErrorMatrix& em,
                                       std::span<const std::size_t> case_order,
                                       std::span<const double> eps) {
    const std::size_t n = em.individuals();
    std::vector<std::size_t> survivors(n);
    for (std::size_t i = 0; i < n; ++i) survivors[i] = i;

    std::vector<std::size_t> next;
    next.reserve(n);
    for (const std::size_t t : case_order) {
        if (survivors.size() == 1) break;
        double min_err = em.at(survivors[0], t);
        for (std::size_t i = 1; i < survivors.size(); ++i)
            min_err = std::min(min_err, em.at(survivors[i], t));
        const double threshold = eps.empty() ? min_err : min_err + eps[t];
        next.clear();
        for (const std::size_t s : survivors)
            if (em.at(s, t) <= threshold) next.push_back(s);
        survivors.swap(next);
    }
    return survivors;
}

namespace {

std::vector<std::size_t> lexicase_impl(const ErrorMatrix& em, std::span<const double> eps,
                                       std::size_t k, Rng& rng) {
    const std::size_t t_cases = em.cases();
    std::vector<std::size_t> selected;
    selected.reserve(k);
    std::vector<std::size_t> order(t_cases);
    for (std::size_t round = 0; round < k; ++round) {
        for (std::size_t t = 0; t < t_cases; ++t) order[t] = t;
        rng.shuffle(order);
        const auto survivors = lexicase_walk(em, order, eps);
        selected.push_back(survivors.size() == 1
                               ? survivors[0]
                               : survivors[rng.uniform_index(survivors.size())]);
    }
    return selected;
}

double median_inplace(std::vector<double>& v) {
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    if (n % 2 == 1) return v[mid];
    const double hi = v[mid];
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    return (lo + hi) / 2.0;
}

}  // namespace

std::vector<std::size_t> select_lexicase(const ErrorMatrix& em, std::size_t k, Rng& rng) {
    return lexicase_impl(em, {}, k, rng);
}

EpsilonLexicaseState compute_auto_epsilon(const ErrorMatrix& em) {
    const std::size_t n = em.individuals();
    const std::size_t t_cases = em.cases();
    EpsilonLexicaseState state;
    state.epsilon_per_case.resize(t_cases);
    std::vector<double> col(n);
    std::vector<double> dev(n);
    for (std::size_t t = 0; t < t_cases; ++t) {
        for (std::size_t i = 0; i < n; ++i) col[i] = em.at(i, t);
        const double med = median_inplace(col);
        for (std::size_t i = 0; i < n; ++i) dev[i] = std::abs(col[i] - med);
        state.epsilon_per_case[t] = median_inplace(dev);
    }
    return state;
}

std::vector<std::size_t> select_epsilon_lexicase(const ErrorMatrix& em,
                                                 const EpsilonLexicaseState& eps,
                                                 std::size_t k, Rng& rng) {
    if (eps.epsilon_per_case.size() != em.cases())
        throw std::invalid_argument("select_epsilon_lexicase: epsilon length mismatch");
    return lexicase_impl(em, eps.epsilon_per_case, k, rng);
}

std::vector<std::size_t> order_cases_by_difficulty(const ErrorMatrix& em) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < em.individuals(); ++i)
        if (em.row_mae(i) < em.row_mae(best)) best = i;

    std::vector<std::size_t> order(em.cases());
    for (std::size_t t = 0; t < em.cases(); ++t) order[t] = t;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return em.at(best, a) > em.at(best, b);  // hardest first
    });
    return order;
}

BatchPlan partition_batches(std::vector<std::size_t> case_order, std::size_t batch_size) {
    if (batch_size == 0) throw std::invalid_argument("partition_batches: batch_size must be >= 1");
    BatchPlan plan;
    plan.case_order = std::move(case_order);
    const std::size_t t_cases = plan.case_order.size();
    for (std::size_t begin = 0; begin < t_cases; begin += batch_size)
        plan.batches.push_back({begin, std::min(begin + batch_size, t_cases)});
    return plan;
}

std::vector<std::size_t> select_batch_tournament(const ErrorMatrix& em,
                                                 const BatchTournamentConfig& config, Rng& rng) {
    if (config.batch_size == 0 || config.tourn_size == 0 || config.k == 0)
        throw std::invalid_argument("select_batch_tournament: invalid config");
    const std::size_t n = em.individuals();
    const std::size_t t_cases = em.cases();

    const BatchPlan plan = partition_batches(
        config.shuffle ? rng.permutation(t_cases) : order_cases_by_difficulty(em),
        config.batch_size);

    // Mean error of one individual over one batch. A batch spanning every
    // case is scored with the cached row MAE, which it equals.
    const auto batch_mean = [&](std::size_t ind, const BatchPlan::Range& b) {
        if (b.end - b.begin == t_cases) return em.row_mae(ind);
        double sum = 0.0;
        for (std::size_t p = b.begin; p < b.end; ++p) sum += em.at(ind, plan.case_order[p]);
        return sum / static_cast<double>(b.end - b.begin);
    };

    std::vector<std::size_t> selected;
    selected.reserve(config.k);
    while (selected.size() < config.k) {
        for (const auto& batch : plan.batches) {  // queue over the same plan
            if (selected.size() == config.k) break;
            std::size_t winner = rng.uniform_index(n);
            double best = batch_mean(winner, batch);
            for (std::size_t c = 1; c < config.tourn_size; ++c) {
                const std::size_t cand = rng.uniform_index(n);
                const double fitness = batch_mean(cand, batch);
                if (fitness < best) {
                    best = fitness;
                    winner = cand;
                }
            }
            selected.push_back(winner);
        }
    }
    return selected;
}

}  // namespace sr
