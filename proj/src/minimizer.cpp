#include "tsmin/minimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace tsmin {

InitStrategy init_strategy_from_string(const std::string& name) {
    if (name == "s1" || name == "S1") return InitStrategy::S1;
    if (name == "s2" || name == "S2") return InitStrategy::S2;
    if (name == "s3" || name == "S3") return InitStrategy::S3;
    throw Error("UnknownInitStrategy", name);
}

std::string to_string(InitStrategy s) {
    switch (s) {
        case InitStrategy::S1: return "s1";
        case InitStrategy::S2: return "s2";
        case InitStrategy::S3: return "s3";
    }
    return "?";
}

std::vector<std::size_t> SubsetSolution::selected_indices() const {
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(selected_count));
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) out.push_back(i);
    }
    return out;
}

std::vector<std::string> SubsetSolution::selected_ids(const Corpus& corpus) const {
    std::vector<std::string> out;
    for (std::size_t i : selected_indices()) out.push_back(corpus.test_cases[i].id);
    return out;
}

int budget_size(std::size_t m, double budget) {
    // Round-half-up.
    return static_cast<int>(std::floor(static_cast<double>(m) * budget + 0.5));
}

double fitness(const SubsetSolution& sol, const SimilarityMatrix& sim) {
    const auto sel = sol.selected_indices();
    const std::size_t n = sel.size();
    if (n == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        double best = 0.0;  // max over the empty set is 0
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            best = std::max(best, sim.at(sel[a], sel[b]));
        }
        acc += best * best;
    }
    return acc / static_cast<double>(n);
}

bool covers_all_requirements(const std::vector<std::uint8_t>& bits, const Corpus& corpus) {
    const auto& cover = corpus.coverage_by_case();
    std::vector<std::uint8_t> covered(corpus.n_req(), 0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (!bits[i]) continue;
        for (int r : cover[i]) {
            if (!covered[r]) {
                covered[r] = 1;
                ++count;
            }
        }
    }
    return count == corpus.n_req();
}

namespace {

std::vector<std::vector<std::size_t>> cases_by_requirement(const Corpus& corpus) {
    std::vector<std::vector<std::size_t>> out(corpus.n_req());
    const auto& cover = corpus.coverage_by_case();
    for (std::size_t i = 0; i < corpus.m(); ++i) {
        for (int r : cover[i]) out[static_cast<std::size_t>(r)].push_back(i);
    }
    return out;
}

void select_case(SubsetSolution& sol, std::size_t i) {
    if (!sol.bits[i]) {
        sol.bits[i] = 1;
        ++sol.selected_count;
    }
}

// Uniform random unselected case index.
std::size_t random_unselected(const SubsetSolution& sol, Rng& rng) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < sol.bits.size(); ++i) {
        if (!sol.bits[i]) pool.push_back(i);
    }
    return pool[rng.uniform_index(pool.size())];
}

}  // namespace

SubsetSolution init_individual(const Corpus& corpus, InitStrategy strategy, int k, Rng& rng) {
    const std::size_t m = corpus.m();
    const auto by_req = cases_by_requirement(corpus);
    SubsetSolution sol;
    sol.bits.assign(m, 0);

    auto pick_under_req = [&](std::size_t r) -> bool {
        std::vector<std::size_t> pool;
        for (std::size_t i : by_req[r]) {
            if (!sol.bits[i]) pool.push_back(i);
        }
        if (pool.empty()) return false;
        select_case(sol, pool[rng.uniform_index(pool.size())]);
        return true;
    };

    switch (strategy) {
        case InitStrategy::S1: {
            // Round-robin over requirements, one fresh pick per pass.
            while (sol.selected_count < k) {
                bool progressed = false;
                for (std::size_t r = 0; r < corpus.n_req() && sol.selected_count < k; ++r) {
                    progressed |= pick_under_req(r);
                }
                if (!progressed) break;  // everything selected
            }
            break;
        }
        case InitStrategy::S2: {
            for (std::size_t r = 0; r < corpus.n_req(); ++r) pick_under_req(r);
            while (sol.selected_count < k) {
                select_case(sol, random_unselected(sol, rng));
            }
            break;
        }
        case InitStrategy::S3: {
            // Per-requirement proportional quota off the primary requirement
            // (the first listed), then +/-1 adjustment to the exact budget.
            const double budget = static_cast<double>(k) / static_cast<double>(m);
            std::vector<std::vector<std::size_t>> primary(corpus.n_req());
            const auto& cover = corpus.coverage_by_case();
            for (std::size_t i = 0; i < m; ++i) {
                primary[static_cast<std::size_t>(cover[i][0])].push_back(i);
            }
            for (std::size_t r = 0; r < corpus.n_req(); ++r) {
                if (primary[r].empty()) continue;
                int quota = std::max(
                    1, static_cast<int>(std::floor(budget * primary[r].size() + 0.5)));
                quota = std::min<int>(quota, static_cast<int>(primary[r].size()));
                std::vector<std::size_t> pool = primary[r];
                for (int q = 0; q < quota; ++q) {
                    const std::size_t at = rng.uniform_index(pool.size());
                    select_case(sol, pool[at]);
                    pool[at] = pool.back();
                    pool.pop_back();
                }
            }
            // Cover requirements that had no primary cases (multi-coverage corpora).
            for (std::size_t r = 0; r < corpus.n_req(); ++r) {
                bool covered = false;
                for (std::size_t i : by_req[r]) covered |= sol.bits[i] != 0;
                if (!covered) pick_under_req(r);
            }
            // Shrink: drop picks whose removal keeps coverage.
            std::vector<int> cover_count(corpus.n_req(), 0);
            for (std::size_t i = 0; i < m; ++i) {
                if (!sol.bits[i]) continue;
                for (int r : cover[i]) ++cover_count[r];
            }
            while (sol.selected_count > k) {
                std::vector<std::size_t> removable;
                for (std::size_t i = 0; i < m; ++i) {
                    if (!sol.bits[i]) continue;
                    bool safe = true;
                    for (int r : cover[i]) safe &= cover_count[r] > 1;
                    if (safe) removable.push_back(i);
                }
                if (removable.empty()) break;
                const std::size_t victim = removable[rng.uniform_index(removable.size())];
                sol.bits[victim] = 0;
                --sol.selected_count;
                for (int r : cover[victim]) --cover_count[r];
            }
            while (sol.selected_count < k) {
                const std::size_t added = random_unselected(sol, rng);
                select_case(sol, added);
                for (int r : cover[added]) ++cover_count[r];
            }
            break;
        }
    }

    sol.valid = covers_all_requirements(sol.bits, corpus);
    return sol;
}

std::vector<SubsetSolution> init_population(const Corpus& corpus, const GaConfig& config,
                                            Rng& rng) {
    const int k = budget_size(corpus.m(), config.budget);
    if (k < static_cast<int>(corpus.n_req())) {
        const double min_budget =
            (static_cast<double>(corpus.n_req()) - 0.5) / static_cast<double>(corpus.m());
        throw Error("InfeasibleBudget",
                    "round(m*budget)=" + std::to_string(k) + " < n_req=" +
                        std::to_string(corpus.n_req()) + "; minimum feasible budget is " +
                        std::to_string(min_budget));
    }
    std::vector<SubsetSolution> population;
    population.reserve(static_cast<std::size_t>(config.population_size));
    for (int i = 0; i < config.population_size; ++i) {
        population.push_back(init_individual(corpus, config.init_strategy, k, rng));
    }
    return population;
}

namespace {

// valid beats invalid; then lower fitness; then lower population index.
bool beats(const std::vector<SubsetSolution>& pop, std::size_t a, std::size_t b) {
    if (pop[a].valid != pop[b].valid) return pop[a].valid;
    if (pop[a].fitness != pop[b].fitness) return pop[a].fitness < pop[b].fitness;
    return a < b;
}

}  // namespace

std::pair<std::size_t, std::size_t> select_parents(const std::vector<SubsetSolution>& population,
                                                   Rng& rng) {
    auto tournament = [&]() {
        const std::size_t a = rng.uniform_index(population.size());
        const std::size_t b = rng.uniform_index(population.size());
        return beats(population, a, b) ? a : b;
    };
    const std::size_t p1 = tournament();
    const std::size_t p2 = tournament();
    return {p1, p2};
}

SubsetSolution crossover(const SubsetSolution& p1, const SubsetSolution& p2, Rng& rng,
                         double crossover_rate) {
    if (!rng.bernoulli(crossover_rate)) {
        SubsetSolution child = p1;
        child.fitness_set = false;
        return child;
    }
    const int k = p1.selected_count;
    SubsetSolution child;
    child.bits.assign(p1.bits.size(), 0);
    std::vector<std::size_t> symdiff;
    for (std::size_t i = 0; i < p1.bits.size(); ++i) {
        if (p1.bits[i] && p2.bits[i]) {
            child.bits[i] = 1;
            ++child.selected_count;
        } else if (p1.bits[i] || p2.bits[i]) {
            symdiff.push_back(i);
        }
    }
    // Fill from the symmetric difference, uniformly without replacement.
    while (child.selected_count < k) {
        const std::size_t at = rng.uniform_index(symdiff.size());
        child.bits[symdiff[at]] = 1;
        ++child.selected_count;
        symdiff[at] = symdiff.back();
        symdiff.pop_back();
    }
    return child;
}

void mutate(SubsetSolution& sol, Rng& rng, double mutation_rate) {
    if (!rng.bernoulli(mutation_rate)) return;
    std::size_t a = rng.uniform_index(sol.bits.size());
    std::size_t b = rng.uniform_index(sol.bits.size());
    if (a > b) std::swap(a, b);
    std::reverse(sol.bits.begin() + static_cast<std::ptrdiff_t>(a),
                 sol.bits.begin() + static_cast<std::ptrdiff_t>(b) + 1);
    sol.fitness_set = false;
}

SubsetSolution repair(const SubsetSolution& sol, const Corpus& corpus, Rng& rng) {
    const auto& cover = corpus.coverage_by_case();
    const auto by_req = cases_by_requirement(corpus);
    const int k = sol.selected_count;

    SubsetSolution fixed = sol;
    fixed.repair_failed = false;
    std::vector<int> cover_count(corpus.n_req(), 0);
    for (std::size_t i = 0; i < fixed.bits.size(); ++i) {
        if (!fixed.bits[i]) continue;
        for (int r : cover[i]) ++cover_count[r];
    }
    for (std::size_t r = 0; r < corpus.n_req(); ++r) {
        if (cover_count[r] > 0) continue;
        std::vector<std::size_t> pool;
        for (std::size_t i : by_req[r]) {
            if (!fixed.bits[i]) pool.push_back(i);
        }
        if (pool.empty()) continue;
        const std::size_t added = pool[rng.uniform_index(pool.size())];
        fixed.bits[added] = 1;
        ++fixed.selected_count;
        for (int cr : cover[added]) ++cover_count[cr];
    }
    while (fixed.selected_count > k) {
        std::vector<std::size_t> removable;
        for (std::size_t i = 0; i < fixed.bits.size(); ++i) {
            if (!fixed.bits[i]) continue;
            bool safe = true;
            for (int r : cover[i]) safe &= cover_count[r] > 1;
            if (safe) removable.push_back(i);
        }
        if (removable.empty()) {
            SubsetSolution untouched = sol;
            untouched.repair_failed = true;
            return untouched;
        }
        const std::size_t victim = removable[rng.uniform_index(removable.size())];
        fixed.bits[victim] = 0;
        --fixed.selected_count;
        for (int r : cover[victim]) --cover_count[r];
    }
    fixed.valid = covers_all_requirements(fixed.bits, corpus);
    fixed.fitness_set = false;
    return fixed;
}

MinimizationResult minimize(const Corpus& corpus, const SimilarityMatrix& sim,
                            const GaConfig& config) {
    if (sim.m() != corpus.m()) {
        throw Error("DimensionMismatch", "similarity matrix size != corpus size");
    }
    const auto start = std::chrono::steady_clock::now();
    Rng rng(config.seed);

    auto evaluate = [&](SubsetSolution& s) {
        s.valid = covers_all_requirements(s.bits, corpus);
        s.fitness = fitness(s, sim);
        s.fitness_set = true;
    };

    std::vector<SubsetSolution> population = init_population(corpus, config, rng);
    for (auto& s : population) evaluate(s);

    auto best_of = [&](const std::vector<SubsetSolution>& pop) -> const SubsetSolution* {
        const SubsetSolution* best = nullptr;
        for (const auto& s : pop) {
            if (!s.valid) continue;
            if (!best || s.fitness < best->fitness) best = &s;
        }
        return best;
    };

    const SubsetSolution* init_best = best_of(population);
    if (!init_best) throw Error("InternalError", "no valid individual after initialization");
    SubsetSolution best_ever = *init_best;

    MinimizationResult result;
    result.fitness_history.push_back(best_ever.fitness);

    const std::size_t pop_size = population.size();
    for (int gen = 1; gen <= config.max_generations; ++gen) {
        std::vector<SubsetSolution> offspring;
        offspring.reserve(pop_size);
        for (std::size_t i = 0; i < pop_size; ++i) {
            const auto [pa, pb] = select_parents(population, rng);
            SubsetSolution child =
                crossover(population[pa], population[pb], rng, config.crossover_rate);
            mutate(child, rng, config.mutation_rate);
            if (config.repair_enabled) child = repair(child, corpus, rng);
            evaluate(child);
            offspring.push_back(std::move(child));
        }

        // Elitist survival: best population_size of parents plus offspring,
        // ties resolved toward earlier index via stable sort.
        std::vector<SubsetSolution> combined = std::move(population);
        for (auto& c : offspring) combined.push_back(std::move(c));
        std::stable_sort(combined.begin(), combined.end(),
                         [](const SubsetSolution& a, const SubsetSolution& b) {
                             if (a.valid != b.valid) return a.valid;
                             return a.fitness < b.fitness;
                         });
        combined.resize(pop_size);
        population = std::move(combined);

        if (population.front().valid && population.front().fitness < best_ever.fitness) {
            best_ever = population.front();
        }
        result.fitness_history.push_back(best_ever.fitness);
        result.generations_run = gen;

        if (gen >= config.convergence_window) {
            const double then =
                result.fitness_history[result.fitness_history.size() - 1 -
                                       static_cast<std::size_t>(config.convergence_window)];
            if (then - best_ever.fitness < config.convergence_epsilon) break;
        }
    }

    result.best = std::move(best_ever);
    result.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace tsmin
