#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsmin/common.hpp"
#include "tsmin/corpus.hpp"
#include "tsmin/similarity.hpp"

namespace tsmin {

enum class InitStrategy { S1, S2, S3 };

InitStrategy init_strategy_from_string(const std::string& name);
std::string to_string(InitStrategy s);

/// Candidate subset encoded as a binary selection vector over corpus order.
struct SubsetSolution {
    std::vector<std::uint8_t> bits;
    int selected_count = 0;
    bool valid = false;         // covers all requirements
    double fitness = 0.0;
    bool fitness_set = false;
    bool repair_failed = false;  // set when repair could not restore feasibility

    std::vector<std::size_t> selected_indices() const;
    std::vector<std::string> selected_ids(const Corpus& corpus) const;
};

struct GaConfig {
    double budget = 0.5;                 // fraction of the suite to keep, in (0,1]
    int population_size = 100;
    double crossover_rate = 0.90;
    double mutation_rate = 0.01;         // per-individual inversion probability
    double convergence_epsilon = 0.0025;
    int convergence_window = 10;
    int max_generations = 1000;
    InitStrategy init_strategy = InitStrategy::S2;
    std::uint64_t seed = 0;
    bool repair_enabled = false;
};

struct MinimizationResult {
    SubsetSolution best;
    int generations_run = 0;
    std::vector<double> fitness_history;  // best valid fitness per generation
    double wall_time_seconds = 0.0;
};

/// Exact subset size implied by the budget, round-half-up.
int budget_size(std::size_t m, double budget);

/// Mean squared nearest-neighbor similarity over the selected set. The inner
/// max over an empty set (single selected case) is 0.
double fitness(const SubsetSolution& sol, const SimilarityMatrix& sim);

bool covers_all_requirements(const std::vector<std::uint8_t>& bits, const Corpus& corpus);

/// Population of valid, budget-exact individuals. Throws
/// Error("InfeasibleBudget") when round(m*budget) < n_req, reporting the
/// minimum feasible budget.
std::vector<SubsetSolution> init_population(const Corpus& corpus, const GaConfig& config,
                                            Rng& rng);

SubsetSolution init_individual(const Corpus& corpus, InitStrategy strategy, int k, Rng& rng);

/// Two independent binary tournaments; valid beats invalid, then lower
/// fitness, ties by lower population index. Returns population indices.
std::pair<std::size_t, std::size_t> select_parents(const std::vector<SubsetSolution>& population,
                                                   Rng& rng);

/// Intersection-preserving fixed-size crossover. Applied with probability
/// `crossover_rate`, otherwise the offspring is a copy of p1.
SubsetSolution crossover(const SubsetSolution& p1, const SubsetSolution& p2, Rng& rng,
                         double crossover_rate);

/// Inversion mutation: with probability `mutation_rate` reverse a random
/// segment of the bit vector (a permutation, so the size is preserved).
void mutate(SubsetSolution& sol, Rng& rng, double mutation_rate);

/// Re-establish full coverage, then shed over-covered picks back to size k.
/// When the budget cannot be restored without uncovering a requirement the
/// input is returned unchanged with repair_failed set.
SubsetSolution repair(const SubsetSolution& sol, const Corpus& corpus, Rng& rng);

/// Generational GA with elitist survival; deterministic given config.seed.
MinimizationResult minimize(const Corpus& corpus, const SimilarityMatrix& sim,
                            const GaConfig& config);

}  // namespace tsmin
