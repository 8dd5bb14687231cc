#include "tsmin/baselines.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace tsmin {

BaselineKind baseline_kind_from_string(const std::string& name) {
    if (name == "random-c") return BaselineKind::RANDOM_CONSTRAINED;
    if (name == "random-u") return BaselineKind::RANDOM_UNCONSTRAINED;
    if (name == "greedy") return BaselineKind::GREEDY_DIVERSITY;
    throw Error("UnknownBaseline", name);
}

std::string to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::RANDOM_CONSTRAINED: return "random-c";
        case BaselineKind::RANDOM_UNCONSTRAINED: return "random-u";
        case BaselineKind::GREEDY_DIVERSITY: return "greedy";
    }
    return "?";
}

SubsetSolution random_minimize(const Corpus& corpus, double budget, bool constrained,
                               std::uint64_t seed) {
    const int k = budget_size(corpus.m(), budget);
    Rng rng(seed);
    if (constrained) {
        if (k < static_cast<int>(corpus.n_req())) {
            throw Error("InfeasibleBudget", "budget below one case per requirement");
        }
        return init_individual(corpus, InitStrategy::S2, k, rng);
    }
    std::vector<std::size_t> indices(corpus.m());
    std::iota(indices.begin(), indices.end(), 0);
    SubsetSolution sol;
    sol.bits.assign(corpus.m(), 0);
    for (int q = 0; q < k; ++q) {
        const std::size_t at = q + rng.uniform_index(indices.size() - q);
        std::swap(indices[q], indices[at]);
        sol.bits[indices[q]] = 1;
        ++sol.selected_count;
    }
    sol.valid = covers_all_requirements(sol.bits, corpus);
    return sol;
}

SubsetSolution greedy_diversity(const Corpus& corpus, const SimilarityMatrix& sim,
                                double budget) {
    const int k = budget_size(corpus.m(), budget);
    if (k < static_cast<int>(corpus.n_req())) {
        throw Error("InfeasibleBudget", "budget below one case per requirement");
    }
    const std::size_t m = corpus.m();
    const auto& cover = corpus.coverage_by_case();
    std::vector<std::vector<std::size_t>> by_req(corpus.n_req());
    for (std::size_t i = 0; i < m; ++i) {
        for (int r : cover[i]) by_req[static_cast<std::size_t>(r)].push_back(i);
    }

    SubsetSolution sol;
    sol.bits.assign(m, 0);
    // min_dist[i]: distance from i to the chosen set so far.
    std::vector<double> min_dist(m, std::numeric_limits<double>::infinity());

    auto add = [&](std::size_t i) {
        sol.bits[i] = 1;
        ++sol.selected_count;
        for (std::size_t j = 0; j < m; ++j) {
            min_dist[j] = std::min(min_dist[j], 1.0 - sim.at(j, i));
        }
    };
    auto best_in = [&](const std::vector<std::size_t>& pool) {
        std::size_t best = m;
        double best_d = -1.0;
        for (std::size_t i : pool) {
            if (sol.bits[i]) continue;
            const double d = sol.selected_count == 0 ? 0.0 : min_dist[i];
            if (d > best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    };

    for (std::size_t r = 0; r < corpus.n_req(); ++r) {
        bool covered = false;
        for (std::size_t i : by_req[r]) covered |= sol.bits[i] != 0;
        if (covered) continue;
        const std::size_t pick = best_in(by_req[r]);
        if (pick < m) add(pick);
    }
    std::vector<std::size_t> all(m);
    std::iota(all.begin(), all.end(), 0);
    while (sol.selected_count < k) {
        add(best_in(all));
    }
    sol.valid = covers_all_requirements(sol.bits, corpus);
    return sol;
}

}  // namespace tsmin
