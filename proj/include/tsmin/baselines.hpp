#pragma once

#include <cstdint>
#include <string>

#include "tsmin/corpus.hpp"
#include "tsmin/minimizer.hpp"
#include "tsmin/similarity.hpp"

namespace tsmin {

enum class BaselineKind { RANDOM_CONSTRAINED, RANDOM_UNCONSTRAINED, GREEDY_DIVERSITY };

BaselineKind baseline_kind_from_string(const std::string& name);
std::string to_string(BaselineKind kind);

/// Constrained: one coverage-preserving individual (same construction as GA
/// init strategy 2). Unconstrained: uniform budget-sized subset.
SubsetSolution random_minimize(const Corpus& corpus, double budget, bool constrained,
                               std::uint64_t seed);

/// Maximin diversity heuristic: seed one case per requirement, then add the
/// case whose minimum distance (1 - similarity) to the chosen set is largest.
/// Deterministic; ties go to the lowest index.
SubsetSolution greedy_diversity(const Corpus& corpus, const SimilarityMatrix& sim, double budget);

}  // namespace tsmin
