#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tsmin/corpus.hpp"

namespace tsmin {

struct OracleResult {
    std::set<std::string> subset;  // selected test-case ids
    double fdr = 0.0;
    bool exact = false;  // proven optimal, not a time-capped incumbent
};

enum class CaseAllocation { UNIFORM, ZIPF };

/// Knobs for the synthetic corpus generator. Defaults mirror an industrial
/// suite shape: a long-tailed cases-per-requirement distribution, clone pairs
/// that share fault sets, and templated diagnostic step text.
struct SynthConfig {
    std::size_t n_req = 54;
    std::size_t total_cases = 736;
    CaseAllocation allocation = CaseAllocation::ZIPF;
    double zipf_exponent = 1.2;        // cases-per-requirement skew
    std::size_t n_faults = 220;
    double target_rl = 11.86;
    double fault_zipf_exponent = 1.35;  // detections-per-fault skew
    double clone_rate = 0.62;          // fraction of cases that are near-duplicates
    std::uint64_t seed = 0;
};

/// Maximum achievable fault detection under an exact budget and full
/// requirement coverage, via branch-and-bound with greedy upper bounds.
/// `exact` is false when the time cap expired before the search finished.
OracleResult best_fdr(const Corpus& corpus, const FaultMatrix& faults, double budget,
                      double time_cap_seconds = 60.0);

struct RedundancySuiteOptions {
    std::size_t count = 10;
    double tolerance = 0.1;   // |RL - target| bound
    std::uint64_t seed = 0;
    std::size_t pool_size = 50;
    std::size_t max_attempts = 4000;
    // Suites below this size are padded with zero-detection cases (which
    // leave RL unchanged) so that downstream budgets stay feasible.
    std::size_t min_size = 0;
};

/// Suites (as id lists, corpus order) with 100% requirement coverage, 100%
/// fault coverage, and redundancy level within tolerance of the target; the
/// returned `count` suites minimize total pairwise Jaccard similarity.
/// Throws Error("NoSuiteFound") with the closest achieved RL when the target
/// is infeasible within the attempt cap.
std::vector<std::vector<std::string>> generate_redundancy_suites(
    const Corpus& corpus, const FaultMatrix& faults, double target_rl,
    const RedundancySuiteOptions& options);

/// Deterministic templated corpus plus fault matrix; realized redundancy
/// lands within 5% of target_rl. Clone pairs share fault sets and differ only
/// in identifier names and parameter values.
std::pair<Corpus, FaultMatrix> synth_corpus(const SynthConfig& config);

}  // namespace tsmin
