#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsmin/baselines.hpp"
#include "tsmin/embed.hpp"
#include "tsmin/minimizer.hpp"
#include "tsmin/oracle.hpp"
#include "tsmin/preprocess.hpp"
#include "tsmin/similarity.hpp"

namespace tsmin {

/// Grid description for a batch of minimization experiments. Every
/// combination of preprocessing x representation x metric x init is run at
/// every budget for every seed; incompatible representation/metric cells are
/// recorded as failures, not fatal.
struct ExperimentConfig {
    std::vector<PreprocessMethod> preprocessing = {PreprocessMethod::PM1};
    std::vector<std::string> representations = {"tfidf"};  // "tfidf" | "cbow"
    std::vector<Metric> metrics = {Metric::COSINE};
    std::vector<InitStrategy> inits = {InitStrategy::S2};
    std::vector<double> budgets = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    int repeats = 10;
    std::vector<std::uint64_t> seeds;  // empty -> 1..repeats
    bool include_baselines = true;
    bool include_oracle = false;
    double oracle_time_cap_seconds = 60.0;
    GaConfig ga;        // template; budget/seed/init are overwritten per run
    CbowConfig cbow;    // used when a "cbow" representation is requested
    std::string output_dir;  // empty -> no files written
};

struct RunRecord {
    std::string technique;       // rtm | random-c | random-u | greedy | oracle
    std::string preprocessing;   // pm1/pm2/pm3, "-" when not applicable
    std::string representation;  // tfidf/cbow, "-"
    std::string metric;          // cosine/euclidean/wmd, "-"
    std::string init;            // s1/s2/s3, "-"
    double budget = 0.0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double fdr = 0.0;
    double coverage = 0.0;
    double fitness = 0.0;  // NaN when no similarity matrix is involved
    int generations = 0;
    double wall_time_seconds = 0.0;
};

struct SummaryRow {
    std::string technique;
    std::string preprocessing;
    std::string representation;
    std::string metric;
    std::string init;
    double budget = 0.0;
    double mean_fdr = 0.0;       // NaN when every run in the cell failed
    double mean_coverage = 0.0;  // NaN likewise
    int repeats = 0;             // successful runs aggregated
};

struct ExperimentResult {
    std::vector<RunRecord> records;
    std::vector<SummaryRow> summary;
};

/// Executes the grid. Deterministic given the seed list. When
/// config.output_dir is non-empty, writes runs.csv and summary.csv there.
ExperimentResult run_experiment(const Corpus& corpus, const FaultMatrix& faults,
                                const ExperimentConfig& config);

void write_records_csv(const std::vector<RunRecord>& records, const std::string& path);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path);

}  // namespace tsmin
