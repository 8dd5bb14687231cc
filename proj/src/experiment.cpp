#include "tsmin/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

#include "tsmin/metrics.hpp"

namespace tsmin {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct CellKey {
    std::string technique, preprocessing, representation, metric, init;
    double budget;
    bool operator<(const CellKey& o) const {
        return std::tie(technique, preprocessing, representation, metric, init, budget) <
               std::tie(o.technique, o.preprocessing, o.representation, o.metric, o.init,
                        o.budget);
    }
};

}  // namespace

ExperimentResult run_experiment(const Corpus& corpus, const FaultMatrix& faults,
                                const ExperimentConfig& config) {
    if (config.repeats < 1) throw Error("BadConfig", "repeats must be >= 1");
    for (double b : config.budgets) {
        if (!(b > 0.0 && b <= 1.0)) throw Error("BadConfig", "budgets must be in (0,1]");
    }
    std::vector<std::uint64_t> seeds = config.seeds;
    if (seeds.empty()) {
        for (int s = 1; s <= config.repeats; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    }

    ExperimentResult result;
    std::vector<std::string> all_ids;
    for (const auto& tc : corpus.test_cases) all_ids.push_back(tc.id);

    auto score = [&](RunRecord& rec, const std::vector<std::string>& ids) {
        rec.fdr = fdr(ids, faults, corpus);
        rec.coverage = coverage(ids, corpus);
        rec.ok = true;
    };

    // GA grid.
    for (PreprocessMethod pm : config.preprocessing) {
        std::vector<TokenizedDoc> docs;
        for (const auto& tc : corpus.test_cases) {
            docs.push_back(preprocess(tc.raw_text(), pm, tc.id));
        }
        for (const auto& rep : config.representations) {
            // Representation is built once per (pm, rep) and reused across
            // metrics where compatible.
            SentenceVectors sv;
            WordVectors wv;
            std::string rep_error;
            try {
                if (rep == "tfidf") {
                    sv = tfidf_embed(docs);
                } else if (rep == "cbow") {
                    CbowConfig cc = config.cbow;
                    wv = train_cbow(docs, cc).vectors;
                } else {
                    throw Error("UnknownRepresentation", rep);
                }
            } catch (const Error& e) {
                rep_error = e.what();
            }
            for (Metric metric : config.metrics) {
                SimilarityMatrix sim;
                std::string cell_error = rep_error;
                if (cell_error.empty()) {
                    try {
                        Representation repr;
                        if (rep == "tfidf") {
                            repr.sentence = &sv;
                        } else {
                            repr.word = &wv;
                            repr.docs = &docs;
                        }
                        sim = build_similarity_matrix(
                            all_ids, repr, metric,
                            rep + "+" + to_string(pm));
                    } catch (const Error& e) {
                        cell_error = e.what();
                    }
                }
                for (InitStrategy init : config.inits) {
                    for (double budget : config.budgets) {
                        for (std::uint64_t seed : seeds) {
                            RunRecord rec;
                            rec.technique = "rtm";
                            rec.preprocessing = to_string(pm);
                            rec.representation = rep;
                            rec.metric = to_string(metric);
                            rec.init = to_string(init);
                            rec.budget = budget;
                            rec.seed = seed;
                            rec.fitness = kNan;
                            if (!cell_error.empty()) {
                                rec.error = cell_error;
                                result.records.push_back(std::move(rec));
                                continue;
                            }
                            try {
                                GaConfig ga = config.ga;
                                ga.budget = budget;
                                ga.seed = seed;
                                ga.init_strategy = init;
                                MinimizationResult mr = minimize(corpus, sim, ga);
                                score(rec, mr.best.selected_ids(corpus));
                                rec.fitness = mr.best.fitness;
                                rec.generations = mr.generations_run;
                                rec.wall_time_seconds = mr.wall_time_seconds;
                            } catch (const Error& e) {
                                rec.error = e.what();
                            }
                            result.records.push_back(std::move(rec));
                        }
                    }
                }
            }
        }
    }

    // Baselines are independent of preprocessing/representation/init except
    // for greedy diversity, which reuses the first GA cell's matrix setup.
    if (config.include_baselines) {
        for (double budget : config.budgets) {
            for (std::uint64_t seed : seeds) {
                for (const char* kind : {"random-c", "random-u"}) {
                    RunRecord rec;
                    rec.technique = kind;
                    rec.preprocessing = rec.representation = rec.metric = rec.init = "-";
                    rec.budget = budget;
                    rec.seed = seed;
                    rec.fitness = kNan;
                    try {
                        const auto t0 = std::chrono::steady_clock::now();
                        SubsetSolution sol = random_minimize(
                            corpus, budget, std::string(kind) == "random-c", seed);
                        rec.wall_time_seconds =
                            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                          t0)
                                .count();
                        score(rec, sol.selected_ids(corpus));
                    } catch (const Error& e) {
                        rec.error = e.what();
                    }
                    result.records.push_back(std::move(rec));
                }
            }
        }
        // Greedy diversity is deterministic: one run per budget per matrix of
        // the first requested representation cell.
        if (!config.preprocessing.empty() && !config.representations.empty() &&
            !config.metrics.empty()) {
            const PreprocessMethod pm = config.preprocessing.front();
            const std::string rep = config.representations.front();
            const Metric metric = config.metrics.front();
            std::string cell_error;
            SimilarityMatrix sim;
            try {
                std::vector<TokenizedDoc> docs;
                for (const auto& tc : corpus.test_cases) {
                    docs.push_back(preprocess(tc.raw_text(), pm, tc.id));
                }
                Representation repr;
                SentenceVectors sv;
                WordVectors wv;
                std::vector<TokenizedDoc> docs_keep = docs;
                if (rep == "tfidf") {
                    sv = tfidf_embed(docs);
                    repr.sentence = &sv;
                } else {
                    wv = train_cbow(docs, config.cbow).vectors;
                    repr.word = &wv;
                    repr.docs = &docs_keep;
                }
                sim = build_similarity_matrix(all_ids, repr, metric,
                                              rep + "+" + to_string(pm));
            } catch (const Error& e) {
                cell_error = e.what();
            }
            for (double budget : config.budgets) {
                RunRecord rec;
                rec.technique = "greedy";
                rec.preprocessing = to_string(pm);
                rec.representation = rep;
                rec.metric = to_string(metric);
                rec.init = "-";
                rec.budget = budget;
                rec.seed = 0;
                rec.fitness = kNan;
                if (!cell_error.empty()) {
                    rec.error = cell_error;
                } else {
                    try {
                        const auto t0 = std::chrono::steady_clock::now();
                        SubsetSolution sol = greedy_diversity(corpus, sim, budget);
                        rec.wall_time_seconds =
                            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                          t0)
                                .count();
                        score(rec, sol.selected_ids(corpus));
                        rec.fitness = fitness(sol, sim);
                    } catch (const Error& e) {
                        rec.error = e.what();
                    }
                }
                result.records.push_back(std::move(rec));
            }
        }
    }

    if (config.include_oracle) {
        for (double budget : config.budgets) {
            RunRecord rec;
            rec.technique = "oracle";
            rec.preprocessing = rec.representation = rec.metric = rec.init = "-";
            rec.budget = budget;
            rec.seed = 0;
            rec.fitness = kNan;
            try {
                const auto t0 = std::chrono::steady_clock::now();
                OracleResult orc =
                    best_fdr(corpus, faults, budget, config.oracle_time_cap_seconds);
                rec.wall_time_seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                        .count();
                std::vector<std::string> ids(orc.subset.begin(), orc.subset.end());
                score(rec, ids);
            } catch (const Error& e) {
                rec.error = e.what();
            }
            result.records.push_back(std::move(rec));
        }
    }

    // Aggregate successful runs per cell; fully failed cells keep repeats=0
    // and blank means.
    std::map<CellKey, std::vector<const RunRecord*>> cells;
    for (const auto& rec : result.records) {
        cells[{rec.technique, rec.preprocessing, rec.representation, rec.metric, rec.init,
               rec.budget}]
            .push_back(&rec);
    }
    for (const auto& [key, recs] : cells) {
        SummaryRow row;
        row.technique = key.technique;
        row.preprocessing = key.preprocessing;
        row.representation = key.representation;
        row.metric = key.metric;
        row.init = key.init;
        row.budget = key.budget;
        double f = 0.0, c = 0.0;
        for (const RunRecord* r : recs) {
            if (!r->ok) continue;
            f += r->fdr;
            c += r->coverage;
            ++row.repeats;
        }
        if (row.repeats > 0) {
            row.mean_fdr = f / row.repeats;
            row.mean_coverage = c / row.repeats;
        } else {
            row.mean_fdr = kNan;
            row.mean_coverage = kNan;
        }
        result.summary.push_back(std::move(row));
    }

    if (!config.output_dir.empty()) {
        std::filesystem::create_directories(config.output_dir);
        write_records_csv(result.records,
                          (std::filesystem::path(config.output_dir) / "runs.csv").string());
        write_summary_csv(result.summary,
                          (std::filesystem::path(config.output_dir) / "summary.csv").string());
    }
    return result;
}

void write_records_csv(const std::vector<RunRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("IoError", "cannot write " + path);
    // Wall time is intentionally not serialized: result files must be
    // byte-identical across repeated seeded invocations.
    out << "technique,preprocessing,representation,metric,init,budget,seed,ok,error,"
           "fdr,coverage,fitness,generations\n";
    for (const auto& r : records) {
        out << r.technique << ',' << r.preprocessing << ',' << r.representation << ','
            << r.metric << ',' << r.init << ',' << fmt(r.budget) << ',' << r.seed << ','
            << (r.ok ? 1 : 0) << ',' << csv_escape(r.error) << ','
            << (r.ok ? fmt(r.fdr) : "") << ',' << (r.ok ? fmt(r.coverage) : "") << ','
            << fmt(r.fitness) << ',' << r.generations << '\n';
    }
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("IoError", "cannot write " + path);
    out << "technique,preprocessing,representation,metric,init,budget,mean_fdr,"
           "mean_coverage,repeats\n";
    for (const auto& r : rows) {
        out << r.technique << ',' << r.preprocessing << ',' << r.representation << ','
            << r.metric << ',' << r.init << ',' << fmt(r.budget) << ',' << fmt(r.mean_fdr)
            << ',' << fmt(r.mean_coverage) << ',' << r.repeats << '\n';
    }
}

}  // namespace tsmin
