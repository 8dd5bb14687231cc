// tsmin: requirement-preserving test-suite minimization toolkit.
//
// Subcommands: ingest, validate, embed, sim, minimize, baseline, oracle,
// synth, redundancy-suites, eval. Exit codes: 0 success, 2 validation
// failure, 1 internal error. All result files are deterministic for a fixed
// seed.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "tsmin/baselines.hpp"
#include "tsmin/corpus.hpp"
#include "tsmin/embed.hpp"
#include "tsmin/experiment.hpp"
#include "tsmin/metrics.hpp"
#include "tsmin/minimizer.hpp"
#include "tsmin/oracle.hpp"
#include "tsmin/preprocess.hpp"
#include "tsmin/similarity.hpp"

using nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_json(const ordered_json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw tsmin::Error("IoError", "cannot write " + path);
    out << doc.dump(2) << '\n';
}

std::vector<tsmin::TokenizedDoc> preprocess_corpus(const tsmin::Corpus& corpus,
                                                   tsmin::PreprocessMethod pm) {
    std::vector<tsmin::TokenizedDoc> docs;
    docs.reserve(corpus.m());
    for (const auto& tc : corpus.test_cases) {
        docs.push_back(tsmin::preprocess(tc.raw_text(), pm, tc.id));
    }
    return docs;
}

tsmin::SimilarityMatrix build_matrix(const tsmin::Corpus& corpus, tsmin::PreprocessMethod pm,
                                     const std::string& rep, tsmin::Metric metric,
                                     const tsmin::CbowConfig& cbow,
                                     const std::string& word_vectors_path,
                                     const std::string& sentence_vectors_path) {
    std::vector<std::string> ids;
    for (const auto& tc : corpus.test_cases) ids.push_back(tc.id);
    const auto docs = preprocess_corpus(corpus, pm);
    tsmin::Representation repr;
    tsmin::SentenceVectors sv;
    tsmin::WordVectors wv;
    std::string provenance = rep + "+" + tsmin::to_string(pm);
    if (!sentence_vectors_path.empty()) {
        sv = tsmin::import_sentence_vectors(sentence_vectors_path);
        tsmin::require_sentence_coverage(sv, ids);
        repr.sentence = &sv;
        provenance = "imported-sentence+" + tsmin::to_string(pm);
    } else if (!word_vectors_path.empty()) {
        wv = tsmin::import_word_vectors(word_vectors_path);
        tsmin::check_token_coverage(wv, docs);
        repr.word = &wv;
        repr.docs = &docs;
        provenance = "imported-word+" + tsmin::to_string(pm);
    } else if (rep == "tfidf") {
        sv = tsmin::tfidf_embed(docs);
        repr.sentence = &sv;
    } else if (rep == "cbow") {
        wv = tsmin::train_cbow(docs, cbow).vectors;
        repr.word = &wv;
        repr.docs = &docs;
    } else {
        throw tsmin::Error("UnknownRepresentation", rep);
    }
    return tsmin::build_similarity_matrix(ids, repr, metric, provenance);
}

void write_selection_result(const std::string& path, const std::string& command,
                            const tsmin::Corpus& corpus, const tsmin::SubsetSolution& best,
                            ordered_json config_echo, int generations,
                            const std::vector<double>* history) {
    ordered_json doc;
    doc["command"] = command;
    doc["config"] = std::move(config_echo);
    doc["selected_count"] = best.selected_count;
    doc["valid"] = best.valid;
    if (best.fitness_set) doc["fitness"] = fmt17(best.fitness);
    if (generations >= 0) doc["generations"] = generations;
    if (history != nullptr) {
        ordered_json h = ordered_json::array();
        for (double v : *history) h.push_back(fmt17(v));
        doc["fitness_history"] = std::move(h);
    }
    doc["selected_ids"] = best.selected_ids(corpus);
    write_json(doc, path);
}

// Minimal key=value config file for the synth subcommand.
tsmin::SynthConfig load_synth_config(const std::string& path) {
    tsmin::SynthConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw tsmin::Error("IoError", "cannot read " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos) {
            throw tsmin::Error("BadConfig", path + ":" + std::to_string(line_no) +
                                                ": expected key=value");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "n_req") {
                cfg.n_req = std::stoul(value);
            } else if (key == "total_cases") {
                cfg.total_cases = std::stoul(value);
            } else if (key == "allocation") {
                if (value == "uniform") {
                    cfg.allocation = tsmin::CaseAllocation::UNIFORM;
                } else if (value == "zipf") {
                    cfg.allocation = tsmin::CaseAllocation::ZIPF;
                } else {
                    throw tsmin::Error("BadConfig", "allocation must be uniform|zipf");
                }
            } else if (key == "zipf_exponent") {
                cfg.zipf_exponent = std::stod(value);
            } else if (key == "n_faults") {
                cfg.n_faults = std::stoul(value);
            } else if (key == "target_rl") {
                cfg.target_rl = std::stod(value);
            } else if (key == "fault_zipf_exponent") {
                cfg.fault_zipf_exponent = std::stod(value);
            } else if (key == "clone_rate") {
                cfg.clone_rate = std::stod(value);
            } else if (key == "seed") {
                cfg.seed = std::stoull(value);
            } else {
                throw tsmin::Error("BadConfig", "unknown key " + key);
            }
        } catch (const std::invalid_argument&) {
            throw tsmin::Error("BadConfig", path + ":" + std::to_string(line_no) +
                                                ": bad value for " + key);
        }
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Requirement-preserving test-suite minimization toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value file providing option defaults");

    std::string corpus_path, faults_path, out_path, faults_out_path;
    std::string sim_matrix_path, word_vectors_path, sentence_vectors_path;
    std::string preprocess_name = "pm1", rep_name = "tfidf", metric_name = "cosine";
    std::string init_name = "s2", kind_name = "random-c", synth_config_path;
    double budget = 0.5, time_cap = 60.0, target_rl = 0.0, tolerance = 0.1;
    std::uint64_t seed = 0;
    std::size_t suite_count = 10;
    tsmin::CbowConfig cbow;
    tsmin::GaConfig ga;
    bool repair = false, include_oracle = false, no_baselines = false;
    std::vector<std::string> grid_preprocess{"pm1"}, grid_reps{"tfidf"},
        grid_metrics{"cosine"}, grid_inits{"s2"};
    std::vector<double> grid_budgets;
    std::vector<std::uint64_t> grid_seeds;
    int repeats = 10;

    auto add_corpus = [&](CLI::App* cmd, bool required = true) {
        auto* opt = cmd->add_option("--corpus", corpus_path, "Corpus file (line-delimited)");
        if (required) opt->required();
    };
    auto add_faults = [&](CLI::App* cmd, bool required) {
        auto* opt = cmd->add_option("--faults", faults_path, "Fault matrix file");
        if (required) opt->required();
    };
    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_path, "Output path")->required();
    };
    auto add_seed = [&](CLI::App* cmd) { cmd->add_option("--seed", seed, "Random seed"); };
    auto add_repr_opts = [&](CLI::App* cmd) {
        cmd->add_option("--preprocess", preprocess_name, "pm1|pm2|pm3");
        cmd->add_option("--rep", rep_name, "tfidf|cbow");
        cmd->add_option("--cbow-window", cbow.window, "CBOW context window");
        cmd->add_option("--cbow-dim", cbow.dim, "CBOW vector dimension");
        cmd->add_option("--cbow-epochs", cbow.epochs, "CBOW training epochs");
        cmd->add_option("--cbow-negative", cbow.negative_samples, "Negative samples");
        cmd->add_option("--cbow-lr", cbow.learning_rate, "Initial learning rate");
    };

    auto* ingest = app.add_subcommand("ingest", "Parse, validate and re-emit a corpus");
    add_corpus(ingest);
    add_faults(ingest, false);
    add_out(ingest);
    ingest->add_option("--faults-out", faults_out_path, "Normalized fault matrix output");

    auto* validate = app.add_subcommand("validate", "Validate a corpus and fault matrix");
    add_corpus(validate);
    add_faults(validate, false);

    auto* embed = app.add_subcommand("embed", "Train or export an embedding");
    add_corpus(embed);
    add_repr_opts(embed);
    add_seed(embed);
    add_out(embed);

    auto* sim = app.add_subcommand("sim", "Build and save a similarity matrix");
    add_corpus(sim);
    add_repr_opts(sim);
    sim->add_option("--metric", metric_name, "cosine|euclidean|wmd");
    sim->add_option("--word-vectors", word_vectors_path, "Imported word vectors");
    sim->add_option("--sentence-vectors", sentence_vectors_path, "Imported sentence vectors");
    add_seed(sim);
    add_out(sim);

    auto* minimize = app.add_subcommand("minimize", "GA subset minimization");
    add_corpus(minimize);
    minimize->add_option("--sim-matrix", sim_matrix_path, "Cached similarity matrix")
        ->required();
    minimize->add_option("--budget", budget, "Fraction of the suite to keep")->required();
    minimize->add_option("--init", init_name, "s1|s2|s3");
    minimize->add_option("--population", ga.population_size, "Population size");
    minimize->add_option("--max-generations", ga.max_generations, "Generation cap");
    minimize->add_option("--crossover-rate", ga.crossover_rate, "Crossover probability");
    minimize->add_option("--mutation-rate", ga.mutation_rate, "Mutation probability");
    minimize->add_flag("--repair", repair, "Enable the repair operator");
    add_seed(minimize);
    add_out(minimize);

    auto* baseline = app.add_subcommand("baseline", "Baseline selection techniques");
    add_corpus(baseline);
    baseline->add_option("--kind", kind_name, "random-c|random-u|greedy")->required();
    baseline->add_option("--sim-matrix", sim_matrix_path, "Matrix (greedy only)");
    baseline->add_option("--budget", budget, "Fraction of the suite to keep")->required();
    add_seed(baseline);
    add_out(baseline);

    auto* oracle = app.add_subcommand("oracle", "Best achievable FDR at a budget");
    add_corpus(oracle);
    add_faults(oracle, true);
    oracle->add_option("--budget", budget, "Fraction of the suite to keep")->required();
    oracle->add_option("--time-cap", time_cap, "Search time cap in seconds");
    add_out(oracle);

    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
    synth->add_option("--synth-config", synth_config_path, "Key-value generator settings");
    add_seed(synth);
    add_out(synth);
    synth->add_option("--faults-out", faults_out_path, "Fault matrix output")->required();

    auto* suites = app.add_subcommand("redundancy-suites",
                                      "Generate suites at a target redundancy level");
    add_corpus(suites);
    add_faults(suites, true);
    suites->add_option("--rl", target_rl, "Target redundancy level")->required();
    suites->add_option("--count", suite_count, "Number of suites");
    suites->add_option("--tol", tolerance, "RL tolerance as a fraction of faults");
    add_seed(suites);
    add_out(suites);

    auto* eval = app.add_subcommand("eval", "Run the experiment grid");
    add_corpus(eval);
    add_faults(eval, true);
    eval->add_option("--preprocess", grid_preprocess, "Preprocessing methods");
    eval->add_option("--rep", grid_reps, "Representations");
    eval->add_option("--metric", grid_metrics, "Metrics");
    eval->add_option("--init", grid_inits, "Init strategies");
    eval->add_option("--budgets", grid_budgets, "Budget fractions");
    eval->add_option("--repeats", repeats, "Seeded repeats per cell");
    eval->add_option("--seeds", grid_seeds, "Explicit seed list");
    eval->add_option("--population", ga.population_size, "GA population size");
    eval->add_option("--max-generations", ga.max_generations, "GA generation cap");
    eval->add_flag("--oracle", include_oracle, "Include the best-FDR oracle row");
    eval->add_flag("--no-baselines", no_baselines, "Skip baseline rows");
    eval->add_option("--time-cap", time_cap, "Oracle time cap in seconds");
    add_out(eval);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            tsmin::Corpus corpus = tsmin::parse_corpus(corpus_path);
            tsmin::FaultMatrix fm;
            const bool have_faults = !faults_path.empty();
            if (have_faults) fm = tsmin::parse_fault_matrix(faults_path, corpus);
            const auto report = tsmin::validate_corpus(corpus, have_faults ? &fm : nullptr);
            for (const auto& w : report.warnings) {
                std::cerr << "warning: " << w.code << ": " << w.message << '\n';
            }
            if (!report.ok()) {
                for (const auto& e : report.errors) {
                    std::cerr << "error: " << e.code << ": " << e.message << '\n';
                }
                return 2;
            }
            tsmin::serialize_corpus(corpus, out_path);
            if (have_faults && !faults_out_path.empty()) {
                tsmin::serialize_fault_matrix(fm, corpus, faults_out_path);
            }
            std::cout << "cases=" << report.m << " requirements=" << report.n_req
                      << " faults=" << report.f_unique;
            if (report.redundancy) std::cout << " redundancy=" << *report.redundancy;
            std::cout << '\n';
        } else if (*validate) {
            tsmin::Corpus corpus = tsmin::parse_corpus(corpus_path);
            tsmin::FaultMatrix fm;
            const bool have_faults = !faults_path.empty();
            if (have_faults) fm = tsmin::parse_fault_matrix(faults_path, corpus);
            const auto report = tsmin::validate_corpus(corpus, have_faults ? &fm : nullptr);
            for (const auto& w : report.warnings) {
                std::cout << "warning: " << w.code << ": " << w.message << '\n';
            }
            for (const auto& e : report.errors) {
                std::cout << "error: " << e.code << ": " << e.message << '\n';
            }
            std::cout << "cases=" << report.m << " requirements=" << report.n_req
                      << " faults=" << report.f_unique;
            if (report.redundancy) std::cout << " redundancy=" << *report.redundancy;
            std::cout << '\n';
            if (!report.ok()) return 2;
        } else if (*embed) {
            tsmin::Corpus corpus = tsmin::parse_corpus(corpus_path);
            const auto pm = tsmin::preprocess_method_from_string(preprocess_name);
            const auto docs = preprocess_corpus(corpus, pm);
            if (rep_name == "tfidf") {
                tsmin::export_sentence_vectors(tsmin::tfidf_embed(docs), out_path);
            } else if (rep_name == "cbow") {
                cbow.seed = seed;
                tsmin::export_word_vectors(tsmin::train_cbow(docs, cbow).vectors, out_path);
            } else {
                throw tsmin::Error("UnknownRepresentation", rep_name);
            }
        } else if (*sim) {
            tsmin::Corpus corpus = tsmin::parse_corpus(corpus_path);
            const auto pm = tsmin::preprocess_method_from_string(preprocess_name);
            const auto metric = tsmin::metric_from_string(metric_name);
            cbow.seed = seed;
            const auto matrix = build_matrix(corpus, pm, rep_name, metric, cbow,
                                             word_vectors_path, sentence_vectors_path);
            tsmin::save_matrix(matrix, out_path);
        } else if (*minimize) {
            tsmin::Corpus corpus = tsmin::parse_corpus(corpus_path);
            const auto matrix = tsmin::load_matrix(sim_matrix_path);
            if (matrix.m() != corpus.m()) {
                throw tsmin::Error("SizeMismatch", "matrix size does not match corpus");
            }
            ga.budget = budget;
            ga.seed = seed;
            ga.init_strategy = tsmin::init_strategy_from_string(init_name);
            ga.repair_enabled = repair;
            const auto result = tsmin::minimize(corpus, matrix, ga);
            ordered_json echo;
            echo["budget"] = fmt17(ga.budget);
            echo["init"] = tsmin::to_string(ga.init_strategy);
            echo["seed"] = ga.seed;
            echo["population"] = ga.population_size;
            echo["crossover_rate"] = fmt17(ga.crossover_rate);
            echo["mutation_rate"] = fmt17(ga.mutation_rate);
            echo["max_generations"] = ga.max_generations;
            echo["repair"] = ga.repair_enabled;
            echo["matrix_provenance"] = matrix.provenance();
            write_selection_result(out_path, "minimize", corpus, result.best, echo,
                                   result.generations_run, &result.fitness_history);
        } else if (*baseline) {
            tsmin::Corpus corpus = tsmin::parse_corpus(corpus_path);
            const auto kind = tsmin::baseline_kind_from_string(kind_name);
            ordered_json echo;
            echo["kind"] = kind_name;
            echo["budget"] = fmt17(budget);
            echo["seed"] = seed;
            tsmin::SubsetSolution sol;
            if (kind == tsmin::BaselineKind::GREEDY_DIVERSITY) {
                if (sim_matrix_path.empty()) {
                    throw tsmin::Error("MissingMatrix", "greedy needs --sim-matrix");
                }
                const auto matrix = tsmin::load_matrix(sim_matrix_path);
                if (matrix.m() != corpus.m()) {
                    throw tsmin::Error("SizeMismatch", "matrix size does not match corpus");
                }
                echo["matrix_provenance"] = matrix.provenance();
                sol = tsmin::greedy_diversity(corpus, matrix, budget);
                sol.fitness = tsmin::fitness(sol, matrix);
                sol.fitness_set = true;
            } else {
                sol = tsmin::random_minimize(
                    corpus, budget, kind == tsmin::BaselineKind::RANDOM_CONSTRAINED, seed);
            }
            write_selection_result(out_path, "baseline", corpus, sol, echo, -1, nullptr);
        } else if (*oracle) {
            tsmin::Corpus corpus = tsmin::parse_corpus(corpus_path);
            tsmin::FaultMatrix fm = tsmin::parse_fault_matrix(faults_path, corpus);
            const auto result = tsmin::best_fdr(corpus, fm, budget, time_cap);
            ordered_json doc;
            doc["command"] = "oracle";
            doc["budget"] = fmt17(budget);
            doc["fdr"] = fmt17(result.fdr);
            doc["exact"] = result.exact;
            doc["selected_ids"] =
                std::vector<std::string>(result.subset.begin(), result.subset.end());
            write_json(doc, out_path);
        } else if (*synth) {
            tsmin::SynthConfig cfg = load_synth_config(synth_config_path);
            cfg.seed = seed;
            auto [corpus, fm] = tsmin::synth_corpus(cfg);
            tsmin::serialize_corpus(corpus, out_path);
            tsmin::serialize_fault_matrix(fm, corpus, faults_out_path);
            std::cout << "cases=" << corpus.m() << " requirements=" << corpus.n_req()
                      << " faults=" << fm.f_unique()
                      << " redundancy=" << tsmin::redundancy_level(corpus, fm) << '\n';
        } else if (*suites) {
            tsmin::Corpus corpus = tsmin::parse_corpus(corpus_path);
            tsmin::FaultMatrix fm = tsmin::parse_fault_matrix(faults_path, corpus);
            tsmin::RedundancySuiteOptions opt;
            opt.count = suite_count;
            opt.tolerance = tolerance;
            opt.seed = seed;
            const auto result = tsmin::generate_redundancy_suites(corpus, fm, target_rl, opt);
            ordered_json doc;
            doc["command"] = "redundancy-suites";
            doc["target_rl"] = fmt17(target_rl);
            doc["tolerance"] = fmt17(tolerance);
            doc["seed"] = seed;
            ordered_json arr = ordered_json::array();
            for (const auto& suite : result) {
                std::set<std::string> ids(suite.begin(), suite.end());
                ordered_json entry;
                entry["ids"] = suite;
                entry["rl"] = fmt17(tsmin::redundancy_level(corpus, fm, ids));
                arr.push_back(std::move(entry));
            }
            doc["suites"] = std::move(arr);
            write_json(doc, out_path);
        } else if (*eval) {
            tsmin::Corpus corpus = tsmin::parse_corpus(corpus_path);
            tsmin::FaultMatrix fm = tsmin::parse_fault_matrix(faults_path, corpus);
            tsmin::ExperimentConfig cfg;
            cfg.preprocessing.clear();
            for (const auto& p : grid_preprocess) {
                cfg.preprocessing.push_back(tsmin::preprocess_method_from_string(p));
            }
            cfg.representations = grid_reps;
            cfg.metrics.clear();
            for (const auto& s : grid_metrics) {
                cfg.metrics.push_back(tsmin::metric_from_string(s));
            }
            cfg.inits.clear();
            for (const auto& s : grid_inits) {
                cfg.inits.push_back(tsmin::init_strategy_from_string(s));
            }
            if (!grid_budgets.empty()) cfg.budgets = grid_budgets;
            cfg.repeats = repeats;
            cfg.seeds = grid_seeds;
            cfg.include_baselines = !no_baselines;
            cfg.include_oracle = include_oracle;
            cfg.oracle_time_cap_seconds = time_cap;
            cfg.ga = ga;
            cfg.cbow = cbow;
            cfg.output_dir = out_path;
            tsmin::run_experiment(corpus, fm, cfg);
        }
    } catch (const tsmin::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
