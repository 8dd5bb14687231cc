// Acceptance checks: one pass/fail line per criterion, non-zero exit when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <tuple>
#include <vector>

#include "tsmin/baselines.hpp"
#include "tsmin/corpus.hpp"
#include "tsmin/embed.hpp"
#include "tsmin/metrics.hpp"
#include "tsmin/minimizer.hpp"
#include "tsmin/oracle.hpp"
#include "tsmin/preprocess.hpp"
#include "tsmin/similarity.hpp"

using namespace tsmin;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s — %s\n", criterion, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void run(int criterion, const std::function<std::pair<bool, std::string>()>& body) {
    try {
        auto [pass, detail] = body();
        report(criterion, pass, detail);
    } catch (const std::exception& e) {
        report(criterion, false, std::string("exception: ") + e.what());
    }
}

SimilarityMatrix random_matrix(std::size_t m, Rng& rng) {
    SimilarityMatrix sim(m, Metric::COSINE, "random");
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) sim.set(i, j, rng.uniform_real());
    }
    return sim;
}

SimilarityMatrix tfidf_cosine_matrix(const Corpus& corpus) {
    std::vector<TokenizedDoc> docs;
    std::vector<std::string> ids;
    for (const auto& tc : corpus.test_cases) {
        docs.push_back(preprocess(tc.raw_text(), PreprocessMethod::PM1, tc.id));
        ids.push_back(tc.id);
    }
    const SentenceVectors sv = tfidf_embed(docs);
    Representation repr;
    repr.sentence = &sv;
    return build_similarity_matrix(ids, repr, Metric::COSINE, "tfidf+pm1");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// --- criterion 1: budget exactness and full coverage over 1000 runs -------

std::pair<bool, std::string> criterion1() {
    Rng rng(11);
    const std::size_t sizes[] = {50, 96, 150, 222, 300, 391, 480, 555, 640, 736};
    int runs = 0, bad = 0;
    for (std::size_t m : sizes) {
        SynthConfig cfg;
        cfg.n_req = 5 + m / 40;
        cfg.total_cases = m;
        cfg.n_faults = 10;
        cfg.target_rl = 3.0;
        Corpus corpus;
        FaultMatrix faults;
        for (int attempt = 0;; ++attempt) {
            cfg.seed = rng.next_u64();
            try {
                std::tie(corpus, faults) = synth_corpus(cfg);
                break;
            } catch (const Error&) {
                if (attempt >= 200) throw;
            }
        }
        const SimilarityMatrix sim = random_matrix(m, rng);
        for (int r = 0; r < 100; ++r) {
            const double min_b = (static_cast<double>(cfg.n_req) + 0.5) / m;
            GaConfig ga;
            ga.budget = rng.uniform_real(min_b, 1.0);
            ga.population_size = 20;
            ga.max_generations = 6;
            ga.seed = rng.next_u64();
            ga.init_strategy = static_cast<InitStrategy>(r % 3);
            const auto result = minimize(corpus, sim, ga);
            ++runs;
            const int k = budget_size(m, ga.budget);
            if (result.best.selected_count != k || !result.best.valid ||
                !covers_all_requirements(result.best.bits, corpus)) {
                ++bad;
            }
        }
    }
    std::ostringstream os;
    os << runs << " runs, " << bad << " constraint violations";
    return {runs == 1000 && bad == 0, os.str()};
}

// --- criterion 2: fitness against a direct evaluation oracle --------------

std::pair<bool, std::string> criterion2() {
    Rng rng(22);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const std::size_t m = 2 + rng.uniform_index(29);
        const SimilarityMatrix sim = random_matrix(m, rng);
        SubsetSolution sol;
        sol.bits.assign(m, 0);
        for (std::size_t i = 0; i < m; ++i) {
            if (rng.bernoulli(0.5)) {
                sol.bits[i] = 1;
                ++sol.selected_count;
            }
        }
        if (sol.selected_count == 0) {
            sol.bits[rng.uniform_index(m)] = 1;
            sol.selected_count = 1;
        }
        // Direct re-evaluation: mean over selected cases of the squared
        // maximum similarity to any other selected case.
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (!sol.bits[i]) continue;
            double mx = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                if (j != i && sol.bits[j]) mx = std::max(mx, sim.at(i, j));
            }
            acc += mx * mx;
        }
        acc /= sol.selected_count;
        worst = std::max(worst, std::abs(acc - fitness(sol, sim)));
    }
    std::ostringstream os;
    os << "max |direct - fitness()| = " << worst;
    return {worst <= 1e-12, os.str()};
}

// --- criterion 3: exhaustive oracles on desk-size instances ---------------

std::pair<bool, std::string> criterion3() {
    Rng rng(33);
    int optimum_hits = 0, beats = 0, oracle_mismatches = 0;
    const int instances = 100;
    for (int t = 0; t < instances; ++t) {
        SynthConfig cfg;
        cfg.n_req = 2 + rng.uniform_index(3);
        cfg.total_cases = 8 + rng.uniform_index(5);  // m in 8..12
        cfg.n_faults = 6;
        cfg.target_rl = 2.0;
        cfg.clone_rate = 0.3;
        // Tiny instances cannot always realize the redundancy target; redraw
        // the seed until the generator succeeds.
        Corpus corpus;
        FaultMatrix faults;
        for (int attempt = 0;; ++attempt) {
            cfg.seed = rng.next_u64();
            try {
                std::tie(corpus, faults) = synth_corpus(cfg);
                break;
            } catch (const Error&) {
                if (attempt >= 200) throw;
            }
        }
        const std::size_t m = corpus.m();
        const SimilarityMatrix sim = random_matrix(m, rng);
        const double min_b = (static_cast<double>(cfg.n_req) + 0.5) / m;
        const double budget = rng.uniform_real(min_b, 0.9);
        const int k = budget_size(m, budget);

        // Exhaustive enumeration over all C(m, k) subsets.
        double best_fit = std::numeric_limits<double>::infinity();
        std::size_t best_faults = 0;
        bool any_valid = false;
        std::vector<std::string> all_ids;
        for (const auto& tc : corpus.test_cases) all_ids.push_back(tc.id);
        std::vector<std::uint8_t> bits(m, 0);
        std::function<void(std::size_t, int)> enumerate = [&](std::size_t idx, int left) {
            if (left == 0) {
                if (!covers_all_requirements(bits, corpus)) return;
                any_valid = true;
                SubsetSolution s;
                s.bits = bits;
                s.selected_count = k;
                best_fit = std::min(best_fit, fitness(s, sim));
                std::vector<std::string> ids;
                for (std::size_t i = 0; i < m; ++i) {
                    if (bits[i]) ids.push_back(all_ids[i]);
                }
                best_faults = std::max(best_faults, detected_faults(ids, faults).size());
                return;
            }
            if (idx >= m || m - idx < static_cast<std::size_t>(left)) return;
            bits[idx] = 1;
            enumerate(idx + 1, left - 1);
            bits[idx] = 0;
            enumerate(idx + 1, left);
        };
        enumerate(0, k);
        if (!any_valid) continue;

        GaConfig ga;
        ga.budget = budget;
        ga.max_generations = 200;
        ga.convergence_epsilon = 0.0;  // always run the full 200 generations
        ga.seed = rng.next_u64();
        const auto result = minimize(corpus, sim, ga);
        if (result.best.fitness < best_fit - 1e-9) ++beats;
        if (result.best.fitness <= best_fit + 1e-9) ++optimum_hits;

        const auto orc = best_fdr(corpus, faults, budget);
        const auto total = detected_faults(all_ids, faults).size();
        const double expected = static_cast<double>(best_faults) / total;
        if (!orc.exact || std::abs(orc.fdr - expected) > 1e-12) ++oracle_mismatches;
    }
    std::ostringstream os;
    os << "GA optimum hits " << optimum_hits << "/" << instances << ", beats " << beats
       << ", best_fdr mismatches " << oracle_mismatches;
    return {optimum_hits >= 95 && beats == 0 && oracle_mismatches == 0, os.str()};
}

// --- criterion 4: metric axioms -------------------------------------------

std::pair<bool, std::string> criterion4() {
    Rng rng(44);
    WordVectors wv;
    wv.dim = 4;
    for (int i = 0; i < 10; ++i) {
        wv.vocab.push_back("w" + std::to_string(i));
        std::vector<double> v(4);
        for (auto& x : v) x = rng.uniform_real(-1.0, 1.0);
        wv.vectors.push_back(std::move(v));
    }
    wv.rebuild_index();
    auto random_dist = [&]() {
        BowDistribution d;
        const std::size_t n = 2 + rng.uniform_index(4);
        std::vector<int> pool(10);
        std::iota(pool.begin(), pool.end(), 0);
        rng.shuffle(pool);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d.tokens.push_back(pool[i]);
            d.weights.push_back(0.1 + rng.uniform_real());
            total += d.weights.back();
        }
        for (auto& w : d.weights) w /= total;
        return d;
    };
    double worst_sym = 0.0, worst_id = 0.0, worst_tri = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const auto a = random_dist();
        const auto b = random_dist();
        const auto c = random_dist();
        const double ab = wmd(a, b, wv);
        const double ba = wmd(b, a, wv);
        const double bc = wmd(b, c, wv);
        const double ac = wmd(a, c, wv);
        worst_sym = std::max(worst_sym, std::abs(ab - ba));
        worst_id = std::max(worst_id, wmd(a, a, wv));
        worst_tri = std::max(worst_tri, ac - (ab + bc));
    }
    double worst_cos = 0.0, worst_euc = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const std::size_t dim = 2 + rng.uniform_index(15);
        std::vector<double> u(dim), v(dim);
        for (auto& x : u) x = rng.uniform_real(0.1, 2.0);
        for (auto& x : v) x = rng.uniform_real(0.1, 2.0);
        long double dot = 0, nu = 0, nv = 0, dd = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            dot += static_cast<long double>(u[i]) * v[i];
            nu += static_cast<long double>(u[i]) * u[i];
            nv += static_cast<long double>(v[i]) * v[i];
            const long double diff = static_cast<long double>(u[i]) - v[i];
            dd += diff * diff;
        }
        worst_cos = std::max(
            worst_cos, std::abs(cosine(u, v) - static_cast<double>(
                                                   dot / (std::sqrt(nu) * std::sqrt(nv)))));
        worst_euc = std::max(
            worst_euc, std::abs(euclidean(u, v) - static_cast<double>(std::sqrt(dd))));
    }
    std::ostringstream os;
    os << "wmd sym " << worst_sym << " id " << worst_id << " tri " << worst_tri << " cos "
       << worst_cos << " euc " << worst_euc;
    return {worst_sym <= 1e-9 && worst_id <= 1e-9 && worst_tri <= 1e-9 &&
                worst_cos <= 1e-12 && worst_euc <= 1e-12,
            os.str()};
}

// --- mirrored corpus shared by criteria 5-7 -------------------------------

struct Mirror {
    Corpus corpus;
    FaultMatrix faults;
    SimilarityMatrix sim;
};

Mirror& mirror() {
    static Mirror m = [] {
        SynthConfig cfg;
        cfg.seed = 1;
        auto [corpus, faults] = synth_corpus(cfg);
        SimilarityMatrix sim = tfidf_cosine_matrix(corpus);
        return Mirror{std::move(corpus), std::move(faults), std::move(sim)};
    }();
    return m;
}

// --- criterion 5: qualitative budget-sweep ordering -----------------------

std::pair<bool, std::string> criterion5() {
    auto& mir = mirror();
    const double rl = redundancy_level(mir.corpus, mir.faults);
    if (std::abs(rl - 11.86) > 0.05 * 11.86) {
        return {false, "mirror corpus redundancy off target: " + fmt(rl)};
    }
    bool ordered = true;
    double min_gap_45 = 1.0;
    std::ostringstream os;
    for (double budget : {0.3, 0.4, 0.5, 0.6}) {
        double ga = 0, rc = 0, ru = 0;
        for (int s = 1; s <= 10; ++s) {
            GaConfig cfg;
            cfg.budget = budget;
            cfg.seed = static_cast<std::uint64_t>(s);
            ga += fdr(minimize(mir.corpus, mir.sim, cfg).best.selected_ids(mir.corpus),
                      mir.faults, mir.corpus);
            rc += fdr(random_minimize(mir.corpus, budget, true, s).selected_ids(mir.corpus),
                      mir.faults, mir.corpus);
            ru += fdr(random_minimize(mir.corpus, budget, false, s).selected_ids(mir.corpus),
                      mir.faults, mir.corpus);
        }
        ga /= 10;
        rc /= 10;
        ru /= 10;
        if (!(ga > rc && rc > ru)) ordered = false;
        if (budget > 0.35 && budget < 0.55) {
            min_gap_45 = std::min(min_gap_45, ga - std::max(rc, ru));
        }
        os << " b=" << fmt(budget) << " [" << fmt(ga) << "/" << fmt(rc) << "/" << fmt(ru)
           << "]";
    }
    std::ostringstream head;
    head << "rl=" << fmt(rl) << " ordering " << (ordered ? "ok" : "violated")
         << ", min gap at 40-50% = " << fmt(min_gap_45) << ";" << os.str();
    return {ordered && min_gap_45 >= 0.05, head.str()};
}

// --- criterion 6: redundancy-level sweep ----------------------------------

std::pair<bool, std::string> criterion6() {
    auto& mir = mirror();
    const std::vector<double> levels = {4.5, 6.5, 8.5, 10.5};
    const std::vector<double> budgets = {0.3, 0.4, 0.5};
    // mean_fdr[technique][level][budget]
    double mean_fdr[3][4][3] = {};
    for (std::size_t li = 0; li < levels.size(); ++li) {
        RedundancySuiteOptions opt;
        opt.seed = 2;
        opt.min_size = 180;
        const auto suites = generate_redundancy_suites(mir.corpus, mir.faults, levels[li], opt);
        for (std::size_t si = 0; si < suites.size(); ++si) {
            Corpus sub;
            sub.requirements = mir.corpus.requirements;
            for (const auto& id : suites[si]) {
                sub.test_cases.push_back(mir.corpus.test_cases[*mir.corpus.case_index(id)]);
            }
            sub.rebuild_indexes();
            const SimilarityMatrix sub_sim = tfidf_cosine_matrix(sub);
            for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
                GaConfig cfg;
                cfg.budget = budgets[bi];
                cfg.seed = si + 1;
                mean_fdr[0][li][bi] +=
                    fdr(minimize(sub, sub_sim, cfg).best.selected_ids(sub), mir.faults, sub);
                mean_fdr[1][li][bi] += fdr(
                    random_minimize(sub, budgets[bi], true, si + 1).selected_ids(sub),
                    mir.faults, sub);
                mean_fdr[2][li][bi] += fdr(
                    random_minimize(sub, budgets[bi], false, si + 1).selected_ids(sub),
                    mir.faults, sub);
            }
        }
        for (int t = 0; t < 3; ++t) {
            for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
                mean_fdr[t][li][bi] /= static_cast<double>(suites.size());
            }
        }
    }
    int monotone_violations = 0;
    for (int t = 0; t < 3; ++t) {
        for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
            for (std::size_t li = 1; li < levels.size(); ++li) {
                if (mean_fdr[t][li][bi] < mean_fdr[t][li - 1][bi] - 0.02) {
                    ++monotone_violations;
                }
            }
        }
    }
    int dominated = 0;
    const int cells = static_cast<int>(levels.size() * budgets.size());
    for (std::size_t li = 0; li < levels.size(); ++li) {
        for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
            if (mean_fdr[0][li][bi] >= mean_fdr[1][li][bi] &&
                mean_fdr[0][li][bi] >= mean_fdr[2][li][bi]) {
                ++dominated;
            }
        }
    }
    std::ostringstream os;
    os << "monotone violations " << monotone_violations << ", dominance " << dominated << "/"
       << cells;
    return {monotone_violations == 0 && dominated * 10 >= cells * 9, os.str()};
}

// --- criterion 7: adequate scenario ---------------------------------------

std::pair<bool, std::string> criterion7() {
    auto& mir = mirror();
    const double budget =
        static_cast<double>(mir.corpus.n_req()) / static_cast<double>(mir.corpus.m());
    bool always_covering = true;
    for (int s = 1; s <= 5; ++s) {
        GaConfig cfg;
        cfg.budget = budget;
        cfg.seed = static_cast<std::uint64_t>(s);
        const auto res = minimize(mir.corpus, mir.sim, cfg);
        if (coverage(res.best.selected_ids(mir.corpus), mir.corpus) != 1.0) {
            always_covering = false;
        }
    }
    double mean_cov = 0.0;
    for (int s = 1; s <= 1000; ++s) {
        mean_cov += coverage(
            random_minimize(mir.corpus, budget, false, s).selected_ids(mir.corpus),
            mir.corpus);
    }
    mean_cov /= 1000;
    std::ostringstream os;
    os << "rtm coverage " << (always_covering ? "1.0" : "<1.0")
       << ", random-u mean coverage " << fmt(mean_cov);
    return {always_covering && mean_cov < 0.6, os.str()};
}

// --- criterion 8: CLI determinism -----------------------------------------

bool same_bytes(const std::filesystem::path& a, const std::filesystem::path& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) return false;
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    return sa.str() == sb.str();
}

std::pair<bool, std::string> criterion8() {
    namespace fs = std::filesystem;
    const std::string cli = TSMIN_CLI_PATH;
    const fs::path dir = fs::temp_directory_path() / "tsmin_accept8";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto sh = [&](const std::string& cmd) {
        const std::string full = cli + " " + cmd + " > /dev/null 2>&1";
        return std::system(full.c_str()) == 0;
    };
    const std::string corpus = (dir / "c.jsonl").string();
    const std::string faults = (dir / "f.jsonl").string();
    std::ofstream(dir / "synth.cfg") << "n_req=8\ntotal_cases=60\nn_faults=25\n"
                                     << "target_rl=3.5\n";
    std::vector<std::string> cmds = {
        "synth --synth-config " + (dir / "synth.cfg").string() + " --seed 5 --out " + corpus +
            " --faults-out " + faults,
        "embed --corpus " + corpus +
            " --preprocess pm2 --rep cbow --cbow-dim 16 --cbow-epochs 3 --seed 3 --out " +
            (dir / "wv.txt").string(),
        "sim --corpus " + corpus + " --preprocess pm2 --rep tfidf --metric cosine --out " +
            (dir / "m.mat").string(),
        "minimize --corpus " + corpus + " --sim-matrix " + (dir / "m.mat").string() +
            " --budget 0.5 --init s3 --seed 7 --out " + (dir / "min.json").string(),
        "baseline --corpus " + corpus + " --kind random-c --budget 0.5 --seed 9 --out " +
            (dir / "rc.json").string(),
        "oracle --corpus " + corpus + " --faults " + faults +
            " --budget 0.4 --time-cap 5 --out " + (dir / "orc.json").string(),
        "redundancy-suites --corpus " + corpus + " --faults " + faults +
            " --rl 3.5 --count 3 --tol 0.2 --seed 4 --out " + (dir / "suites.json").string(),
        "eval --corpus " + corpus + " --faults " + faults +
            " --budgets 0.5 --repeats 2 --max-generations 5 --out " +
            (dir / "evalout").string(),
    };
    std::vector<std::string> outputs = {
        corpus,
        faults,
        (dir / "wv.txt").string(),
        (dir / "m.mat").string(),
        (dir / "min.json").string(),
        (dir / "rc.json").string(),
        (dir / "orc.json").string(),
        (dir / "suites.json").string(),
        (dir / "evalout/runs.csv").string(),
        (dir / "evalout/summary.csv").string(),
    };
    for (const auto& c : cmds) {
        if (!sh(c)) return {false, "command failed: " + c.substr(0, c.find(' '))};
    }
    const fs::path keep = dir / "first";
    fs::create_directories(keep);
    std::vector<fs::path> saved;
    for (const auto& o : outputs) {
        const fs::path dst = keep / fs::path(o).filename();
        fs::copy_file(o, dst, fs::copy_options::overwrite_existing);
        saved.push_back(dst);
    }
    for (const auto& c : cmds) {
        if (!sh(c)) return {false, "rerun failed: " + c.substr(0, c.find(' '))};
    }
    int mismatches = 0;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (!same_bytes(outputs[i], saved[i])) {
            ++mismatches;
            std::cerr << "non-deterministic: " << outputs[i] << '\n';
        }
    }
    std::ostringstream os;
    os << outputs.size() << " result files compared, " << mismatches << " mismatches";
    return {mismatches == 0, os.str()};
}

// --- criterion 9: operator invariants -------------------------------------

std::pair<bool, std::string> criterion9() {
    Rng rng(99);
    int bad = 0;
    for (int t = 0; t < 100000; ++t) {
        const std::size_t m = 4 + rng.uniform_index(40);
        const int k = 1 + static_cast<int>(rng.uniform_index(m));
        auto make = [&]() {
            SubsetSolution s;
            s.bits.assign(m, 0);
            std::vector<std::size_t> idx(m);
            std::iota(idx.begin(), idx.end(), 0);
            rng.shuffle(idx);
            for (int i = 0; i < k; ++i) s.bits[idx[i]] = 1;
            s.selected_count = k;
            return s;
        };
        const SubsetSolution p1 = make();
        const SubsetSolution p2 = make();
        const SubsetSolution child = crossover(p1, p2, rng, 0.9);
        if (child.selected_count != k ||
            std::accumulate(child.bits.begin(), child.bits.end(), 0) != k) {
            ++bad;
        }
        SubsetSolution mut = make();
        const auto before = mut.bits;
        mutate(mut, rng, 0.5);
        auto sorted_before = before;
        auto sorted_after = mut.bits;
        std::sort(sorted_before.begin(), sorted_before.end());
        std::sort(sorted_after.begin(), sorted_after.end());
        if (mut.selected_count != k || sorted_before != sorted_after) ++bad;
    }
    std::ostringstream os;
    os << "100000 crossover+mutation applications, " << bad << " invariant violations";
    return {bad == 0, os.str()};
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    run(1, criterion1);
    run(2, criterion2);
    run(3, criterion3);
    run(4, criterion4);
    run(5, criterion5);
    run(6, criterion6);
    run(7, criterion7);
    run(8, criterion8);
    run(9, criterion9);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d of 9 criteria passed in %.1f s\n", 9 - failures, secs);
    return failures == 0 ? 0 : 1;
}
