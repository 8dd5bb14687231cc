#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <vector>

#include "tsmin/common.hpp"
#include "tsmin/embed.hpp"
#include "tsmin/preprocess.hpp"
#include "tsmin/similarity.hpp"

using namespace tsmin;

namespace {

WordVectors make_word_vectors(const std::vector<std::vector<double>>& vecs) {
    WordVectors wv;
    wv.dim = static_cast<int>(vecs[0].size());
    for (std::size_t i = 0; i < vecs.size(); ++i) {
        wv.vocab.push_back("w" + std::to_string(i));
        wv.vectors.push_back(vecs[i]);
    }
    wv.rebuild_index();
    return wv;
}

// Minimum-cost transport by enumerating the basic feasible solutions of the
// 3x3 transportation polytope: every vertex corresponds to a rank-5 subset of
// the 9 edges, whose flows are then uniquely determined by the row/column
// balance equations.
double transport_bruteforce_3x3(const std::vector<double>& a, const std::vector<double>& b,
                                const std::vector<std::vector<double>>& cost) {
    double best = std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < (1 << 9); ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) != 5) continue;
        std::vector<int> edges;
        for (int e = 0; e < 9; ++e) {
            if (mask & (1 << e)) edges.push_back(e);
        }
        // 6 balance equations (3 supplies + 3 demands) over 5 unknown flows.
        double A[6][6] = {};
        for (int c = 0; c < 5; ++c) {
            const int i = edges[c] / 3, j = edges[c] % 3;
            A[i][c] = 1.0;
            A[3 + j][c] = 1.0;
        }
        for (int i = 0; i < 3; ++i) A[i][5] = a[i];
        for (int j = 0; j < 3; ++j) A[3 + j][5] = b[j];

        // Gaussian elimination with partial pivoting.
        int rank = 0;
        for (int col = 0; col < 5 && rank < 6; ++col) {
            int piv = -1;
            double mag = 1e-9;
            for (int r = rank; r < 6; ++r) {
                if (std::fabs(A[r][col]) > mag) mag = std::fabs(A[r][col]), piv = r;
            }
            if (piv < 0) continue;
            for (int c = 0; c <= 5; ++c) std::swap(A[rank][c], A[piv][c]);
            for (int r = 0; r < 6; ++r) {
                if (r == rank || A[r][col] == 0.0) continue;
                const double f = A[r][col] / A[rank][col];
                for (int c = col; c <= 5; ++c) A[r][c] -= f * A[rank][c];
            }
            ++rank;
        }
        if (rank < 5) continue;  // dependent edge set (contains a cycle)
        bool consistent = true;
        for (int r = rank; r < 6; ++r) {
            if (std::fabs(A[r][5]) > 1e-9) consistent = false;
        }
        if (!consistent) continue;
        double flow[5];
        bool feasible = true;
        for (int r = 0; r < 5; ++r) {
            int lead = -1;
            for (int c = 0; c < 5; ++c) {
                if (std::fabs(A[r][c]) > 1e-9) {
                    lead = c;
                    break;
                }
            }
            if (lead < 0) {
                feasible = false;
                break;
            }
            flow[lead] = A[r][5] / A[r][lead];
            if (flow[lead] < -1e-9) feasible = false;
        }
        if (!feasible) continue;
        double total = 0.0;
        for (int c = 0; c < 5; ++c) {
            total += flow[c] * cost[edges[c] / 3][edges[c] % 3];
        }
        best = std::min(best, total);
    }
    return best;
}

}  // namespace

TEST_CASE("cosine matches hand values") {
    const std::vector<double> u = {1, 2, 3};
    const std::vector<double> v = {4, 5, 6};
    // 32 / (sqrt(14) * sqrt(77))
    CHECK(cosine(u, v) == doctest::Approx(0.9746318461970762).epsilon(1e-12));
    CHECK(cosine(u, u) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) ==
          doctest::Approx(0.0).epsilon(1e-12));
    try {
        cosine(u, std::vector<double>{0, 0, 0});
        FAIL("expected ZeroVector");
    } catch (const Error& e) {
        CHECK(e.code() == "ZeroVector");
    }
}

TEST_CASE("euclidean matches hand values") {
    CHECK(euclidean(std::vector<double>{0, 0}, std::vector<double>{3, 4}) ==
          doctest::Approx(5.0).epsilon(1e-12));
    CHECK(euclidean(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(euclidean(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("wmd of identical distributions is zero") {
    WordVectors wv = make_word_vectors({{1, 0}, {0, 1}, {0.5, 0.5}});
    BowDistribution d;
    d.tokens = {0, 1, 2};
    d.weights = {0.2, 0.3, 0.5};
    CHECK(wmd(d, d, wv) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("wmd between single-word documents is the vector distance") {
    WordVectors wv = make_word_vectors({{0, 0, 0}, {3, 4, 0}});
    BowDistribution a, b;
    a.tokens = {0};
    a.weights = {1.0};
    b.tokens = {1};
    b.weights = {1.0};
    CHECK(wmd(a, b, wv) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(wmd(b, a, wv) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("wmd equals brute-force transport enumeration on random 3x3 instances") {
    Rng rng(404);
    for (int t = 0; t < 50; ++t) {
        std::vector<std::vector<double>> vecs;
        for (int i = 0; i < 6; ++i) {
            vecs.push_back({rng.uniform_real(-1, 1), rng.uniform_real(-1, 1),
                            rng.uniform_real(-1, 1), rng.uniform_real(-1, 1)});
        }
        WordVectors wv = make_word_vectors(vecs);
        auto draw_weights = [&] {
            std::vector<double> w = {rng.uniform_real(0.05, 1), rng.uniform_real(0.05, 1),
                                     rng.uniform_real(0.05, 1)};
            const double s = w[0] + w[1] + w[2];
            for (auto& x : w) x /= s;
            return w;
        };
        BowDistribution a, b;
        a.tokens = {0, 1, 2};
        a.weights = draw_weights();
        b.tokens = {3, 4, 5};
        b.weights = draw_weights();

        std::vector<std::vector<double>> cost(3, std::vector<double>(3));
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) cost[i][j] = euclidean(vecs[i], vecs[3 + j]);
        }
        const double expected = transport_bruteforce_3x3(a.weights, b.weights, cost);
        CHECK(wmd(a, b, wv) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("bow_distribution drops out-of-vocabulary tokens and renormalizes") {
    WordVectors wv = make_word_vectors({{1, 0}, {0, 1}});
    TokenizedDoc doc;
    doc.tokens = {"w0", "w0", "w1", "unknown"};
    BowDistribution d = bow_distribution(doc, wv);
    REQUIRE(d.tokens.size() == 2);
    CHECK(d.weights[0] + d.weights[1] == doctest::Approx(1.0).epsilon(1e-12));
    // w0 appears twice as often as w1.
    CHECK(d.weights[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("normalize_scores maps extremes to 0 and 1 and flips distances") {
    // Raw similarities for m=3: pairs (0,1)=0.2, (0,2)=0.8, (1,2)=0.5.
    std::vector<double> raw = {0, 0.2, 0.8, 0.2, 0, 0.5, 0.8, 0.5, 0};
    SimilarityMatrix sim = normalize_scores(raw, 3, ScoreKind::SIMILARITY, Metric::COSINE, "t");
    CHECK(sim.at(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sim.at(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sim.at(1, 2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sim.at(0, 0) == 1.0);

    SimilarityMatrix dist = normalize_scores(raw, 3, ScoreKind::DISTANCE, Metric::EUCLIDEAN, "t");
    CHECK(dist.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist.at(0, 2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dist.at(1, 2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("normalize_scores is invariant to positive affine raw rescaling") {
    Rng rng(7);
    std::vector<double> raw(5 * 5, 0.0), scaled(5 * 5, 0.0);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = i + 1; j < 5; ++j) {
            const double v = rng.uniform_real();
            raw[i * 5 + j] = raw[j * 5 + i] = v;
            scaled[i * 5 + j] = scaled[j * 5 + i] = 3.5 * v + 2.0;
        }
    }
    SimilarityMatrix s1 = normalize_scores(raw, 5, ScoreKind::SIMILARITY, Metric::COSINE, "t");
    SimilarityMatrix s2 = normalize_scores(scaled, 5, ScoreKind::SIMILARITY, Metric::COSINE, "t");
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(s1.at(i, j) == doctest::Approx(s2.at(i, j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("normalize_scores maps a constant raw matrix to zero similarity") {
    std::vector<double> raw(4 * 4, 0.7);
    SimilarityMatrix sim = normalize_scores(raw, 4, ScoreKind::SIMILARITY, Metric::COSINE, "t");
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(sim.at(i, j) == (i == j ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("build_similarity_matrix rejects incompatible representations") {
    std::vector<std::string> ids = {"TC1", "TC2"};
    Representation repr;  // nothing provided
    try {
        build_similarity_matrix(ids, repr, Metric::COSINE, "t");
        FAIL("expected IncompatibleMetric");
    } catch (const Error& e) {
        CHECK(e.code() == "IncompatibleMetric");
    }
    try {
        build_similarity_matrix(ids, repr, Metric::WMD, "t");
        FAIL("expected IncompatibleMetric");
    } catch (const Error& e) {
        CHECK(e.code() == "IncompatibleMetric");
    }
}

TEST_CASE("build_similarity_matrix agrees with per-pair recomputation") {
    std::vector<TokenizedDoc> docs;
    const std::vector<std::string> texts = {"set signal alpha", "set signal beta",
                                            "check response gamma", "send request delta"};
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        docs.push_back(preprocess(texts[i], PreprocessMethod::PM1, "TC" + std::to_string(i)));
        ids.push_back(docs.back().test_case_id);
    }
    SentenceVectors sv = tfidf_embed(docs);
    Representation repr;
    repr.sentence = &sv;
    SimilarityMatrix sim = build_similarity_matrix(ids, repr, Metric::COSINE, "t");

    const std::size_t m = ids.size();
    std::vector<double> raw(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            raw[i * m + j] = raw[j * m + i] = cosine(sv.vectors[i], sv.vectors[j]);
        }
    }
    SimilarityMatrix ref = normalize_scores(raw, m, ScoreKind::SIMILARITY, Metric::COSINE, "t");
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            CHECK(sim.at(i, j) == doctest::Approx(ref.at(i, j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("save_matrix then load_matrix preserves values and provenance") {
    Rng rng(11);
    SimilarityMatrix sim(6, Metric::WMD, "pm2 cbow wmd");
    for (std::size_t i = 0; i < 6; ++i) {
        sim.set(i, i, 1.0);
        for (std::size_t j = i + 1; j < 6; ++j) sim.set(i, j, rng.uniform_real());
    }
    const auto path =
        (std::filesystem::temp_directory_path() / "tsmin_matrix_roundtrip.txt").string();
    save_matrix(sim, path);
    SimilarityMatrix in = load_matrix(path);
    CHECK(in.m() == 6);
    CHECK(in.metric() == Metric::WMD);
    CHECK(in.provenance() == "pm2 cbow wmd");
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) CHECK(in.at(i, j) == sim.at(i, j));
    }
}

TEST_CASE("submatrix keeps the selected rows and columns in order") {
    SimilarityMatrix sim(4, Metric::COSINE, "t");
    for (std::size_t i = 0; i < 4; ++i) {
        sim.set(i, i, 1.0);
        for (std::size_t j = i + 1; j < 4; ++j) sim.set(i, j, 0.1 * static_cast<double>(i + j));
    }
    const std::vector<std::size_t> keep = {0, 2, 3};
    SimilarityMatrix sub = sim.submatrix(keep);
    REQUIRE(sub.m() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) CHECK(sub.at(i, j) == sim.at(keep[i], keep[j]));
    }
}
