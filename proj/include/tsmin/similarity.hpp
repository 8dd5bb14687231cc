#pragma once

#include <span>
#include <string>
#include <vector>

#include "tsmin/common.hpp"
#include "tsmin/embed.hpp"
#include "tsmin/preprocess.hpp"

namespace tsmin {

enum class Metric { COSINE, EUCLIDEAN, WMD };

Metric metric_from_string(const std::string& name);
std::string to_string(Metric metric);

/// Symmetric m×m matrix of normalized similarities in [0,1], diagonal 1.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    SimilarityMatrix(std::size_t m, Metric metric, std::string provenance);

    std::size_t m() const { return m_; }
    Metric metric() const { return metric_; }
    const std::string& provenance() const { return provenance_; }

    double at(std::size_t i, std::size_t j) const { return values_[i * m_ + j]; }
    void set(std::size_t i, std::size_t j, double v) {
        values_[i * m_ + j] = v;
        values_[j * m_ + i] = v;
    }

    /// Submatrix restricted to the given row/column indices, in order.
    SimilarityMatrix submatrix(std::span<const std::size_t> indices) const;

private:
    std::size_t m_ = 0;
    Metric metric_ = Metric::COSINE;
    std::string provenance_;
    std::vector<double> values_;
};

/// Normalized bag-of-words over word-vector vocabulary indices.
struct BowDistribution {
    std::vector<int> tokens;      // vocabulary indices, unique
    std::vector<double> weights;  // non-negative, sums to 1

    bool empty() const { return tokens.empty(); }
};

/// dot(u,v)/(|u||v|). Throws Error("ZeroVector") on a zero operand.
double cosine(std::span<const double> u, std::span<const double> v);

/// |u - v|_2.
double euclidean(std::span<const double> u, std::span<const double> v);

/// Build a distribution from a tokenized document, dropping tokens absent
/// from the word-vector vocabulary and renormalizing the remainder.
BowDistribution bow_distribution(const TokenizedDoc& doc, const WordVectors& wv);

/// Exact Word Mover's Distance: minimum-cost transport between the two
/// weight distributions with Euclidean ground cost between word vectors.
/// Throws Error("EmptyDistribution") when an operand is empty.
double wmd(const BowDistribution& a, const BowDistribution& b, const WordVectors& wv);

enum class ScoreKind { SIMILARITY, DISTANCE };

/// Min-max normalization of the off-diagonal entries; distances are flipped
/// (1 - scaled) so that higher always means more similar. A constant raw
/// matrix maps to all-zero off-diagonals. Diagonal is pinned to 1.
SimilarityMatrix normalize_scores(const std::vector<double>& raw, std::size_t m, ScoreKind kind,
                                  Metric metric, std::string provenance);

/// Embedding inputs for matrix construction. Exactly one representation
/// level must be compatible with the requested metric: sentence vectors for
/// cosine/Euclidean, word vectors plus tokenized docs for WMD.
struct Representation {
    const SentenceVectors* sentence = nullptr;
    const WordVectors* word = nullptr;
    const std::vector<TokenizedDoc>* docs = nullptr;
};

SimilarityMatrix build_similarity_matrix(const std::vector<std::string>& case_ids,
                                         const Representation& repr, Metric metric,
                                         const std::string& provenance);

void save_matrix(const SimilarityMatrix& sim, const std::string& path);
SimilarityMatrix load_matrix(const std::string& path);

}  // namespace tsmin
