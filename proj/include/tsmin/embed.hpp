#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsmin/common.hpp"
#include "tsmin/preprocess.hpp"

namespace tsmin {

enum class SentenceSource { TFIDF, IMPORTED };

/// Fixed-length vector per test case. All vectors share `dim`.
struct SentenceVectors {
    int dim = 0;
    SentenceSource source = SentenceSource::TFIDF;
    std::vector<std::string> ids;                // test-case ids, corpus order
    std::vector<std::vector<double>> vectors;    // parallel to ids

    const std::vector<double>* find(const std::string& id) const;
    void rebuild_index();

private:
    std::unordered_map<std::string, std::size_t> index_;
};

/// Token -> dense vector map. All vectors share `dim`.
struct WordVectors {
    int dim = 0;
    std::vector<std::string> vocab;              // first-appearance order
    std::vector<std::vector<double>> vectors;    // parallel to vocab

    std::size_t vocab_size() const { return vocab.size(); }
    const std::vector<double>* find(const std::string& token) const;
    std::optional<std::size_t> index_of(const std::string& token) const;
    void rebuild_index();

private:
    std::unordered_map<std::string, std::size_t> index_;
};

struct CbowConfig {
    int window = 10;
    int dim = 300;
    int epochs = 50;
    int negative_samples = 5;
    double learning_rate = 0.025;  // linearly decayed over training
    std::uint64_t seed = 0;
};

struct CbowResult {
    WordVectors vectors;
    std::vector<double> epoch_loss;  // mean negative-sampling loss per epoch
};

/// TF-IDF sentence vectors: raw term count times smoothed idf
/// ln((1+N)/(1+df)) + 1, L2-normalized. Component order is first-appearance
/// order of terms across the document sequence.
SentenceVectors tfidf_embed(const std::vector<TokenizedDoc>& docs);

/// CBOW with negative sampling, single-threaded and deterministic per seed.
CbowResult train_cbow(const std::vector<TokenizedDoc>& docs, const CbowConfig& config);

/// Interchange format: first line "<count> <dim>", then one line per entry
/// "<key> <f1> ... <fdim>".
WordVectors import_word_vectors(const std::string& path);
SentenceVectors import_sentence_vectors(const std::string& path);

void export_word_vectors(const WordVectors& wv, const std::string& path);
void export_sentence_vectors(const SentenceVectors& sv, const std::string& path);

struct CoverageReport {
    std::size_t required = 0;
    std::size_t missing = 0;
    std::vector<std::string> missing_keys;
    double coverage() const {
        return required == 0 ? 1.0 : 1.0 - static_cast<double>(missing) / required;
    }
};

/// Sentence-level import is strict: every id must have a vector.
void require_sentence_coverage(const SentenceVectors& sv, const std::vector<std::string>& ids);

/// Word-level import tolerates up to 5% missing tokens; misses are reported.
CoverageReport check_token_coverage(const WordVectors& wv, const std::vector<TokenizedDoc>& docs,
                                    double min_coverage = 0.95);

}  // namespace tsmin
