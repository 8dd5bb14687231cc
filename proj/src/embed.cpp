#include "tsmin/embed.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace tsmin {

const std::vector<double>* SentenceVectors::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &vectors[it->second];
}

void SentenceVectors::rebuild_index() {
    index_.clear();
    for (std::size_t i = 0; i < ids.size(); ++i) index_[ids[i]] = i;
}

const std::vector<double>* WordVectors::find(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? nullptr : &vectors[it->second];
}

std::optional<std::size_t> WordVectors::index_of(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void WordVectors::rebuild_index() {
    index_.clear();
    for (std::size_t i = 0; i < vocab.size(); ++i) index_[vocab[i]] = i;
}

SentenceVectors tfidf_embed(const std::vector<TokenizedDoc>& docs) {
    if (docs.size() < 2) throw Error("TooFewDocuments", "tfidf requires >= 2 documents");

    // Vocabulary in first-appearance order keeps component order deterministic.
    std::vector<std::string> vocab;
    std::unordered_map<std::string, std::size_t> vocab_index;
    std::vector<std::size_t> df;
    for (const auto& doc : docs) {
        std::unordered_set<std::string> seen;
        for (const auto& t : doc.tokens) {
            auto [it, inserted] = vocab_index.try_emplace(t, vocab.size());
            if (inserted) {
                vocab.push_back(t);
                df.push_back(0);
            }
            if (seen.insert(t).second) ++df[it->second];
        }
    }
    if (vocab.empty()) throw Error("EmptyVocabulary", "no tokens across documents");

    const double n_docs = static_cast<double>(docs.size());
    std::vector<double> idf(vocab.size());
    for (std::size_t w = 0; w < vocab.size(); ++w) {
        idf[w] = std::log((1.0 + n_docs) / (1.0 + static_cast<double>(df[w]))) + 1.0;
    }

    SentenceVectors sv;
    sv.dim = static_cast<int>(vocab.size());
    sv.source = SentenceSource::TFIDF;
    for (const auto& doc : docs) {
        std::vector<double> v(vocab.size(), 0.0);
        for (const auto& t : doc.tokens) v[vocab_index.at(t)] += 1.0;
        double norm_sq = 0.0;
        for (std::size_t w = 0; w < v.size(); ++w) {
            v[w] *= idf[w];
            norm_sq += v[w] * v[w];
        }
        if (norm_sq > 0.0) {
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (auto& x : v) x *= inv;
        }
        sv.ids.push_back(doc.test_case_id);
        sv.vectors.push_back(std::move(v));
    }
    sv.rebuild_index();
    return sv;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Unigram^0.75 sampling table, as in the original negative-sampling scheme.
std::vector<int> build_unigram_table(const std::vector<std::size_t>& counts) {
    const std::size_t table_size = 100000;
    double total = 0.0;
    for (auto c : counts) total += std::pow(static_cast<double>(c), 0.75);
    std::vector<int> table(table_size);
    std::size_t w = 0;
    double cum = std::pow(static_cast<double>(counts[0]), 0.75) / total;
    for (std::size_t i = 0; i < table_size; ++i) {
        table[i] = static_cast<int>(w);
        if (static_cast<double>(i + 1) / table_size > cum && w + 1 < counts.size()) {
            ++w;
            cum += std::pow(static_cast<double>(counts[w]), 0.75) / total;
        }
    }
    return table;
}

}  // namespace

CbowResult train_cbow(const std::vector<TokenizedDoc>& docs, const CbowConfig& config) {
    if (config.window < 1) throw Error("BadConfig", "window must be >= 1");
    if (config.dim < 2) throw Error("BadConfig", "dim must be >= 2");

    std::vector<std::string> vocab;
    std::vector<std::size_t> counts;
    std::unordered_map<std::string, int> vocab_index;
    std::vector<std::vector<int>> sentences;
    std::size_t total_tokens = 0;
    for (const auto& doc : docs) {
        std::vector<int> sent;
        for (const auto& t : doc.tokens) {
            auto [it, inserted] = vocab_index.try_emplace(t, static_cast<int>(vocab.size()));
            if (inserted) {
                vocab.push_back(t);
                counts.push_back(0);
            }
            ++counts[it->second];
            sent.push_back(it->second);
        }
        total_tokens += sent.size();
        sentences.push_back(std::move(sent));
    }
    if (static_cast<long long>(total_tokens) < config.window + 1) {
        throw Error("CorpusTooSmall", "token count below window+1");
    }
    if (static_cast<long long>(vocab.size()) < config.negative_samples + 1) {
        throw Error("VocabularyTooSmall", "vocabulary smaller than negative_samples+1");
    }

    const int dim = config.dim;
    const std::size_t v = vocab.size();
    Rng rng(config.seed);
    std::vector<double> syn0(v * dim);
    std::vector<double> syn1(v * dim, 0.0);
    for (auto& x : syn0) x = rng.uniform_real(-0.5 / dim, 0.5 / dim);
    const std::vector<int> table = build_unigram_table(counts);

    CbowResult result;
    std::vector<double> hidden(dim), grad(dim);
    const double total_steps =
        static_cast<double>(config.epochs) * static_cast<double>(total_tokens);
    double processed = 0.0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double loss = 0.0;
        std::size_t predictions = 0;
        for (const auto& sent : sentences) {
            const int len = static_cast<int>(sent.size());
            for (int pos = 0; pos < len; ++pos) {
                const double lr =
                    config.learning_rate * std::max(1e-4, 1.0 - processed / total_steps);
                processed += 1.0;
                // Reduced window, as in the reference implementation.
                const int shrink = static_cast<int>(rng.uniform_index(config.window));
                const int span = config.window - shrink;
                int ctx_count = 0;
                std::fill(hidden.begin(), hidden.end(), 0.0);
                for (int off = -span; off <= span; ++off) {
                    const int p = pos + off;
                    if (off == 0 || p < 0 || p >= len) continue;
                    const double* w = &syn0[static_cast<std::size_t>(sent[p]) * dim];
                    for (int d = 0; d < dim; ++d) hidden[d] += w[d];
                    ++ctx_count;
                }
                if (ctx_count == 0) continue;
                for (int d = 0; d < dim; ++d) hidden[d] /= ctx_count;

                const int target = sent[pos];
                std::fill(grad.begin(), grad.end(), 0.0);
                for (int s = 0; s <= config.negative_samples; ++s) {
                    int word;
                    double label;
                    if (s == 0) {
                        word = target;
                        label = 1.0;
                    } else {
                        word = table[rng.uniform_index(table.size())];
                        if (word == target) continue;
                        label = 0.0;
                    }
                    double* out = &syn1[static_cast<std::size_t>(word) * dim];
                    double dot = 0.0;
                    for (int d = 0; d < dim; ++d) dot += hidden[d] * out[d];
                    const double f = sigmoid(dot);
                    loss += label > 0.5 ? -std::log(std::max(f, 1e-12))
                                        : -std::log(std::max(1.0 - f, 1e-12));
                    const double g = (label - f) * lr;
                    for (int d = 0; d < dim; ++d) {
                        grad[d] += g * out[d];
                        out[d] += g * hidden[d];
                    }
                }
                ++predictions;
                for (int off = -span; off <= span; ++off) {
                    const int p = pos + off;
                    if (off == 0 || p < 0 || p >= len) continue;
                    double* w = &syn0[static_cast<std::size_t>(sent[p]) * dim];
                    for (int d = 0; d < dim; ++d) w[d] += grad[d];
                }
            }
        }
        result.epoch_loss.push_back(predictions ? loss / predictions : 0.0);
    }

    result.vectors.dim = dim;
    result.vectors.vocab = std::move(vocab);
    result.vectors.vectors.reserve(v);
    for (std::size_t w = 0; w < v; ++w) {
        result.vectors.vectors.emplace_back(syn0.begin() + w * dim, syn0.begin() + (w + 1) * dim);
    }
    result.vectors.rebuild_index();
    return result;
}

namespace {

struct VectorFile {
    std::size_t count = 0;
    int dim = 0;
    std::vector<std::pair<std::string, std::vector<double>>> entries;
};

VectorFile read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FileNotFound", path);
    VectorFile vf;
    std::string line;
    if (!std::getline(in, line)) throw Error("MalformedRecord", path + ": empty file");
    {
        std::istringstream hdr(line);
        if (!(hdr >> vf.count >> vf.dim) || vf.dim <= 0) {
            throw Error("MalformedRecord", path + ": bad header");
        }
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) throw Error("MalformedRecord", path + ":" + std::to_string(line_no));
        std::vector<double> vec;
        double x;
        while (ls >> x) vec.push_back(x);
        if (static_cast<int>(vec.size()) != vf.dim) {
            throw Error("DimensionMismatch",
                        path + ":" + std::to_string(line_no) + ": key " + key + " has " +
                            std::to_string(vec.size()) + " components, expected " +
                            std::to_string(vf.dim));
        }
        vf.entries.emplace_back(std::move(key), std::move(vec));
    }
    if (vf.entries.size() != vf.count) {
        throw Error("MalformedRecord", path + ": header count " + std::to_string(vf.count) +
                                           " != entries " + std::to_string(vf.entries.size()));
    }
    return vf;
}

void write_vector_file(const std::string& path, int dim,
                       const std::vector<std::string>& keys,
                       const std::vector<std::vector<double>>& vectors) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("FileWriteError", path);
    out << keys.size() << ' ' << dim << '\n';
    char buf[40];
    for (std::size_t i = 0; i < keys.size(); ++i) {
        out << keys[i];
        for (double x : vectors[i]) {
            std::snprintf(buf, sizeof(buf), " %.17g", x);
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace

WordVectors import_word_vectors(const std::string& path) {
    VectorFile vf = read_vector_file(path);
    WordVectors wv;
    wv.dim = vf.dim;
    for (auto& [key, vec] : vf.entries) {
        wv.vocab.push_back(std::move(key));
        wv.vectors.push_back(std::move(vec));
    }
    wv.rebuild_index();
    return wv;
}

SentenceVectors import_sentence_vectors(const std::string& path) {
    VectorFile vf = read_vector_file(path);
    SentenceVectors sv;
    sv.dim = vf.dim;
    sv.source = SentenceSource::IMPORTED;
    for (auto& [key, vec] : vf.entries) {
        sv.ids.push_back(std::move(key));
        sv.vectors.push_back(std::move(vec));
    }
    sv.rebuild_index();
    return sv;
}

void export_word_vectors(const WordVectors& wv, const std::string& path) {
    write_vector_file(path, wv.dim, wv.vocab, wv.vectors);
}

void export_sentence_vectors(const SentenceVectors& sv, const std::string& path) {
    write_vector_file(path, sv.dim, sv.ids, sv.vectors);
}

void require_sentence_coverage(const SentenceVectors& sv, const std::vector<std::string>& ids) {
    for (const auto& id : ids) {
        if (!sv.find(id)) throw Error("MissingVector", id);
    }
}

CoverageReport check_token_coverage(const WordVectors& wv, const std::vector<TokenizedDoc>& docs,
                                    double min_coverage) {
    std::unordered_set<std::string> required;
    for (const auto& doc : docs) required.insert(doc.tokens.begin(), doc.tokens.end());
    CoverageReport rep;
    rep.required = required.size();
    for (const auto& t : required) {
        if (!wv.find(t)) {
            ++rep.missing;
            rep.missing_keys.push_back(t);
        }
    }
    std::sort(rep.missing_keys.begin(), rep.missing_keys.end());
    if (rep.coverage() < min_coverage) {
        throw Error("InsufficientTokenCoverage",
                    std::to_string(rep.missing) + " of " + std::to_string(rep.required) +
                        " tokens missing");
    }
    return rep;
}

}  // namespace tsmin
