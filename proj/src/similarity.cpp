#include "tsmin/similarity.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace tsmin {

Metric metric_from_string(const std::string& name) {
    if (name == "cosine") return Metric::COSINE;
    if (name == "euclidean") return Metric::EUCLIDEAN;
    if (name == "wmd") return Metric::WMD;
    throw Error("UnknownMetric", name);
}

std::string to_string(Metric metric) {
    switch (metric) {
        case Metric::COSINE: return "cosine";
        case Metric::EUCLIDEAN: return "euclidean";
        case Metric::WMD: return "wmd";
    }
    return "?";
}

SimilarityMatrix::SimilarityMatrix(std::size_t m, Metric metric, std::string provenance)
    : m_(m), metric_(metric), provenance_(std::move(provenance)), values_(m * m, 0.0) {
    for (std::size_t i = 0; i < m; ++i) values_[i * m + i] = 1.0;
}

SimilarityMatrix SimilarityMatrix::submatrix(std::span<const std::size_t> indices) const {
    SimilarityMatrix sub(indices.size(), metric_, provenance_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            sub.set(i, j, at(indices[i], indices[j]));
        }
    }
    return sub;
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw Error("DimensionMismatch", "cosine operands differ in dim");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) throw Error("ZeroVector", "cosine undefined for zero vector");
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double euclidean(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw Error("DimensionMismatch", "euclidean operands differ in dim");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - v[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

BowDistribution bow_distribution(const TokenizedDoc& doc, const WordVectors& wv) {
    std::map<int, double> counts;  // ordered for determinism
    for (const auto& t : doc.tokens) {
        if (auto idx = wv.index_of(t)) counts[static_cast<int>(*idx)] += 1.0;
    }
    BowDistribution bow;
    double total = 0.0;
    for (const auto& [idx, c] : counts) total += c;
    for (const auto& [idx, c] : counts) {
        bow.tokens.push_back(idx);
        bow.weights.push_back(c / total);
    }
    return bow;
}

namespace {

/// Exact min-cost transport between distributions via successive shortest
/// paths with potentials (Dijkstra on the residual bipartite network).
double min_cost_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                          const std::vector<std::vector<double>>& cost) {
    const std::size_t na = supply.size();
    const std::size_t nb = demand.size();
    const std::size_t n = na + nb;
    constexpr double kEps = 1e-14;
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::vector<double> rem_supply = supply;
    std::vector<double> rem_demand = demand;
    std::vector<std::vector<double>> flow(na, std::vector<double>(nb, 0.0));
    std::vector<double> potential(n, 0.0);

    double outstanding = 0.0;
    for (double s : rem_supply) outstanding += s;

    std::vector<double> dist(n);
    std::vector<int> prev(n);
    std::vector<char> done(n);

    while (outstanding > kEps) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(prev.begin(), prev.end(), -1);
        std::fill(done.begin(), done.end(), 0);
        for (std::size_t i = 0; i < na; ++i) {
            if (rem_supply[i] > kEps) dist[i] = 0.0;
        }
        // Dense Dijkstra; instances are tens of tokens at most.
        for (std::size_t iter = 0; iter < n; ++iter) {
            std::size_t u = n;
            double best = kInf;
            for (std::size_t k = 0; k < n; ++k) {
                if (!done[k] && dist[k] < best) {
                    best = dist[k];
                    u = k;
                }
            }
            if (u == n) break;
            done[u] = 1;
            if (u < na) {
                for (std::size_t j = 0; j < nb; ++j) {
                    // Finalized nodes must not be relaxed again: rounding can
                    // produce tiny negative reduced costs, and re-parenting a
                    // finalized node can close a cycle in prev.
                    if (done[na + j]) continue;
                    const double rc = cost[u][j] + potential[u] - potential[na + j];
                    if (dist[u] + rc < dist[na + j] - 1e-18) {
                        dist[na + j] = dist[u] + rc;
                        prev[na + j] = static_cast<int>(u);
                    }
                }
            } else {
                const std::size_t j = u - na;
                for (std::size_t i = 0; i < na; ++i) {
                    if (done[i]) continue;
                    if (flow[i][j] > kEps) {
                        const double rc = -cost[i][j] + potential[u] - potential[i];
                        if (dist[u] + rc < dist[i] - 1e-18) {
                            dist[i] = dist[u] + rc;
                            prev[i] = static_cast<int>(u);
                        }
                    }
                }
            }
        }

        std::size_t target = n;
        double best = kInf;
        for (std::size_t j = 0; j < nb; ++j) {
            if (rem_demand[j] > kEps && dist[na + j] < best) {
                best = dist[na + j];
                target = na + j;
            }
        }
        if (target == n) throw Error("TransportInfeasible", "no augmenting path");

        // Bottleneck along the path.
        double amount = rem_demand[target - na];
        for (std::size_t u = target; prev[u] != -1; u = static_cast<std::size_t>(prev[u])) {
            const std::size_t p = static_cast<std::size_t>(prev[u]);
            if (u >= na) continue;  // backward arc p(sink) -> u(source)
            amount = std::min(amount, flow[u][p - na]);
        }
        {
            std::size_t root = target;
            while (prev[root] != -1) root = static_cast<std::size_t>(prev[root]);
            amount = std::min(amount, rem_supply[root]);
        }

        for (std::size_t u = target; prev[u] != -1; u = static_cast<std::size_t>(prev[u])) {
            const std::size_t p = static_cast<std::size_t>(prev[u]);
            if (u >= na) {
                flow[p][u - na] += amount;
            } else {
                flow[u][p - na] -= amount;
            }
        }
        {
            std::size_t root = target;
            while (prev[root] != -1) root = static_cast<std::size_t>(prev[root]);
            rem_supply[root] -= amount;
        }
        rem_demand[target - na] -= amount;
        outstanding -= amount;

        for (std::size_t k = 0; k < n; ++k) {
            potential[k] += std::min(dist[k], best);
        }
    }

    double total = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) total += flow[i][j] * cost[i][j];
    }
    return total;
}

}  // namespace

double wmd(const BowDistribution& a, const BowDistribution& b, const WordVectors& wv) {
    if (a.empty() || b.empty()) {
        throw Error("EmptyDistribution", "wmd operand empty after vocabulary filtering");
    }
    std::vector<std::vector<double>> cost(a.tokens.size(),
                                          std::vector<double>(b.tokens.size()));
    for (std::size_t i = 0; i < a.tokens.size(); ++i) {
        const auto& u = wv.vectors[static_cast<std::size_t>(a.tokens[i])];
        for (std::size_t j = 0; j < b.tokens.size(); ++j) {
            const auto& v = wv.vectors[static_cast<std::size_t>(b.tokens[j])];
            cost[i][j] = euclidean(u, v);
        }
    }
    return min_cost_transport(a.weights, b.weights, cost);
}

SimilarityMatrix normalize_scores(const std::vector<double>& raw, std::size_t m, ScoreKind kind,
                                  Metric metric, std::string provenance) {
    SimilarityMatrix sim(m, metric, std::move(provenance));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            lo = std::min(lo, raw[i * m + j]);
            hi = std::max(hi, raw[i * m + j]);
        }
    }
    const double range = hi - lo;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            double s = 0.0;
            if (range > 0.0) {
                const double scaled = (raw[i * m + j] - lo) / range;
                s = kind == ScoreKind::SIMILARITY ? scaled : 1.0 - scaled;
            }
            sim.set(i, j, s);
        }
    }
    return sim;
}

SimilarityMatrix build_similarity_matrix(const std::vector<std::string>& case_ids,
                                         const Representation& repr, Metric metric,
                                         const std::string& provenance) {
    const std::size_t m = case_ids.size();
    std::vector<double> raw(m * m, 0.0);

    if (metric == Metric::WMD) {
        if (!repr.word || !repr.docs) {
            throw Error("IncompatibleMetric", "wmd requires word vectors and tokenized docs");
        }
        std::unordered_map<std::string, const TokenizedDoc*> by_id;
        for (const auto& doc : *repr.docs) by_id[doc.test_case_id] = &doc;
        std::vector<BowDistribution> bows;
        bows.reserve(m);
        for (const auto& id : case_ids) {
            auto it = by_id.find(id);
            if (it == by_id.end()) throw Error("MissingVector", id);
            bows.push_back(bow_distribution(*it->second, *repr.word));
        }
        // Operand order fixed lower-index-first so the matrix is bit-stable
        // under any work schedule.
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                const double d = wmd(bows[i], bows[j], *repr.word);
                raw[i * m + j] = d;
                raw[j * m + i] = d;
            }
        }
        return normalize_scores(raw, m, ScoreKind::DISTANCE, metric, provenance);
    }

    if (!repr.sentence) {
        throw Error("IncompatibleMetric",
                    to_string(metric) + " requires sentence-level vectors");
    }
    std::vector<const std::vector<double>*> vecs;
    vecs.reserve(m);
    for (const auto& id : case_ids) {
        const auto* v = repr.sentence->find(id);
        if (!v) throw Error("MissingVector", id);
        vecs.push_back(v);
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double s = metric == Metric::COSINE ? cosine(*vecs[i], *vecs[j])
                                                      : euclidean(*vecs[i], *vecs[j]);
            raw[i * m + j] = s;
            raw[j * m + i] = s;
        }
    }
    return normalize_scores(raw, m,
                            metric == Metric::COSINE ? ScoreKind::SIMILARITY
                                                     : ScoreKind::DISTANCE,
                            metric, provenance);
}

void save_matrix(const SimilarityMatrix& sim, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("FileWriteError", path);
    out << sim.m() << ' ' << to_string(sim.metric()) << ' ' << sim.provenance() << '\n';
    char buf[40];
    for (std::size_t i = 1; i < sim.m(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", sim.at(i, j));
            out << buf << (j + 1 < i ? " " : "");
        }
        out << '\n';
    }
}

SimilarityMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FileNotFound", path);
    std::string header;
    if (!std::getline(in, header)) throw Error("MalformedRecord", path + ": empty file");
    std::istringstream hs(header);
    std::size_t m;
    std::string metric_name, provenance;
    if (!(hs >> m >> metric_name)) throw Error("MalformedRecord", path + ": bad header");
    std::getline(hs, provenance);
    if (!provenance.empty() && provenance.front() == ' ') provenance.erase(0, 1);

    SimilarityMatrix sim(m, metric_from_string(metric_name), provenance);
    for (std::size_t i = 1; i < m; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            double v;
            if (!(in >> v)) throw Error("MalformedRecord", path + ": truncated triangle");
            sim.set(i, j, v);
        }
    }
    return sim;
}

}  // namespace tsmin
