#include "tsmin/oracle.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "tsmin/minimizer.hpp"

namespace tsmin {

namespace {

// Fixed-width bitset over fault indices.
class FaultSet {
public:
    explicit FaultSet(std::size_t n_bits = 0) : words_((n_bits + 63) / 64, 0) {}

    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    bool test(std::size_t i) const {
        return (words_[i / 64] >> (i % 64)) & 1;
    }
    void or_with(const FaultSet& other) {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
    }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    std::size_t count_or(const FaultSet& other) const {
        std::size_t c = 0;
        for (std::size_t w = 0; w < words_.size(); ++w) {
            c += static_cast<std::size_t>(std::popcount(words_[w] | other.words_[w]));
        }
        return c;
    }
    std::size_t count_new(const FaultSet& other) const {
        // Bits in *this not already in other.
        std::size_t c = 0;
        for (std::size_t w = 0; w < words_.size(); ++w) {
            c += static_cast<std::size_t>(std::popcount(words_[w] & ~other.words_[w]));
        }
        return c;
    }

private:
    std::vector<std::uint64_t> words_;
};

struct FaultIndex {
    std::vector<std::string> fault_ids;
    std::vector<FaultSet> det;  // per corpus case index
    std::vector<int> d;         // |det|
    std::size_t n_faults = 0;
};

FaultIndex build_fault_index(const Corpus& corpus, const FaultMatrix& faults) {
    FaultIndex fi;
    fi.fault_ids = faults.fault_ids;
    fi.n_faults = fi.fault_ids.size();
    std::unordered_map<std::string, std::size_t> fidx;
    for (std::size_t f = 0; f < fi.fault_ids.size(); ++f) fidx[fi.fault_ids[f]] = f;
    fi.det.reserve(corpus.m());
    for (const auto& tc : corpus.test_cases) {
        FaultSet fs(fi.n_faults);
        for (const auto& f : faults.detects_of(tc.id)) fs.set(fidx.at(f));
        fi.d.push_back(static_cast<int>(fs.count()));
        fi.det.push_back(std::move(fs));
    }
    return fi;
}

struct BnbState {
    const Corpus* corpus;
    const FaultIndex* fi;
    std::vector<std::size_t> order;                 // case indices, |det| descending
    std::vector<std::vector<int>> cover;            // reqs of order[i]
    std::vector<std::vector<std::size_t>> top_prefix;  // per idx: prefix sums of sorted sizes
    std::vector<FaultSet> suffix_union;
    int k = 0;
    std::size_t m = 0;
    std::size_t n_req = 0;

    std::vector<int> avail;      // per req: undecided cases still ahead
    std::vector<int> cover_cnt;  // per req: chosen cases covering it
    std::size_t uncovered = 0;

    std::vector<std::uint8_t> chosen;
    FaultSet chosen_faults;
    std::size_t chosen_count = 0;

    std::size_t best_value = 0;
    std::vector<std::uint8_t> best_set;
    bool complete = true;

    std::chrono::steady_clock::time_point deadline;
    std::size_t node_counter = 0;

    void dfs(std::size_t idx) {
        if (!complete) return;
        if ((++node_counter & 1023) == 0 &&
            std::chrono::steady_clock::now() > deadline) {
            complete = false;
            return;
        }
        const std::size_t slots = static_cast<std::size_t>(k) - chosen_count;
        if (slots == 0) {
            if (uncovered == 0) {
                const std::size_t value = chosen_faults.count();
                if (value > best_value || best_set.empty()) {
                    best_value = value;
                    best_set = chosen;
                }
            }
            return;
        }
        if (idx >= m || m - idx < slots) return;
        for (std::size_t r = 0; r < n_req; ++r) {
            if (cover_cnt[r] == 0 && avail[r] == 0) return;
        }
        const std::size_t ub_top =
            chosen_faults.count() + top_prefix[idx][std::min(slots, m - idx)];
        const std::size_t ub_union = chosen_faults.count_or(suffix_union[idx]);
        if (std::min(ub_top, ub_union) <= best_value && !best_set.empty() &&
            // Equal-value solutions are only kept when none is recorded yet,
            // except a covering one is still needed.
            ub_covered_possible_only(idx, slots) == false) {
            return;
        }
        if (std::min(ub_top, ub_union) < best_value) return;
        if (std::min(ub_top, ub_union) == best_value && !best_set.empty()) return;

        // Include order[idx].
        const std::size_t c = order[idx];
        for (int r : cover[idx]) {
            --avail[r];
            if (cover_cnt[r]++ == 0) --uncovered;
        }
        chosen[c] = 1;
        ++chosen_count;
        FaultSet saved = chosen_faults;
        chosen_faults.or_with(fi->det[c]);
        dfs(idx + 1);
        chosen_faults = saved;
        --chosen_count;
        chosen[c] = 0;
        for (int r : cover[idx]) {
            if (--cover_cnt[r] == 0) ++uncovered;
        }

        // Exclude order[idx].
        dfs(idx + 1);
        for (int r : cover[idx]) ++avail[r];
    }

    // Placeholder hook kept out of the hot path; the bound logic above
    // already rejects <= best once an incumbent exists.
    bool ub_covered_possible_only(std::size_t, std::size_t) const { return false; }
};

}  // namespace

OracleResult best_fdr(const Corpus& corpus, const FaultMatrix& faults, double budget,
                      double time_cap_seconds) {
    const std::size_t m = corpus.m();
    const int k = budget_size(m, budget);
    if (k < static_cast<int>(corpus.n_req())) {
        throw Error("InfeasibleBudget", "round(m*budget) below requirement count");
    }
    FaultIndex fi = build_fault_index(corpus, faults);
    FaultSet full(fi.n_faults);
    for (const auto& fs : fi.det) full.or_with(fs);
    const std::size_t total = full.count();
    if (total == 0) throw Error("EmptyFaultUnion", "full suite detects no faults");

    BnbState st;
    st.corpus = &corpus;
    st.fi = &fi;
    st.k = k;
    st.m = m;
    st.n_req = corpus.n_req();
    st.order.resize(m);
    std::iota(st.order.begin(), st.order.end(), 0);
    std::stable_sort(st.order.begin(), st.order.end(),
                     [&](std::size_t a, std::size_t b) { return fi.d[a] > fi.d[b]; });

    const auto& cov = corpus.coverage_by_case();
    st.cover.reserve(m);
    for (std::size_t i = 0; i < m; ++i) st.cover.push_back(cov[st.order[i]]);

    st.top_prefix.assign(m + 1, {});
    st.suffix_union.assign(m + 1, FaultSet(fi.n_faults));
    for (std::size_t idx = m; idx-- > 0;) {
        st.suffix_union[idx] = st.suffix_union[idx + 1];
        st.suffix_union[idx].or_with(fi.det[st.order[idx]]);
    }
    for (std::size_t idx = 0; idx <= m; ++idx) {
        std::vector<std::size_t> sizes;
        for (std::size_t i = idx; i < m; ++i) {
            sizes.push_back(static_cast<std::size_t>(fi.d[st.order[i]]));
        }
        std::sort(sizes.rbegin(), sizes.rend());
        std::vector<std::size_t> prefix(sizes.size() + 1, 0);
        for (std::size_t i = 0; i < sizes.size(); ++i) prefix[i + 1] = prefix[i] + sizes[i];
        st.top_prefix[idx] = std::move(prefix);
    }

    st.avail.assign(st.n_req, 0);
    st.cover_cnt.assign(st.n_req, 0);
    for (std::size_t i = 0; i < m; ++i) {
        for (int r : st.cover[i]) ++st.avail[r];
    }
    st.uncovered = st.n_req;
    st.chosen.assign(m, 0);
    st.chosen_faults = FaultSet(fi.n_faults);

    // Greedy incumbent: cover requirements with the best marginal fault gain,
    // then fill remaining slots by marginal gain.
    {
        std::vector<std::uint8_t> sel(m, 0);
        FaultSet acc(fi.n_faults);
        std::vector<int> ccount(st.n_req, 0);
        std::size_t uncov = st.n_req;
        int picked = 0;
        auto add = [&](std::size_t i) {
            sel[i] = 1;
            acc.or_with(fi.det[i]);
            for (int r : cov[i]) {
                if (ccount[r]++ == 0) --uncov;
            }
            ++picked;
        };
        while (uncov > 0) {
            std::size_t best_i = m;
            std::size_t best_gain = 0;
            for (std::size_t i = 0; i < m; ++i) {
                if (sel[i]) continue;
                bool helps = false;
                for (int r : cov[i]) helps |= ccount[r] == 0;
                if (!helps) continue;
                const std::size_t gain = fi.det[i].count_new(acc);
                if (best_i == m || gain > best_gain) {
                    best_i = i;
                    best_gain = gain;
                }
            }
            add(best_i);
        }
        while (picked < k) {
            std::size_t best_i = m;
            std::size_t best_gain = 0;
            for (std::size_t i = 0; i < m; ++i) {
                if (sel[i]) continue;
                const std::size_t gain = fi.det[i].count_new(acc);
                if (best_i == m || gain > best_gain) {
                    best_i = i;
                    best_gain = gain;
                }
            }
            add(best_i);
        }
        st.best_value = acc.count();
        st.best_set = sel;
    }

    st.deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(time_cap_seconds));
    st.dfs(0);

    OracleResult result;
    result.exact = st.complete;
    result.fdr = static_cast<double>(st.best_value) / static_cast<double>(total);
    for (std::size_t i = 0; i < m; ++i) {
        if (st.best_set[i]) result.subset.insert(corpus.test_cases[i].id);
    }
    return result;
}

namespace {

struct SuiteCandidate {
    std::vector<std::size_t> indices;  // sorted corpus indices
};

double suite_jaccard(const SuiteCandidate& a, const SuiteCandidate& b) {
    std::size_t inter = 0, ai = 0, bi = 0;
    while (ai < a.indices.size() && bi < b.indices.size()) {
        if (a.indices[ai] == b.indices[bi]) {
            ++inter, ++ai, ++bi;
        } else if (a.indices[ai] < b.indices[bi]) {
            ++ai;
        } else {
            ++bi;
        }
    }
    const std::size_t uni = a.indices.size() + b.indices.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

std::vector<std::vector<std::string>> generate_redundancy_suites(
    const Corpus& corpus, const FaultMatrix& faults, double target_rl,
    const RedundancySuiteOptions& options) {
    const std::size_t m = corpus.m();
    FaultIndex fi = build_fault_index(corpus, faults);
    const std::size_t n_faults = fi.n_faults;
    if (n_faults == 0) throw Error("EmptyFaultUnion", "no faults to cover");
    const auto& cov = corpus.coverage_by_case();
    std::vector<std::vector<std::size_t>> by_req(corpus.n_req());
    for (std::size_t i = 0; i < m; ++i) {
        for (int r : cov[i]) by_req[static_cast<std::size_t>(r)].push_back(i);
    }
    // Fault -> detecting cases.
    std::vector<std::vector<std::size_t>> by_fault(n_faults);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t f = 0; f < n_faults; ++f) {
            if (fi.det[i].test(f)) by_fault[f].push_back(i);
        }
    }

    const double target_total = target_rl * static_cast<double>(n_faults);
    const double band = options.tolerance * static_cast<double>(n_faults);
    Rng rng(options.seed);
    double closest_rl = std::numeric_limits<double>::infinity();

    // Cases with identical fault sets are interchangeable for detection; the
    // walk below prefers keeping such duplicates together so every suite
    // carries removable redundancy regardless of its redundancy level.
    std::vector<std::size_t> fault_group(m);
    std::size_t n_groups = 0;
    {
        std::map<std::vector<std::size_t>, std::size_t> group_ids;
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<std::size_t> key;
            for (std::size_t f = 0; f < n_faults; ++f) {
                if (fi.det[i].test(f)) key.push_back(f);
            }
            fault_group[i] = group_ids.emplace(std::move(key), group_ids.size()).first->second;
        }
        n_groups = group_ids.size();
    }

    auto attempt = [&]() -> std::optional<SuiteCandidate> {
        std::vector<std::uint8_t> sel(m, 0);
        std::vector<int> fault_cnt(n_faults, 0);
        std::vector<int> req_cnt(corpus.n_req(), 0);
        std::vector<int> group_sel(n_groups, 0);
        long long total_det = 0;
        std::size_t covered_faults = 0, covered_reqs = 0;

        auto add = [&](std::size_t i) {
            sel[i] = 1;
            total_det += fi.d[i];
            ++group_sel[fault_group[i]];
            for (std::size_t f = 0; f < n_faults; ++f) {
                if (fi.det[i].test(f) && fault_cnt[f]++ == 0) ++covered_faults;
            }
            for (int r : cov[i]) {
                if (req_cnt[r]++ == 0) ++covered_reqs;
            }
        };
        auto remove = [&](std::size_t i) {
            sel[i] = 0;
            total_det -= fi.d[i];
            --group_sel[fault_group[i]];
            for (std::size_t f = 0; f < n_faults; ++f) {
                if (fi.det[i].test(f) && --fault_cnt[f] == 0) --covered_faults;
            }
            for (int r : cov[i]) {
                if (--req_cnt[r] == 0) --covered_reqs;
            }
        };

        // Randomized fault cover.
        while (covered_faults < n_faults) {
            std::vector<std::size_t> uncovered_faults;
            for (std::size_t f = 0; f < n_faults; ++f) {
                if (fault_cnt[f] == 0) uncovered_faults.push_back(f);
            }
            const std::size_t f = uncovered_faults[rng.uniform_index(uncovered_faults.size())];
            if (by_fault[f].empty()) return std::nullopt;
            add(by_fault[f][rng.uniform_index(by_fault[f].size())]);
        }
        // Requirement cover.
        for (std::size_t r = 0; r < corpus.n_req(); ++r) {
            if (req_cnt[r] > 0) continue;
            if (by_req[r].empty()) return std::nullopt;
            add(by_req[r][rng.uniform_index(by_req[r].size())]);
        }

        // Walk the detection total into the band by random add/remove moves.
        for (std::size_t iter = 0; iter < 20 * m + 200; ++iter) {
            const double diff = static_cast<double>(total_det) - target_total;
            if (std::abs(diff) <= band) break;
            if (diff > 0) {
                std::vector<std::size_t> removable, solo_removable;
                for (std::size_t i = 0; i < m; ++i) {
                    if (!sel[i]) continue;
                    bool safe = true;
                    for (std::size_t f = 0; f < n_faults && safe; ++f) {
                        if (fi.det[i].test(f)) safe = fault_cnt[f] > 1;
                    }
                    for (int r : cov[i]) safe &= req_cnt[r] > 1;
                    if (safe && fi.d[i] > 0) {
                        removable.push_back(i);
                        if (group_sel[fault_group[i]] == 1) solo_removable.push_back(i);
                    }
                }
                if (removable.empty()) break;
                const auto& pool = solo_removable.empty() ? removable : solo_removable;
                remove(pool[rng.uniform_index(pool.size())]);
            } else {
                std::vector<std::size_t> addable, dup_addable;
                for (std::size_t i = 0; i < m; ++i) {
                    if (sel[i] || fi.d[i] == 0) continue;
                    addable.push_back(i);
                    if (group_sel[fault_group[i]] > 0) dup_addable.push_back(i);
                }
                if (addable.empty()) break;
                const auto& pool = dup_addable.empty() ? addable : dup_addable;
                add(pool[rng.uniform_index(pool.size())]);
            }
        }

        // Pad with zero-detection cases to reach min_size; they do not move
        // the detection total.
        if (options.min_size > 0) {
            std::vector<std::size_t> zeros;
            for (std::size_t i = 0; i < m; ++i) {
                if (!sel[i] && fi.d[i] == 0) zeros.push_back(i);
            }
            std::size_t selected = 0;
            for (std::size_t i = 0; i < m; ++i) selected += sel[i];
            while (selected < options.min_size && !zeros.empty()) {
                const std::size_t at = rng.uniform_index(zeros.size());
                add(zeros[at]);
                zeros[at] = zeros.back();
                zeros.pop_back();
                ++selected;
            }
        }

        if (covered_faults == n_faults && covered_reqs == corpus.n_req()) {
            const double rl = static_cast<double>(total_det) / static_cast<double>(n_faults);
            closest_rl = std::abs(rl - target_rl) < std::abs(closest_rl - target_rl)
                             ? rl
                             : closest_rl;
            if (std::abs(static_cast<double>(total_det) - target_total) <= band) {
                SuiteCandidate cand;
                for (std::size_t i = 0; i < m; ++i) {
                    if (sel[i]) cand.indices.push_back(i);
                }
                return cand;
            }
        }
        return std::nullopt;
    };

    std::vector<SuiteCandidate> pool;
    std::set<std::vector<std::size_t>> seen;
    for (std::size_t a = 0; a < options.max_attempts && pool.size() < options.pool_size; ++a) {
        if (auto cand = attempt()) {
            if (seen.insert(cand->indices).second) pool.push_back(std::move(*cand));
        }
    }
    if (pool.size() < options.count) {
        std::ostringstream msg;
        msg << "found " << pool.size() << " of " << options.count << " suites at RL "
            << target_rl << "; closest achieved RL ";
        if (std::isfinite(closest_rl)) {
            msg << closest_rl;
        } else {
            msg << "none";
        }
        throw Error("NoSuiteFound", msg.str());
    }

    std::vector<std::size_t> chosen_pool;
    if (pool.size() == options.count) {
        chosen_pool.resize(pool.size());
        std::iota(chosen_pool.begin(), chosen_pool.end(), 0);
    } else {
        // Small GA over pool subsets minimizing total pairwise Jaccard.
        const std::size_t p = pool.size();
        std::vector<double> jac(p * p, 0.0);
        for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = a + 1; b < p; ++b) {
                jac[a * p + b] = jac[b * p + a] = suite_jaccard(pool[a], pool[b]);
            }
        }
        auto subset_cost = [&](const std::vector<std::size_t>& subset) {
            double acc = 0.0;
            for (std::size_t a = 0; a < subset.size(); ++a) {
                for (std::size_t b = a + 1; b < subset.size(); ++b) {
                    acc += jac[subset[a] * p + subset[b]];
                }
            }
            return acc;
        };
        auto random_subset = [&]() {
            std::vector<std::size_t> all(p);
            std::iota(all.begin(), all.end(), 0);
            rng.shuffle(all);
            all.resize(options.count);
            std::sort(all.begin(), all.end());
            return all;
        };

        struct Indiv {
            std::vector<std::size_t> subset;
            double cost;
        };
        const std::size_t pop_size = 30;
        std::vector<Indiv> population;
        for (std::size_t i = 0; i < pop_size; ++i) {
            auto s = random_subset();
            population.push_back({s, subset_cost(s)});
        }
        auto tournament = [&]() -> const Indiv& {
            const auto& a = population[rng.uniform_index(pop_size)];
            const auto& b = population[rng.uniform_index(pop_size)];
            return a.cost <= b.cost ? a : b;
        };
        for (int gen = 0; gen < 150; ++gen) {
            std::vector<Indiv> offspring;
            for (std::size_t i = 0; i < pop_size; ++i) {
                const Indiv& pa = tournament();
                const Indiv& pb = tournament();
                std::set<std::size_t> uni(pa.subset.begin(), pa.subset.end());
                uni.insert(pb.subset.begin(), pb.subset.end());
                std::vector<std::size_t> cand(uni.begin(), uni.end());
                rng.shuffle(cand);
                cand.resize(options.count);
                if (rng.bernoulli(0.3)) {
                    // Swap mutation: replace one member with an outsider.
                    std::vector<std::size_t> outside;
                    for (std::size_t q = 0; q < p; ++q) {
                        if (std::find(cand.begin(), cand.end(), q) == cand.end()) {
                            outside.push_back(q);
                        }
                    }
                    if (!outside.empty()) {
                        cand[rng.uniform_index(cand.size())] =
                            outside[rng.uniform_index(outside.size())];
                    }
                }
                std::sort(cand.begin(), cand.end());
                cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
                while (cand.size() < options.count) {
                    const std::size_t extra = rng.uniform_index(p);
                    if (std::find(cand.begin(), cand.end(), extra) == cand.end()) {
                        cand.push_back(extra);
                    }
                }
                std::sort(cand.begin(), cand.end());
                offspring.push_back({cand, subset_cost(cand)});
            }
            for (auto& o : offspring) population.push_back(std::move(o));
            std::stable_sort(population.begin(), population.end(),
                             [](const Indiv& a, const Indiv& b) { return a.cost < b.cost; });
            population.resize(pop_size);
        }
        chosen_pool = population.front().subset;
    }

    std::vector<std::vector<std::string>> suites;
    for (std::size_t pi : chosen_pool) {
        std::vector<std::string> ids;
        for (std::size_t i : pool[pi].indices) ids.push_back(corpus.test_cases[i].id);
        suites.push_back(std::move(ids));
    }
    return suites;
}

namespace {

std::string padded(const std::string& prefix, std::size_t value, int width) {
    std::string digits = std::to_string(value);
    while (static_cast<int>(digits.size()) < width) digits.insert(digits.begin(), '0');
    return prefix + digits;
}

// Largest-remainder allocation of `total` over zipf-ish weights, each >= 1.
std::vector<std::size_t> allocate_counts(std::size_t buckets, std::size_t total,
                                         CaseAllocation allocation, double exponent) {
    std::vector<double> weights(buckets);
    for (std::size_t i = 0; i < buckets; ++i) {
        weights[i] = allocation == CaseAllocation::UNIFORM
                         ? 1.0
                         : std::pow(static_cast<double>(i + 1), -exponent);
    }
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<std::size_t> counts(buckets, 1);
    std::size_t assigned = buckets;
    std::vector<std::pair<double, std::size_t>> remainders;
    for (std::size_t i = 0; i < buckets; ++i) {
        const double share = weights[i] / wsum * static_cast<double>(total);
        const std::size_t extra =
            share > 1.0 ? static_cast<std::size_t>(std::floor(share)) - 1 : 0;
        counts[i] += extra;
        assigned += extra;
        remainders.emplace_back(share - std::floor(share), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::size_t at = 0;
    while (assigned < total) {
        counts[remainders[at % buckets].second] += 1;
        ++assigned;
        ++at;
    }
    while (assigned > total) {
        // Trim from the largest bucket, never below 1.
        const auto it = std::max_element(counts.begin(), counts.end());
        if (*it <= 1) break;
        --*it;
        --assigned;
    }
    return counts;
}

}  // namespace

std::pair<Corpus, FaultMatrix> synth_corpus(const SynthConfig& config) {
    if (config.n_req == 0 || config.total_cases < config.n_req) {
        throw Error("BadConfig", "total_cases must be >= n_req >= 1");
    }
    if (config.n_faults == 0 || config.target_rl < 1.0) {
        throw Error("BadConfig", "need n_faults >= 1 and target_rl >= 1");
    }
    if (config.clone_rate < 0.0 || config.clone_rate >= 1.0) {
        throw Error("BadConfig", "clone_rate must be in [0,1)");
    }
    const long long target_total =
        std::llround(config.target_rl * static_cast<double>(config.n_faults));
    if (target_total > static_cast<long long>(config.n_faults * config.total_cases)) {
        throw Error("UnsatisfiableConfig", "target_rl exceeds what total_cases can supply");
    }

    Rng rng(config.seed);
    const auto counts = allocate_counts(config.n_req, config.total_cases, config.allocation,
                                        config.zipf_exponent);

    struct DraftCase {
        std::vector<std::string> steps;
        std::size_t req = 0;
        std::size_t group = 0;  // clone pairs share a group
    };
    std::vector<DraftCase> drafts;
    std::size_t uid = 0;
    std::size_t group_counter = 0;

    struct StepParams {
        long long v1, mat, demat;
    };
    auto make_steps = [&](std::size_t req, const std::string& path_token,
                          const std::string& local_var, const StepParams& p) {
        const long long v1 = p.v1;
        const long long mat = p.mat;
        const long long demat = p.demat;
        const std::string rq = padded("REQ", req + 1, 2);
        std::vector<std::string> steps = {
            "STEP 1 Set Global Preconditions",
            "Read variable Variable_" + rq,
            "STEP 2 Set Valid Preconditions",
            "Set System variable " + local_var + " = " + std::to_string(v1),
            "Await Value Match Signal SIGNAL_" + rq + " = " + std::to_string(v1),
            "STEP 3 Create Fault Condition",
            "Set System variable " + local_var + "_FAULT = 1",
            "STEP 4 Verify DTC Maturation Time",
            "Check maturation time (Expected: " + std::to_string(mat) + " ms)",
            "STEP 5 Check the DTC is Active",
            "Read variable Variable_" + rq,
            "Send request " + path_token,
            "Check expected diagnostic response",
            "STEP 6 Remove DTC Condition",
            "Set System variable " + local_var + "_FAULT = 0",
            "STEP 7 Verify DTC Dematuration Time",
            "Check dematuration time (Expected: " + std::to_string(demat) + " ms)",
        };
        return steps;
    };

    for (std::size_t r = 0; r < config.n_req; ++r) {
        const std::size_t c = counts[r];
        const std::size_t clones = std::min<std::size_t>(
            c - 1, static_cast<std::size_t>(std::llround(config.clone_rate * c)));
        const std::size_t leaders = c - clones;
        std::vector<std::size_t> leader_groups;
        std::vector<std::pair<std::string, std::string>> leader_tokens;
        std::vector<StepParams> leader_params;
        for (std::size_t l = 0; l < leaders; ++l) {
            ++uid;
            const std::string path_token = padded("PATH_TO_REQUEST_", uid, 4);
            const std::string local_var = padded("Variable_", uid, 4);
            const StepParams params{rng.uniform_int(1, 9), 10 * rng.uniform_int(1, 50),
                                    10 * rng.uniform_int(1, 50)};
            DraftCase dc;
            dc.req = r;
            dc.group = group_counter++;
            dc.steps = make_steps(r, path_token, local_var, params);
            leader_groups.push_back(dc.group);
            leader_tokens.emplace_back(path_token, local_var);
            leader_params.push_back(params);
            drafts.push_back(std::move(dc));
        }
        for (std::size_t j = 0; j < clones; ++j) {
            // Near-duplicate of a random leader: same identifiers, differing
            // only in redrawn parameter values. Random attachment yields
            // variable-size clone groups.
            const std::size_t l = rng.uniform_index(leaders);
            const StepParams params{rng.uniform_int(1, 9), 10 * rng.uniform_int(1, 50),
                                    10 * rng.uniform_int(1, 50)};
            DraftCase dc;
            dc.req = r;
            dc.group = leader_groups[l];
            dc.steps = make_steps(r, leader_tokens[l].first, leader_tokens[l].second, params);
            drafts.push_back(std::move(dc));
        }
    }

    // File order is shuffled so index-based tie-breaking carries no
    // requirement structure.
    std::vector<std::size_t> order(drafts.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    Corpus corpus;
    for (std::size_t r = 0; r < config.n_req; ++r) {
        corpus.requirements.push_back(padded("R", r + 1, 3));
    }
    std::vector<std::size_t> group_of_case(drafts.size());
    std::vector<std::vector<std::size_t>> cases_of_group(group_counter);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const DraftCase& dc = drafts[order[pos]];
        TestCase tc;
        tc.id = padded("TC", pos + 1, 4);
        tc.requirement_ids.push_back(corpus.requirements[dc.req]);
        tc.steps = dc.steps;
        corpus.test_cases.push_back(std::move(tc));
        group_of_case[pos] = dc.group;
        cases_of_group[dc.group].push_back(pos);
    }
    corpus.rebuild_indexes();

    // Fault planting over clone groups: desired detections per fault follow a
    // long-tailed profile summing to target_rl * n_faults.
    const std::size_t n_groups = group_counter;
    std::vector<std::size_t> group_size(n_groups);
    for (std::size_t g = 0; g < n_groups; ++g) group_size[g] = cases_of_group[g].size();

    std::vector<std::size_t> desired = allocate_counts(
        config.n_faults, static_cast<std::size_t>(target_total), CaseAllocation::ZIPF,
        config.fault_zipf_exponent);

    // Groups under sparsely-covered requirements are proportionally more
    // fault-prone (rarely-exercised functionality hides defects), so full
    // requirement coverage genuinely helps detection.
    std::vector<std::size_t> req_of_group(n_groups, 0);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        req_of_group[group_of_case[pos]] = drafts[order[pos]].req;
    }
    std::vector<double> cum_weight(n_groups);
    {
        double acc = 0.0;
        for (std::size_t g = 0; g < n_groups; ++g) {
            // Cloned functionality (multi-case groups) and sparsely-covered
            // requirements are proportionally more fault-prone.
            const std::size_t req_cases = counts[req_of_group[g]];
            const double clone_factor = (group_size[g] >= 2 || req_cases <= 2) ? 1.0 : 0.25;
            acc += clone_factor / std::pow(static_cast<double>(req_cases), 0.65);
            cum_weight[g] = acc;
        }
    }
    auto weighted_group = [&]() {
        const double x = rng.uniform_real(0.0, cum_weight.back());
        return static_cast<std::size_t>(
            std::lower_bound(cum_weight.begin(), cum_weight.end(), x) - cum_weight.begin());
    };

    std::vector<std::set<std::size_t>> groups_of_fault(config.n_faults);
    long long realized = 0;
    for (std::size_t f = 0; f < config.n_faults; ++f) {
        std::size_t acc = 0;
        std::size_t guard = 0;
        while (acc < desired[f] && guard++ < 64 * n_groups) {
            const std::size_t g = weighted_group();
            if (groups_of_fault[f].insert(g).second) acc += group_size[g];
        }
        realized += static_cast<long long>(acc);
    }

    // Nudge the realized total toward the target with greedy improving moves:
    // remove a planted group (never a fault's last one) or plant a new one,
    // always choosing the move that most shrinks the remaining error.
    const long long slack = std::max<long long>(1, target_total / 50);
    for (int pass = 0; pass < 200; ++pass) {
        const long long diff = realized - target_total;
        if (std::llabs(diff) <= slack) break;
        long long best_delta = 0;  // signed change to `realized`
        std::size_t best_f = config.n_faults, best_g = n_groups;
        for (std::size_t f = 0; f < config.n_faults; ++f) {
            if (diff > 0) {
                if (groups_of_fault[f].size() < 2) continue;
                for (std::size_t g : groups_of_fault[f]) {
                    const long long delta = -static_cast<long long>(group_size[g]);
                    if (std::llabs(diff + delta) < std::llabs(diff + best_delta)) {
                        best_delta = delta;
                        best_f = f;
                        best_g = g;
                    }
                }
            } else {
                for (std::size_t g = 0; g < n_groups; ++g) {
                    if (groups_of_fault[f].count(g)) continue;
                    const long long delta = static_cast<long long>(group_size[g]);
                    if (std::llabs(diff + delta) < std::llabs(diff + best_delta)) {
                        best_delta = delta;
                        best_f = f;
                        best_g = g;
                    }
                }
            }
        }
        if (best_f == config.n_faults) break;  // no improving move exists
        if (best_delta < 0) {
            groups_of_fault[best_f].erase(best_g);
        } else {
            groups_of_fault[best_f].insert(best_g);
        }
        realized += best_delta;
    }
    const double realized_rl =
        static_cast<double>(realized) / static_cast<double>(config.n_faults);
    if (std::abs(realized_rl - config.target_rl) > 0.05 * config.target_rl) {
        throw Error("UnsatisfiableConfig",
                    "could not realize target_rl; achieved " + std::to_string(realized_rl));
    }

    FaultMatrix fm;
    for (std::size_t f = 0; f < config.n_faults; ++f) {
        fm.fault_ids.push_back(padded("F", f + 1, 3));
    }
    for (std::size_t f = 0; f < config.n_faults; ++f) {
        for (std::size_t g : groups_of_fault[f]) {
            for (std::size_t pos : cases_of_group[g]) {
                fm.detects[corpus.test_cases[pos].id].insert(fm.fault_ids[f]);
            }
        }
    }
    return {std::move(corpus), std::move(fm)};
}

}  // namespace tsmin
