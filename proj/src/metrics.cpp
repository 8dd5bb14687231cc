#include "tsmin/metrics.hpp"

namespace tsmin {

std::set<std::string> detected_faults(const std::vector<std::string>& subset_ids,
                                      const FaultMatrix& faults) {
    std::set<std::string> out;
    for (const auto& id : subset_ids) {
        const auto& d = faults.detects_of(id);
        out.insert(d.begin(), d.end());
    }
    return out;
}

double fdr(const std::vector<std::string>& subset_ids, const FaultMatrix& faults,
           const Corpus& corpus) {
    std::vector<std::string> all_ids;
    all_ids.reserve(corpus.m());
    for (const auto& tc : corpus.test_cases) all_ids.push_back(tc.id);
    const auto total = detected_faults(all_ids, faults);
    if (total.empty()) throw Error("EmptyFaultUnion", "full suite detects no faults");
    const auto got = detected_faults(subset_ids, faults);
    return static_cast<double>(got.size()) / static_cast<double>(total.size());
}

double coverage(const std::vector<std::string>& subset_ids, const Corpus& corpus) {
    if (corpus.n_req() == 0) return 1.0;
    std::set<std::string> covered;
    for (const auto& id : subset_ids) {
        auto idx = corpus.case_index(id);
        if (!idx) continue;
        const auto& tc = corpus.test_cases[*idx];
        covered.insert(tc.requirement_ids.begin(), tc.requirement_ids.end());
    }
    return static_cast<double>(covered.size()) / static_cast<double>(corpus.n_req());
}

}  // namespace tsmin
