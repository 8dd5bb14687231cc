#include "tsmin/corpus.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tsmin {

using json = nlohmann::ordered_json;

std::string TestCase::raw_text() const {
    std::string out;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (i) out += '\n';
        out += steps[i];
    }
    return out;
}

std::optional<std::size_t> Corpus::case_index(const std::string& id) const {
    auto it = case_index_.find(id);
    if (it == case_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Corpus::req_index(const std::string& id) const {
    auto it = req_index_.find(id);
    if (it == req_index_.end()) return std::nullopt;
    return it->second;
}

const std::vector<std::vector<int>>& Corpus::coverage_by_case() const {
    if (coverage_cache_.size() != test_cases.size()) {
        coverage_cache_.clear();
        coverage_cache_.reserve(test_cases.size());
        for (const auto& tc : test_cases) {
            std::vector<int> reqs;
            reqs.reserve(tc.requirement_ids.size());
            for (const auto& r : tc.requirement_ids) {
                auto it = req_index_.find(r);
                reqs.push_back(static_cast<int>(it->second));
            }
            coverage_cache_.push_back(std::move(reqs));
        }
    }
    return coverage_cache_;
}

void Corpus::rebuild_indexes() {
    case_index_.clear();
    req_index_.clear();
    coverage_cache_.clear();
    for (std::size_t i = 0; i < requirements.size(); ++i) req_index_[requirements[i]] = i;
    for (std::size_t i = 0; i < test_cases.size(); ++i) case_index_[test_cases[i].id] = i;
}

const std::set<std::string>& FaultMatrix::detects_of(const std::string& test_case_id) const {
    static const std::set<std::string> empty;
    auto it = detects.find(test_case_id);
    return it == detects.end() ? empty : it->second;
}

namespace {

json parse_line(const std::string& line, std::size_t line_no, const std::string& origin) {
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
        throw Error("MalformedRecord",
                    origin + ":" + std::to_string(line_no) + ": not a JSON object");
    }
    return rec;
}

}  // namespace

Corpus parse_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FileNotFound", path);
    return parse_corpus_stream(in, path);
}

Corpus parse_corpus_stream(std::istream& in, const std::string& origin) {
    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::set<std::string> req_set;
    std::set<std::string> id_set;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec = parse_line(line, line_no, origin);
        if (!header_seen) {
            if (!rec.contains("requirements") || !rec["requirements"].is_array()) {
                throw Error("MalformedRecord",
                            origin + ":" + std::to_string(line_no) +
                                ": expected header record with \"requirements\"");
            }
            for (const auto& r : rec["requirements"]) {
                std::string rid = r.get<std::string>();
                if (!req_set.insert(rid).second) {
                    throw Error("DuplicateRequirement", rid);
                }
                corpus.requirements.push_back(std::move(rid));
            }
            header_seen = true;
            continue;
        }
        if (!rec.contains("id") || !rec.contains("requirement_ids") || !rec.contains("steps")) {
            throw Error("MalformedRecord",
                        origin + ":" + std::to_string(line_no) + ": missing field");
        }
        TestCase tc;
        tc.id = rec["id"].get<std::string>();
        if (!id_set.insert(tc.id).second) throw Error("DuplicateId", tc.id);
        for (const auto& r : rec["requirement_ids"]) {
            std::string rid = r.get<std::string>();
            if (!req_set.count(rid)) {
                throw Error("UnknownRequirement", origin + ":" + std::to_string(line_no) + ": " +
                                                      rid + " (test case " + tc.id + ")");
            }
            tc.requirement_ids.push_back(std::move(rid));
        }
        if (tc.requirement_ids.empty()) {
            throw Error("NoRequirements",
                        origin + ":" + std::to_string(line_no) + ": test case " + tc.id);
        }
        for (const auto& s : rec["steps"]) tc.steps.push_back(s.get<std::string>());
        if (tc.steps.empty()) {
            throw Error("NoSteps", origin + ":" + std::to_string(line_no) + ": test case " + tc.id);
        }
        corpus.test_cases.push_back(std::move(tc));
    }
    if (!header_seen) throw Error("MalformedRecord", origin + ": empty corpus file");
    corpus.rebuild_indexes();
    return corpus;
}

void serialize_corpus(const Corpus& corpus, std::ostream& out) {
    json header;
    header["requirements"] = corpus.requirements;
    out << header.dump() << '\n';
    for (const auto& tc : corpus.test_cases) {
        json rec;
        rec["id"] = tc.id;
        rec["requirement_ids"] = tc.requirement_ids;
        rec["steps"] = tc.steps;
        out << rec.dump() << '\n';
    }
}

void serialize_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("FileWriteError", path);
    serialize_corpus(corpus, out);
}

FaultMatrix parse_fault_matrix(const std::string& path, const Corpus& corpus) {
    std::ifstream in(path);
    if (!in) throw Error("FileNotFound", path);
    return parse_fault_matrix_stream(in, corpus, path);
}

FaultMatrix parse_fault_matrix_stream(std::istream& in, const Corpus& corpus,
                                      const std::string& origin) {
    FaultMatrix fm;
    std::set<std::string> known_faults;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec = parse_line(line, line_no, origin);
        if (!rec.contains("test_case_id") || !rec.contains("fault_ids")) {
            throw Error("MalformedRecord",
                        origin + ":" + std::to_string(line_no) + ": missing field");
        }
        std::string tc_id = rec["test_case_id"].get<std::string>();
        if (!corpus.case_index(tc_id)) {
            throw Error("DanglingFaultRef",
                        origin + ":" + std::to_string(line_no) + ": " + tc_id);
        }
        auto& dst = fm.detects[tc_id];
        for (const auto& f : rec["fault_ids"]) {
            std::string fid = f.get<std::string>();
            if (known_faults.insert(fid).second) fm.fault_ids.push_back(fid);
            dst.insert(std::move(fid));
        }
    }
    return fm;
}

void serialize_fault_matrix(const FaultMatrix& faults, const Corpus& corpus, std::ostream& out) {
    // Corpus order keeps the file deterministic.
    for (const auto& tc : corpus.test_cases) {
        auto it = faults.detects.find(tc.id);
        if (it == faults.detects.end() || it->second.empty()) continue;
        json rec;
        rec["test_case_id"] = tc.id;
        rec["fault_ids"] = it->second;
        out << rec.dump() << '\n';
    }
}

void serialize_fault_matrix(const FaultMatrix& faults, const Corpus& corpus,
                            const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("FileWriteError", path);
    serialize_fault_matrix(faults, corpus, out);
}

double redundancy_level(const Corpus& corpus, const FaultMatrix& faults,
                        const std::optional<std::set<std::string>>& subset) {
    std::size_t total = 0;
    std::set<std::string> unique;
    for (const auto& tc : corpus.test_cases) {
        if (subset && !subset->count(tc.id)) continue;
        const auto& d = faults.detects_of(tc.id);
        total += d.size();
        unique.insert(d.begin(), d.end());
    }
    if (unique.empty()) throw Error("EmptyFaultUnion", "included set detects no faults");
    return static_cast<double>(total) / static_cast<double>(unique.size());
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) throw Error("EmptySets", "jaccard undefined for two empty sets");
    std::size_t inter = 0;
    for (const auto& x : a) inter += b.count(x);
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

ValidationReport validate_corpus(const Corpus& corpus, const FaultMatrix* faults) {
    ValidationReport rep;
    rep.m = corpus.m();
    rep.n_req = corpus.n_req();

    std::set<std::string> covered;
    for (const auto& tc : corpus.test_cases) {
        if (tc.requirement_ids.empty()) {
            rep.errors.push_back({"NoRequirements", "test case " + tc.id});
            continue;
        }
        if (tc.requirement_ids.size() > 1) {
            rep.warnings.push_back({"MultiRequirementCase", "test case " + tc.id + " covers " +
                                                                std::to_string(
                                                                    tc.requirement_ids.size()) +
                                                                " requirements"});
        }
        for (const auto& r : tc.requirement_ids) {
            if (!corpus.req_index(r)) {
                rep.errors.push_back({"UnknownRequirement", r + " (test case " + tc.id + ")"});
            } else {
                covered.insert(r);
            }
        }
        if (tc.steps.empty()) rep.errors.push_back({"NoSteps", "test case " + tc.id});
    }
    for (const auto& r : corpus.requirements) {
        if (!covered.count(r)) rep.errors.push_back({"UncoveredRequirement", r});
    }

    if (faults) {
        rep.f_unique = faults->f_unique();
        for (const auto& [tc_id, _] : faults->detects) {
            if (!corpus.case_index(tc_id)) rep.errors.push_back({"DanglingFaultRef", tc_id});
        }
        if (rep.errors.empty() && rep.f_unique > 0) {
            rep.redundancy = redundancy_level(corpus, *faults);
        }
    }
    return rep;
}

}  // namespace tsmin
