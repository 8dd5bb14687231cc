#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsmin/common.hpp"

namespace tsmin {

/// A natural-language test case traced to one or more requirements.
struct TestCase {
    std::string id;
    std::vector<std::string> requirement_ids;  // non-empty, unique, file order
    std::vector<std::string> steps;            // non-empty, ordered step lines
    /// Steps joined with '\n' (line breaks preserved).
    std::string raw_text() const;
};

/// A requirement-traced test suite. Test-case order equals file order and
/// defines the index used by selection vectors downstream.
struct Corpus {
    std::vector<std::string> requirements;
    std::vector<TestCase> test_cases;

    std::size_t m() const { return test_cases.size(); }
    std::size_t n_req() const { return requirements.size(); }

    /// Index of a test case id, or nullopt.
    std::optional<std::size_t> case_index(const std::string& id) const;
    std::optional<std::size_t> req_index(const std::string& id) const;

    /// Requirement indices covered by test case i (resolved, cached).
    const std::vector<std::vector<int>>& coverage_by_case() const;

    void rebuild_indexes();

private:
    std::unordered_map<std::string, std::size_t> case_index_;
    std::unordered_map<std::string, std::size_t> req_index_;
    mutable std::vector<std::vector<int>> coverage_cache_;
};

/// Ground-truth fault detection data. Evaluation-only: the minimizer never
/// sees this structure.
struct FaultMatrix {
    std::vector<std::string> fault_ids;  // unique faults, file order of first mention
    std::unordered_map<std::string, std::set<std::string>> detects;  // test-case id -> faults

    const std::set<std::string>& detects_of(const std::string& test_case_id) const;
    std::size_t f_unique() const { return fault_ids.size(); }
};

struct ValidationFinding {
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationFinding> errors;
    std::vector<ValidationFinding> warnings;
    std::size_t m = 0;
    std::size_t n_req = 0;
    std::size_t f_unique = 0;
    std::optional<double> redundancy;

    bool ok() const { return errors.empty(); }
};

/// Parse a line-delimited corpus file: a header record declaring the
/// requirements followed by one JSON record per test case.
Corpus parse_corpus(const std::string& path);
Corpus parse_corpus_stream(std::istream& in, const std::string& origin);

void serialize_corpus(const Corpus& corpus, std::ostream& out);
void serialize_corpus(const Corpus& corpus, const std::string& path);

FaultMatrix parse_fault_matrix(const std::string& path, const Corpus& corpus);
FaultMatrix parse_fault_matrix_stream(std::istream& in, const Corpus& corpus,
                                      const std::string& origin);

void serialize_fault_matrix(const FaultMatrix& faults, const Corpus& corpus, std::ostream& out);
void serialize_fault_matrix(const FaultMatrix& faults, const Corpus& corpus,
                            const std::string& path);

/// Mean detections per unique fault over the given subset (whole corpus when
/// subset is nullopt). F_unique is counted over the included set. Throws
/// Error("EmptyFaultUnion") when the included set detects nothing.
double redundancy_level(const Corpus& corpus, const FaultMatrix& faults,
                        const std::optional<std::set<std::string>>& subset = std::nullopt);

/// |a ∩ b| / |a ∪ b|. Throws Error("EmptySets") when both are empty.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

ValidationReport validate_corpus(const Corpus& corpus, const FaultMatrix* faults = nullptr);

}  // namespace tsmin
