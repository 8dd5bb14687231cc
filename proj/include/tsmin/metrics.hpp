#pragma once

#include <set>
#include <string>
#include <vector>

#include "tsmin/corpus.hpp"

namespace tsmin {

/// Unique faults detected by the subset over unique faults detected by the
/// full suite.
double fdr(const std::vector<std::string>& subset_ids, const FaultMatrix& faults,
           const Corpus& corpus);

/// Requirements covered by the subset over all requirements.
double coverage(const std::vector<std::string>& subset_ids, const Corpus& corpus);

std::set<std::string> detected_faults(const std::vector<std::string>& subset_ids,
                                      const FaultMatrix& faults);

}  // namespace tsmin
