#pragma once

#include <string>
#include <vector>

#include "tsmin/common.hpp"

namespace tsmin {

/// The three normalization levels applied before embedding:
///   PM1 — lowercase, collapse whitespace, drop line breaks
///   PM2 — PM1 plus punctuation stripping, tokenization and lemmatization
///   PM3 — no preprocessing, text used as-is (whitespace tokens)
enum class PreprocessMethod { PM1, PM2, PM3 };

PreprocessMethod preprocess_method_from_string(const std::string& name);
std::string to_string(PreprocessMethod method);

struct TokenizedDoc {
    std::string test_case_id;
    std::vector<std::string> tokens;
    std::string normalized_text;
};

/// Whitespace split where punctuation acts as a separator, except '_' and '.'
/// inside alphanumeric identifiers (so "Variable_A" and "v1.2" stay whole).
/// Punctuation-only runs produce no tokens. Deterministic.
std::vector<std::string> tokenize(const std::string& text);

/// Plain whitespace split, nothing stripped (PM3-level tokenization).
std::vector<std::string> whitespace_tokenize(const std::string& text);

/// Rule-based suffix lemmatizer (plural/-ing/-ed stripping with a fixed
/// exception table for domain verbs). Applies only to alphabetic tokens.
std::string lemmatize(const std::string& token);

/// Throws Error("EmptyDocument") on empty input.
TokenizedDoc preprocess(const std::string& raw_text, PreprocessMethod method,
                        const std::string& test_case_id = "");

}  // namespace tsmin
