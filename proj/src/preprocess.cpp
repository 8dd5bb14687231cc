#include "tsmin/preprocess.hpp"

#include <cctype>
#include <unordered_map>

namespace tsmin {

PreprocessMethod preprocess_method_from_string(const std::string& name) {
    if (name == "pm1" || name == "PM1") return PreprocessMethod::PM1;
    if (name == "pm2" || name == "PM2") return PreprocessMethod::PM2;
    if (name == "pm3" || name == "PM3") return PreprocessMethod::PM3;
    throw Error("UnknownPreprocessMethod", name);
}

std::string to_string(PreprocessMethod method) {
    switch (method) {
        case PreprocessMethod::PM1: return "pm1";
        case PreprocessMethod::PM2: return "pm2";
        case PreprocessMethod::PM3: return "pm3";
    }
    return "?";
}

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string lowercase_collapse(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (is_space(c)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

bool all_alpha(const std::string& t) {
    for (char c : t) {
        if (!std::isalpha(static_cast<unsigned char>(c))) return false;
    }
    return !t.empty();
}

}  // namespace

std::vector<std::string> whitespace_tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        if (is_space(c)) {
            if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    const std::size_t n = text.size();
    for (std::size_t i = 0; i < n; ++i) {
        const char c = text[i];
        bool keep = false;
        if (is_alnum(c) || c == '_') {
            keep = true;
        } else if (c == '.') {
            // '.' stays only between alphanumerics, as in version-like ids.
            keep = !cur.empty() && is_alnum(cur.back()) && i + 1 < n && is_alnum(text[i + 1]);
        }
        if (keep) {
            cur += c;
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::string lemmatize(const std::string& token) {
    static const std::unordered_map<std::string, std::string> exceptions = {
        {"sets", "set"},        {"setting", "set"},     {"reads", "read"},
        {"reading", "read"},    {"sends", "send"},      {"sending", "send"},
        {"sent", "send"},       {"checks", "check"},    {"checking", "check"},
        {"checked", "check"},   {"awaits", "await"},    {"awaiting", "await"},
        {"awaited", "await"},   {"creates", "create"},  {"creating", "create"},
        {"created", "create"},  {"removes", "remove"},  {"removing", "remove"},
        {"removed", "remove"},  {"verifies", "verify"}, {"verifying", "verify"},
        {"verified", "verify"}, {"expected", "expect"}, {"matches", "match"},
        {"matching", "match"},  {"matched", "match"},
    };
    if (!all_alpha(token)) return token;
    auto it = exceptions.find(token);
    if (it != exceptions.end()) return it->second;

    const std::size_t n = token.size();
    auto ends_with = [&](const char* suf) {
        const std::size_t len = std::char_traits<char>::length(suf);
        return n >= len && token.compare(n - len, len, suf) == 0;
    };
    auto drop = [&](std::size_t k) { return token.substr(0, n - k); };

    if (n >= 5 && ends_with("ies")) return drop(3) + "y";
    if (n >= 5 && ends_with("sses")) return drop(2);
    if (n >= 4 && (ends_with("xes") || ends_with("zes") || ends_with("ches") ||
                   ends_with("shes"))) {
        return drop(2);
    }
    if (n >= 3 && ends_with("s") && !ends_with("ss") && !ends_with("us") && !ends_with("is")) {
        return drop(1);
    }
    if (n >= 6 && ends_with("ing")) {
        std::string base = drop(3);
        if (base.size() >= 3 && base[base.size() - 1] == base[base.size() - 2]) base.pop_back();
        return base;
    }
    if (n >= 5 && ends_with("ed") && !ends_with("eed")) {
        std::string base = drop(2);
        if (base.size() >= 3 && base[base.size() - 1] == base[base.size() - 2]) base.pop_back();
        return base;
    }
    return token;
}

TokenizedDoc preprocess(const std::string& raw_text, PreprocessMethod method,
                        const std::string& test_case_id) {
    if (raw_text.empty()) throw Error("EmptyDocument", "test case " + test_case_id);
    TokenizedDoc doc;
    doc.test_case_id = test_case_id;
    switch (method) {
        case PreprocessMethod::PM1: {
            doc.normalized_text = lowercase_collapse(raw_text);
            doc.tokens = whitespace_tokenize(doc.normalized_text);
            break;
        }
        case PreprocessMethod::PM2: {
            const std::string base = lowercase_collapse(raw_text);
            for (auto& t : tokenize(base)) doc.tokens.push_back(lemmatize(t));
            std::string joined;
            for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
                if (i) joined += ' ';
                joined += doc.tokens[i];
            }
            doc.normalized_text = std::move(joined);
            break;
        }
        case PreprocessMethod::PM3: {
            doc.normalized_text = raw_text;
            doc.tokens = whitespace_tokenize(raw_text);
            break;
        }
    }
    return doc;
}

}  // namespace tsmin
