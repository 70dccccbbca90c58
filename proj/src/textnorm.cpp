#include "refbench/textnorm.hpp"

#include <algorithm>
#include <cstdint>

#include "refbench/matching.hpp"

namespace refbench {

namespace {

struct CaseFoldEntry {
    char32_t cp;
    char32_t folded[3];
};

struct CpRange {
    char32_t lo;
    char32_t hi;
};

#include "unicode_tables.inc"

bool in_ranges(const CpRange* ranges, size_t n, char32_t cp) {
    size_t lo = 0, hi = n;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (cp < ranges[mid].lo)
            hi = mid;
        else if (cp > ranges[mid].hi)
            lo = mid + 1;
        else
            return true;
    }
    return false;
}

bool is_punct(char32_t cp) {
    return in_ranges(kPunctRanges, std::size(kPunctRanges), cp);
}

bool is_space(char32_t cp) {
    return in_ranges(kSpaceRanges, std::size(kSpaceRanges), cp);
}

// Appends the case folding of cp (1-3 code points; identity when unmapped).
void fold_append(char32_t cp, std::vector<char32_t>& out) {
    size_t lo = 0, hi = std::size(kCaseFolds);
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (kCaseFolds[mid].cp < cp)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < std::size(kCaseFolds) && kCaseFolds[lo].cp == cp) {
        for (char32_t f : kCaseFolds[lo].folded)
            if (f) out.push_back(f);
    } else {
        out.push_back(cp);
    }
}

// Decodes UTF-8; each invalid byte becomes U+FFFD.
std::vector<char32_t> decode_utf8(const std::string& s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        uint8_t b = s[i];
        char32_t cp;
        int len;
        if (b < 0x80) {
            cp = b;
            len = 1;
        } else if ((b & 0xE0) == 0xC0) {
            cp = b & 0x1F;
            len = 2;
        } else if ((b & 0xF0) == 0xE0) {
            cp = b & 0x0F;
            len = 3;
        } else if ((b & 0xF8) == 0xF0) {
            cp = b & 0x07;
            len = 4;
        } else {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        if (i + len > s.size()) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        bool ok = true;
        for (int k = 1; k < len; ++k) {
            uint8_t cont = s[i + k];
            if ((cont & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (cont & 0x3F);
        }
        if (!ok || cp > 0x10FFFF) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::vector<char32_t> normalize_codepoints(const std::vector<char32_t>& raw) {
    std::vector<char32_t> out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char32_t cp : raw) {
        if (is_space(cp) || is_punct(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(U' ');
            pending_space = false;
        }
        fold_append(cp, out);
    }
    return out;
}

}  // namespace

std::vector<char32_t> normalize_to_codepoints(const std::string& s) {
    return normalize_codepoints(decode_utf8(s));
}

std::string normalize_text(const std::string& s) {
    std::string out;
    for (char32_t cp : normalize_to_codepoints(s)) encode_utf8(cp, out);
    return out;
}

size_t levenshtein(const std::vector<char32_t>& a, const std::vector<char32_t>& b) {
    const auto& shorter = a.size() <= b.size() ? a : b;
    const auto& longer = a.size() <= b.size() ? b : a;
    std::vector<size_t> row(shorter.size() + 1);
    for (size_t i = 0; i <= shorter.size(); ++i) row[i] = i;
    for (size_t j = 1; j <= longer.size(); ++j) {
        size_t diag = row[0];
        row[0] = j;
        for (size_t i = 1; i <= shorter.size(); ++i) {
            size_t saved = row[i];
            if (shorter[i - 1] == longer[j - 1])
                row[i] = diag;
            else
                row[i] = std::min({row[i - 1], row[i], diag}) + 1;
            diag = saved;
        }
    }
    return row[shorter.size()];
}

double codepoint_similarity(const std::vector<char32_t>& a,
                            const std::vector<char32_t>& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    size_t d = levenshtein(a, b);
    return 1.0 - static_cast<double>(d) / static_cast<double>(std::max(a.size(), b.size()));
}

double string_similarity(const std::string& a, const std::string& b) {
    return codepoint_similarity(normalize_to_codepoints(a), normalize_to_codepoints(b));
}

CanonicalName canonicalize_name(const std::string& s) {
    CanonicalName name;
    size_t comma = s.find(',');
    std::string surname_block = comma == std::string::npos ? "" : s.substr(0, comma);
    std::string rest = comma == std::string::npos ? s : s.substr(comma + 1);

    auto push_tokens = [&](const std::string& part) {
        int n = 0;
        std::string norm = normalize_text(part);
        size_t start = 0;
        while (start < norm.size()) {
            size_t end = norm.find(' ', start);
            if (end == std::string::npos) end = norm.size();
            if (end > start) {
                name.tokens.push_back(norm.substr(start, end - start));
                ++n;
            }
            start = end + 1;
        }
        return n;
    };

    if (comma != std::string::npos) {
        int surname_tokens = push_tokens(surname_block);
        push_tokens(rest);
        name.surname_len = surname_tokens;
    } else {
        push_tokens(rest);
    }
    return name;
}

namespace {

std::vector<char32_t> joined_codepoints(const std::vector<std::string>& tokens,
                                        int rotate_first) {
    std::string joined;
    size_t n = tokens.size();
    for (size_t i = 0; i < n; ++i) {
        const std::string& tok = tokens[(i + rotate_first) % n];
        if (!joined.empty()) joined += ' ';
        joined += tok;
    }
    return normalize_to_codepoints(joined);
}

}  // namespace

double name_similarity(const CanonicalName& g, const CanonicalName& p) {
    if (g.empty() && p.empty()) return 1.0;
    if (g.empty() || p.empty()) return 0.0;

    auto g_sorted = g.tokens;
    auto p_sorted = p.tokens;
    std::sort(g_sorted.begin(), g_sorted.end());
    std::sort(p_sorted.begin(), p_sorted.end());
    if (g_sorted == p_sorted) return 1.0;

    auto orderings = [](const CanonicalName& n) {
        std::vector<std::vector<char32_t>> out;
        out.push_back(joined_codepoints(n.tokens, 0));
        if (n.surname_len > 0 && n.surname_len < static_cast<int>(n.tokens.size()))
            out.push_back(joined_codepoints(n.tokens, n.surname_len));
        return out;
    };

    double best = 0.0;
    for (const auto& gv : orderings(g))
        for (const auto& pv : orderings(p))
            best = std::max(best, codepoint_similarity(gv, pv));
    return best;
}

double name_similarity(const std::string& g, const std::string& p) {
    return name_similarity(canonicalize_name(g), canonicalize_name(p));
}

double author_list_similarity(const std::vector<std::string>& gold,
                              const std::vector<std::string>& pred) {
    if (gold.empty() && pred.empty()) return 1.0;
    if (gold.empty() || pred.empty()) return 0.0;

    std::vector<CanonicalName> g(gold.size()), p(pred.size());
    for (size_t i = 0; i < gold.size(); ++i) g[i] = canonicalize_name(gold[i]);
    for (size_t j = 0; j < pred.size(); ++j) p[j] = canonicalize_name(pred[j]);

    SimilarityMatrix m(gold.size(), pred.size());
    for (size_t i = 0; i < gold.size(); ++i)
        for (size_t j = 0; j < pred.size(); ++j)
            m.at(i, j) = name_similarity(g[i], p[j]);

    Pairing pairing = optimal_assignment(m);
    double total = 0.0;
    for (const auto& pair : pairing.pairs) total += pair.similarity;
    return total / static_cast<double>(std::max(gold.size(), pred.size()));
}

double field_similarity(FieldId field, const ReferenceRecord& gold,
                        const ReferenceRecord& pred, const FieldSimConfig& cfg) {
    if (field == FieldId::authors)
        return author_list_similarity(gold.authors, pred.authors);
    if (field == FieldId::editors)
        return author_list_similarity(gold.editors, pred.editors);

    auto value = [](const ReferenceRecord& r, FieldId f) -> const std::string& {
        switch (f) {
            case FieldId::full_title: return r.full_title;
            case FieldId::container_title: return r.container_title;
            case FieldId::publisher: return r.publisher;
            case FieldId::place: return r.place;
            case FieldId::year: return r.year;
            case FieldId::volume: return r.volume;
            case FieldId::issue: return r.issue;
            case FieldId::pages: return r.pages;
            case FieldId::doi: return r.doi;
            default: return r.url;
        }
    };
    const std::string& gv = value(gold, field);
    const std::string& pv = value(pred, field);
    if (field == FieldId::year && cfg.year_exact)
        return normalize_text(gv) == normalize_text(pv) ? 1.0 : 0.0;
    return string_similarity(gv, pv);
}

}  // namespace refbench
