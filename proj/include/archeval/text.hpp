#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace archeval::text {

// ---------------------------------------------------------------------------
// UTF-8. Decoding is total: malformed sequences decode to U+FFFD one byte at
// a time, so every routine below accepts arbitrary byte input.
// ---------------------------------------------------------------------------

inline constexpr char32_t kReplacement = 0xFFFD;

inline std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char b0 = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            len = 1;
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        if (i + len > s.size()) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            unsigned char b = static_cast<unsigned char>(s[i + k]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF) ||
            (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
            (len == 4 && cp < 0x10000)) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
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

inline std::string encode_utf8(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

// Simple case mapping: ASCII, Latin-1 supplement and Latin Extended-A.
// Scripts without case (CJK etc.) pass through unchanged.
inline char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if (cp == 0x178) return 0xFF;  // Y with diaeresis
    if (cp >= 0x100 && cp <= 0x137) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
    return cp;
}

inline bool is_ascii_upper(char32_t cp) { return cp >= 'A' && cp <= 'Z'; }
inline bool is_ascii_lower(char32_t cp) { return cp >= 'a' && cp <= 'z'; }
inline bool is_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

// Letter-ish: anything we keep inside a token. Non-ASCII codepoints count
// as letters except common punctuation blocks.
inline bool is_word_char(char32_t cp) {
    if (cp < 0x80) {
        return is_ascii_upper(cp) || is_ascii_lower(cp) || is_digit(cp);
    }
    if (cp >= 0x300 && cp <= 0x36F) return true;  // combining marks stay attached
    if (cp == 0xAB || cp == 0xBB) return false;   // guillemets are separators
    if (cp >= 0xA0 && cp <= 0xBF) return false;   // Latin-1 punctuation/symbols
    if (cp == 0xD7 || cp == 0xF7) return false;
    if (cp >= 0x2000 && cp <= 0x206F) return false;  // general punctuation
    if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
    if (cp >= 0xFF01 && cp <= 0xFF0F) return false;  // fullwidth punctuation
    if (cp >= 0xFF1A && cp <= 0xFF20) return false;
    if (cp >= 0xFF3B && cp <= 0xFF40) return false;
    if (cp >= 0xFF5B && cp <= 0xFF65) return false;
    if (cp == kReplacement) return false;
    return true;
}

// Minimal NFC composition for Latin base + combining diacritic pairs. Input
// that is already precomposed passes through untouched; this only folds the
// decomposed forms most likely to appear in bilingual diagram names.
inline char32_t compose_latin(char32_t base, char32_t mark) {
    struct Entry { char32_t base, mark, composed; };
    static constexpr Entry kTable[] = {
        {'A', 0x300, 0xC0}, {'A', 0x301, 0xC1}, {'A', 0x302, 0xC2},
        {'A', 0x303, 0xC3}, {'A', 0x308, 0xC4}, {'A', 0x30A, 0xC5},
        {'C', 0x327, 0xC7}, {'E', 0x300, 0xC8}, {'E', 0x301, 0xC9},
        {'E', 0x302, 0xCA}, {'E', 0x308, 0xCB}, {'I', 0x300, 0xCC},
        {'I', 0x301, 0xCD}, {'I', 0x302, 0xCE}, {'I', 0x308, 0xCF},
        {'N', 0x303, 0xD1}, {'O', 0x300, 0xD2}, {'O', 0x301, 0xD3},
        {'O', 0x302, 0xD4}, {'O', 0x303, 0xD5}, {'O', 0x308, 0xD6},
        {'U', 0x300, 0xD9}, {'U', 0x301, 0xDA}, {'U', 0x302, 0xDB},
        {'U', 0x308, 0xDC}, {'Y', 0x301, 0xDD},
        {'a', 0x300, 0xE0}, {'a', 0x301, 0xE1}, {'a', 0x302, 0xE2},
        {'a', 0x303, 0xE3}, {'a', 0x308, 0xE4}, {'a', 0x30A, 0xE5},
        {'c', 0x327, 0xE7}, {'e', 0x300, 0xE8}, {'e', 0x301, 0xE9},
        {'e', 0x302, 0xEA}, {'e', 0x308, 0xEB}, {'i', 0x300, 0xEC},
        {'i', 0x301, 0xED}, {'i', 0x302, 0xEE}, {'i', 0x308, 0xEF},
        {'n', 0x303, 0xF1}, {'o', 0x300, 0xF2}, {'o', 0x301, 0xF3},
        {'o', 0x302, 0xF4}, {'o', 0x303, 0xF5}, {'o', 0x308, 0xF6},
        {'u', 0x300, 0xF9}, {'u', 0x301, 0xFA}, {'u', 0x302, 0xFB},
        {'u', 0x308, 0xFC}, {'y', 0x301, 0xFD}, {'y', 0x308, 0xFF},
    };
    for (const Entry& e : kTable) {
        if (e.base == base && e.mark == mark) return e.composed;
    }
    return 0;
}

inline void compose_nfc(std::vector<char32_t>& cps) {
    std::size_t w = 0;
    for (std::size_t r = 0; r < cps.size(); ++r) {
        if (w > 0 && cps[r] >= 0x300 && cps[r] <= 0x36F) {
            if (char32_t c = compose_latin(cps[w - 1], cps[r])) {
                cps[w - 1] = c;
                continue;
            }
        }
        cps[w++] = cps[r];
    }
    cps.resize(w);
}

// Removes stereotype spans: <<...>> and guillemet-delimited «...» runs.
inline std::vector<char32_t> strip_stereotypes(const std::vector<char32_t>& cps) {
    std::vector<char32_t> out;
    out.reserve(cps.size());
    std::size_t i = 0;
    while (i < cps.size()) {
        if (cps[i] == '<' && i + 1 < cps.size() && cps[i + 1] == '<') {
            std::size_t j = i + 2;
            while (j + 1 < cps.size() && !(cps[j] == '>' && cps[j + 1] == '>')) ++j;
            if (j + 1 < cps.size()) {
                i = j + 2;
                continue;
            }
        }
        if (cps[i] == 0xAB) {  // «
            std::size_t j = i + 1;
            while (j < cps.size() && cps[j] != 0xBB) ++j;
            if (j < cps.size()) {
                i = j + 1;
                continue;
            }
        }
        out.push_back(cps[i]);
        ++i;
    }
    return out;
}

/// Normalizes a display name for map lookups and sort keys: NFC, lowercase,
/// stereotypes/guillemets removed, whitespace and punctuation collapsed to
/// single spaces.
inline std::string normalize_name(std::string_view raw) {
    std::vector<char32_t> cps = decode_utf8(raw);
    compose_nfc(cps);
    cps = strip_stereotypes(cps);
    std::string out;
    bool pending_sep = false;
    for (char32_t cp : cps) {
        if (!is_word_char(cp)) {
            pending_sep = true;
            continue;
        }
        if (pending_sep && !out.empty()) out.push_back(' ');
        pending_sep = false;
        append_utf8(out, to_lower(cp));
    }
    return out;
}

/// Splits a name into lowercase word tokens. Boundaries: whitespace,
/// punctuation, snake/kebab separators and camelCase transitions. An
/// uppercase run is kept whole unless it starts a new capitalized word,
/// so "MySQL" stays one token while "UserService" splits in two.
inline std::vector<std::string> split_words(std::string_view raw) {
    std::vector<char32_t> cps = decode_utf8(raw);
    compose_nfc(cps);
    cps = strip_stereotypes(cps);

    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    const std::size_t n = cps.size();
    for (std::size_t i = 0; i < n; ++i) {
        char32_t cp = cps[i];
        if (!is_word_char(cp)) {
            flush();
            continue;
        }
        if (i > 0 && is_ascii_upper(cp)) {
            char32_t prev = cps[i - 1];
            bool next_lower = (i + 1 >= n) ? true : is_ascii_lower(cps[i + 1]);
            bool next_is_word = (i + 1 < n) && is_word_char(cps[i + 1]);
            if (!next_is_word && i + 1 < n) next_lower = true;
            if ((is_ascii_lower(prev) || is_digit(prev)) && next_lower) flush();
            else if (is_ascii_upper(prev) && i + 1 < n && is_ascii_lower(cps[i + 1])) flush();
        }
        append_utf8(current, to_lower(cp));
    }
    flush();
    return tokens;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
    return s.substr(b, e - b);
}

inline std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c += 0x20;
    }
    return out;
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

}  // namespace archeval::text
