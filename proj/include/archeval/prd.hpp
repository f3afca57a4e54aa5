#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "archeval/detail/hash.hpp"
#include "archeval/error.hpp"
#include "archeval/text.hpp"

namespace archeval {

/// The six canonical PRD sections, in document order.
enum class SectionKind {
    introduction,
    core_objectives,
    functional_features,
    technical_constraints,
    non_functional_requirements,
    system_architecture_description,
};

inline constexpr std::array<SectionKind, 6> kSectionOrder = {
    SectionKind::introduction,
    SectionKind::core_objectives,
    SectionKind::functional_features,
    SectionKind::technical_constraints,
    SectionKind::non_functional_requirements,
    SectionKind::system_architecture_description,
};

inline std::string_view canonical_title(SectionKind kind) {
    switch (kind) {
        case SectionKind::introduction: return "System Introduction";
        case SectionKind::core_objectives: return "Core Objectives";
        case SectionKind::functional_features: return "Functional Features";
        case SectionKind::technical_constraints: return "Technical Constraints";
        case SectionKind::non_functional_requirements: return "Non-functional Requirements";
        case SectionKind::system_architecture_description: return "System Architecture Description";
    }
    return "";
}

enum class ContextSetting { full, no_arch, min };

inline std::string_view to_string(ContextSetting s) {
    switch (s) {
        case ContextSetting::full: return "full";
        case ContextSetting::no_arch: return "noarch";
        case ContextSetting::min: return "min";
    }
    return "full";
}

inline std::optional<ContextSetting> context_setting_from_string(std::string_view s) {
    if (s == "full") return ContextSetting::full;
    if (s == "noarch" || s == "no_arch" || s == "-arch") return ContextSetting::no_arch;
    if (s == "min") return ContextSetting::min;
    return std::nullopt;
}

/// Extra heading-name spellings accepted for each section kind; merged on
/// top of the built-in English and Chinese synonym lists.
class HeadingSynonyms {
public:
    void add(SectionKind kind, std::string_view heading) {
        entries_[text::normalize_name(heading)] = kind;
    }

    std::optional<SectionKind> match(std::string_view normalized) const {
        auto it = entries_.find(std::string(normalized));
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    static HeadingSynonyms defaults() {
        HeadingSynonyms h;
        auto add_all = [&h](SectionKind kind, std::initializer_list<const char*> names) {
            for (const char* n : names) h.add(kind, n);
        };
        add_all(SectionKind::introduction,
                {"system introduction", "introduction", "overview", "system overview", "intro",
                 "系统简介", "系统介绍", "简介", "引言", "概述"});
        add_all(SectionKind::core_objectives,
                {"core objectives", "objectives", "goals", "core goals", "project objectives",
                 "核心目标", "目标", "项目目标"});
        add_all(SectionKind::functional_features,
                {"functional features", "functional feature", "features",
                 "functional requirements", "功能特性", "功能特点", "功能需求", "功能"});
        add_all(SectionKind::technical_constraints,
                {"technical constraints", "technical constraint", "constraints",
                 "technical requirements", "技术约束", "技术限制", "技术要求"});
        add_all(SectionKind::non_functional_requirements,
                {"non functional requirements", "nonfunctional requirements",
                 "non functional requirement", "quality attributes", "非功能需求",
                 "非功能性需求", "质量属性"});
        add_all(SectionKind::system_architecture_description,
                {"system architecture description", "architecture description",
                 "system architecture", "architecture", "architecture overview",
                 "系统架构描述", "系统架构", "架构描述", "架构设计"});
        return h;
    }

private:
    std::unordered_map<std::string, SectionKind> entries_;
};

struct PrdSection {
    SectionKind kind;
    std::string heading;  // as written in the source
    std::string body;     // byte-exact up to the next top-level heading
};

struct PrdDocument {
    std::vector<PrdSection> sections;  // source order
    std::vector<std::pair<std::string, std::string>> extras;  // unmapped heading -> body
    std::vector<std::string> warnings;
    std::string source_digest;

    const PrdSection* find(SectionKind kind) const {
        for (const PrdSection& s : sections) {
            if (s.kind == kind) return &s;
        }
        return nullptr;
    }
};

namespace detail {

// "1.", "2)", "(3)", "third-level 1.2.3", and CJK "一、" numbering prefixes
// are stripped before heading lookup.
inline std::string strip_heading_numbering(std::string_view heading) {
    auto cps = text::decode_utf8(heading);
    std::size_t i = 0;
    auto is_cjk_numeral = [](char32_t c) {
        static constexpr char32_t kNumerals[] = {0x4E00, 0x4E8C, 0x4E09, 0x56DB, 0x4E94,
                                                 0x516D, 0x4E03, 0x516B, 0x4E5D, 0x5341};
        for (char32_t n : kNumerals) {
            if (c == n) return true;
        }
        return false;
    };
    std::size_t consumed = 0;
    while (i < cps.size()) {
        char32_t c = cps[i];
        bool numbering = (c >= '0' && c <= '9') || c == '.' || c == ')' || c == '(' ||
                         c == 0x3001 /* 、 */ || c == 0xFF0E || c == ':' || c == 0xFF1A ||
                         c == ' ' || c == '\t' || c == '-' || is_cjk_numeral(c);
        if (!numbering) break;
        ++i;
        consumed = i;
    }
    std::string out;
    for (std::size_t k = consumed; k < cps.size(); ++k) text::append_utf8(out, cps[k]);
    if (out.empty()) return std::string(heading);  // purely numeric headings stay as-is
    return out;
}

}  // namespace detail

/// Splits markdown into the six canonical sections. Top level is the
/// smallest ATX heading depth present; headings map through normalized
/// synonym lookup, unmapped ones land in extras with a warning.
inline PrdDocument parse_prd(std::string_view markdown,
                             const HeadingSynonyms* overrides = nullptr) {
    PrdDocument doc;
    doc.source_digest = detail::sha256_hex(markdown);
    HeadingSynonyms synonyms = HeadingSynonyms::defaults();

    struct RawHeading {
        std::size_t level;
        std::string title;
        std::size_t body_begin;  // byte offset just past the heading line
        std::size_t line_begin;  // byte offset of the '#'s line start
    };
    std::vector<RawHeading> headings;
    std::size_t pos = 0;
    bool in_fence = false;
    while (pos <= markdown.size()) {
        std::size_t eol = markdown.find('\n', pos);
        std::size_t line_end = (eol == std::string_view::npos) ? markdown.size() : eol;
        std::string_view line = markdown.substr(pos, line_end - pos);
        std::string_view trimmed = text::trim(line);
        if (text::starts_with(trimmed, "```")) in_fence = !in_fence;
        if (!in_fence && !trimmed.empty() && trimmed[0] == '#') {
            std::size_t level = 0;
            while (level < trimmed.size() && trimmed[level] == '#') ++level;
            if (level <= 6 && level < trimmed.size() && trimmed[level] == ' ') {
                headings.push_back(RawHeading{level,
                                              std::string(text::trim(trimmed.substr(level))),
                                              std::min(line_end + 1, markdown.size()), pos});
            }
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    if (headings.empty()) {
        throw Error(ErrorCode::NoSectionsFound, "no markdown headings in PRD");
    }

    std::size_t top_level = headings.front().level;
    for (const RawHeading& h : headings) top_level = std::min(top_level, h.level);

    if (headings.front().line_begin > 0 &&
        !text::trim(markdown.substr(0, headings.front().line_begin)).empty()) {
        doc.warnings.push_back("content before the first heading is ignored");
    }

    std::vector<bool> seen(kSectionOrder.size(), false);
    for (std::size_t i = 0; i < headings.size(); ++i) {
        if (headings[i].level != top_level) continue;
        std::size_t body_begin = headings[i].body_begin;
        std::size_t body_end = markdown.size();
        for (std::size_t j = i + 1; j < headings.size(); ++j) {
            if (headings[j].level == top_level) {
                body_end = headings[j].line_begin;
                break;
            }
        }
        std::string body(markdown.substr(body_begin, body_end - body_begin));
        std::string lookup =
            text::normalize_name(detail::strip_heading_numbering(headings[i].title));
        std::optional<SectionKind> kind;
        if (overrides) kind = overrides->match(lookup);
        if (!kind) kind = synonyms.match(lookup);
        if (kind && !seen[static_cast<std::size_t>(*kind)]) {
            seen[static_cast<std::size_t>(*kind)] = true;
            doc.sections.push_back(PrdSection{*kind, headings[i].title, std::move(body)});
        } else if (kind) {
            doc.warnings.push_back("duplicate section '" + headings[i].title +
                                   "' kept under extras");
            doc.extras.emplace_back(headings[i].title, std::move(body));
        } else {
            doc.warnings.push_back("unmapped heading '" + headings[i].title + "'");
            doc.extras.emplace_back(headings[i].title, std::move(body));
        }
    }
    for (SectionKind kind : kSectionOrder) {
        if (!seen[static_cast<std::size_t>(kind)]) {
            doc.warnings.push_back("section absent: " + std::string(canonical_title(kind)));
        }
    }
    return doc;
}

/// Emits the context-graded input text: `full` keeps all six sections,
/// `no_arch` drops exactly the architecture description, `min` keeps only
/// core objectives and functional features. Headings are re-emitted with
/// canonical English titles in canonical order; bodies stay byte-exact.
inline std::string apply_setting(const PrdDocument& doc, ContextSetting setting) {
    std::vector<SectionKind> wanted;
    switch (setting) {
        case ContextSetting::full:
            wanted.assign(kSectionOrder.begin(), kSectionOrder.end());
            break;
        case ContextSetting::no_arch:
            for (SectionKind k : kSectionOrder) {
                if (k != SectionKind::system_architecture_description) wanted.push_back(k);
            }
            break;
        case ContextSetting::min:
            wanted = {SectionKind::core_objectives, SectionKind::functional_features};
            for (SectionKind k : wanted) {
                if (!doc.find(k)) {
                    throw Error(ErrorCode::MissingRequiredSection,
                                "min setting requires '" + std::string(canonical_title(k)) + "'");
                }
            }
            break;
    }
    std::string out;
    for (SectionKind kind : wanted) {
        const PrdSection* s = doc.find(kind);
        if (!s) continue;
        out += "# ";
        out += canonical_title(kind);
        out += "\n";
        out += s->body;
        if (!s->body.empty() && s->body.back() != '\n') out += "\n";
    }
    return out;
}

}  // namespace archeval
