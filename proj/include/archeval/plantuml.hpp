#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "archeval/detail/hash.hpp"
#include "archeval/error.hpp"
#include "archeval/graph.hpp"
#include "archeval/render.hpp"
#include "archeval/text.hpp"

namespace archeval {

enum class ParseMode { strict, lenient };

enum class Severity { error, warning };

struct SourceSpan {
    std::size_t line = 1;    // 1-based
    std::size_t column = 1;  // 1-based
    std::size_t length = 0;
};

struct ParseDiagnostic {
    Severity severity = Severity::error;
    SourceSpan span;
    std::string code;
    std::string message;
};

/// Result of parsing: the graph is present iff no error-severity diagnostic
/// was produced.
struct ParseResult {
    std::optional<ArchGraph> graph;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const noexcept { return graph.has_value(); }

    bool has_errors() const noexcept {
        for (const auto& d : diagnostics) {
            if (d.severity == Severity::error) return true;
        }
        return false;
    }
};

enum class ValidationMode { internal_strict, internal_lenient, external_renderer };

inline std::string_view to_string(ValidationMode m) {
    switch (m) {
        case ValidationMode::internal_strict: return "internal_strict";
        case ValidationMode::internal_lenient: return "internal_lenient";
        case ValidationMode::external_renderer: return "external_renderer";
    }
    return "internal_strict";
}

/// Per-sample syntactic validity outcome.
struct SyntaxReport {
    bool valid = false;
    std::vector<ParseDiagnostic> diagnostics;
    ValidationMode mode = ValidationMode::internal_strict;
};

namespace detail {

struct Line {
    std::string_view raw;  // without trailing newline / CR
    std::size_t number;    // 1-based
};

inline std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t start = 0, number = 1;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            if (i == text.size() && start == i && !lines.empty()) break;
            std::string_view raw = text.substr(start, i - start);
            if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
            lines.push_back({raw, number++});
            start = i + 1;
        }
    }
    if (lines.empty()) lines.push_back({std::string_view{}, 1});
    return lines;
}

inline bool is_space(char c) { return c == ' ' || c == '\t'; }

struct LineCursor {
    std::string_view s;
    std::size_t pos = 0;
    std::size_t line = 1;

    void skip_ws() {
        while (pos < s.size() && is_space(s[pos])) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    SourceSpan span_here(std::size_t length = 1) const {
        return SourceSpan{line, pos + 1, length};
    }
};

inline bool is_bare_char(char c) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) return true;
    if (c == '_' || c == '.') return true;
    return static_cast<unsigned char>(c) >= 0x80;
}

struct NameTerm {
    enum class Form { bare, quoted, bracket, paren } form = Form::bare;
    std::string value;
    SourceSpan span;
};

inline std::optional<NameTerm> read_name_term(LineCursor& cur) {
    cur.skip_ws();
    if (cur.pos >= cur.s.size()) return std::nullopt;
    NameTerm term;
    term.span = cur.span_here();
    char c = cur.s[cur.pos];
    if (c == '"') {
        std::size_t end = cur.s.find('"', cur.pos + 1);
        if (end == std::string_view::npos) return std::nullopt;
        term.form = NameTerm::Form::quoted;
        term.value = std::string(cur.s.substr(cur.pos + 1, end - cur.pos - 1));
        term.span.length = end - cur.pos + 1;
        cur.pos = end + 1;
        return term;
    }
    if (c == '[') {
        std::size_t end = cur.s.find(']', cur.pos + 1);
        if (end == std::string_view::npos) return std::nullopt;
        term.form = NameTerm::Form::bracket;
        term.value = std::string(text::trim(cur.s.substr(cur.pos + 1, end - cur.pos - 1)));
        term.span.length = end - cur.pos + 1;
        cur.pos = end + 1;
        return term;
    }
    if (c == '(' && cur.pos + 1 < cur.s.size() && cur.s[cur.pos + 1] == ')') {
        cur.pos += 2;
        auto inner = read_name_term(cur);
        if (!inner || inner->form == NameTerm::Form::paren) return std::nullopt;
        inner->form = NameTerm::Form::paren;
        return inner;
    }
    if (!is_bare_char(c)) return std::nullopt;
    std::size_t start = cur.pos;
    while (cur.pos < cur.s.size() && is_bare_char(cur.s[cur.pos])) ++cur.pos;
    term.form = NameTerm::Form::bare;
    term.value = std::string(cur.s.substr(start, cur.pos - start));
    term.span.length = cur.pos - start;
    return term;
}

struct ArrowTerm {
    EdgeStyle style = EdgeStyle::solid;
    std::optional<Direction> hint;
    bool points_right = true;
    SourceSpan span;
    bool hint_unknown = false;
};

inline std::optional<Direction> direction_from_word(std::string_view w) {
    std::string lw = text::to_lower_ascii(w);
    auto prefix_of = [&](std::string_view full) {
        return !lw.empty() && lw.size() <= full.size() && full.substr(0, lw.size()) == lw;
    };
    if (prefix_of("left")) return Direction::left;
    if (prefix_of("right")) return Direction::right;
    if (prefix_of("up")) return Direction::up;
    if (prefix_of("down")) return Direction::down;
    return std::nullopt;
}

inline bool at_arrow_start(LineCursor cur) {
    char c = cur.peek();
    return c == '-' || c == '.' || c == '<';
}

inline std::optional<ArrowTerm> read_arrow(LineCursor& cur) {
    cur.skip_ws();
    std::size_t start = cur.pos;
    if (start >= cur.s.size()) return std::nullopt;

    ArrowTerm arrow;
    arrow.span = cur.span_here();
    std::size_t p = start;
    bool left_head = false;
    if (cur.s[p] == '<') {
        left_head = true;
        ++p;
    }
    auto run_shaft = [&](std::string& shaft) {
        while (p < cur.s.size()) {
            char c = cur.s[p];
            if (c == '-' || c == '.') {
                shaft.push_back(c);
                ++p;
            } else if (c == '[') {  // inline style block, e.g. -[#red]->
                std::size_t close = cur.s.find(']', p);
                if (close == std::string_view::npos) break;
                p = close + 1;
            } else {
                break;
            }
        }
    };
    std::string shaft1, shaft2, hint_word;
    run_shaft(shaft1);
    if (shaft1.empty()) return std::nullopt;
    while (p < cur.s.size() &&
           ((cur.s[p] >= 'a' && cur.s[p] <= 'z') || (cur.s[p] >= 'A' && cur.s[p] <= 'Z'))) {
        hint_word.push_back(cur.s[p]);
        ++p;
    }
    if (!hint_word.empty()) {
        run_shaft(shaft2);
        if (shaft2.empty()) return std::nullopt;  // "-left" with no closing shaft
    }
    bool right_head = false;
    if (p < cur.s.size() && cur.s[p] == '>') {
        right_head = true;
        ++p;
    }
    if (left_head == right_head) return std::nullopt;  // undirected or bidirectional
    arrow.points_right = right_head;
    arrow.style = (shaft1[0] == '.') ? EdgeStyle::dashed : EdgeStyle::solid;
    if (!hint_word.empty()) {
        arrow.hint = direction_from_word(hint_word);
        if (!arrow.hint) arrow.hint_unknown = true;
    }
    arrow.span.length = p - start;
    cur.pos = p;
    return arrow;
}

inline std::optional<std::string> read_stereotype(LineCursor& cur) {
    cur.skip_ws();
    if (cur.pos + 1 < cur.s.size() && cur.s[cur.pos] == '<' && cur.s[cur.pos + 1] == '<') {
        std::size_t end = cur.s.find(">>", cur.pos + 2);
        if (end == std::string_view::npos) return std::nullopt;
        std::string st(text::trim(cur.s.substr(cur.pos + 2, end - cur.pos - 2)));
        cur.pos = end + 2;
        return st;
    }
    return std::nullopt;
}

inline void skip_color(LineCursor& cur) {
    cur.skip_ws();
    if (cur.pos < cur.s.size() && cur.s[cur.pos] == '#') {
        ++cur.pos;
        while (cur.pos < cur.s.size() && !is_space(cur.s[cur.pos]) && cur.s[cur.pos] != '{' &&
               cur.s[cur.pos] != '}')
            ++cur.pos;
    }
}

inline bool consume_keyword(LineCursor& cur, std::string_view kw) {
    cur.skip_ws();
    if (cur.s.size() - cur.pos < kw.size()) return false;
    if (cur.s.substr(cur.pos, kw.size()) != kw) return false;
    std::size_t after = cur.pos + kw.size();
    if (after < cur.s.size() && is_bare_char(cur.s[after])) return false;
    cur.pos = after;
    return true;
}

inline std::string first_word(std::string_view trimmed) {
    std::size_t i = 0;
    while (i < trimmed.size() && !is_space(trimmed[i])) ++i;
    return text::to_lower_ascii(trimmed.substr(0, i));
}

struct Directive {
    const char* keyword;
    const char* block_end;  // nullptr: single-line unless the line opens '{'
};

inline const Directive* whitelisted_directive(std::string_view word) {
    static constexpr Directive kTable[] = {
        {"skinparam", nullptr}, {"title", "end title"},   {"legend", "end legend"},
        {"note", "end note"},   {"scale", nullptr},       {"left", nullptr},
        {"top", nullptr},       {"caption", nullptr},     {"header", "end header"},
        {"footer", "end footer"},
    };
    for (const Directive& d : kTable) {
        if (word == d.keyword) return &d;
    }
    return nullptr;
}

inline bool matches_block_end(std::string_view trimmed, std::string_view block_end) {
    std::string lower = text::to_lower_ascii(trimmed);
    if (lower == block_end) return true;
    if (block_end == "}") return false;
    // "end note" also accepted as "endnote"
    std::string compact;
    for (char c : block_end) {
        if (c != ' ') compact.push_back(c);
    }
    return lower == compact;
}

}  // namespace detail

/// Parses PlantUML component/deployment-subset text into an ArchGraph.
/// Never throws on malformed input: problems surface as diagnostics, and the
/// graph is absent whenever any diagnostic has error severity.
inline ParseResult parse(std::string_view source_text, ParseMode mode) {
    using detail::Line;
    using detail::LineCursor;
    using detail::NameTerm;

    ParseResult result;
    auto& diags = result.diagnostics;
    const bool strict = (mode == ParseMode::strict);

    auto add_diag = [&](Severity sev, SourceSpan span, std::string code, std::string message) {
        diags.push_back(ParseDiagnostic{sev, span, std::move(code), std::move(message)});
    };
    // strict: error; lenient: warning
    auto add_mode_diag = [&](SourceSpan span, std::string code, std::string message) {
        add_diag(strict ? Severity::error : Severity::warning, span, std::move(code),
                 std::move(message));
    };

    std::vector<Line> lines = detail::split_lines(source_text);

    ArchGraph graph;
    std::unordered_map<std::string, std::string> symbols;  // declared name / alias -> node id
    std::vector<std::string> container_stack;
    int dedup_counter = 0;

    auto register_symbol = [&](const std::string& key, const std::string& id) {
        if (!key.empty()) symbols.emplace(key, id);  // first registration wins
    };

    auto declare_node = [&](const NameTerm& name, std::optional<std::string> alias,
                            NodeKind kind, std::optional<std::string> stereotype,
                            SourceSpan span) -> std::string {
        const std::string token = alias ? *alias : name.value;
        if (auto it = symbols.find(token); it != symbols.end()) {
            return it->second;  // re-declaration references the existing node
        }
        ArchNode node;
        node.display_name = name.value;
        if (node.display_name.empty()) {
            add_diag(Severity::error, span, "EmptyName", "element has an empty name");
            node.display_name = "(anonymous)";
        }
        node.id = token.empty() ? node.display_name : token;
        while (graph.contains(node.id)) {
            node.id += "_" + std::to_string(++dedup_counter);
        }
        node.alias = std::move(alias);
        node.kind = kind;
        node.stereotype = std::move(stereotype);
        if (!container_stack.empty()) node.parent = container_stack.back();
        graph.add_node(node);
        register_symbol(node.id, node.id);
        register_symbol(node.display_name, node.id);
        return node.id;
    };

    // Resolves an edge endpoint to a node id, creating nodes where the form
    // or the mode permits. Empty string means unresolved.
    auto resolve_endpoint = [&](const NameTerm& term) -> std::string {
        if (auto it = symbols.find(term.value); it != symbols.end()) return it->second;
        if (term.form == NameTerm::Form::bracket || term.form == NameTerm::Form::paren) {
            NodeKind kind = (term.form == NameTerm::Form::paren) ? NodeKind::interface_kind
                                                                 : NodeKind::component;
            return declare_node(term, std::nullopt, kind, std::nullopt, term.span);
        }
        if (strict) {
            add_diag(Severity::error, term.span, "UndefinedAlias",
                     "edge references undeclared name '" + term.value + "'");
            return "";
        }
        add_diag(Severity::warning, term.span, "ImplicitNode",
                 "undeclared name '" + term.value + "' introduced by an edge");
        return declare_node(term, std::nullopt, NodeKind::component, std::nullopt, term.span);
    };

    bool in_block_comment = false;
    auto is_skippable = [&](std::string_view trimmed) {
        if (in_block_comment) {
            if (trimmed.find("'/") != std::string_view::npos) in_block_comment = false;
            return true;
        }
        if (trimmed.empty()) return true;
        if (trimmed[0] == '\'') return true;
        if (text::starts_with(trimmed, "/'")) {
            if (trimmed.find("'/", 2) == std::string_view::npos) in_block_comment = true;
            return true;
        }
        return false;
    };

    // Parses one declaration or edge statement starting at `cur`. Returns
    // false when the rest of the line should be abandoned.
    auto parse_statement = [&](LineCursor& cur) -> bool {
        LineCursor save = cur;
        auto head = detail::read_name_term(cur);
        if (!head) {
            add_mode_diag(cur.span_here(std::max<std::size_t>(1, cur.s.size() - cur.pos)),
                          "UnknownDirective", "unrecognized content");
            return false;
        }

        // Declaration introduced by a kind keyword followed by a name.
        if (head->form == NameTerm::Form::bare) {
            if (auto kind = node_kind_from_string(text::to_lower_ascii(head->value))) {
                LineCursor probe = cur;
                if (!detail::at_arrow_start(probe)) {
                    auto name = detail::read_name_term(cur);
                    if (!name) {
                        add_mode_diag(cur.span_here(), "MalformedDeclaration",
                                      "expected a name after '" + head->value + "'");
                        return false;
                    }
                    std::optional<std::string> alias;
                    if (detail::consume_keyword(cur, "as")) {
                        auto alias_term = detail::read_name_term(cur);
                        if (!alias_term) {
                            add_mode_diag(cur.span_here(), "MalformedDeclaration",
                                          "expected an alias after 'as'");
                            return false;
                        }
                        alias = alias_term->value;
                    }
                    std::optional<std::string> stereotype = detail::read_stereotype(cur);
                    detail::skip_color(cur);
                    std::string id =
                        declare_node(*name, std::move(alias), *kind, std::move(stereotype),
                                     name->span);
                    if (cur.peek() == '{') {
                        ++cur.pos;
                        container_stack.push_back(id);
                    }
                    return true;
                }
                // keyword followed by an arrow: fall through, treat as endpoint
            }
        }

        // Inline element declaration: [Name] / () Name with optional alias,
        // stereotype, color, block open; otherwise an edge's left endpoint.
        std::optional<std::string> head_alias;
        std::optional<std::string> head_stereo;
        bool head_is_decl_form =
            head->form == NameTerm::Form::bracket || head->form == NameTerm::Form::paren;
        if (head_is_decl_form) {
            if (detail::consume_keyword(cur, "as")) {
                auto alias_term = detail::read_name_term(cur);
                if (!alias_term) {
                    add_mode_diag(cur.span_here(), "MalformedDeclaration",
                                  "expected an alias after 'as'");
                    return false;
                }
                head_alias = alias_term->value;
            }
            head_stereo = detail::read_stereotype(cur);
            detail::skip_color(cur);
        }
        NodeKind head_kind = (head->form == NameTerm::Form::paren) ? NodeKind::interface_kind
                                                                   : NodeKind::component;

        cur.skip_ws();
        bool line_done = cur.pos >= cur.s.size();
        bool at_closer = !line_done && cur.s[cur.pos] == '}';
        if (head_is_decl_form && (line_done || at_closer || cur.s[cur.pos] == '{')) {
            std::string id = declare_node(*head, std::move(head_alias), head_kind,
                                          std::move(head_stereo), head->span);
            if (!line_done && cur.s[cur.pos] == '{') {
                ++cur.pos;
                container_stack.push_back(id);
            }
            return true;
        }
        if (line_done || at_closer) {
            add_mode_diag(save.span_here(head->span.length), "UnknownDirective",
                          "unrecognized content '" + head->value + "'");
            return false;
        }

        auto arrow = detail::read_arrow(cur);
        if (!arrow) {
            add_mode_diag(cur.span_here(std::max<std::size_t>(1, cur.s.size() - cur.pos)),
                          "MalformedArrow", "expected an arrow after '" + head->value + "'");
            return false;
        }
        if (arrow->hint_unknown) {
            add_diag(Severity::error, arrow->span, "MalformedArrow", "unknown direction hint");
            return false;
        }
        auto tail = detail::read_name_term(cur);
        if (!tail) {
            add_diag(Severity::error, cur.span_here(), "MalformedArrow",
                     "dangling arrow: missing target");
            return false;
        }
        std::optional<std::string> label;
        cur.skip_ws();
        if (cur.pos < cur.s.size() && cur.s[cur.pos] == ':') {
            ++cur.pos;
            std::string raw_label(text::trim(cur.s.substr(cur.pos)));
            cur.pos = cur.s.size();
            if (!raw_label.empty()) label = std::move(raw_label);
        }

        std::string head_id = (head_alias || head_stereo)
                                  ? declare_node(*head, std::move(head_alias), head_kind,
                                                 std::move(head_stereo), head->span)
                                  : resolve_endpoint(*head);
        std::string tail_id = resolve_endpoint(*tail);
        if (head_id.empty() || tail_id.empty()) return false;

        ArchEdge edge;
        if (arrow->points_right) {
            edge.source = head_id;
            edge.target = tail_id;
        } else {
            edge.source = tail_id;
            edge.target = head_id;
        }
        edge.style = arrow->style;
        edge.direction_hint = arrow->hint;
        edge.label = std::move(label);
        graph.add_edge(std::move(edge));
        return true;
    };

    std::size_t i = 0;
    const std::size_t n = lines.size();

    // --- locate @startuml ---
    bool found_start = false;
    for (; i < n; ++i) {
        std::string_view trimmed = text::trim(lines[i].raw);
        if (is_skippable(trimmed)) continue;
        if (text::starts_with(trimmed, "@startuml")) {
            found_start = true;
            ++i;
            break;
        }
        if (strict) {
            add_diag(Severity::error, SourceSpan{lines[i].number, 1, trimmed.size()},
                     "MissingDelimiters", "expected @startuml before diagram content");
            return result;
        }
        add_diag(Severity::warning, SourceSpan{lines[i].number, 1, trimmed.size()},
                 "ContentOutsideDiagram", "content before @startuml ignored");
    }
    if (!found_start) {
        add_diag(Severity::error, SourceSpan{lines.back().number, 1, 0}, "MissingDelimiters",
                 "no @startuml delimiter found");
        return result;
    }

    // --- body ---
    bool found_end = false;
    std::string pending_block_end;

    for (; i < n; ++i) {
        const Line& line = lines[i];
        std::string_view trimmed = text::trim(line.raw);
        std::size_t indent = 0;
        while (indent < line.raw.size() && detail::is_space(line.raw[indent])) ++indent;

        if (!pending_block_end.empty()) {
            if (detail::matches_block_end(trimmed, pending_block_end)) {
                pending_block_end.clear();
                continue;
            }
            // an unterminated directive block never swallows the end delimiter
            if (!text::starts_with(trimmed, "@enduml")) continue;
            pending_block_end.clear();
        }
        if (is_skippable(trimmed)) continue;

        if (text::starts_with(trimmed, "@enduml")) {
            found_end = true;
            if (!container_stack.empty()) {
                add_diag(Severity::error, SourceSpan{line.number, indent + 1, 7},
                         "UnbalancedBlock",
                         std::to_string(container_stack.size()) + " unclosed block(s) at @enduml");
            }
            ++i;
            break;
        }
        if (text::starts_with(trimmed, "@startuml")) {
            add_mode_diag(SourceSpan{line.number, indent + 1, 9}, "UnbalancedBlock",
                          "nested @startuml");
            continue;
        }

        std::string word = detail::first_word(trimmed);
        if (const detail::Directive* d = detail::whitelisted_directive(word)) {
            bool known = true;
            std::string lower = text::to_lower_ascii(trimmed);
            if (word == "left" && !text::starts_with(lower, "left to right direction"))
                known = false;
            if (word == "top" && !text::starts_with(lower, "top to bottom direction"))
                known = false;
            if (known) {
                if (!strict) {
                    add_diag(Severity::warning, SourceSpan{line.number, indent + 1, word.size()},
                             "SkippedDirective", "directive '" + word + "' skipped");
                }
                if (d->block_end) {
                    bool block = (lower == word);
                    if (word == "note" && lower.find(':') == std::string::npos &&
                        lower.find('"') == std::string::npos) {
                        block = true;
                    }
                    if (word == "legend") block = true;
                    if (block) pending_block_end = d->block_end;
                } else if (!lower.empty() && lower.back() == '{') {
                    pending_block_end = "}";
                }
                continue;
            }
        }

        LineCursor cur{line.raw, 0, line.number};
        while (!cur.done()) {
            if (cur.s[cur.pos] == '}') {
                if (container_stack.empty()) {
                    add_diag(Severity::error, cur.span_here(), "UnbalancedBlock",
                             "unmatched '}'");
                } else {
                    container_stack.pop_back();
                }
                ++cur.pos;
                continue;
            }
            if (!parse_statement(cur)) break;
        }
    }

    if (!found_end) {
        add_diag(Severity::error, SourceSpan{lines.back().number, 1, 0}, "UnbalancedBlock",
                 "missing @enduml delimiter");
    } else {
        for (; i < n; ++i) {
            std::string_view trimmed = text::trim(lines[i].raw);
            if (is_skippable(trimmed)) continue;
            add_mode_diag(SourceSpan{lines[i].number, 1, trimmed.size()}, "TrailingContent",
                          "content after @enduml");
            break;
        }
    }

    if (result.has_errors()) return result;
    graph.set_source_digest(archeval::detail::sha256_hex(source_text));
    result.graph = std::move(graph);
    return result;
}

/// Syntactic validity check. Internal modes delegate to parse; the external
/// mode drives the configured renderer and treats exit status 0 with
/// non-empty image bytes as valid.
inline SyntaxReport validate(std::string_view source_text, ValidationMode mode,
                             const RendererConfig* renderer = nullptr) {
    SyntaxReport report;
    report.mode = mode;
    if (mode == ValidationMode::external_renderer) {
        if (!renderer || renderer->executable.empty()) {
            throw Error(ErrorCode::RendererUnavailable,
                        "external_renderer mode requires a configured renderer");
        }
        RenderOutcome out = render_external(source_text, *renderer);
        report.valid = out.success && !out.image.empty();
        if (!report.valid) {
            report.diagnostics.push_back(ParseDiagnostic{
                Severity::error, SourceSpan{1, 1, 0}, "RendererRejected",
                out.error_text.empty()
                    ? "renderer exited with status " + std::to_string(out.exit_code)
                    : out.error_text});
        }
        return report;
    }
    ParseResult parsed = parse(source_text, mode == ValidationMode::internal_strict
                                                ? ParseMode::strict
                                                : ParseMode::lenient);
    report.valid = parsed.ok();
    report.diagnostics = std::move(parsed.diagnostics);
    return report;
}

/// Extracted diagram region from raw model output.
struct ExtractedBlock {
    std::string source_text;
    std::vector<std::string> warnings;
};

/// Returns the first @startuml...@enduml region, dropping surrounding prose
/// and markdown fences. Inner bytes are preserved exactly.
inline ExtractedBlock extract_plantuml_block(std::string_view raw) {
    auto line_start_token = [&](std::string_view token, std::size_t from) -> std::size_t {
        std::size_t pos = from;
        while (pos <= raw.size()) {
            std::size_t hit = raw.find(token, pos);
            if (hit == std::string_view::npos) return std::string_view::npos;
            std::size_t bol = raw.rfind('\n', hit);
            bol = (bol == std::string_view::npos) ? 0 : bol + 1;
            bool only_ws = true;
            for (std::size_t k = bol; k < hit; ++k) {
                if (!detail::is_space(raw[k])) {
                    only_ws = false;
                    break;
                }
            }
            if (only_ws) return hit;
            pos = hit + 1;
        }
        return std::string_view::npos;
    };

    std::size_t start = line_start_token("@startuml", 0);
    if (start == std::string_view::npos) {
        throw Error(ErrorCode::NoDiagramFound, "no @startuml/@enduml pair in input");
    }
    std::size_t end = line_start_token("@enduml", start + 9);
    if (end == std::string_view::npos) {
        throw Error(ErrorCode::NoDiagramFound, "found @startuml without matching @enduml");
    }
    ExtractedBlock block;
    block.source_text = std::string(raw.substr(start, end + 7 - start));
    if (line_start_token("@startuml", end + 7) != std::string_view::npos) {
        block.warnings.push_back("multiple @startuml blocks; using the first");
    }
    return block;
}

}  // namespace archeval
