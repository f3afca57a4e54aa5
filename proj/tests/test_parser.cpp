#include "archeval/plantuml.hpp"

#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "test_support.hpp"

using namespace archeval;

namespace {

const ArchGraph& must_parse(const ParseResult& r) {
    REQUIRE(r.ok());
    return *r.graph;
}

bool has_code(const ParseResult& r, std::string_view code, Severity sev) {
    for (const auto& d : r.diagnostics) {
        if (d.code == code && d.severity == sev) return true;
    }
    return false;
}

std::size_t warning_count(const ParseResult& r) {
    std::size_t n = 0;
    for (const auto& d : r.diagnostics) n += d.severity == Severity::warning ? 1 : 0;
    return n;
}

bool span_in_bounds(const ParseDiagnostic& d, std::string_view input) {
    std::size_t line_count = 1;
    for (char c : input) line_count += c == '\n' ? 1 : 0;
    if (d.span.line < 1 || d.span.line > line_count) return false;
    std::size_t cur_line = 1, line_len = 0;
    bool found = false;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= input.size(); ++i) {
        if (i == input.size() || input[i] == '\n') {
            if (cur_line == d.span.line) {
                line_len = i - start;
                found = true;
                break;
            }
            ++cur_line;
            start = i + 1;
        }
    }
    if (!found) return input.empty() && d.span.line == 1;
    return d.span.column >= 1 && d.span.column <= line_len + 1;
}

}  // namespace

TEST_CASE("parses package nesting, inline components, and labeled edges") {
    auto r = parse("@startuml\npackage \"App\" { [UI] }\ndatabase DB\n[UI] --> DB : query\n@enduml",
                   ParseMode::strict);
    const ArchGraph& g = must_parse(r);
    REQUIRE(g.nodes().size() == 3);
    CHECK(g.at("App").kind == NodeKind::package_kind);
    CHECK(g.at("UI").parent == std::optional<std::string>{"App"});
    CHECK(g.at("DB").kind == NodeKind::database);
    REQUIRE(g.edges().size() == 1);
    CHECK(g.edges()[0].source == "UI");
    CHECK(g.edges()[0].target == "DB");
    CHECK(g.edges()[0].label == std::optional<std::string>{"query"});
}

TEST_CASE("dangling arrow is a MalformedArrow at its line") {
    auto r = parse("@startuml\n[A] -->\n@enduml", ParseMode::strict);
    CHECK(!r.ok());
    REQUIRE(!r.diagnostics.empty());
    CHECK(r.diagnostics[0].code == "MalformedArrow");
    CHECK(r.diagnostics[0].span.line == 2);
}

TEST_CASE("lenient mode warns on whitelisted directives and keeps the graph") {
    auto r = parse("@startuml\nskinparam shadowing false\n[A] --> [B]\n@enduml",
                   ParseMode::lenient);
    const ArchGraph& g = must_parse(r);
    CHECK(g.nodes().size() == 2);
    CHECK(g.edges().size() == 1);
    CHECK(warning_count(r) == 1);
}

TEST_CASE("strict mode silently skips whitelisted directives") {
    auto r = parse("@startuml\ntitle System Overview\nskinparam monochrome true\n"
                   "left to right direction\nnote left of A : hi\n[A]\n@enduml",
                   ParseMode::strict);
    const ArchGraph& g = must_parse(r);
    CHECK(g.nodes().size() == 1);
    CHECK(r.diagnostics.empty());
}

TEST_CASE("block directives skip to their terminator") {
    auto r = parse("@startuml\nnote left of A\n  [NotANode] --> junk\nend note\n[A]\n@enduml",
                   ParseMode::strict);
    const ArchGraph& g = must_parse(r);
    CHECK(g.nodes().size() == 1);
}

TEST_CASE("missing delimiters are reported") {
    auto r = parse("component X", ParseMode::strict);
    CHECK(!r.ok());
    CHECK(has_code(r, "MissingDelimiters", Severity::error));

    auto no_end = parse("@startuml\n[A]\n", ParseMode::strict);
    CHECK(!no_end.ok());
    CHECK(has_code(no_end, "UnbalancedBlock", Severity::error));
}

TEST_CASE("unbalanced braces are reported") {
    auto open = parse("@startuml\npackage P {\n[A]\n@enduml", ParseMode::strict);
    CHECK(has_code(open, "UnbalancedBlock", Severity::error));

    auto close = parse("@startuml\n}\n@enduml", ParseMode::strict);
    CHECK(has_code(close, "UnbalancedBlock", Severity::error));
}

TEST_CASE("strict mode rejects undeclared bare edge endpoints; lenient creates them") {
    auto strict = parse("@startuml\nAuth --> DB\n@enduml", ParseMode::strict);
    CHECK(!strict.ok());
    CHECK(has_code(strict, "UndefinedAlias", Severity::error));

    auto lenient = parse("@startuml\nAuth --> DB\n@enduml", ParseMode::lenient);
    const ArchGraph& g = must_parse(lenient);
    CHECK(g.nodes().size() == 2);
    CHECK(g.edges().size() == 1);
    CHECK(has_code(lenient, "ImplicitNode", Severity::warning));
}

TEST_CASE("aliases become node ids; display names are retained") {
    auto r = parse("@startuml\ncomponent \"Foo Service\" as FS <<service>>\n"
                   "database \"Main DB\" as DB\nFS --> DB\n@enduml",
                   ParseMode::strict);
    const ArchGraph& g = must_parse(r);
    CHECK(g.at("FS").display_name == "Foo Service");
    CHECK(g.at("FS").stereotype == std::optional<std::string>{"service"});
    CHECK(g.edges()[0].source == "FS");
    CHECK(g.edges()[0].target == "DB");
}

TEST_CASE("arrow orientations, styles, and hints") {
    auto r = parse("@startuml\n[A]\n[B]\n[C]\n[D]\nB <-- A\nA ..> C\nA -left-> D\n@enduml",
                   ParseMode::strict);
    const ArchGraph& g = must_parse(r);
    REQUIRE(g.edges().size() == 3);
    CHECK(g.edges()[0].source == "A");
    CHECK(g.edges()[0].target == "B");
    CHECK(g.edges()[1].style == EdgeStyle::dashed);
    CHECK(g.edges()[2].direction_hint == std::optional<Direction>{Direction::left});
}

TEST_CASE("actors, queues, clouds, and interface shorthand") {
    auto r = parse("@startuml\nactor User\nqueue \"Job Queue\" as JQ\ncloud CDN\n"
                   "() \"REST API\" as API\nUser --> API\nAPI --> JQ\n@enduml",
                   ParseMode::strict);
    const ArchGraph& g = must_parse(r);
    CHECK(g.at("User").kind == NodeKind::actor);
    CHECK(g.at("JQ").kind == NodeKind::queue);
    CHECK(g.at("CDN").kind == NodeKind::cloud);
    CHECK(g.at("API").kind == NodeKind::interface_kind);
    CHECK(g.edges().size() == 2);
}

TEST_CASE("re-declaration reopens the same node") {
    auto r = parse("@startuml\npackage Core {\n[A]\n}\npackage Core {\n[B]\n}\n@enduml",
                   ParseMode::strict);
    const ArchGraph& g = must_parse(r);
    CHECK(g.nodes().size() == 3);
    CHECK(g.at("A").parent == std::optional<std::string>{"Core"});
    CHECK(g.at("B").parent == std::optional<std::string>{"Core"});
}

TEST_CASE("comments and blank lines are ignored") {
    auto r = parse("@startuml\n' a comment\n/' block\ncomment '/\n\n[A]\n@enduml",
                   ParseMode::strict);
    CHECK(must_parse(r).nodes().size() == 1);
}

TEST_CASE("strict acceptance is a subset of lenient acceptance") {
    const char* samples[] = {
        "@startuml\n[A] --> [B]\n@enduml",
        "@startuml\nskinparam x y\n[A]\n@enduml",
        "@startuml\nA --> B\n@enduml",
        "@startuml\nwibble wobble\n@enduml",
        "@startuml\n[A] -->\n@enduml",
        "no diagram at all",
    };
    for (const char* s : samples) {
        bool strict_ok = parse(s, ParseMode::strict).ok();
        bool lenient_ok = parse(s, ParseMode::lenient).ok();
        if (strict_ok) CHECK(lenient_ok);
    }
}

TEST_CASE("parse is deterministic") {
    const char* input = "@startuml\npackage P {\n[A]\n[B]\n}\nA --> B : x\n@enduml";
    auto a = parse(input, ParseMode::lenient);
    auto b = parse(input, ParseMode::lenient);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(testing::graph_signature(*a.graph) == testing::graph_signature(*b.graph));
    CHECK(a.graph->source_digest() == b.graph->source_digest());
}

TEST_CASE("fuzzing random bytes never crashes and spans stay in bounds") {
    std::mt19937 rng(1234);
    std::uniform_int_distribution<int> len_dist(0, 160);
    std::uniform_int_distribution<int> byte_dist(0, 255);
    std::uniform_int_distribution<int> mode_dist(0, 4);
    const std::string vocab = "@startuml\n@enduml package { } [A] --> <<s>> \" as actor note";
    std::uniform_int_distribution<std::size_t> vocab_dist(0, vocab.size() - 1);
    for (int round = 0; round < 800; ++round) {
        std::string input;
        int len = len_dist(rng);
        bool structured = mode_dist(rng) > 1;
        for (int i = 0; i < len; ++i) {
            input.push_back(structured ? vocab[vocab_dist(rng)]
                                       : static_cast<char>(byte_dist(rng)));
        }
        for (ParseMode mode : {ParseMode::strict, ParseMode::lenient}) {
            auto r = parse(input, mode);
            for (const auto& d : r.diagnostics) {
                CHECK(span_in_bounds(d, input));
            }
        }
    }
}

TEST_CASE("round-trip through canonical serialization is isomorphic") {
    const char* corpus[] = {
        "@startuml\npackage \"App\" { [UI] }\ndatabase DB\n[UI] --> DB : query\n@enduml",
        "@startuml\nactor User\npackage \"Application Layer\" as AL {\n"
        "  [Web UI] as web\n  [Controller]\n}\nUser --> web\nweb ..> Controller : calls\n@enduml",
        "@startuml\n[solo]\n@enduml",
        "@startuml\n@enduml",
        "@startuml\nnode N {\n  folder F {\n    [deep]\n  }\n}\n[deep] -up-> N\n@enduml",
    };
    for (const char* f : corpus) {
        auto first = parse(f, ParseMode::strict);
        REQUIRE(first.ok());
        std::string canon = canonical_serialize(*first.graph);
        auto second = parse(canon, ParseMode::strict);
        REQUIRE(second.ok());
        CHECK(testing::graph_signature(*first.graph) == testing::graph_signature(*second.graph));
        // serialization is a fixed point after one round
        CHECK(canonical_serialize(*second.graph) == canon);
    }
}

TEST_CASE("extract_plantuml_block strips fences and prose") {
    auto block = extract_plantuml_block(
        "Here is the design:\n```plantuml\n@startuml\n[A]\n@enduml\n```");
    CHECK(block.source_text == "@startuml\n[A]\n@enduml");
    CHECK(block.warnings.empty());

    auto identity = extract_plantuml_block("@startuml\n[A]\n@enduml");
    CHECK(identity.source_text == "@startuml\n[A]\n@enduml");

    CHECK_THROWS_AS(extract_plantuml_block("no code here"), Error);

    auto multi = extract_plantuml_block(
        "@startuml\n[A]\n@enduml\ndraft 2:\n@startuml\n[B]\n@enduml");
    CHECK(multi.source_text == "@startuml\n[A]\n@enduml");
    REQUIRE(multi.warnings.size() == 1);
}

TEST_CASE("validate maps parse outcomes to syntax reports") {
    auto good = validate("@startuml\n[A]\n@enduml", ValidationMode::internal_strict);
    CHECK(good.valid);
    CHECK(good.diagnostics.empty());

    auto bad = validate("@startuml\npackage P {\n@enduml", ValidationMode::internal_strict);
    CHECK(!bad.valid);
    REQUIRE(!bad.diagnostics.empty());
    CHECK(bad.diagnostics[0].code == "UnbalancedBlock");

    CHECK_THROWS_AS(validate("@startuml\n@enduml", ValidationMode::external_renderer), Error);
}

namespace {

std::string write_script(const std::string& name, const std::string& body) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "archeval_render_test";
    fs::create_directories(dir);
    fs::path path = dir / name;
    std::ofstream out(path);
    out << "#!/bin/sh\n" << body;
    out.close();
    fs::permissions(path, fs::perms::owner_all, fs::perm_options::add);
    return path.string();
}

}  // namespace

TEST_CASE("render_external reports renderer failures") {
    RendererConfig missing;
    missing.executable = "/nonexistent/plantuml";
    CHECK_THROWS_AS(render_external("@startuml\n@enduml", missing), Error);

    RendererConfig fake;
    fake.executable = write_script("render_ok.sh", "cat > /dev/null\necho IMAGEBYTES\n");
    auto ok = render_external("@startuml\n@enduml", fake);
    CHECK(ok.success);
    CHECK(!ok.image.empty());

    RendererConfig failing;
    failing.executable = write_script("render_fail.sh",
                                      "cat > /dev/null\necho 'syntax error' >&2\nexit 1\n");
    auto rejected = render_external("@startuml\n@enduml", failing);
    CHECK(!rejected.success);
    CHECK(rejected.error_text.find("syntax error") != std::string::npos);

    RendererConfig slow;
    slow.executable = write_script("render_hang.sh", "sleep 5\n");
    slow.timeout = std::chrono::milliseconds(200);
    CHECK_THROWS_AS(render_external("@startuml\n@enduml", slow), Error);
}
