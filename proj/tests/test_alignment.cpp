#include "archeval/alignment.hpp"

#include <random>
#include <set>

#include "archeval/plantuml.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace archeval;

namespace {

ArchGraph leaves(std::initializer_list<const char*> names) {
    ArchGraph g;
    int i = 0;
    for (const char* n : names) {
        g.add_node({"n" + std::to_string(i++), n, {}, NodeKind::component, {}, {}});
    }
    return g;
}

struct FakeJudge : NodeEquivalenceJudge {
    bool verdict = true;
    std::vector<AlignmentQuery> seen;
    std::vector<bool> judge_pairs(const std::vector<AlignmentQuery>& queries) override {
        seen.insert(seen.end(), queries.begin(), queries.end());
        return std::vector<bool>(queries.size(), verdict);
    }
};

}  // namespace

TEST_CASE("normalize_label tokenizes and drops stopwords") {
    CHECK(normalize_label("UserService") == std::vector<std::string>{"user", "service"});
    CHECK(normalize_label("<<component>> MySQL-DB") == std::vector<std::string>{"mysql", "db"});
    CHECK(normalize_label("The  Payment   Gateway") ==
          std::vector<std::string>{"payment", "gateway"});
    CHECK(normalize_label("!!!").empty());
}

TEST_CASE("identical leaf sets match perfectly") {
    ArchGraph a = leaves({"UI", "DB"});
    ArchGraph b = leaves({"UI", "DB"});
    NodeMatching m = match_nodes(a, b, MatchConfig{});
    CHECK(m.pairs.size() == 2);
    CHECK(m.unmatched_pred.empty());
    CHECK(m.unmatched_ref.empty());
}

TEST_CASE("synonym table aligns MySQL with Database") {
    ArchGraph pred = leaves({"MySQL"});
    ArchGraph ref = leaves({"Database"});
    NodeMatching m = match_nodes(pred, ref, MatchConfig{});
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0].method == MatchMethod::synonym);
    CHECK(m.pairs[0].score == doctest::Approx(1.0));
}

TEST_CASE("greedy tie-break prefers the exact match") {
    // candidates: ("Auth Service","Auth Service") scores 1.0 exact;
    // ("Auth Server","Auth Service") has Jaccard |{auth}| / |{auth,server,service}|
    // = 1/3 < 0.5, so it is not even a candidate: Auth Server ends up FP.
    ArchGraph pred = leaves({"Auth Service", "Auth Server"});
    ArchGraph ref = leaves({"Auth Service"});
    NodeMatching m = match_nodes(pred, ref, MatchConfig{});
    REQUIRE(m.pairs.size() == 1);
    CHECK(pred.at(m.pairs[0].pred).display_name == "Auth Service");
    CHECK(m.pairs[0].method == MatchMethod::exact);
    REQUIRE(m.unmatched_pred.size() == 1);
    CHECK(pred.at(m.unmatched_pred[0]).display_name == "Auth Server");
}

TEST_CASE("token matches respect the similarity threshold") {
    // "User Data Service" vs "User Service": Jaccard {user,service} over
    // {user,data,service} = 2/3 >= 0.5
    ArchGraph pred = leaves({"User Data Service"});
    ArchGraph ref = leaves({"User Service"});
    NodeMatching m = match_nodes(pred, ref, MatchConfig{});
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0].method == MatchMethod::token);
    CHECK(m.pairs[0].score == doctest::Approx(2.0 / 3.0));

    MatchConfig tight;
    tight.similarity_threshold = 0.8;
    NodeMatching none = match_nodes(pred, ref, tight);
    CHECK(none.pairs.empty());
}

TEST_CASE("matching operates on leaves only") {
    auto parsed = parse("@startuml\npackage \"Services\" {\n[API]\n}\n@enduml", ParseMode::strict);
    REQUIRE(parsed.ok());
    NodeMatching m = match_nodes(*parsed.graph, *parsed.graph, MatchConfig{});
    CHECK(m.pairs.size() == 1);  // the package itself is not aligned
}

TEST_CASE("judge mode requires a judge handle") {
    ArchGraph a = leaves({"A"});
    MatchConfig cfg;
    cfg.mode = MatchMode::judge;
    CHECK_THROWS_AS(match_nodes(a, a, cfg), Error);
}

TEST_CASE("borderline candidates are referred to the judge") {
    // "Order Service Module" vs "Order Handler": tokens {order,service,module}
    // vs {order,handler}: Jaccard 1/4 = 0.25, inside [0.2, 0.5)
    ArchGraph pred = leaves({"Order Service Module"});
    ArchGraph ref = leaves({"Order Handler"});

    FakeJudge judge;
    MatchConfig cfg;
    cfg.mode = MatchMode::hybrid;
    NodeMatching m = match_nodes(pred, ref, cfg, &judge);
    REQUIRE(judge.seen.size() == 1);
    CHECK(judge.seen[0].pred_name == "Order Service Module");
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0].method == MatchMethod::judge);

    FakeJudge nay;
    nay.verdict = false;
    NodeMatching none = match_nodes(pred, ref, cfg, &nay);
    CHECK(none.pairs.empty());

    // lexical mode never consults the judge
    FakeJudge untouched;
    MatchConfig lex;
    NodeMatching lexical = match_nodes(pred, ref, lex, &untouched);
    CHECK(untouched.seen.empty());
    CHECK(lexical.pairs.empty());
}

TEST_CASE("matching is injective and self-matching is the identity") {
    std::mt19937 rng(99);
    for (int round = 0; round < 40; ++round) {
        ArchGraph a = testing::random_graph(rng, 10, 8, true);
        ArchGraph b = testing::random_graph(rng, 10, 8, true);
        NodeMatching m = match_nodes(a, b, MatchConfig{});
        std::set<std::string> pred_seen, ref_seen;
        for (const auto& p : m.pairs) {
            CHECK(pred_seen.insert(p.pred).second);
            CHECK(ref_seen.insert(p.ref).second);
        }
        CHECK(m.pairs.size() + m.unmatched_pred.size() == leaf_nodes(a).size());
        CHECK(m.pairs.size() + m.unmatched_ref.size() == leaf_nodes(b).size());

        NodeMatching self = match_nodes(a, a, MatchConfig{});
        CHECK(self.pairs.size() == leaf_nodes(a).size());
        for (const auto& p : self.pairs) {
            CHECK(p.pred == p.ref);
            CHECK(p.layer_correct);
        }
    }
}

TEST_CASE("adding a strictly weaker leaf does not disturb the matching") {
    ArchGraph pred = leaves({"User Service", "Payment Gateway"});
    ArchGraph ref = leaves({"User Service", "Payment Gateway"});
    NodeMatching before = match_nodes(pred, ref, MatchConfig{});

    ArchGraph wider = leaves({"User Service", "Payment Gateway", "Telemetry Collector"});
    NodeMatching after = match_nodes(wider, ref, MatchConfig{});

    REQUIRE(before.pairs.size() == after.pairs.size());
    for (std::size_t i = 0; i < before.pairs.size(); ++i) {
        CHECK(pred.at(before.pairs[i].pred).display_name ==
              wider.at(after.pairs[i].pred).display_name);
        CHECK(before.pairs[i].ref == after.pairs[i].ref);
    }
    REQUIRE(after.unmatched_pred.size() == 1);
}

TEST_CASE("match_nodes is deterministic") {
    std::mt19937 rng(5);
    ArchGraph a = testing::random_graph(rng, 12, 6);
    ArchGraph b = testing::random_graph(rng, 12, 6);
    NodeMatching m1 = match_nodes(a, b, MatchConfig{});
    NodeMatching m2 = match_nodes(a, b, MatchConfig{});
    REQUIRE(m1.pairs.size() == m2.pairs.size());
    for (std::size_t i = 0; i < m1.pairs.size(); ++i) {
        CHECK(m1.pairs[i].pred == m2.pairs[i].pred);
        CHECK(m1.pairs[i].ref == m2.pairs[i].ref);
    }
}

TEST_CASE("edge matching: identity, reversal, and surplus") {
    auto mk = [](std::initializer_list<std::pair<const char*, const char*>> edges) {
        ArchGraph g = leaves({"UI", "DB", "Cache"});
        for (auto [s, t] : edges) g.add_edge({s, t, {}, EdgeStyle::solid, {}});
        return g;
    };
    // leaves() ids are n0=UI n1=DB n2=Cache
    ArchGraph ref = mk({{"n0", "n1"}});

    NodeMatching nodes = match_nodes(ref, ref, MatchConfig{});
    EdgeMatching identity = match_edges(ref, ref, nodes, MatchConfig{});
    CHECK(identity.tp.size() == 1);
    CHECK(identity.fp.empty());
    CHECK(identity.fn.empty());

    // reversal penalized under direction sensitivity (data-flow direction)
    ArchGraph reversed = mk({{"n1", "n0"}});
    NodeMatching rn = match_nodes(reversed, ref, MatchConfig{});
    EdgeMatching rev = match_edges(reversed, ref, rn, MatchConfig{});
    CHECK(rev.tp.empty());
    CHECK(rev.fp.size() == 1);
    CHECK(rev.fn.size() == 1);

    MatchConfig undirected;
    undirected.direction_sensitive = false;
    EdgeMatching loose = match_edges(reversed, ref, rn, undirected);
    CHECK(loose.tp.size() == 1);

    // enumeration of the 2x1 candidate set: UI->DB is TP, UI->Cache FP
    ArchGraph extra = mk({{"n0", "n2"}, {"n0", "n1"}});
    NodeMatching en = match_nodes(extra, ref, MatchConfig{});
    EdgeMatching surplus = match_edges(extra, ref, en, MatchConfig{});
    CHECK(surplus.tp.size() == 1);
    CHECK(surplus.fp.size() == 1);
    CHECK(surplus.fn.empty());
}

TEST_CASE("container endpoints resolve through container alignment") {
    const char* text =
        "@startuml\npackage \"Storage\" as S {\n[MySQL]\n}\n[API]\nAPI --> S\n@enduml";
    auto pred = parse(text, ParseMode::strict);
    auto ref = parse(text, ParseMode::strict);
    REQUIRE(pred.ok());
    NodeMatching nodes = match_nodes(*pred.graph, *ref.graph, MatchConfig{});
    EdgeMatching em = match_edges(*pred.graph, *ref.graph, nodes, MatchConfig{});
    CHECK(em.tp.size() == 1);
    CHECK(em.container_resolved.size() == 1);
}

TEST_CASE("edge TP count is bounded by both edge sets") {
    std::mt19937 rng(17);
    for (int round = 0; round < 30; ++round) {
        ArchGraph a = testing::random_graph(rng, 8, 10);
        ArchGraph b = testing::random_graph(rng, 8, 10);
        NodeMatching nodes = match_nodes(a, b, MatchConfig{});
        EdgeMatching em = match_edges(a, b, nodes, MatchConfig{});
        CHECK(em.tp.size() <= std::min(a.edges().size(), b.edges().size()));
        CHECK(em.tp.size() + em.fp.size() == a.edges().size());
        CHECK(em.tp.size() + em.fn.size() == b.edges().size());
    }
}

TEST_CASE("synonym tables load from files") {
    namespace fs = std::filesystem;
    fs::path path = fs::temp_directory_path() / "archeval_synonyms_test.txt";
    {
        std::ofstream out(path);
        out << "# custom concepts\n";
        out << "ledger: journal, book of record\n";
    }
    SynonymTable t;
    t.merge_file(path);
    CHECK(t.concept_of(normalize_label("Journal")) == std::optional<std::string>{"ledger"});
    CHECK(t.concept_of(normalize_label("Book of Record")) ==
          std::optional<std::string>{"ledger"});
    CHECK(!t.concept_of(normalize_label("Notebook")).has_value());
}
