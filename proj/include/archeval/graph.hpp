#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "archeval/error.hpp"
#include "archeval/text.hpp"

namespace archeval {

/// Element kinds of the supported PlantUML subset.
enum class NodeKind {
    component,
    database,
    actor,
    queue,
    interface_kind,
    package_kind,
    node,
    cloud,
    folder,
    rectangle,
    other,
};

inline std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::component: return "component";
        case NodeKind::database: return "database";
        case NodeKind::actor: return "actor";
        case NodeKind::queue: return "queue";
        case NodeKind::interface_kind: return "interface";
        case NodeKind::package_kind: return "package";
        case NodeKind::node: return "node";
        case NodeKind::cloud: return "cloud";
        case NodeKind::folder: return "folder";
        case NodeKind::rectangle: return "rectangle";
        case NodeKind::other: return "other";
    }
    return "other";
}

inline std::optional<NodeKind> node_kind_from_string(std::string_view s) {
    if (s == "component") return NodeKind::component;
    if (s == "database") return NodeKind::database;
    if (s == "actor") return NodeKind::actor;
    if (s == "queue") return NodeKind::queue;
    if (s == "interface") return NodeKind::interface_kind;
    if (s == "package") return NodeKind::package_kind;
    if (s == "node") return NodeKind::node;
    if (s == "cloud") return NodeKind::cloud;
    if (s == "folder") return NodeKind::folder;
    if (s == "rectangle") return NodeKind::rectangle;
    if (s == "other") return NodeKind::other;
    return std::nullopt;
}

enum class EdgeStyle { solid, dashed };

enum class Direction { left, right, up, down };

inline std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::left: return "left";
        case Direction::right: return "right";
        case Direction::up: return "up";
        case Direction::down: return "down";
    }
    return "right";
}

/// A diagram element. `id` is the stable identifier within one graph (the
/// PlantUML alias when present, the declared name otherwise).
struct ArchNode {
    std::string id;
    std::string display_name;
    std::optional<std::string> alias;
    NodeKind kind = NodeKind::component;
    std::optional<std::string> stereotype;
    std::optional<std::string> parent;
};

/// A directed relation edge. Containment is not represented as edges.
struct ArchEdge {
    std::string source;
    std::string target;
    std::optional<std::string> label;
    EdgeStyle style = EdgeStyle::solid;
    std::optional<Direction> direction_hint;
};

/// Directed architecture graph with containment forest and declaration-order
/// iteration. Immutable once built; all member queries are const and pure.
class ArchGraph {
public:
    ArchGraph() = default;

    /// Appends a node. The parent, when set, must already be present; this
    /// keeps the containment relation a forest by construction.
    ArchNode& add_node(ArchNode node) {
        if (node.display_name.empty()) {
            throw Error(ErrorCode::InvalidGraph, "node display name is empty");
        }
        if (node.id.empty()) {
            throw Error(ErrorCode::InvalidGraph, "node id is empty");
        }
        if (index_.count(node.id)) {
            throw Error(ErrorCode::InvalidGraph, "duplicate node id '" + node.id + "'");
        }
        if (node.parent && !index_.count(*node.parent)) {
            throw Error(ErrorCode::InvalidGraph,
                        "parent '" + *node.parent + "' of '" + node.id + "' not declared");
        }
        index_.emplace(node.id, nodes_.size());
        nodes_.push_back(std::move(node));
        return nodes_.back();
    }

    ArchEdge& add_edge(ArchEdge edge) {
        if (!index_.count(edge.source)) {
            throw Error(ErrorCode::UnknownNode, "edge source '" + edge.source + "' not declared");
        }
        if (!index_.count(edge.target)) {
            throw Error(ErrorCode::UnknownNode, "edge target '" + edge.target + "' not declared");
        }
        edges_.push_back(std::move(edge));
        return edges_.back();
    }

    const std::vector<ArchNode>& nodes() const noexcept { return nodes_; }
    const std::vector<ArchEdge>& edges() const noexcept { return edges_; }

    bool contains(std::string_view id) const { return index_.count(std::string(id)) > 0; }

    const ArchNode* find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        return it == index_.end() ? nullptr : &nodes_[it->second];
    }

    const ArchNode& at(std::string_view id) const {
        const ArchNode* n = find(id);
        if (!n) throw Error(ErrorCode::UnknownNode, "no node '" + std::string(id) + "'");
        return *n;
    }

    bool has_children(std::string_view id) const {
        return std::any_of(nodes_.begin(), nodes_.end(), [&](const ArchNode& n) {
            return n.parent && *n.parent == id;
        });
    }

    void set_source_digest(std::string digest) { source_digest_ = std::move(digest); }
    const std::string& source_digest() const noexcept { return source_digest_; }

    bool empty() const noexcept { return nodes_.empty(); }

private:
    std::vector<ArchNode> nodes_;
    std::vector<ArchEdge> edges_;
    std::unordered_map<std::string, std::size_t> index_;
    std::string source_digest_;
};

/// Leaf nodes (no containment children), in declaration order.
inline std::vector<std::string> leaf_nodes(const ArchGraph& graph) {
    std::vector<std::string> out;
    for (const ArchNode& n : graph.nodes()) {
        if (!graph.has_children(n.id)) out.push_back(n.id);
    }
    return out;
}

/// Container nodes (at least one child), in declaration order.
inline std::vector<std::string> container_nodes(const ArchGraph& graph) {
    std::vector<std::string> out;
    for (const ArchNode& n : graph.nodes()) {
        if (graph.has_children(n.id)) out.push_back(n.id);
    }
    return out;
}

/// Total degree over relation edges. A self-loop contributes 2; containment
/// contributes nothing.
inline std::size_t degree(const ArchGraph& graph, std::string_view node) {
    if (!graph.contains(node)) {
        throw Error(ErrorCode::UnknownNode, "no node '" + std::string(node) + "'");
    }
    std::size_t d = 0;
    for (const ArchEdge& e : graph.edges()) {
        if (e.source == node) ++d;
        if (e.target == node) ++d;
    }
    return d;
}

/// Maps normalized top-level container names to layer labels.
class LayerMap {
public:
    LayerMap() = default;

    static LayerMap defaults() {
        LayerMap m;
        auto add_all = [&m](std::string_view layer, std::initializer_list<const char*> names) {
            for (const char* n : names) m.add(n, std::string(layer));
        };
        add_all("application",
                {"application layer", "application", "app layer", "presentation layer",
                 "presentation", "business logic layer", "business logic", "business layer",
                 "ui layer", "frontend", "front end", "frontend layer", "web layer",
                 "应用层", "表示层", "业务层", "业务逻辑层", "前端层"});
        add_all("support",
                {"support layer", "support", "service layer", "services layer",
                 "middleware layer", "middleware", "支撑层", "支持层", "中间件层", "服务层"});
        add_all("infrastructure",
                {"infrastructure layer", "infrastructure", "infra layer", "infra",
                 "data layer", "storage layer", "persistence layer",
                 "基础设施层", "基础层", "数据层", "存储层"});
        return m;
    }

    void add(std::string_view name, std::string layer) {
        entries_[text::normalize_name(name)] = std::move(layer);
    }

    std::optional<std::string> lookup(std::string_view normalized_name) const {
        auto it = entries_.find(std::string(normalized_name));
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::unordered_map<std::string, std::string> entries_;
};

inline constexpr const char* kUnlayeredLabel = "unlayered";

/// Layer label of a node: the normalized name of its outermost ancestor
/// container passed through the layer map. Top-level nodes are "unlayered";
/// unmapped ancestors yield "other:<normalized name>".
inline std::string layer_of(const ArchGraph& graph, std::string_view node, const LayerMap& map) {
    const ArchNode* cur = &graph.at(node);
    if (!cur->parent) return kUnlayeredLabel;
    while (cur->parent) cur = &graph.at(*cur->parent);
    std::string normalized = text::normalize_name(cur->display_name);
    if (auto layer = map.lookup(normalized)) return *layer;
    return "other:" + normalized;
}

namespace detail {

inline bool needs_quotes(std::string_view name) {
    if (name.empty()) return true;
    for (char c : name) {
        bool plain = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                     (c >= '0' && c <= '9') || c == '_' || c == '.';
        if (!plain) return true;
    }
    return false;
}

inline std::string quoted_if_needed(std::string_view name) {
    if (!needs_quotes(name)) return std::string(name);
    std::string out;
    out.push_back('"');
    out += name;
    out.push_back('"');
    return out;
}

inline std::string element_token(const ArchNode& n) {
    std::string out(to_string(n.kind));
    out.push_back(' ');
    out += quoted_if_needed(n.display_name);
    if (n.id != n.display_name) {
        out += " as ";
        out += quoted_if_needed(n.id);
    }
    if (n.stereotype) {
        out += " <<" + *n.stereotype + ">>";
    }
    return out;
}

inline void serialize_subtree(const ArchGraph& g, const std::string& id,
                              const std::unordered_map<std::string, std::vector<std::size_t>>& children,
                              int depth, std::string& out) {
    const ArchNode& n = g.at(id);
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += element_token(n);
    auto it = children.find(id);
    if (it != children.end() && !it->second.empty()) {
        out += " {\n";
        for (std::size_t child_index : it->second) {
            serialize_subtree(g, g.nodes()[child_index].id, children, depth + 1, out);
        }
        out.append(static_cast<std::size_t>(depth) * 2, ' ');
        out += "}\n";
    } else {
        out += "\n";
    }
}

}  // namespace detail

/// Deterministic PlantUML-subset serialization: LF endings, two-space
/// indentation, nodes before edges, siblings sorted by (kind, normalized
/// name); parse(canonical_serialize(g)) is isomorphic to g.
inline std::string canonical_serialize(const ArchGraph& graph) {
    if (graph.nodes().empty()) return "@startuml\n@enduml";

    // sibling lists, each sorted by (kind, normalized name, display, id)
    std::unordered_map<std::string, std::vector<std::size_t>> children;
    std::vector<std::size_t> roots;
    const auto& nodes = graph.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].parent) children[*nodes[i].parent].push_back(i);
        else roots.push_back(i);
    }
    auto sort_key = [&](std::size_t i) {
        return std::make_tuple(static_cast<int>(nodes[i].kind),
                               text::normalize_name(nodes[i].display_name),
                               nodes[i].display_name, nodes[i].id);
    };
    auto by_key = [&](std::size_t a, std::size_t b) { return sort_key(a) < sort_key(b); };
    std::sort(roots.begin(), roots.end(), by_key);
    for (auto& [_, sibs] : children) std::sort(sibs.begin(), sibs.end(), by_key);

    std::string out = "@startuml\n";
    for (std::size_t root : roots) {
        detail::serialize_subtree(graph, nodes[root].id, children, 0, out);
    }

    std::vector<const ArchEdge*> edges;
    edges.reserve(graph.edges().size());
    for (const ArchEdge& e : graph.edges()) edges.push_back(&e);
    std::sort(edges.begin(), edges.end(), [&](const ArchEdge* a, const ArchEdge* b) {
        auto key = [](const ArchEdge* e) {
            return std::make_tuple(e->source, e->target, static_cast<int>(e->style),
                                   e->label.value_or(""),
                                   e->direction_hint ? static_cast<int>(*e->direction_hint) : -1);
        };
        return key(a) < key(b);
    });
    for (const ArchEdge* e : edges) {
        out += detail::quoted_if_needed(e->source);
        out.push_back(' ');
        char shaft = (e->style == EdgeStyle::dashed) ? '.' : '-';
        out.push_back(shaft);
        if (e->direction_hint) {
            out += to_string(*e->direction_hint);
            out.push_back(shaft);
        } else {
            out.push_back(shaft);
        }
        out.push_back('>');
        out.push_back(' ');
        out += detail::quoted_if_needed(e->target);
        if (e->label) {
            out += " : ";
            out += *e->label;
        }
        out += "\n";
    }
    out += "@enduml";
    return out;
}

}  // namespace archeval
