#include "fcikit/graph.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <queue>

#include <json.hpp>

#include "fcikit/error.hpp"

namespace fcikit {

std::string mark_name(Mark m) {
    switch (m) {
        case Mark::Tail: return "tail";
        case Mark::Arrow: return "arrow";
        case Mark::Circle: return "circle";
    }
    throw Error("unreachable mark");
}

Mark mark_from_name(const std::string& s) {
    if (s == "tail") return Mark::Tail;
    if (s == "arrow") return Mark::Arrow;
    if (s == "circle") return Mark::Circle;
    throw Error("unknown mark name: " + s);
}

Pag::Pag(std::vector<std::string> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw Error("Pag: empty node list");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].empty()) throw Error("Pag: empty node name");
        for (std::size_t j = i + 1; j < nodes_.size(); ++j)
            if (nodes_[i] == nodes_[j]) throw DuplicateNameError(nodes_[i]);
    }
    marks_.assign(nodes_.size() * nodes_.size(), -1);
}

int Pag::index_of(const std::string& name) const {
    auto it = std::find(nodes_.begin(), nodes_.end(), name);
    return it == nodes_.end() ? -1 : static_cast<int>(it - nodes_.begin());
}

void Pag::check(int v) const {
    if (v < 0 || v >= node_count()) throw Error("Pag: node index out of range");
}

bool Pag::adjacent(int a, int b) const {
    check(a);
    check(b);
    return a != b && marks_[at(a, b)] >= 0;
}

void Pag::add_edge(int a, int b, Mark at_a, Mark at_b) {
    check(a);
    check(b);
    if (a == b) throw Error("Pag: self loop");
    marks_[at(a, b)] = static_cast<std::int8_t>(at_a);
    marks_[at(b, a)] = static_cast<std::int8_t>(at_b);
}

void Pag::remove_edge(int a, int b) {
    check(a);
    check(b);
    marks_[at(a, b)] = -1;
    marks_[at(b, a)] = -1;
}

Mark Pag::mark(int node, int other) const {
    if (!adjacent(node, other)) throw NotAdjacentError(nodes_[node], nodes_[other]);
    return static_cast<Mark>(marks_[at(node, other)]);
}

void Pag::set_mark(int node, int other, Mark m) {
    if (!adjacent(node, other)) throw NotAdjacentError(nodes_[node], nodes_[other]);
    marks_[at(node, other)] = static_cast<std::int8_t>(m);
}

std::vector<int> Pag::adjacent_nodes(int v) const {
    check(v);
    std::vector<int> out;
    for (int u = 0; u < node_count(); ++u)
        if (u != v && marks_[at(v, u)] >= 0) out.push_back(u);
    return out;
}

int Pag::edge_count() const { return static_cast<int>(edge_list().size()); }

std::vector<std::pair<int, int>> Pag::edge_list() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < node_count(); ++a)
        for (int b = a + 1; b < node_count(); ++b)
            if (marks_[at(a, b)] >= 0) out.emplace_back(a, b);
    return out;
}

bool Pag::operator==(const Pag& other) const {
    return nodes_ == other.nodes_ && marks_ == other.marks_;
}

Pag complete_pag(const std::vector<std::string>& nodes) {
    Pag g(nodes);
    for (int a = 0; a < g.node_count(); ++a)
        for (int b = a + 1; b < g.node_count(); ++b)
            g.add_edge(a, b, Mark::Circle, Mark::Circle);
    return g;
}

EdgeRecord canonical_edge(const Pag& pag, int a, int b) {
    if (!pag.adjacent(a, b)) throw NotAdjacentError(pag.nodes()[a], pag.nodes()[b]);
    if (a > b) std::swap(a, b);
    return EdgeRecord{pag.nodes()[a], pag.mark(a, b), pag.mark(b, a), pag.nodes()[b]};
}

std::vector<EdgeRecord> edge_records(const Pag& pag) {
    std::vector<EdgeRecord> out;
    for (const auto& [a, b] : pag.edge_list()) out.push_back(canonical_edge(pag, a, b));
    return out;
}

std::string render_edge(const EdgeRecord& rec) {
    Mark ma = rec.mark_a, mb = rec.mark_b;
    std::string left = rec.a, right = rec.b;
    // flip so the glyph reads left-to-right when only the a-side carries the arrow
    if (ma == Mark::Arrow && mb != Mark::Arrow) {
        std::swap(left, right);
        std::swap(ma, mb);
    }
    std::string glyph;
    if (ma == Mark::Tail && mb == Mark::Arrow) glyph = "→";               // ->
    else if (ma == Mark::Circle && mb == Mark::Arrow) glyph = "○→";  // o->
    else if (ma == Mark::Circle && mb == Mark::Circle) glyph = "○–○";  // o-o
    else if (ma == Mark::Arrow && mb == Mark::Arrow) glyph = "↔";         // <->
    else if (ma == Mark::Tail && mb == Mark::Circle) glyph = "–○";   // -o
    else glyph = "–";                                                     // --
    return left + " " + glyph + " " + right;
}

Dag::Dag(std::vector<std::string> nodes, std::vector<std::pair<int, int>> edges,
         std::set<int> latent)
    : nodes_(std::move(nodes)), latent_(std::move(latent)) {
    const int p = static_cast<int>(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        for (std::size_t j = i + 1; j < nodes_.size(); ++j)
            if (nodes_[i] == nodes_[j]) throw DuplicateNameError(nodes_[i]);
    for (int v : latent_)
        if (v < 0 || v >= p) throw Error("Dag: latent index out of range");
    parents_.assign(p, {});
    children_.assign(p, {});
    for (const auto& [from, to] : edges) {
        if (from < 0 || from >= p || to < 0 || to >= p || from == to)
            throw Error("Dag: bad edge");
        parents_[to].push_back(from);
        children_[from].push_back(to);
    }
    for (auto& v : parents_) std::sort(v.begin(), v.end());
    for (auto& v : children_) std::sort(v.begin(), v.end());
    topological_order();  // throws on cycles
}

int Dag::index_of(const std::string& name) const {
    auto it = std::find(nodes_.begin(), nodes_.end(), name);
    return it == nodes_.end() ? -1 : static_cast<int>(it - nodes_.begin());
}

bool Dag::has_edge(int from, int to) const {
    const auto& ps = parents_[to];
    return std::binary_search(ps.begin(), ps.end(), from);
}

std::vector<int> Dag::topological_order() const {
    const int p = node_count();
    std::vector<int> indeg(p, 0);
    for (int v = 0; v < p; ++v) indeg[v] = static_cast<int>(parents_[v].size());
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int v = 0; v < p; ++v)
        if (indeg[v] == 0) ready.push(v);
    std::vector<int> order;
    while (!ready.empty()) {
        const int v = ready.top();
        ready.pop();
        order.push_back(v);
        for (int c : children_[v])
            if (--indeg[c] == 0) ready.push(c);
    }
    if (static_cast<int>(order.size()) != p) throw Error("Dag: cycle detected");
    return order;
}

std::vector<int> Dag::observed_indices() const {
    std::vector<int> out;
    for (int v = 0; v < node_count(); ++v)
        if (!is_latent(v)) out.push_back(v);
    return out;
}

bool d_separated(const Dag& dag, int x, int y, const std::vector<int>& cond) {
    const int p = dag.node_count();
    auto check = [&](int v) {
        if (v < 0 || v >= p) throw Error("d_separated: index out of range");
    };
    check(x);
    check(y);
    if (x == y) throw Error("d_separated: x == y");
    std::vector<char> in_cond(p, 0);
    for (int s : cond) {
        check(s);
        if (s == x || s == y) throw Error("d_separated: cond overlaps {x,y}");
        in_cond[s] = 1;
    }

    // ancestors of the conditioning set (including it)
    std::vector<char> anc(p, 0);
    std::deque<int> todo;
    for (int s : cond) {
        anc[s] = 1;
        todo.push_back(s);
    }
    while (!todo.empty()) {
        const int v = todo.front();
        todo.pop_front();
        for (int par : dag.parents(v))
            if (!anc[par]) {
                anc[par] = 1;
                todo.push_back(par);
            }
    }

    // reachability over (node, entering-direction) states
    constexpr int kFromChild = 0;   // trail arrives moving up
    constexpr int kFromParent = 1;  // trail arrives moving down
    std::vector<std::array<char, 2>> seen(p, {0, 0});
    std::deque<std::pair<int, int>> frontier;
    frontier.emplace_back(x, kFromChild);
    seen[x][kFromChild] = 1;
    while (!frontier.empty()) {
        const auto [v, dir] = frontier.front();
        frontier.pop_front();
        if (v == y) return false;
        auto push = [&](int u, int d) {
            if (!seen[u][d]) {
                seen[u][d] = 1;
                frontier.emplace_back(u, d);
            }
        };
        if (dir == kFromChild) {
            if (!in_cond[v]) {
                for (int par : dag.parents(v)) push(par, kFromChild);
                for (int ch : dag.children(v)) push(ch, kFromParent);
            }
        } else {
            if (!in_cond[v])
                for (int ch : dag.children(v)) push(ch, kFromParent);
            if (anc[v])  // collider with a descendant in cond can bounce back up
                for (int par : dag.parents(v)) push(par, kFromChild);
        }
    }
    return true;
}

std::set<int> possible_d_sep(const Pag& pag, int x) {
    const int p = pag.node_count();
    std::set<int> reached;
    // states are ordered pairs (prev, cur) along a qualifying path
    std::vector<char> seen(static_cast<std::size_t>(p) * p, 0);
    std::deque<std::pair<int, int>> frontier;
    for (int n : pag.adjacent_nodes(x)) {
        reached.insert(n);
        seen[static_cast<std::size_t>(x) * p + n] = 1;
        frontier.emplace_back(x, n);
    }
    while (!frontier.empty()) {
        const auto [a, b] = frontier.front();
        frontier.pop_front();
        for (int c : pag.adjacent_nodes(b)) {
            if (c == a || c == x) continue;
            if (seen[static_cast<std::size_t>(b) * p + c]) continue;
            const bool collider =
                pag.mark(b, a) == Mark::Arrow && pag.mark(b, c) == Mark::Arrow;
            const bool triangle = pag.adjacent(a, c);
            if (!collider && !triangle) continue;
            seen[static_cast<std::size_t>(b) * p + c] = 1;
            reached.insert(c);
            frontier.emplace_back(b, c);
        }
    }
    reached.erase(x);
    return reached;
}

namespace {
const char* dot_arrow(Mark m) {
    switch (m) {
        case Mark::Arrow: return "normal";
        case Mark::Circle: return "odot";
        case Mark::Tail: return "none";
    }
    return "none";
}
}  // namespace

std::string to_dot(const Pag& pag) {
    std::string out = "digraph pag {\n";
    for (const auto& n : pag.nodes()) out += "  \"" + n + "\";\n";
    for (const auto& [a, b] : pag.edge_list()) {
        out += "  \"" + pag.nodes()[a] + "\" -> \"" + pag.nodes()[b] +
               "\" [dir=both, arrowtail=" + dot_arrow(pag.mark(a, b)) +
               ", arrowhead=" + dot_arrow(pag.mark(b, a)) + "];\n";
    }
    out += "}\n";
    return out;
}

std::string to_json(const Pag& pag) {
    nlohmann::json j;
    j["nodes"] = pag.nodes();
    j["edges"] = nlohmann::json::array();
    for (const auto& rec : edge_records(pag)) {
        j["edges"].push_back({{"a", rec.a},
                              {"mark_a", mark_name(rec.mark_a)},
                              {"mark_b", mark_name(rec.mark_b)},
                              {"b", rec.b}});
    }
    return j.dump(2) + "\n";
}

Pag pag_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Pag g(j.at("nodes").get<std::vector<std::string>>());
    for (const auto& e : j.at("edges")) {
        const int a = g.index_of(e.at("a").get<std::string>());
        const int b = g.index_of(e.at("b").get<std::string>());
        if (a < 0 || b < 0) throw Error("pag_from_json: unknown node in edge");
        g.add_edge(a, b, mark_from_name(e.at("mark_a").get<std::string>()),
                   mark_from_name(e.at("mark_b").get<std::string>()));
    }
    return g;
}

}  // namespace fcikit
