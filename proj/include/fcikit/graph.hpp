#ifndef FCIKIT_GRAPH_HPP
#define FCIKIT_GRAPH_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace fcikit {

enum class Mark : std::uint8_t { Tail, Arrow, Circle };

std::string mark_name(Mark m);
Mark mark_from_name(const std::string& s);

/// Mixed-mark graph over named nodes: at most one edge per unordered pair,
/// one endpoint mark stored per side. mark(a, b) is the mark AT a on edge {a,b}.
class Pag {
public:
    explicit Pag(std::vector<std::string> nodes);

    int node_count() const { return static_cast<int>(nodes_.size()); }
    const std::vector<std::string>& nodes() const { return nodes_; }
    int index_of(const std::string& name) const;  // -1 when absent

    bool adjacent(int a, int b) const;
    void add_edge(int a, int b, Mark at_a, Mark at_b);
    void remove_edge(int a, int b);  // removes both endpoint marks atomically
    Mark mark(int node, int other) const;
    void set_mark(int node, int other, Mark m);

    std::vector<int> adjacent_nodes(int v) const;  // ascending
    int edge_count() const;
    std::vector<std::pair<int, int>> edge_list() const;  // canonical (a < b), ascending

    bool operator==(const Pag& other) const;

private:
    void check(int v) const;
    std::size_t at(int node, int other) const {
        return static_cast<std::size_t>(node) * nodes_.size() + other;
    }
    std::vector<std::string> nodes_;
    std::vector<std::int8_t> marks_;  // -1 = no edge, else Mark at `node` toward `other`
};

// Complete circle-circle graph; the FCI starting point.
Pag complete_pag(const std::vector<std::string>& nodes);

/// Canonical per-edge record: endpoint a precedes b in node (column) order and
/// each mark travels with its endpoint.
struct EdgeRecord {
    std::string a;
    Mark mark_a;
    Mark mark_b;
    std::string b;

    bool operator==(const EdgeRecord& o) const {
        return a == o.a && b == o.b && mark_a == o.mark_a && mark_b == o.mark_b;
    }
    bool operator<(const EdgeRecord& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        if (mark_a != o.mark_a) return mark_a < o.mark_a;
        return mark_b < o.mark_b;
    }
};

EdgeRecord canonical_edge(const Pag& pag, int a, int b);
std::vector<EdgeRecord> edge_records(const Pag& pag);

// Rendered form matching the bootstrap edge tables: "A -> B", "A o-> B",
// "A o-o B", "A <-> B" (as the UTF-8 glyphs), flipping so glyphs read
// left-to-right.
std::string render_edge(const EdgeRecord& rec);

/// Directed acyclic graph with designated latent nodes; ground truth for
/// simulation and the d-separation oracle.
class Dag {
public:
    Dag(std::vector<std::string> nodes, std::vector<std::pair<int, int>> edges,
        std::set<int> latent = {});

    int node_count() const { return static_cast<int>(nodes_.size()); }
    const std::vector<std::string>& nodes() const { return nodes_; }
    int index_of(const std::string& name) const;
    const std::vector<int>& parents(int v) const { return parents_[v]; }
    const std::vector<int>& children(int v) const { return children_[v]; }
    const std::set<int>& latent() const { return latent_; }
    bool is_latent(int v) const { return latent_.count(v) != 0; }
    bool has_edge(int from, int to) const;
    std::vector<int> topological_order() const;  // deterministic (index ties ascending)
    std::vector<int> observed_indices() const;

private:
    std::vector<std::string> nodes_;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
    std::set<int> latent_;
};

// Reachability-based d-separation: true iff every path between x and y is
// blocked by cond (colliders open iff they or a descendant lie in cond).
bool d_separated(const Dag& dag, int x, int y, const std::vector<int>& cond);

// All v != x reachable from x along a path whose every intermediate node is a
// collider on the path or adjacent to both its path neighbours.
std::set<int> possible_d_sep(const Pag& pag, int x);

// Serialization. DOT marks: Arrow -> normal, Circle -> odot, Tail -> none.
std::string to_dot(const Pag& pag);
std::string to_json(const Pag& pag);
Pag pag_from_json(const std::string& text);

}  // namespace fcikit

#endif
