#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace causal {

using NodeId = int;
using Edge = std::pair<NodeId, NodeId>;
using EdgeList = std::vector<Edge>;

/// True iff the edge set over num_nodes admits a topological order.
bool is_acyclic(int num_nodes, const EdgeList& edges);

std::vector<std::string> default_node_names(int num_nodes);

/// Directed acyclic graph over nodes 0..m-1. Immutable once built; edges are
/// validated (bounds, self-loops, duplicate pairs, cycles) at construction.
class Dag {
public:
    Dag() : Dag(0) {}
    explicit Dag(int num_nodes);
    Dag(int num_nodes, const EdgeList& edges);
    Dag(std::vector<std::string> names, const EdgeList& edges);

    int num_nodes() const { return num_nodes_; }
    const std::vector<std::string>& node_names() const { return names_; }
    void set_node_names(std::vector<std::string> names);

    bool has_edge(NodeId from, NodeId to) const;
    bool adjacent(NodeId a, NodeId b) const;
    const std::set<NodeId>& parents(NodeId v) const;
    const std::set<NodeId>& children(NodeId v) const;
    EdgeList edges() const;
    int num_edges() const { return num_edges_; }

    /// Nodes in a deterministic topological order (ties by ascending id).
    std::vector<NodeId> topological_order() const;
    /// Descendants of v including v itself.
    std::set<NodeId> descendants(NodeId v) const;
    /// Ancestors of every node in vs, including vs themselves.
    std::set<NodeId> ancestors(const std::set<NodeId>& vs) const;

    bool operator==(const Dag& other) const;

private:
    void check_node(NodeId v) const;

    int num_nodes_ = 0;
    int num_edges_ = 0;
    std::vector<std::set<NodeId>> parents_;
    std::vector<std::set<NodeId>> children_;
    std::vector<std::string> names_;
};

/// Edge status of an unordered node pair in a partially directed graph.
enum class EdgeStatus { Absent, Undirected, Forward, Backward };

/// Partially directed graph: disjoint sets of directed and undirected edges,
/// at most one edge per unordered pair. The directed part is not required to
/// be acyclic (sample-based searches can produce cycles); algorithms that
/// need acyclicity check it explicitly.
class Pdag {
public:
    Pdag() : Pdag(0) {}
    explicit Pdag(int num_nodes);
    explicit Pdag(std::vector<std::string> names);
    static Pdag from_dag(const Dag& dag);

    int num_nodes() const { return num_nodes_; }
    const std::vector<std::string>& node_names() const { return names_; }
    void set_node_names(std::vector<std::string> names);

    void add_directed(NodeId from, NodeId to);
    void add_undirected(NodeId a, NodeId b);
    /// Turns the undirected edge a-b into a->b.
    void orient(NodeId from, NodeId to);
    void remove_edge(NodeId a, NodeId b);

    bool has_directed(NodeId from, NodeId to) const;
    bool has_undirected(NodeId a, NodeId b) const;
    bool adjacent(NodeId a, NodeId b) const;
    /// Status of pair (a,b); Forward means a->b, Backward means b->a.
    EdgeStatus status(NodeId a, NodeId b) const;

    const std::set<NodeId>& parents(NodeId v) const;
    const std::set<NodeId>& children(NodeId v) const;
    const std::set<NodeId>& undirected_neighbors(NodeId v) const;
    /// All adjacent nodes (directed either way or undirected).
    std::set<NodeId> adjacency(NodeId v) const;

    EdgeList directed_edges() const;
    /// Undirected edges as pairs (a,b) with a < b.
    EdgeList undirected_edges() const;
    int num_edges() const;

    bool directed_part_acyclic() const;
    /// True iff there is a directed path from one node to another.
    bool directed_path_exists(NodeId from, NodeId to) const;

    bool operator==(const Pdag& other) const;

private:
    void check_node(NodeId v) const;
    void check_pair_free(NodeId a, NodeId b) const;

    int num_nodes_ = 0;
    std::vector<std::set<NodeId>> parents_;
    std::vector<std::set<NodeId>> children_;
    std::vector<std::set<NodeId>> undirected_;
    std::vector<std::string> names_;
};

/// Endpoint mark in a partial ancestral graph.
enum class Mark { Tail, Arrow, Circle };

/// Partial ancestral graph: undirected adjacency structure with a mark at
/// each endpoint of every edge.
class Pag {
public:
    Pag() : Pag(0) {}
    explicit Pag(int num_nodes);
    explicit Pag(std::vector<std::string> names);

    int num_nodes() const { return num_nodes_; }
    const std::vector<std::string>& node_names() const { return names_; }
    void set_node_names(std::vector<std::string> names);

    void add_edge(NodeId a, NodeId b, Mark at_a, Mark at_b);
    void remove_edge(NodeId a, NodeId b);
    bool adjacent(NodeId a, NodeId b) const;
    /// Mark at node `at` on the edge {at, other}.
    Mark mark_at(NodeId at, NodeId other) const;
    void set_mark(NodeId at, NodeId other, Mark m);

    std::vector<NodeId> neighbors(NodeId v) const;
    /// Edges as (a,b,mark_at_a,mark_at_b) with a < b, ascending.
    std::vector<std::tuple<NodeId, NodeId, Mark, Mark>> edges() const;
    int num_edges() const;

    /// Projection onto a Pdag for metric computation: an edge with an
    /// arrowhead at exactly one end becomes directed into that end; every
    /// other combination (o-o, tail-tail, bidirected) becomes undirected.
    Pdag to_pdag() const;

    bool operator==(const Pag& other) const;

private:
    void check_node(NodeId v) const;

    int num_nodes_ = 0;
    std::vector<std::map<NodeId, Mark>> marks_;
    std::vector<std::string> names_;
};

/// Separation sets recorded per unordered node pair during skeleton search.
class SepsetMap {
public:
    bool has(NodeId a, NodeId b) const;
    /// Stored set for the pair; throws if absent.
    const std::vector<NodeId>& get(NodeId a, NodeId b) const;
    void set(NodeId a, NodeId b, std::vector<NodeId> sepset);
    std::size_t size() const { return map_.size(); }

private:
    std::map<std::pair<NodeId, NodeId>, std::vector<NodeId>> map_;
};

/// d-separation of x and y given Z, by reachability over active trails.
bool d_separated(const Dag& dag, NodeId x, NodeId y, const std::vector<NodeId>& z);

/// CPDAG of the Markov equivalence class of a DAG: skeleton, unshielded
/// colliders, then Meek closure.
Pdag dag_to_cpdag(const Dag& dag);

/// Behaviour of rule engines when an orientation would create a directed
/// cycle or a new unshielded collider.
enum class OrientationConflict { Error, Skip };

/// Fixed point of Meek rules R1-R3. The directed part of the input must be
/// acyclic. With OrientationConflict::Error an inconsistent rule application
/// throws InconsistentPdagError; with Skip it is left unoriented.
Pdag meek_closure(const Pdag& pdag, OrientationConflict on_conflict = OrientationConflict::Error);

/// Consistent extension via Dor-Tarsi sink elimination (candidate sinks in
/// ascending id order). If none exists, returns the skeleton oriented
/// low-id -> high-id and sets the flag.
struct DagExtension {
    Dag dag;
    bool used_fallback = false;
};
DagExtension extend_to_dag(const Pdag& pdag);

/// Possible-D-SEP(x) minus {x,y}: nodes v reachable from x along a path on
/// which every interior node is a collider or part of a triangle with its
/// path neighbors.
std::vector<NodeId> possible_d_sep(const Pag& pag, NodeId x, NodeId y);

/// JSON serialization. Schema:
///   {"nodes":[names], "edges":[{"a":i,"b":j,"mark_a":m,"mark_b":m}]}
/// with marks in {"tail","arrow","circle","undirected"}. A directed edge
/// i->j is tail/arrow; an undirected edge is undirected/undirected.
std::string to_json(const Dag& dag);
std::string to_json(const Pdag& pdag);
std::string to_json(const Pag& pag);
Dag dag_from_json(const std::string& text);
Pdag pdag_from_json(const std::string& text);
Pag pag_from_json(const std::string& text);

/// Reindexes a graph so node i carries names[i]; the graph's current names
/// must be a permutation of `names`.
Dag reindex_by_names(const Dag& g, const std::vector<std::string>& names);

}  // namespace causal
