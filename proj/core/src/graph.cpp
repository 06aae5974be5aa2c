#include "causal/graph.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <queue>
#include <stdexcept>

#include <json.hpp>

#include "causal/errors.hpp"

namespace causal {

namespace {

std::pair<NodeId, NodeId> ordered(NodeId a, NodeId b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

bool is_acyclic(int num_nodes, const EdgeList& edges) {
    std::vector<std::vector<NodeId>> children(num_nodes);
    std::vector<int> indeg(num_nodes, 0);
    for (const auto& [from, to] : edges) {
        if (from < 0 || from >= num_nodes || to < 0 || to >= num_nodes) {
            throw std::invalid_argument("edge endpoint out of range");
        }
        if (from == to) return false;
        children[from].push_back(to);
        ++indeg[to];
    }
    std::queue<NodeId> ready;
    for (NodeId v = 0; v < num_nodes; ++v) {
        if (indeg[v] == 0) ready.push(v);
    }
    int seen = 0;
    while (!ready.empty()) {
        NodeId v = ready.front();
        ready.pop();
        ++seen;
        for (NodeId c : children[v]) {
            if (--indeg[c] == 0) ready.push(c);
        }
    }
    return seen == num_nodes;
}

std::vector<std::string> default_node_names(int num_nodes) {
    std::vector<std::string> names;
    names.reserve(num_nodes);
    for (int i = 0; i < num_nodes; ++i) {
        names.push_back("X" + std::to_string(i));
    }
    return names;
}

// ---------------------------------------------------------------------------
// Dag

Dag::Dag(int num_nodes)
    : num_nodes_(num_nodes),
      parents_(num_nodes),
      children_(num_nodes),
      names_(default_node_names(num_nodes)) {
    if (num_nodes < 0) throw std::invalid_argument("negative node count");
}

Dag::Dag(int num_nodes, const EdgeList& edges) : Dag(num_nodes) {
    if (!is_acyclic(num_nodes, edges)) {
        throw std::invalid_argument("edge set contains a directed cycle");
    }
    for (const auto& [from, to] : edges) {
        if (from == to) throw std::invalid_argument("self-loop");
        if (adjacent(from, to)) throw std::invalid_argument("duplicate edge on a node pair");
        children_[from].insert(to);
        parents_[to].insert(from);
        ++num_edges_;
    }
}

Dag::Dag(std::vector<std::string> names, const EdgeList& edges)
    : Dag(static_cast<int>(names.size()), edges) {
    set_node_names(std::move(names));
}

void Dag::set_node_names(std::vector<std::string> names) {
    if (static_cast<int>(names.size()) != num_nodes_) {
        throw std::invalid_argument("node name count mismatch");
    }
    names_ = std::move(names);
}

void Dag::check_node(NodeId v) const {
    if (v < 0 || v >= num_nodes_) {
        throw std::invalid_argument("unknown node " + std::to_string(v));
    }
}

bool Dag::has_edge(NodeId from, NodeId to) const {
    check_node(from);
    check_node(to);
    return children_[from].count(to) > 0;
}

bool Dag::adjacent(NodeId a, NodeId b) const {
    return has_edge(a, b) || has_edge(b, a);
}

const std::set<NodeId>& Dag::parents(NodeId v) const {
    check_node(v);
    return parents_[v];
}

const std::set<NodeId>& Dag::children(NodeId v) const {
    check_node(v);
    return children_[v];
}

EdgeList Dag::edges() const {
    EdgeList out;
    out.reserve(num_edges_);
    for (NodeId v = 0; v < num_nodes_; ++v) {
        for (NodeId c : children_[v]) out.emplace_back(v, c);
    }
    return out;
}

std::vector<NodeId> Dag::topological_order() const {
    std::vector<int> indeg(num_nodes_);
    for (NodeId v = 0; v < num_nodes_; ++v) indeg[v] = static_cast<int>(parents_[v].size());
    std::set<NodeId> ready;
    for (NodeId v = 0; v < num_nodes_; ++v) {
        if (indeg[v] == 0) ready.insert(v);
    }
    std::vector<NodeId> order;
    order.reserve(num_nodes_);
    while (!ready.empty()) {
        NodeId v = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(v);
        for (NodeId c : children_[v]) {
            if (--indeg[c] == 0) ready.insert(c);
        }
    }
    return order;
}

std::set<NodeId> Dag::descendants(NodeId v) const {
    check_node(v);
    std::set<NodeId> seen{v};
    std::deque<NodeId> todo{v};
    while (!todo.empty()) {
        NodeId u = todo.front();
        todo.pop_front();
        for (NodeId c : children_[u]) {
            if (seen.insert(c).second) todo.push_back(c);
        }
    }
    return seen;
}

std::set<NodeId> Dag::ancestors(const std::set<NodeId>& vs) const {
    std::set<NodeId> seen;
    std::deque<NodeId> todo;
    for (NodeId v : vs) {
        check_node(v);
        if (seen.insert(v).second) todo.push_back(v);
    }
    while (!todo.empty()) {
        NodeId u = todo.front();
        todo.pop_front();
        for (NodeId p : parents_[u]) {
            if (seen.insert(p).second) todo.push_back(p);
        }
    }
    return seen;
}

bool Dag::operator==(const Dag& other) const {
    return num_nodes_ == other.num_nodes_ && children_ == other.children_;
}

// ---------------------------------------------------------------------------
// Pdag

Pdag::Pdag(int num_nodes)
    : num_nodes_(num_nodes),
      parents_(num_nodes),
      children_(num_nodes),
      undirected_(num_nodes),
      names_(default_node_names(num_nodes)) {
    if (num_nodes < 0) throw std::invalid_argument("negative node count");
}

Pdag::Pdag(std::vector<std::string> names) : Pdag(static_cast<int>(names.size())) {
    names_ = std::move(names);
}

Pdag Pdag::from_dag(const Dag& dag) {
    Pdag p(dag.num_nodes());
    p.names_ = dag.node_names();
    for (const auto& [from, to] : dag.edges()) p.add_directed(from, to);
    return p;
}

void Pdag::set_node_names(std::vector<std::string> names) {
    if (static_cast<int>(names.size()) != num_nodes_) {
        throw std::invalid_argument("node name count mismatch");
    }
    names_ = std::move(names);
}

void Pdag::check_node(NodeId v) const {
    if (v < 0 || v >= num_nodes_) {
        throw std::invalid_argument("unknown node " + std::to_string(v));
    }
}

void Pdag::check_pair_free(NodeId a, NodeId b) const {
    if (a == b) throw std::invalid_argument("self-loop");
    if (adjacent(a, b)) throw std::invalid_argument("node pair already has an edge");
}

void Pdag::add_directed(NodeId from, NodeId to) {
    check_node(from);
    check_node(to);
    check_pair_free(from, to);
    children_[from].insert(to);
    parents_[to].insert(from);
}

void Pdag::add_undirected(NodeId a, NodeId b) {
    check_node(a);
    check_node(b);
    check_pair_free(a, b);
    undirected_[a].insert(b);
    undirected_[b].insert(a);
}

void Pdag::orient(NodeId from, NodeId to) {
    check_node(from);
    check_node(to);
    if (!has_undirected(from, to)) {
        throw std::invalid_argument("orient requires an undirected edge");
    }
    undirected_[from].erase(to);
    undirected_[to].erase(from);
    children_[from].insert(to);
    parents_[to].insert(from);
}

void Pdag::remove_edge(NodeId a, NodeId b) {
    check_node(a);
    check_node(b);
    undirected_[a].erase(b);
    undirected_[b].erase(a);
    children_[a].erase(b);
    parents_[b].erase(a);
    children_[b].erase(a);
    parents_[a].erase(b);
}

bool Pdag::has_directed(NodeId from, NodeId to) const {
    check_node(from);
    check_node(to);
    return children_[from].count(to) > 0;
}

bool Pdag::has_undirected(NodeId a, NodeId b) const {
    check_node(a);
    check_node(b);
    return undirected_[a].count(b) > 0;
}

bool Pdag::adjacent(NodeId a, NodeId b) const {
    return has_undirected(a, b) || has_directed(a, b) || has_directed(b, a);
}

EdgeStatus Pdag::status(NodeId a, NodeId b) const {
    if (has_undirected(a, b)) return EdgeStatus::Undirected;
    if (has_directed(a, b)) return EdgeStatus::Forward;
    if (has_directed(b, a)) return EdgeStatus::Backward;
    return EdgeStatus::Absent;
}

const std::set<NodeId>& Pdag::parents(NodeId v) const {
    check_node(v);
    return parents_[v];
}

const std::set<NodeId>& Pdag::children(NodeId v) const {
    check_node(v);
    return children_[v];
}

const std::set<NodeId>& Pdag::undirected_neighbors(NodeId v) const {
    check_node(v);
    return undirected_[v];
}

std::set<NodeId> Pdag::adjacency(NodeId v) const {
    check_node(v);
    std::set<NodeId> out = undirected_[v];
    out.insert(parents_[v].begin(), parents_[v].end());
    out.insert(children_[v].begin(), children_[v].end());
    return out;
}

EdgeList Pdag::directed_edges() const {
    EdgeList out;
    for (NodeId v = 0; v < num_nodes_; ++v) {
        for (NodeId c : children_[v]) out.emplace_back(v, c);
    }
    return out;
}

EdgeList Pdag::undirected_edges() const {
    EdgeList out;
    for (NodeId v = 0; v < num_nodes_; ++v) {
        for (NodeId u : undirected_[v]) {
            if (v < u) out.emplace_back(v, u);
        }
    }
    return out;
}

int Pdag::num_edges() const {
    int n = 0;
    for (NodeId v = 0; v < num_nodes_; ++v) {
        n += static_cast<int>(children_[v].size());
        n += static_cast<int>(undirected_[v].size());
    }
    return n - static_cast<int>(undirected_edges().size());  // undirected counted twice
}

bool Pdag::directed_part_acyclic() const {
    return is_acyclic(num_nodes_, directed_edges());
}

bool Pdag::directed_path_exists(NodeId from, NodeId to) const {
    check_node(from);
    check_node(to);
    std::set<NodeId> seen{from};
    std::deque<NodeId> todo{from};
    while (!todo.empty()) {
        NodeId u = todo.front();
        todo.pop_front();
        if (u == to) return true;
        for (NodeId c : children_[u]) {
            if (seen.insert(c).second) todo.push_back(c);
        }
    }
    return false;
}

bool Pdag::operator==(const Pdag& other) const {
    return num_nodes_ == other.num_nodes_ && children_ == other.children_ &&
           undirected_ == other.undirected_;
}

// ---------------------------------------------------------------------------
// Pag

Pag::Pag(int num_nodes)
    : num_nodes_(num_nodes), marks_(num_nodes), names_(default_node_names(num_nodes)) {
    if (num_nodes < 0) throw std::invalid_argument("negative node count");
}

Pag::Pag(std::vector<std::string> names) : Pag(static_cast<int>(names.size())) {
    names_ = std::move(names);
}

void Pag::set_node_names(std::vector<std::string> names) {
    if (static_cast<int>(names.size()) != num_nodes_) {
        throw std::invalid_argument("node name count mismatch");
    }
    names_ = std::move(names);
}

void Pag::check_node(NodeId v) const {
    if (v < 0 || v >= num_nodes_) {
        throw std::invalid_argument("unknown node " + std::to_string(v));
    }
}

void Pag::add_edge(NodeId a, NodeId b, Mark at_a, Mark at_b) {
    check_node(a);
    check_node(b);
    if (a == b) throw std::invalid_argument("self-loop");
    if (adjacent(a, b)) throw std::invalid_argument("node pair already has an edge");
    marks_[a][b] = at_a;
    marks_[b][a] = at_b;
}

void Pag::remove_edge(NodeId a, NodeId b) {
    check_node(a);
    check_node(b);
    marks_[a].erase(b);
    marks_[b].erase(a);
}

bool Pag::adjacent(NodeId a, NodeId b) const {
    check_node(a);
    check_node(b);
    return marks_[a].count(b) > 0;
}

Mark Pag::mark_at(NodeId at, NodeId other) const {
    check_node(at);
    check_node(other);
    auto it = marks_[at].find(other);
    if (it == marks_[at].end()) throw std::invalid_argument("no edge between nodes");
    return it->second;
}

void Pag::set_mark(NodeId at, NodeId other, Mark m) {
    check_node(at);
    check_node(other);
    auto it = marks_[at].find(other);
    if (it == marks_[at].end()) throw std::invalid_argument("no edge between nodes");
    it->second = m;
}

std::vector<NodeId> Pag::neighbors(NodeId v) const {
    check_node(v);
    std::vector<NodeId> out;
    out.reserve(marks_[v].size());
    for (const auto& [u, m] : marks_[v]) out.push_back(u);
    return out;
}

std::vector<std::tuple<NodeId, NodeId, Mark, Mark>> Pag::edges() const {
    std::vector<std::tuple<NodeId, NodeId, Mark, Mark>> out;
    for (NodeId v = 0; v < num_nodes_; ++v) {
        for (const auto& [u, m] : marks_[v]) {
            if (v < u) out.emplace_back(v, u, m, marks_[u].at(v));
        }
    }
    return out;
}

int Pag::num_edges() const {
    int n = 0;
    for (NodeId v = 0; v < num_nodes_; ++v) n += static_cast<int>(marks_[v].size());
    return n / 2;
}

Pdag Pag::to_pdag() const {
    Pdag out(num_nodes_);
    out.set_node_names(names_);
    for (const auto& [a, b, ma, mb] : edges()) {
        if (mb == Mark::Arrow && ma != Mark::Arrow) {
            out.add_directed(a, b);
        } else if (ma == Mark::Arrow && mb != Mark::Arrow) {
            out.add_directed(b, a);
        } else {
            out.add_undirected(a, b);
        }
    }
    return out;
}

bool Pag::operator==(const Pag& other) const {
    return num_nodes_ == other.num_nodes_ && marks_ == other.marks_;
}

// ---------------------------------------------------------------------------
// SepsetMap

bool SepsetMap::has(NodeId a, NodeId b) const { return map_.count(ordered(a, b)) > 0; }

const std::vector<NodeId>& SepsetMap::get(NodeId a, NodeId b) const {
    auto it = map_.find(ordered(a, b));
    if (it == map_.end()) throw std::invalid_argument("no sepset recorded for pair");
    return it->second;
}

void SepsetMap::set(NodeId a, NodeId b, std::vector<NodeId> sepset) {
    for (NodeId s : sepset) {
        if (s == a || s == b) {
            throw std::invalid_argument("sepset must not contain the pair itself");
        }
    }
    std::sort(sepset.begin(), sepset.end());
    map_[ordered(a, b)] = std::move(sepset);
}

// ---------------------------------------------------------------------------
// d-separation

bool d_separated(const Dag& dag, NodeId x, NodeId y, const std::vector<NodeId>& z) {
    if (x == y) throw std::invalid_argument("d_separated requires distinct nodes");
    std::set<NodeId> zset(z.begin(), z.end());
    if (zset.count(x) || zset.count(y)) {
        throw std::invalid_argument("conditioning set must exclude the pair");
    }
    for (NodeId s : z) {
        if (s < 0 || s >= dag.num_nodes()) {
            throw std::invalid_argument("unknown node " + std::to_string(s));
        }
    }
    if (x < 0 || x >= dag.num_nodes() || y < 0 || y >= dag.num_nodes()) {
        throw std::invalid_argument("unknown node");
    }

    // Ancestors of Z open colliders along a trail.
    const std::set<NodeId> anc_z = dag.ancestors(zset);

    // Reachability over (node, direction) states; Up = trail arrived from a
    // child (moving against edges), Down = arrived from a parent.
    enum Dir { Up = 0, Down = 1 };
    std::vector<std::array<bool, 2>> visited(dag.num_nodes(), {false, false});
    std::deque<std::pair<NodeId, int>> todo;
    todo.emplace_back(x, Up);
    while (!todo.empty()) {
        auto [v, dir] = todo.front();
        todo.pop_front();
        if (visited[v][dir]) continue;
        visited[v][dir] = true;
        if (v == y) return false;
        if (dir == Up) {
            if (!zset.count(v)) {
                for (NodeId p : dag.parents(v)) todo.emplace_back(p, Up);
                for (NodeId c : dag.children(v)) todo.emplace_back(c, Down);
            }
        } else {
            if (!zset.count(v)) {
                for (NodeId c : dag.children(v)) todo.emplace_back(c, Down);
            }
            if (anc_z.count(v)) {
                for (NodeId p : dag.parents(v)) todo.emplace_back(p, Up);
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Meek closure and CPDAG construction

namespace {

// True iff orienting from->to keeps the PDAG consistent: no directed cycle
// and no new unshielded collider at `to`.
bool orientation_consistent(const Pdag& g, NodeId from, NodeId to) {
    if (g.directed_path_exists(to, from)) return false;
    for (NodeId p : g.parents(to)) {
        if (p != from && !g.adjacent(p, from)) return false;
    }
    return true;
}

// Applies one orientation under the given conflict policy. Returns true if
// the edge was oriented.
bool apply_orientation(Pdag& g, NodeId from, NodeId to, OrientationConflict policy,
                       const char* rule) {
    if (!orientation_consistent(g, from, to)) {
        if (policy == OrientationConflict::Error) {
            throw InconsistentPdagError(std::string(rule) + " would create a directed cycle or "
                                        "a new unshielded collider orienting " +
                                        std::to_string(from) + "->" + std::to_string(to));
        }
        return false;
    }
    g.orient(from, to);
    return true;
}

}  // namespace

Pdag meek_closure(const Pdag& pdag, OrientationConflict on_conflict) {
    if (!pdag.directed_part_acyclic()) {
        if (on_conflict == OrientationConflict::Error) {
            throw InconsistentPdagError("meek closure requires an acyclic directed part");
        }
        return pdag;  // nothing sensible to do; leave untouched
    }
    Pdag g = pdag;
    const int m = g.num_nodes();
    bool changed = true;
    while (changed) {
        changed = false;
        // R1: a->b, b-c, a not adjacent to c  =>  b->c
        for (NodeId b = 0; b < m; ++b) {
            for (NodeId a : std::set<NodeId>(g.parents(b))) {
                for (NodeId c : std::set<NodeId>(g.undirected_neighbors(b))) {
                    if (c == a || g.adjacent(a, c)) continue;
                    changed |= apply_orientation(g, b, c, on_conflict, "R1");
                }
            }
        }
        // R2: a->b->c with a-c  =>  a->c
        for (NodeId a = 0; a < m; ++a) {
            for (NodeId c : std::set<NodeId>(g.undirected_neighbors(a))) {
                bool chain = false;
                for (NodeId b : g.children(a)) {
                    if (g.has_directed(b, c)) {
                        chain = true;
                        break;
                    }
                }
                if (chain) changed |= apply_orientation(g, a, c, on_conflict, "R2");
            }
        }
        // R3: a-b, a-c, a-d, c->b, d->b, c not adjacent to d  =>  a->b
        for (NodeId a = 0; a < m; ++a) {
            for (NodeId b : std::set<NodeId>(g.undirected_neighbors(a))) {
                bool fires = false;
                const auto& nbrs = g.undirected_neighbors(a);
                for (auto it_c = nbrs.begin(); it_c != nbrs.end() && !fires; ++it_c) {
                    NodeId c = *it_c;
                    if (c == b || !g.has_directed(c, b)) continue;
                    for (auto it_d = std::next(it_c); it_d != nbrs.end(); ++it_d) {
                        NodeId d = *it_d;
                        if (d == b || !g.has_directed(d, b)) continue;
                        if (!g.adjacent(c, d)) {
                            fires = true;
                            break;
                        }
                    }
                }
                if (fires) changed |= apply_orientation(g, a, b, on_conflict, "R3");
            }
        }
    }
    return g;
}

Pdag dag_to_cpdag(const Dag& dag) {
    Pdag skel(dag.num_nodes());
    skel.set_node_names(dag.node_names());
    for (const auto& [from, to] : dag.edges()) skel.add_undirected(from, to);
    // Unshielded colliders are compelled in every equivalent DAG.
    for (NodeId z = 0; z < dag.num_nodes(); ++z) {
        const auto& pa = dag.parents(z);
        for (auto it_a = pa.begin(); it_a != pa.end(); ++it_a) {
            for (auto it_b = std::next(it_a); it_b != pa.end(); ++it_b) {
                if (dag.adjacent(*it_a, *it_b)) continue;
                if (skel.has_undirected(*it_a, z)) skel.orient(*it_a, z);
                if (skel.has_undirected(*it_b, z)) skel.orient(*it_b, z);
            }
        }
    }
    return meek_closure(skel, OrientationConflict::Error);
}

// ---------------------------------------------------------------------------
// Dor-Tarsi extension

DagExtension extend_to_dag(const Pdag& pdag) {
    const int m = pdag.num_nodes();
    Pdag work = pdag;
    std::vector<bool> alive(m, true);
    EdgeList oriented = pdag.directed_edges();

    for (int step = 0; step < m; ++step) {
        NodeId sink = -1;
        for (NodeId v = 0; v < m && sink < 0; ++v) {
            if (!alive[v]) continue;
            if (!work.children(v).empty()) continue;  // must be a sink
            // Every undirected neighbor must be adjacent to all other
            // neighbors of v, so that orienting into v creates no collider.
            bool ok = true;
            const std::set<NodeId> adj = work.adjacency(v);
            for (NodeId u : work.undirected_neighbors(v)) {
                for (NodeId w : adj) {
                    if (w != u && !work.adjacent(u, w)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) break;
            }
            if (ok) sink = v;
        }
        if (sink < 0) {
            // No consistent extension: orient the skeleton by node order.
            EdgeList skeleton_edges;
            for (NodeId v = 0; v < m; ++v) {
                for (NodeId u : pdag.adjacency(v)) {
                    if (v < u) skeleton_edges.emplace_back(v, u);
                }
            }
            Dag d(m, skeleton_edges);
            d.set_node_names(pdag.node_names());
            return {std::move(d), true};
        }
        for (NodeId u : std::set<NodeId>(work.undirected_neighbors(sink))) {
            oriented.emplace_back(u, sink);
        }
        for (NodeId u : work.adjacency(sink)) work.remove_edge(sink, u);
        alive[sink] = false;
    }
    Dag d(m, oriented);
    d.set_node_names(pdag.node_names());
    return {std::move(d), false};
}

// ---------------------------------------------------------------------------
// Possible-D-SEP

std::vector<NodeId> possible_d_sep(const Pag& pag, NodeId x, NodeId y) {
    if (x < 0 || x >= pag.num_nodes() || y < 0 || y >= pag.num_nodes()) {
        throw std::invalid_argument("unknown node");
    }
    if (x == y) throw std::invalid_argument("possible_d_sep requires distinct nodes");

    // BFS over ordered adjacent pairs (prev, cur); a step to `next` is legal
    // when cur is a collider on the walk or prev and next are adjacent
    // (cur lies in a triangle with its walk neighbors).
    std::set<std::pair<NodeId, NodeId>> visited;
    std::set<NodeId> reached;
    std::deque<std::pair<NodeId, NodeId>> todo;
    for (NodeId n : pag.neighbors(x)) {
        todo.emplace_back(x, n);
        visited.insert({x, n});
        reached.insert(n);
    }
    while (!todo.empty()) {
        auto [prev, cur] = todo.front();
        todo.pop_front();
        for (NodeId next : pag.neighbors(cur)) {
            if (next == prev) continue;
            const bool collider =
                pag.mark_at(cur, prev) == Mark::Arrow && pag.mark_at(cur, next) == Mark::Arrow;
            const bool triangle = pag.adjacent(prev, next);
            if (!collider && !triangle) continue;
            if (visited.insert({cur, next}).second) {
                reached.insert(next);
                todo.emplace_back(cur, next);
            }
        }
    }
    reached.erase(x);
    reached.erase(y);
    return std::vector<NodeId>(reached.begin(), reached.end());
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace {

const char* mark_name(Mark m) {
    switch (m) {
        case Mark::Tail: return "tail";
        case Mark::Arrow: return "arrow";
        case Mark::Circle: return "circle";
    }
    return "circle";
}

Mark mark_from_name(const std::string& s) {
    if (s == "tail") return Mark::Tail;
    if (s == "arrow") return Mark::Arrow;
    if (s == "circle") return Mark::Circle;
    throw ParseError("unknown endpoint mark '" + s + "'");
}

nlohmann::json graph_json_skeleton(const std::vector<std::string>& names) {
    nlohmann::json j;
    j["nodes"] = names;
    j["edges"] = nlohmann::json::array();
    return j;
}

void append_edge(nlohmann::json& j, NodeId a, NodeId b, const std::string& ma,
                 const std::string& mb) {
    j["edges"].push_back({{"a", a}, {"b", b}, {"mark_a", ma}, {"mark_b", mb}});
}

struct ParsedGraph {
    std::vector<std::string> names;
    std::vector<std::tuple<NodeId, NodeId, std::string, std::string>> edges;
};

ParsedGraph parse_graph_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid graph JSON: ") + e.what());
    }
    if (!j.contains("nodes") || !j["nodes"].is_array()) {
        throw ParseError("graph JSON missing 'nodes' array");
    }
    ParsedGraph out;
    for (const auto& n : j["nodes"]) out.names.push_back(n.get<std::string>());
    const int m = static_cast<int>(out.names.size());
    if (j.contains("edges")) {
        for (const auto& e : j["edges"]) {
            const NodeId a = e.at("a").get<NodeId>();
            const NodeId b = e.at("b").get<NodeId>();
            if (a < 0 || a >= m || b < 0 || b >= m) {
                throw ParseError("edge endpoint out of range in graph JSON");
            }
            out.edges.emplace_back(a, b, e.at("mark_a").get<std::string>(),
                                   e.at("mark_b").get<std::string>());
        }
    }
    return out;
}

}  // namespace

std::string to_json(const Dag& dag) {
    nlohmann::json j = graph_json_skeleton(dag.node_names());
    for (const auto& [from, to] : dag.edges()) append_edge(j, from, to, "tail", "arrow");
    return j.dump(2);
}

std::string to_json(const Pdag& pdag) {
    nlohmann::json j = graph_json_skeleton(pdag.node_names());
    for (const auto& [from, to] : pdag.directed_edges()) append_edge(j, from, to, "tail", "arrow");
    for (const auto& [a, b] : pdag.undirected_edges()) {
        append_edge(j, a, b, "undirected", "undirected");
    }
    return j.dump(2);
}

std::string to_json(const Pag& pag) {
    nlohmann::json j = graph_json_skeleton(pag.node_names());
    for (const auto& [a, b, ma, mb] : pag.edges()) {
        append_edge(j, a, b, mark_name(ma), mark_name(mb));
    }
    return j.dump(2);
}

Dag dag_from_json(const std::string& text) {
    const ParsedGraph p = parse_graph_json(text);
    EdgeList edges;
    for (const auto& [a, b, ma, mb] : p.edges) {
        if (ma == "tail" && mb == "arrow") {
            edges.emplace_back(a, b);
        } else if (ma == "arrow" && mb == "tail") {
            edges.emplace_back(b, a);
        } else {
            throw ParseError("DAG JSON may only contain directed (tail/arrow) edges");
        }
    }
    try {
        return Dag(p.names, edges);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid DAG: ") + e.what());
    }
}

Pdag pdag_from_json(const std::string& text) {
    const ParsedGraph p = parse_graph_json(text);
    Pdag g(p.names);
    for (const auto& [a, b, ma, mb] : p.edges) {
        if (ma == "undirected" && mb == "undirected") {
            g.add_undirected(a, b);
        } else if (ma == "tail" && mb == "arrow") {
            g.add_directed(a, b);
        } else if (ma == "arrow" && mb == "tail") {
            g.add_directed(b, a);
        } else {
            throw ParseError("PDAG JSON edges must be directed or undirected");
        }
    }
    return g;
}

Pag pag_from_json(const std::string& text) {
    const ParsedGraph p = parse_graph_json(text);
    Pag g(p.names);
    for (const auto& [a, b, ma, mb] : p.edges) {
        g.add_edge(a, b, mark_from_name(ma), mark_from_name(mb));
    }
    return g;
}

Dag reindex_by_names(const Dag& g, const std::vector<std::string>& names) {
    if (g.node_names() == names) return g;
    if (g.num_nodes() != static_cast<int>(names.size())) {
        throw std::invalid_argument("node count mismatch while reindexing graph");
    }
    std::map<std::string, NodeId> index;
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = static_cast<NodeId>(i);
    EdgeList edges;
    for (const auto& [from, to] : g.edges()) {
        auto fit = index.find(g.node_names()[from]);
        auto tit = index.find(g.node_names()[to]);
        if (fit == index.end() || tit == index.end()) {
            throw std::invalid_argument("graph node names do not match the requested order");
        }
        edges.emplace_back(fit->second, tit->second);
    }
    Dag out(static_cast<int>(names.size()), edges);
    out.set_node_names(names);
    return out;
}

}  // namespace causal
