#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "pressmet/linalg.hpp"

namespace pressmet {

struct UndirectedEdge {
    std::string id;
    std::string u, v;  // endpoints; u == v for a loop
};

// A finite undirected multigraph.  Loops and parallel edges are allowed;
// vertex names and edge ids are case-sensitive tokens.
class UndirectedGraph {
public:
    // Adds a vertex (idempotent), returns its index.
    std::size_t add_vertex(const std::string& name);

    // Adds an edge, creating endpoints as needed.  Throws ParseError on a
    // duplicate edge id.
    void add_edge(const std::string& id, const std::string& u, const std::string& v);

    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<UndirectedEdge>& edges() const { return edges_; }
    std::size_t vertex_index(const std::string& name) const;
    // Index of the edge with the given id, or throws.
    std::size_t edge_index(const std::string& id) const;

    bool connected() const;
    // |E| - |V| + 1 for a connected graph.
    long cycle_rank() const;

    // Line-oriented text format:
    //   # comment
    //   vertex <name>
    //   edge <id> <u> <v>
    static UndirectedGraph parse(std::istream& in);
    static UndirectedGraph parse_file(const std::string& path);

private:
    std::vector<std::string> vertices_;
    std::vector<UndirectedEdge> edges_;
};

// The doubled directed-edge system of an undirected graph: directed edges
// 0..k-1 are the forward copies (file order), k..2k-1 their reversals, and
// adjacency(e, e') = 1 iff e' departs the head of e and e' != reversal(e).
class DirectedEdgeSystem {
public:
    std::size_t edge_count() const { return 2 * k_; }       // 2k
    std::size_t undirected_count() const { return k_; }     // k
    std::size_t reversal(std::size_t e) const { return e < k_ ? e + k_ : e - k_; }
    std::size_t undirected_index(std::size_t e) const { return e < k_ ? e : e - k_; }
    const std::string& undirected_id(std::size_t idx) const;

    std::size_t tail(std::size_t e) const { return tail_[e]; }
    std::size_t head(std::size_t e) const { return head_[e]; }

    const Matrix& adjacency() const { return adj_; }
    // Admissible continuations of each directed edge (column indices of the
    // 1-entries in its adjacency row).
    const std::vector<std::vector<std::size_t>>& successors() const { return succ_; }

    const UndirectedGraph& graph() const { return graph_; }

    friend DirectedEdgeSystem build_directed_system(const UndirectedGraph& g);

private:
    std::size_t k_ = 0;
    UndirectedGraph graph_;
    std::vector<std::size_t> tail_, head_;
    Matrix adj_;
    std::vector<std::vector<std::size_t>> succ_;
};

// Constructs the directed-edge system.  Rejects disconnected graphs, graphs
// of cycle rank < 2, and systems whose adjacency fails irreducibility.
DirectedEdgeSystem build_directed_system(const UndirectedGraph& g);

// True iff for every (i, j) some power of a has a positive (i, j) entry.
// Checked by breadth-first reachability, not matrix powers.
bool is_irreducible(const Matrix& a);

}  // namespace pressmet
