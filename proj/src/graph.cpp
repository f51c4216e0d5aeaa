#include "pressmet/graph.hpp"

#include <deque>
#include <fstream>
#include <istream>
#include <sstream>

namespace pressmet {

std::size_t UndirectedGraph::add_vertex(const std::string& name) {
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (vertices_[i] == name) return i;
    vertices_.push_back(name);
    return vertices_.size() - 1;
}

void UndirectedGraph::add_edge(const std::string& id, const std::string& u,
                               const std::string& v) {
    for (const auto& e : edges_)
        if (e.id == id) throw ParseError("duplicate edge id '" + id + "'");
    add_vertex(u);
    add_vertex(v);
    edges_.push_back({id, u, v});
}

std::size_t UndirectedGraph::vertex_index(const std::string& name) const {
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (vertices_[i] == name) return i;
    throw Error("unknown vertex '" + name + "'");
}

std::size_t UndirectedGraph::edge_index(const std::string& id) const {
    for (std::size_t i = 0; i < edges_.size(); ++i)
        if (edges_[i].id == id) return i;
    throw Error("unknown edge id '" + id + "'");
}

bool UndirectedGraph::connected() const {
    if (vertices_.empty()) return false;
    std::vector<char> seen(vertices_.size(), 0);
    std::deque<std::size_t> queue{0};
    seen[0] = 1;
    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        for (const auto& e : edges_) {
            const std::size_t a = vertex_index(e.u), b = vertex_index(e.v);
            if (a == v && !seen[b]) { seen[b] = 1; queue.push_back(b); }
            if (b == v && !seen[a]) { seen[a] = 1; queue.push_back(a); }
        }
    }
    for (char s : seen)
        if (!s) return false;
    return true;
}

long UndirectedGraph::cycle_rank() const {
    return static_cast<long>(edges_.size()) - static_cast<long>(vertices_.size()) + 1;
}

UndirectedGraph UndirectedGraph::parse(std::istream& in) {
    UndirectedGraph g;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "vertex") {
            std::string name;
            if (!(ls >> name))
                throw ParseError("line " + std::to_string(lineno) + ": vertex needs a name");
            g.add_vertex(name);
        } else if (kw == "edge") {
            std::string id, u, v;
            if (!(ls >> id >> u >> v))
                throw ParseError("line " + std::to_string(lineno) +
                                 ": edge needs <id> <u> <v>");
            g.add_edge(id, u, v);
        } else {
            throw ParseError("line " + std::to_string(lineno) + ": unknown directive '" +
                             kw + "'");
        }
        std::string extra;
        if (ls >> extra)
            throw ParseError("line " + std::to_string(lineno) + ": trailing token '" +
                             extra + "'");
    }
    return g;
}

UndirectedGraph UndirectedGraph::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open graph file '" + path + "'");
    return parse(in);
}

const std::string& DirectedEdgeSystem::undirected_id(std::size_t idx) const {
    return graph_.edges().at(idx).id;
}

bool is_irreducible(const Matrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n || n == 0) return false;
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<char> seen(n, 0);
        std::deque<std::size_t> queue{s};
        // Do not mark the start: a state must be reachable from itself in >= 1
        // steps for some power of a to have a positive diagonal entry.
        while (!queue.empty()) {
            const std::size_t i = queue.front();
            queue.pop_front();
            for (std::size_t j = 0; j < n; ++j)
                if (a(i, j) != 0.0 && !seen[j]) {
                    seen[j] = 1;
                    queue.push_back(j);
                }
        }
        for (char c : seen)
            if (!c) return false;
        if (!seen[s]) return false;
    }
    return true;
}

DirectedEdgeSystem build_directed_system(const UndirectedGraph& g) {
    if (!g.connected()) throw Error("graph is not connected");
    if (g.cycle_rank() < 2)
        throw Error("trivial graph: cycle rank " + std::to_string(g.cycle_rank()) +
                     " < 2");
    DirectedEdgeSystem sys;
    sys.graph_ = g;
    const std::size_t k = g.edges().size();
    sys.k_ = k;
    sys.tail_.resize(2 * k);
    sys.head_.resize(2 * k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto& e = g.edges()[i];
        sys.tail_[i] = g.vertex_index(e.u);
        sys.head_[i] = g.vertex_index(e.v);
        sys.tail_[i + k] = sys.head_[i];
        sys.head_[i + k] = sys.tail_[i];
    }
    sys.adj_ = Matrix(2 * k, 2 * k);
    for (std::size_t e = 0; e < 2 * k; ++e)
        for (std::size_t f = 0; f < 2 * k; ++f)
            if (sys.head_[e] == sys.tail_[f] && f != sys.reversal(e)) sys.adj_(e, f) = 1.0;
    if (!is_irreducible(sys.adj_))
        throw Error("directed-edge adjacency is not irreducible");
    sys.succ_.resize(2 * k);
    for (std::size_t e = 0; e < 2 * k; ++e)
        for (std::size_t f = 0; f < 2 * k; ++f)
            if (sys.adj_(e, f) != 0.0) sys.succ_[e].push_back(f);
    return sys;
}

}  // namespace pressmet
