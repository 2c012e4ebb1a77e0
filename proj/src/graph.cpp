#include "treequery/graph.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <stdexcept>

namespace treequery {

std::string relation_name(Relation r) {
    switch (r) {
        case Relation::Independent: return "independent";
        case Relation::Latent: return "<->";
        case Relation::Forward: return "->";
        case Relation::Backward: return "<-";
        case Relation::Unknown: return "unknown";
    }
    throw std::logic_error("unhandled relation");
}

Relation parse_relation(const std::string& text) {
    for (Relation r : {Relation::Independent, Relation::Latent, Relation::Forward,
                       Relation::Backward, Relation::Unknown}) {
        if (text == relation_name(r)) return r;
    }
    throw std::invalid_argument("unknown relation: " + text);
}

CausalGraph::CausalGraph(const std::vector<std::string>& nodes) {
    for (const auto& n : nodes) add_node(n);
}

int CausalGraph::add_node(const std::string& name) {
    if (name.empty()) throw std::invalid_argument("empty node name");
    if (has_node(name)) throw std::invalid_argument("duplicate node '" + name + "'");
    names_.push_back(name);
    return static_cast<int>(names_.size()) - 1;
}

int CausalGraph::index_of(const std::string& name) const {
    for (int i = 0; i < node_count(); ++i) {
        if (names_[i] == name) return i;
    }
    throw std::invalid_argument("unknown node '" + name + "'");
}

bool CausalGraph::has_node(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

void CausalGraph::add_directed(const std::string& from, const std::string& to) {
    add_directed(index_of(from), index_of(to));
}

void CausalGraph::add_directed(int from, int to) {
    if (from < 0 || from >= node_count() || to < 0 || to >= node_count())
        throw std::invalid_argument("edge endpoint out of range");
    if (from == to) throw std::invalid_argument("self-edge on '" + names_[from] + "'");
    if (has_directed(from, to))
        throw std::invalid_argument("duplicate directed edge " + names_[from] + " -> " + names_[to]);
    if (has_bidirected(from, to))
        throw std::invalid_argument("pair " + names_[from] + ", " + names_[to] +
                                    " has both a directed and a bidirected edge");
    directed_.insert({from, to});
}

void CausalGraph::add_bidirected(const std::string& a, const std::string& b) {
    add_bidirected(index_of(a), index_of(b));
}

void CausalGraph::add_bidirected(int a, int b) {
    if (a < 0 || a >= node_count() || b < 0 || b >= node_count())
        throw std::invalid_argument("edge endpoint out of range");
    if (a == b) throw std::invalid_argument("self-edge on '" + names_[a] + "'");
    if (a > b) std::swap(a, b);
    if (has_bidirected(a, b))
        throw std::invalid_argument("duplicate bidirected edge " + names_[a] + " <-> " + names_[b]);
    if (has_directed(a, b) || has_directed(b, a))
        throw std::invalid_argument("pair " + names_[a] + ", " + names_[b] +
                                    " has both a directed and a bidirected edge");
    bidirected_.insert({a, b});
}

void CausalGraph::mark_hidden(const std::string& name) { hidden_.insert(index_of(name)); }

bool CausalGraph::has_directed(int from, int to) const {
    return directed_.count({from, to}) > 0;
}

bool CausalGraph::has_bidirected(int a, int b) const {
    if (a > b) std::swap(a, b);
    return bidirected_.count({a, b}) > 0;
}

bool CausalGraph::has_directed(const std::string& from, const std::string& to) const {
    return has_directed(index_of(from), index_of(to));
}

bool CausalGraph::has_bidirected(const std::string& a, const std::string& b) const {
    return has_bidirected(index_of(a), index_of(b));
}

bool CausalGraph::is_hidden(int idx) const { return hidden_.count(idx) > 0; }

std::vector<int> CausalGraph::parents(int idx) const {
    std::vector<int> out;
    for (const auto& [f, t] : directed_) {
        if (t == idx) out.push_back(f);
    }
    return out;
}

std::vector<int> CausalGraph::children(int idx) const {
    std::vector<int> out;
    for (const auto& [f, t] : directed_) {
        if (f == idx) out.push_back(t);
    }
    return out;
}

std::vector<std::string> CausalGraph::directed_cycle() const {
    const int n = node_count();
    std::vector<std::vector<int>> ch(n);
    for (const auto& [f, t] : directed_) ch[f].push_back(t);
    std::vector<int> state(n, 0);
    std::vector<int> stack;
    std::vector<std::string> cycle;
    std::function<bool(int)> visit = [&](int u) {
        state[u] = 1;
        stack.push_back(u);
        for (int v : ch[u]) {
            if (state[v] == 1) {
                auto it = std::find(stack.begin(), stack.end(), v);
                for (; it != stack.end(); ++it) cycle.push_back(names_[*it]);
                return true;
            }
            if (state[v] == 0 && visit(v)) return true;
        }
        stack.pop_back();
        state[u] = 2;
        return false;
    };
    for (int u = 0; u < n; ++u) {
        if (state[u] == 0 && visit(u)) return cycle;
    }
    return {};
}

namespace {

// Directed adjacency after replacing each bidirected edge with a synthetic
// latent common parent. Synthetic nodes occupy indices >= node_count().
struct Expanded {
    std::vector<std::vector<int>> parents;
    std::vector<std::vector<int>> children;
};

Expanded expand(const CausalGraph& g) {
    const int n = g.node_count();
    const int total = n + static_cast<int>(g.bidirected().size());
    Expanded e{std::vector<std::vector<int>>(total), std::vector<std::vector<int>>(total)};
    for (const auto& [f, t] : g.directed()) {
        e.children[f].push_back(t);
        e.parents[t].push_back(f);
    }
    int latent = n;
    for (const auto& [a, b] : g.bidirected()) {
        e.children[latent] = {a, b};
        e.parents[a].push_back(latent);
        e.parents[b].push_back(latent);
        ++latent;
    }
    return e;
}

// Reachability under d-connection rules given the conditioning indicator.
// State pairs (node, arrival): arrival 0 means the trail reached the node
// from a child, 1 from a parent; collider turns need the node to be an
// ancestor of the conditioning set.
bool d_connected(const Expanded& e, int x1, int x2, const std::vector<char>& in_z) {
    const int total = static_cast<int>(e.parents.size());
    std::vector<char> anc(total, 0);
    std::vector<int> work;
    for (int i = 0; i < total; ++i) {
        if (in_z[i]) {
            anc[i] = 1;
            work.push_back(i);
        }
    }
    while (!work.empty()) {
        int u = work.back();
        work.pop_back();
        for (int p : e.parents[u]) {
            if (!anc[p]) {
                anc[p] = 1;
                work.push_back(p);
            }
        }
    }

    std::vector<std::array<char, 2>> seen(total, {0, 0});
    std::vector<std::pair<int, int>> frontier{{x1, 0}};
    seen[x1][0] = 1;
    auto push = [&](int node, int arrival) {
        if (!seen[node][arrival]) {
            seen[node][arrival] = 1;
            frontier.push_back({node, arrival});
        }
    };
    while (!frontier.empty()) {
        auto [y, arrival] = frontier.back();
        frontier.pop_back();
        if (y == x2) return true;
        if (arrival == 0) {
            if (!in_z[y]) {
                for (int p : e.parents[y]) push(p, 0);
                for (int c : e.children[y]) push(c, 1);
            }
        } else {
            if (!in_z[y]) {
                for (int c : e.children[y]) push(c, 1);
            }
            if (anc[y]) {
                for (int p : e.parents[y]) push(p, 0);
            }
        }
    }
    return false;
}

} // namespace

bool d_separated(const CausalGraph& g, const std::string& x1, const std::string& x2,
                 const std::vector<std::string>& z) {
    const int i1 = g.index_of(x1);
    const int i2 = g.index_of(x2);
    if (i1 == i2) throw std::invalid_argument("d-separation query needs distinct nodes, got '" + x1 + "' twice");
    Expanded e = expand(g);
    std::vector<char> in_z(e.parents.size(), 0);
    for (const auto& name : z) {
        int zi = g.index_of(name);
        if (zi == i1 || zi == i2)
            throw std::invalid_argument("conditioning set contains query node '" + name + "'");
        in_z[zi] = 1;
    }
    return !d_connected(e, i1, i2, in_z);
}

bool has_backdoor_path(const CausalGraph& g, const std::string& x1, const std::string& x2) {
    const int i1 = g.index_of(x1);
    const int i2 = g.index_of(x2);
    if (i1 == i2) throw std::invalid_argument("backdoor query needs distinct nodes, got '" + x1 + "' twice");
    Expanded e = expand(g);
    const int total = static_cast<int>(e.parents.size());
    // Undirected reachability from the parents of x1 to x2, never revisiting
    // x1 itself (paths are simple, so x1 appears only as the start).
    std::vector<char> seen(total, 0);
    seen[i1] = 1;
    std::vector<int> frontier;
    for (int p : e.parents[i1]) {
        if (!seen[p]) {
            seen[p] = 1;
            frontier.push_back(p);
        }
    }
    while (!frontier.empty()) {
        int u = frontier.back();
        frontier.pop_back();
        if (u == i2) return true;
        for (const auto& nbrs : {e.parents[u], e.children[u]}) {
            for (int v : nbrs) {
                if (!seen[v]) {
                    seen[v] = 1;
                    frontier.push_back(v);
                }
            }
        }
    }
    return false;
}

CausalGraph latent_transform(const CausalGraph& g) {
    CausalGraph out;
    std::vector<int> remap(g.node_count(), -1);
    for (int i = 0; i < g.node_count(); ++i) {
        if (!g.is_hidden(i)) remap[i] = out.add_node(g.nodes()[i]);
    }
    for (const auto& [f, t] : g.directed()) {
        if (remap[f] >= 0 && remap[t] >= 0) out.add_directed(remap[f], remap[t]);
    }
    for (const auto& [a, b] : g.bidirected()) {
        if (remap[a] >= 0 && remap[b] >= 0) out.add_bidirected(remap[a], remap[b]);
    }
    for (int h : g.hidden()) {
        std::vector<int> kids;
        for (int c : g.children(h)) {
            if (remap[c] >= 0) kids.push_back(remap[c]);
        }
        if (kids.size() < 2)
            throw std::invalid_argument("hidden node '" + g.nodes()[h] +
                                        "' has fewer than 2 observed children");
        for (std::size_t i = 0; i < kids.size(); ++i) {
            for (std::size_t j = i + 1; j < kids.size(); ++j) {
                if (!out.has_bidirected(kids[i], kids[j])) out.add_bidirected(kids[i], kids[j]);
            }
        }
    }
    return out;
}

namespace {

enum class EdgeKind { None, Forward, Backward, Both };

EdgeKind edge_kind(const CausalGraph& g, const std::string& a, const std::string& b) {
    int ia = g.index_of(a);
    int ib = g.index_of(b);
    if (g.has_bidirected(ia, ib)) return EdgeKind::Both;
    if (g.has_directed(ia, ib)) return EdgeKind::Forward;
    if (g.has_directed(ib, ia)) return EdgeKind::Backward;
    return EdgeKind::None;
}

} // namespace

int shd(const CausalGraph& predicted, const CausalGraph& truth) {
    std::vector<std::string> pa = predicted.nodes();
    std::vector<std::string> pb = truth.nodes();
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    if (pa != pb) throw std::invalid_argument("node sets differ between predicted and truth graphs");
    int total = 0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        for (std::size_t j = i + 1; j < pa.size(); ++j) {
            EdgeKind kp = edge_kind(predicted, pa[i], pa[j]);
            EdgeKind kt = edge_kind(truth, pa[i], pa[j]);
            if ((kp == EdgeKind::None) != (kt == EdgeKind::None)) {
                ++total;
            } else if (kp != EdgeKind::None && kp != kt) {
                ++total;
            }
        }
    }
    return total;
}

Relation pair_relation(const CausalGraph& g, const std::string& x1, const std::string& x2) {
    if (!g.hidden().empty())
        throw std::invalid_argument("pair_relation requires a hidden-free graph");
    const int i1 = g.index_of(x1);
    const int i2 = g.index_of(x2);
    if (i1 == i2) throw std::invalid_argument("pair_relation needs distinct nodes, got '" + x1 + "' twice");
    if (g.has_directed(i1, i2)) return Relation::Forward;
    if (g.has_directed(i2, i1)) return Relation::Backward;
    if (g.has_bidirected(i1, i2)) return Relation::Latent;
    return Relation::Independent;
}

CausalGraph parse_graph(const nlohmann::json& doc, bool allow_cycles) {
    if (!doc.is_object()) throw std::invalid_argument("graph document must be a JSON object");
    if (!doc.contains("nodes") || !doc.at("nodes").is_array())
        throw std::invalid_argument("graph document needs a 'nodes' array");
    CausalGraph g;
    for (const auto& n : doc.at("nodes")) {
        if (!n.is_string()) throw std::invalid_argument("node entry is not a string: " + n.dump());
        g.add_node(n.get<std::string>());
    }
    auto read_edges = [&](const char* key, auto&& add) {
        if (!doc.contains(key)) return;
        if (!doc.at(key).is_array())
            throw std::invalid_argument(std::string("'") + key + "' must be an array");
        for (const auto& e : doc.at(key)) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
                throw std::invalid_argument(std::string("malformed ") + key + " entry: " + e.dump());
            add(e[0].get<std::string>(), e[1].get<std::string>());
        }
    };
    read_edges("directed", [&](const std::string& a, const std::string& b) { g.add_directed(a, b); });
    read_edges("bidirected", [&](const std::string& a, const std::string& b) { g.add_bidirected(a, b); });
    if (doc.contains("hidden")) {
        if (!doc.at("hidden").is_array()) throw std::invalid_argument("'hidden' must be an array");
        for (const auto& n : doc.at("hidden")) {
            if (!n.is_string()) throw std::invalid_argument("hidden entry is not a string: " + n.dump());
            g.mark_hidden(n.get<std::string>());
        }
    }
    if (!allow_cycles) {
        auto cyc = g.directed_cycle();
        if (!cyc.empty()) {
            std::string joined;
            for (const auto& n : cyc) {
                if (!joined.empty()) joined += " -> ";
                joined += n;
            }
            throw std::invalid_argument("directed cycle: " + joined);
        }
    }
    return g;
}

CausalGraph parse_graph_text(const std::string& text, bool allow_cycles) {
    return parse_graph(nlohmann::json::parse(text), allow_cycles);
}

nlohmann::json graph_to_json(const CausalGraph& g) {
    nlohmann::json doc;
    doc["nodes"] = g.nodes();
    auto edges = nlohmann::json::array();
    for (const auto& [f, t] : g.directed()) {
        edges.push_back({g.nodes()[f], g.nodes()[t]});
    }
    doc["directed"] = std::move(edges);
    auto bi = nlohmann::json::array();
    for (const auto& [a, b] : g.bidirected()) {
        bi.push_back({g.nodes()[a], g.nodes()[b]});
    }
    doc["bidirected"] = std::move(bi);
    if (!g.hidden().empty()) {
        auto hid = nlohmann::json::array();
        for (int h : g.hidden()) hid.push_back(g.nodes()[h]);
        doc["hidden"] = std::move(hid);
    }
    return doc;
}

} // namespace treequery
