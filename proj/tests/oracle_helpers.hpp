#pragma once

// Brute-force reference implementations used only by tests. They share no
// logic with the library: path queries enumerate every simple path, the
// graph distance recounts pairs from scratch, and the transport distance
// minimizes over an explicit coupling grid.

#include <algorithm>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "treequery/graph.hpp"

namespace oracle {

// Directed arcs with one synthetic latent parent per bidirected edge.
// Synthetic nodes take indices at and above the observed node count.
struct ArcView {
    int total = 0;
    std::vector<std::pair<int, int>> arcs;
};

inline ArcView arc_view(const treequery::CausalGraph& g) {
    ArcView v;
    v.total = g.node_count();
    for (const auto& [f, t] : g.directed()) v.arcs.push_back({f, t});
    for (const auto& [a, b] : g.bidirected()) {
        int latent = v.total++;
        v.arcs.push_back({latent, a});
        v.arcs.push_back({latent, b});
    }
    return v;
}

// A simple path as visited nodes plus per-step arc orientation; fwd[i] is
// true when the arc runs nodes[i] -> nodes[i+1].
struct Path {
    std::vector<int> nodes;
    std::vector<bool> fwd;
};

inline std::vector<Path> all_simple_paths(const ArcView& v, int x1, int x2) {
    std::vector<std::vector<std::pair<int, bool>>> adj(v.total);
    for (const auto& [f, t] : v.arcs) {
        adj[f].push_back({t, true});
        adj[t].push_back({f, false});
    }
    std::vector<Path> out;
    Path cur;
    cur.nodes.push_back(x1);
    std::vector<char> used(v.total, 0);
    used[x1] = 1;
    auto dfs = [&](auto&& self, int u) -> void {
        if (u == x2) {
            out.push_back(cur);
            return;
        }
        for (const auto& [w, forward] : adj[u]) {
            if (used[w]) continue;
            used[w] = 1;
            cur.nodes.push_back(w);
            cur.fwd.push_back(forward);
            self(self, w);
            cur.nodes.pop_back();
            cur.fwd.pop_back();
            used[w] = 0;
        }
    };
    dfs(dfs, x1);
    return out;
}

inline std::vector<char> descendant_closure(const ArcView& v, int start) {
    std::vector<std::vector<int>> ch(v.total);
    for (const auto& [f, t] : v.arcs) ch[f].push_back(t);
    std::vector<char> seen(v.total, 0);
    std::vector<int> work{start};
    seen[start] = 1;
    while (!work.empty()) {
        int u = work.back();
        work.pop_back();
        for (int c : ch[u]) {
            if (!seen[c]) {
                seen[c] = 1;
                work.push_back(c);
            }
        }
    }
    return seen;
}

inline bool path_active(const ArcView& v, const Path& p, const std::set<int>& z) {
    for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i) {
        int node = p.nodes[i];
        bool collider = p.fwd[i - 1] && !p.fwd[i];
        if (collider) {
            auto desc = descendant_closure(v, node);
            bool opened = false;
            for (int zi : z) {
                if (desc[zi]) {
                    opened = true;
                    break;
                }
            }
            if (!opened) return false;
        } else {
            if (z.count(node)) return false;
        }
    }
    return true;
}

inline bool d_separated_brute(const treequery::CausalGraph& g, const std::string& x1,
                              const std::string& x2, const std::vector<std::string>& z) {
    ArcView v = arc_view(g);
    std::set<int> zi;
    for (const auto& name : z) zi.insert(g.index_of(name));
    for (const auto& p : all_simple_paths(v, g.index_of(x1), g.index_of(x2))) {
        if (path_active(v, p, zi)) return false;
    }
    return true;
}

inline bool backdoor_brute(const treequery::CausalGraph& g, const std::string& x1,
                           const std::string& x2) {
    ArcView v = arc_view(g);
    for (const auto& p : all_simple_paths(v, g.index_of(x1), g.index_of(x2))) {
        if (!p.fwd.empty() && !p.fwd[0]) return true;
    }
    return false;
}

// Pairwise recount of the structural Hamming distance, written against the
// raw edge sets rather than the library's comparison.
inline int shd_brute(const treequery::CausalGraph& a, const treequery::CausalGraph& b) {
    std::vector<std::string> names = a.nodes();
    std::sort(names.begin(), names.end());
    auto describe = [](const treequery::CausalGraph& g, const std::string& x,
                       const std::string& y) -> int {
        int ix = g.index_of(x);
        int iy = g.index_of(y);
        for (const auto& [f, t] : g.directed()) {
            if (f == ix && t == iy) return 1;
            if (f == iy && t == ix) return 2;
        }
        for (const auto& [p, q] : g.bidirected()) {
            if ((p == ix && q == iy) || (p == iy && q == ix)) return 3;
        }
        return 0;
    };
    int total = 0;
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            int ka = describe(a, names[i], names[j]);
            int kb = describe(b, names[i], names[j]);
            if (ka != kb) ++total;
        }
    }
    return total;
}

// Random PDAG respecting the type invariants: directed edges follow a random
// topological order (acyclic by construction), bidirected edges only on pairs
// without a directed edge.
inline treequery::CausalGraph random_graph(std::mt19937_64& rng, int min_nodes, int max_nodes,
                                           double p_dir, double p_bi) {
    int n = min_nodes + static_cast<int>(rng() % (max_nodes - min_nodes + 1));
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("N" + std::to_string(i));
    treequery::CausalGraph g(names);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::bernoulli_distribution dir(p_dir);
    std::bernoulli_distribution bi(p_bi);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (dir(rng)) {
                g.add_directed(order[i], order[j]);
            } else if (bi(rng)) {
                g.add_bidirected(order[i], order[j]);
            }
        }
    }
    return g;
}

// Minimum transport cost between two Bernoulli measures under the discrete
// metric, searched over the coupling interval including both endpoints.
inline double w1_brute(double mu, double nu) {
    double lo = std::max(0.0, mu + nu - 1.0);
    double hi = std::min(mu, nu);
    double best = std::numeric_limits<double>::infinity();
    const int steps = 200;
    for (int i = 0; i <= steps; ++i) {
        double t = lo + (hi - lo) * static_cast<double>(i) / steps;
        best = std::min(best, (mu - t) + (nu - t));
    }
    return best;
}

} // namespace oracle
