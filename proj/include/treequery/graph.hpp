#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace treequery {

/// Causal relation of an ordered pair (x1, x2). Unknown is a decision
/// fallback only; ground-truth graphs never produce it.
enum class Relation { Independent, Latent, Forward, Backward, Unknown };

std::string relation_name(Relation r);
Relation parse_relation(const std::string& text);

/// Partially directed acyclic graph with named nodes. Directed edges are
/// ordered index pairs, bidirected edges unordered (stored low-high). Nodes
/// flagged hidden model latent confounders in pre-transform benchmark inputs.
class CausalGraph {
public:
    CausalGraph() = default;
    explicit CausalGraph(const std::vector<std::string>& nodes);

    int add_node(const std::string& name);
    void add_directed(const std::string& from, const std::string& to);
    void add_directed(int from, int to);
    void add_bidirected(const std::string& a, const std::string& b);
    void add_bidirected(int a, int b);
    void mark_hidden(const std::string& name);

    int index_of(const std::string& name) const;
    bool has_node(const std::string& name) const;
    const std::vector<std::string>& nodes() const { return names_; }
    int node_count() const { return static_cast<int>(names_.size()); }

    bool has_directed(int from, int to) const;
    bool has_bidirected(int a, int b) const;
    bool has_directed(const std::string& from, const std::string& to) const;
    bool has_bidirected(const std::string& a, const std::string& b) const;
    bool is_hidden(int idx) const;
    const std::set<std::pair<int, int>>& directed() const { return directed_; }
    const std::set<std::pair<int, int>>& bidirected() const { return bidirected_; }
    const std::set<int>& hidden() const { return hidden_; }

    std::vector<int> parents(int idx) const;
    std::vector<int> children(int idx) const;

    /// Nodes of some directed cycle, or empty when the directed part is
    /// acyclic. Exposed separately because discovered graphs keep cycles
    /// with a warning while parsed inputs reject them.
    std::vector<std::string> directed_cycle() const;

private:
    std::vector<std::string> names_;
    std::set<std::pair<int, int>> directed_;
    std::set<std::pair<int, int>> bidirected_;
    std::set<int> hidden_;
};

/// Parses the JSON graph format:
///   {"nodes": ["A","B"], "directed": [["A","B"]],
///    "bidirected": [["B","C"]], "hidden": ["H"]}
/// with `bidirected` and `hidden` optional. Rejects duplicate nodes,
/// dangling endpoints, self-edges, duplicate edges, and directed cycles
/// (cycles only when allow_cycles is false), naming the offending element.
CausalGraph parse_graph(const nlohmann::json& doc, bool allow_cycles = false);
CausalGraph parse_graph_text(const std::string& text, bool allow_cycles = false);

nlohmann::json graph_to_json(const CausalGraph& g);

/// Standard d-separation of x1 and x2 given z, with every bidirected edge
/// expanded into a synthetic latent common parent first.
bool d_separated(const CausalGraph& g, const std::string& x1, const std::string& x2,
                 const std::vector<std::string>& z);

/// Whether some path from x1 to x2 starts with an edge pointing into x1,
/// under the same bidirected-edge expansion as d_separated.
bool has_backdoor_path(const CausalGraph& g, const std::string& x1, const std::string& x2);

/// Removes every hidden node and inserts a bidirected edge between each
/// unordered pair of its observed children; all other edges among observed
/// nodes are preserved.
CausalGraph latent_transform(const CausalGraph& g);

/// Structural Hamming distance over unordered node pairs: +1 when an edge
/// exists in exactly one graph, +1 when both have an edge of different kind
/// or orientation.
int shd(const CausalGraph& predicted, const CausalGraph& truth);

/// Direct-edge ground truth for the ordered pair: Forward on x1->x2,
/// Backward on x2->x1, Latent on x1<->x2, Independent otherwise.
Relation pair_relation(const CausalGraph& g, const std::string& x1, const std::string& x2);

} // namespace treequery
