#include <gridsight/matching.hpp>

#include <algorithm>
#include <set>
#include <stdexcept>

namespace gridsight {

namespace {

struct Matcher {
    std::vector<std::vector<int>> adj;  // left -> ascending right indices
    std::vector<int> match_left;        // left -> right or -1
    std::vector<int> match_right;       // right -> left or -1
    std::vector<char> visited;

    bool augment(int u) {
        for (int v : adj[u]) {
            if (visited[v]) continue;
            visited[v] = 1;
            if (match_right[v] == -1 || augment(match_right[v])) {
                match_left[u] = v;
                match_right[v] = u;
                return true;
            }
        }
        return false;
    }
};

Matcher build_matcher(const BipartiteGraph& g) {
    Matcher m;
    m.adj.assign(g.left.size(), {});
    std::set<std::pair<int, int>> seen;
    for (auto [l, r] : g.edges) {
        if (l < 0 || l >= static_cast<int>(g.left.size()) || r < 0 ||
            r >= static_cast<int>(g.right.size()))
            throw std::out_of_range("bipartite edge index out of range");
        if (!seen.insert({l, r}).second)
            throw std::invalid_argument("duplicate bipartite edge");
        m.adj[l].push_back(r);
    }
    for (auto& row : m.adj) std::sort(row.begin(), row.end());
    m.match_left.assign(g.left.size(), -1);
    m.match_right.assign(g.right.size(), -1);
    return m;
}

}  // namespace

Matching maximum_matching(const BipartiteGraph& g) {
    Matcher m = build_matcher(g);
    for (int u = 0; u < static_cast<int>(g.left.size()); ++u) {
        m.visited.assign(g.right.size(), 0);
        m.augment(u);
    }
    Matching out;
    for (int u = 0; u < static_cast<int>(g.left.size()); ++u)
        if (m.match_left[u] != -1) out.pairs[u] = m.match_left[u];
    return out;
}

LeftDeficiency left_deficiency(const BipartiteGraph& g, const Matching& m) {
    LeftDeficiency d;
    for (int u = 0; u < static_cast<int>(g.left.size()); ++u)
        if (!m.pairs.count(u)) d.unmatched.push_back(g.left[u]);
    d.count = static_cast<int>(d.unmatched.size());
    return d;
}

SdrResult distinct_representatives(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& sets) {
    BipartiteGraph g;
    std::map<std::string, int> member_index;
    for (const auto& [label, members] : sets) {
        g.left.push_back(label);
        for (const auto& m : members)
            if (!member_index.count(m)) {
                member_index[m] = static_cast<int>(g.right.size());
                g.right.push_back(m);
            }
    }
    std::set<std::pair<int, int>> edges;
    for (int i = 0; i < static_cast<int>(sets.size()); ++i)
        for (const auto& m : sets[i].second) edges.insert({i, member_index[m]});
    g.edges.assign(edges.begin(), edges.end());

    Matching matching = maximum_matching(g);
    if (matching.pairs.size() == sets.size()) {
        std::map<std::string, std::string> out;
        for (auto [l, r] : matching.pairs) out[g.left[l]] = g.right[r];
        return out;
    }

    // Hall witness: lefts reachable by alternating paths from an unmatched left
    // node form a family whose neighbourhood is smaller than the family.
    std::vector<std::vector<int>> adj(g.left.size());
    for (auto [l, r] : g.edges) adj[l].push_back(r);
    std::vector<int> match_right(g.right.size(), -1);
    for (auto [l, r] : matching.pairs) match_right[r] = l;

    int start = -1;
    for (int u = 0; u < static_cast<int>(g.left.size()); ++u)
        if (!matching.pairs.count(u)) {
            start = u;
            break;
        }
    std::vector<char> left_seen(g.left.size(), 0), right_seen(g.right.size(), 0);
    std::vector<int> stack{start};
    left_seen[start] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (right_seen[v]) continue;
            right_seen[v] = 1;
            int w = match_right[v];
            if (w != -1 && !left_seen[w]) {
                left_seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    HallViolation hv;
    for (int u = 0; u < static_cast<int>(g.left.size()); ++u)
        if (left_seen[u]) hv.witness.push_back(g.left[u]);
    return hv;
}

}  // namespace gridsight
