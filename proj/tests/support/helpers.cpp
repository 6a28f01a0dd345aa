#include "helpers.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <functional>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>
#include <sys/wait.h>

#ifndef GRIDSIGHT_DATA_DIR
#error "GRIDSIGHT_DATA_DIR must be defined by the build"
#endif
#ifndef GRIDSIGHT_CLI_BIN
#define GRIDSIGHT_CLI_BIN ""
#endif

namespace gridsight::testing {

std::string data_path(const std::string& name) {
    return std::string(GRIDSIGHT_DATA_DIR) + "/" + name;
}

Case load_data_case(const std::string& name) {
    return parse_case_file(data_path(name));
}

std::set<int> ids(const Case& c, const std::vector<std::string>& names) {
    std::set<int> out;
    for (const auto& n : names) {
        auto id = c.measurement_by_name(n);
        if (!id) throw std::invalid_argument("no measurement named " + n);
        out.insert(*id);
    }
    return out;
}

std::set<std::string> name_set(const Case& c, const std::set<int>& measurement_ids) {
    std::set<std::string> out;
    for (int id : measurement_ids) out.insert(c.measurement_name(id));
    return out;
}

std::set<std::string> name_set(const Case& c, const std::vector<int>& measurement_ids) {
    return name_set(c, std::set<int>(measurement_ids.begin(), measurement_ids.end()));
}

CliResult run_cli(const std::string& args) {
    std::string bin(GRIDSIGHT_CLI_BIN);
    if (bin.empty()) throw std::runtime_error("GRIDSIGHT_CLI_BIN not configured");
    std::string cmd = bin + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    CliResult r;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), got);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

// Dinic-style BFS/DFS max flow on source -> lefts -> rights -> sink, all unit
// capacities. Independent of the production augmenting-path matcher.
int max_flow_matching_size(const BipartiteGraph& g) {
    const int L = static_cast<int>(g.left.size());
    const int R = static_cast<int>(g.right.size());
    const int source = L + R, sink = L + R + 1, nodes = L + R + 2;

    struct Edge {
        int to;
        int cap;
        int rev;
    };
    std::vector<std::vector<Edge>> adj(nodes);
    auto add_edge = [&](int a, int b) {
        adj[a].push_back({b, 1, static_cast<int>(adj[b].size())});
        adj[b].push_back({a, 0, static_cast<int>(adj[a].size()) - 1});
    };
    for (int i = 0; i < L; ++i) add_edge(source, i);
    for (int j = 0; j < R; ++j) add_edge(L + j, sink);
    for (auto [l, r] : g.edges) add_edge(l, L + r);

    int flow = 0;
    while (true) {
        std::vector<int> level(nodes, -1);
        std::queue<int> q;
        q.push(source);
        level[source] = 0;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (const auto& e : adj[u])
                if (e.cap > 0 && level[e.to] == -1) {
                    level[e.to] = level[u] + 1;
                    q.push(e.to);
                }
        }
        if (level[sink] == -1) break;
        std::vector<int> iter(nodes, 0);
        std::function<int(int, int)> dfs = [&](int u, int limit) -> int {
            if (u == sink) return limit;
            for (int& i = iter[u]; i < static_cast<int>(adj[u].size()); ++i) {
                Edge& e = adj[u][i];
                if (e.cap <= 0 || level[e.to] != level[u] + 1) continue;
                int pushed = dfs(e.to, std::min(limit, e.cap));
                if (pushed > 0) {
                    e.cap -= pushed;
                    adj[e.to][e.rev].cap += pushed;
                    return pushed;
                }
            }
            return 0;
        };
        int pushed;
        while ((pushed = dfs(source, 1)) > 0) flow += pushed;
    }
    return flow;
}

namespace {

bool sdr_rec(const std::vector<std::vector<std::string>>& members, std::size_t idx,
             std::set<std::string>& used) {
    if (idx == members.size()) return true;
    for (const auto& m : members[idx]) {
        if (used.count(m)) continue;
        used.insert(m);
        if (sdr_rec(members, idx + 1, used)) return true;
        used.erase(m);
    }
    return false;
}

}  // namespace

bool sdr_backtracking(const std::vector<std::pair<std::string, std::vector<std::string>>>& sets) {
    std::vector<std::vector<std::string>> members;
    for (const auto& [label, ms] : sets) members.push_back(ms);
    std::set<std::string> used;
    return sdr_rec(members, 0, used);
}

bool hall_condition(const std::vector<std::pair<std::string, std::vector<std::string>>>& sets) {
    const std::size_t k = sets.size();
    for (std::size_t mask = 1; mask < (1u << k); ++mask) {
        std::set<std::string> uni;
        std::size_t count = 0;
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (1u << i)) {
                ++count;
                uni.insert(sets[i].second.begin(), sets[i].second.end());
            }
        if (uni.size() < count) return false;
    }
    return true;
}

Case random_case(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto pick = [&rng](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };

    Case c;
    const int n = pick(2, 8);
    for (int i = 1; i <= n; ++i) c.buses.push_back({i, ""});

    std::set<std::pair<int, int>> edges;
    for (int i = 2; i <= n; ++i) {
        int parent = pick(1, i - 1);
        edges.insert({std::min(parent, i), std::max(parent, i)});
    }
    const int max_lines = std::min(14, n * (n - 1) / 2);
    const int extra = pick(0, max_lines - static_cast<int>(edges.size()));
    for (int t = 0; t < extra * 4 && static_cast<int>(edges.size()) < max_lines; ++t) {
        int a = pick(1, n), b = pick(1, n);
        if (a == b) continue;
        edges.insert({std::min(a, b), std::max(a, b)});
    }

    std::vector<std::pair<int, int>> order(edges.begin(), edges.end());
    std::shuffle(order.begin(), order.end(), rng);
    int lid = 1;
    for (auto [a, b] : order) c.lines.push_back({lid++, a, b, std::nullopt});

    std::vector<std::pair<MeasurementKind, int>> placed;
    for (const auto& l : c.lines)
        if (rng() % 100 < 35) placed.push_back({MeasurementKind::Flow, l.id});
    for (const auto& b : c.buses)
        if (rng() % 100 < 55) placed.push_back({MeasurementKind::Injection, b.id});
    std::shuffle(placed.begin(), placed.end(), rng);
    int mid = 1;
    for (auto [kind, target] : placed) c.measurements.push_back({mid++, kind, target});

    c.reference_bus = 1;
    return c;
}

BipartiteGraph random_bipartite(std::uint64_t seed, int max_side) {
    std::mt19937_64 rng(seed);
    BipartiteGraph g;
    const int L = 1 + static_cast<int>(rng() % max_side);
    const int R = 1 + static_cast<int>(rng() % max_side);
    for (int i = 0; i < L; ++i) g.left.push_back("L" + std::to_string(i));
    for (int j = 0; j < R; ++j) g.right.push_back("R" + std::to_string(j));
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < R; ++j)
            if (rng() % 100 < 30) g.edges.push_back({i, j});
    return g;
}

}  // namespace gridsight::testing
