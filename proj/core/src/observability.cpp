#include <gridsight/observability.hpp>

#include <algorithm>
#include <numeric>

namespace gridsight {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

// Lines an injection at `bus` may take: incident and free of flow measurements.
std::vector<int> admissible_lines(const Case& c, const Measurement& m) {
    if (m.kind == MeasurementKind::Flow) return {m.target};
    std::vector<int> out;
    for (int lid : c.lines_at(m.target))
        if (!c.flow_on(lid)) out.push_back(lid);
    return out;
}

bool backtrack(const Case& c, const std::vector<const Measurement*>& order, std::size_t idx,
               std::set<int>& used_lines, UnionFind& uf, AssignmentFunction& acc) {
    if (idx == order.size()) return true;
    const Measurement& m = *order[idx];
    for (int lid : admissible_lines(c, m)) {
        if (used_lines.count(lid)) continue;
        const Line& l = c.line(lid);
        UnionFind saved = uf;
        if (!uf.unite(l.from, l.to)) {
            uf = saved;
            continue;  // closes a cycle
        }
        used_lines.insert(lid);
        acc.measurement_to_line[m.id] = lid;
        if (backtrack(c, order, idx + 1, used_lines, uf, acc)) return true;
        acc.measurement_to_line.erase(m.id);
        used_lines.erase(lid);
        uf = saved;
    }
    return false;
}

}  // namespace

namespace detail {

std::optional<AssignmentFunction> assign_exactly(const Case& c, const std::vector<int>& chosen) {
    const int n = static_cast<int>(c.buses.size());
    if (static_cast<int>(chosen.size()) > n - 1) return std::nullopt;  // forest bound
    std::vector<const Measurement*> order;
    for (int id : chosen) order.push_back(&c.measurement(id));
    std::sort(order.begin(), order.end(),
              [](const Measurement* a, const Measurement* b) { return a->id < b->id; });
    std::set<int> used;
    UnionFind uf(n + 1);
    AssignmentFunction acc;
    if (backtrack(c, order, 0, used, uf, acc)) return acc;
    return std::nullopt;
}

}  // namespace detail

BuildResult build_assignment(const Case& c) {
    ValidationReport report = validate_case(c);
    if (!report.ok())
        throw InvalidCase("invalid case: " + report.problems.front());

    const int n = static_cast<int>(c.buses.size());

    std::vector<int> flows, injections;
    for (const auto& m : c.measurements)
        (m.kind == MeasurementKind::Flow ? flows : injections).push_back(m.id);
    std::sort(flows.begin(), flows.end());
    std::sort(injections.begin(), injections.end());

    // Flows first: each goes on its own line unless that closes a cycle among
    // the flows already kept (lowest id wins).
    std::vector<int> kept;
    {
        UnionFind uf(n + 1);
        for (int id : flows) {
            const Line& l = c.line(c.measurement(id).target);
            if (uf.unite(l.from, l.to)) kept.push_back(id);
        }
    }

    // Matroid greedy over injections: admit whenever the admitted set stays
    // assignable. The exact test keeps the greedy complete.
    for (int id : injections) {
        if (static_cast<int>(kept.size()) >= n - 1) break;
        std::vector<int> trial = kept;
        trial.push_back(id);
        if (detail::assign_exactly(c, trial)) kept = std::move(trial);
    }

    auto assignment = detail::assign_exactly(c, kept);
    if (!assignment)
        throw std::logic_error("assignment search lost feasibility");  // unreachable

    UnionFind uf(n + 1);
    for (const auto& [mid, lid] : assignment->measurement_to_line) {
        const Line& l = c.line(lid);
        uf.unite(l.from, l.to);
    }

    if (static_cast<int>(kept.size()) == n - 1) {
        SpanningTreeCertificate cert;
        cert.assignment = *assignment;
        for (const auto& [mid, lid] : assignment->measurement_to_line)
            cert.branches.insert(lid);
        cert.assigned_measurements = kept;
        std::sort(cert.assigned_measurements.begin(), cert.assigned_measurements.end());
        return cert;
    }

    UnobservabilityWitness witness;
    std::map<int, std::vector<int>> blocks;
    for (const auto& b : c.buses) blocks[uf.find(b.id)].push_back(b.id);
    for (auto& [root, members] : blocks) {
        std::sort(members.begin(), members.end());
        witness.components.push_back(members);
    }
    std::sort(witness.components.begin(), witness.components.end());
    return witness;
}

std::set<int> boundary_injections(const Case& c, const SpanningTreeCertificate&) {
    std::set<int> out;
    for (const auto& m : c.measurements) {
        if (m.kind != MeasurementKind::Injection) continue;
        bool measured = false, unmeasured = false;
        for (int lid : c.lines_at(m.target))
            (c.flow_on(lid) ? measured : unmeasured) = true;
        if (measured && unmeasured) out.insert(m.id);
    }
    return out;
}

namespace {

bool reconnect_search(const Case& c, const std::set<int>& region, const std::set<int>& part_a,
                      const std::set<int>& part_b, const std::vector<int>& usable,
                      std::size_t idx, std::set<int>& used_lines, std::map<int, int>& acc,
                      std::map<int, int>& out) {
    // connected check under the current partial assignment
    {
        std::map<int, int> index;
        int k = 0;
        for (int b : region) index[b] = k++;
        UnionFind uf(k + 2);
        int ra = k, rb = k + 1;
        for (int b : part_a) uf.unite(index.at(b), ra);
        for (int b : part_b) uf.unite(index.at(b), rb);
        for (const auto& [mid, lid] : acc) {
            const Line& l = c.line(lid);
            uf.unite(index.at(l.from), index.at(l.to));
        }
        if (uf.find(ra) == uf.find(rb)) {
            out = acc;
            return true;
        }
    }
    if (idx == usable.size()) return false;
    // skip this measurement
    if (reconnect_search(c, region, part_a, part_b, usable, idx + 1, used_lines, acc, out))
        return true;
    const Measurement& m = c.measurement(usable[idx]);
    std::vector<int> lines =
        m.kind == MeasurementKind::Flow ? std::vector<int>{m.target} : c.lines_at(m.target);
    for (int lid : lines) {
        const Line& l = c.line(lid);
        if (!region.count(l.from) || !region.count(l.to)) continue;
        if (used_lines.count(lid)) continue;
        if (m.kind == MeasurementKind::Injection && c.flow_on(lid)) continue;
        used_lines.insert(lid);
        acc[m.id] = lid;
        if (reconnect_search(c, region, part_a, part_b, usable, idx + 1, used_lines, acc, out))
            return true;
        acc.erase(m.id);
        used_lines.erase(lid);
    }
    return false;
}

}  // namespace

std::optional<ReconnectWitness> reconnectable(const Case& c, const std::set<int>& region,
                                              const std::set<int>& part_a,
                                              const std::set<int>& part_b,
                                              const std::set<int>& usable) {
    std::vector<int> order(usable.begin(), usable.end());
    std::set<int> used;
    std::map<int, int> acc, found;
    if (reconnect_search(c, region, part_a, part_b, order, 0, used, acc, found)) {
        // an empty witness means the parts were already connected
        ReconnectWitness w;
        w.assignment = found;
        return w;
    }
    return std::nullopt;
}

}  // namespace gridsight
