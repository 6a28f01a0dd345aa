#include <gridsight/critical_sets.hpp>

#include <algorithm>
#include <functional>
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
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

TreeSplit split_tree(const Case& c, const SpanningTreeCertificate& cert, int m) {
    if (!cert.is_assigned(m))
        throw NotAssigned("measurement " + std::to_string(m) + " is not in the tree set");

    TreeSplit s;
    s.owner = m;
    const int cut_line = cert.assigned_line(m);
    const Line& cut = c.line(cut_line);

    const int n = static_cast<int>(c.buses.size());
    UnionFind uf(n + 1);
    for (int lid : cert.branches) {
        if (lid == cut_line) continue;
        const Line& l = c.line(lid);
        uf.unite(l.from, l.to);
    }

    const int anchor = std::min(cut.from, cut.to);
    for (const auto& b : c.buses)
        (uf.find(b.id) == uf.find(anchor) ? s.n1 : s.n2).insert(b.id);
    for (int lid : cert.branches) {
        if (lid == cut_line) continue;
        const Line& l = c.line(lid);
        (s.n1.count(l.from) ? s.b1 : s.b2).insert(lid);
    }

    for (const auto& l : c.lines) {
        bool f1 = s.n1.count(l.from), t1 = s.n1.count(l.to);
        if (f1 == t1) continue;  // not crossing
        s.cut_lines.insert(l.id);
        s.n12.insert(f1 ? l.from : l.to);
        s.n21.insert(f1 ? l.to : l.from);
    }

    for (const auto& meas : c.measurements) {
        if (meas.id == m) continue;
        bool in = meas.kind == MeasurementKind::Flow
                      ? s.cut_lines.count(meas.target) != 0
                      : s.n12.count(meas.target) || s.n21.count(meas.target);
        if (!in) continue;
        s.candidates.insert(meas.id);
        if (meas.kind == MeasurementKind::Flow) s.candidate_flows.insert(meas.id);
    }
    return s;
}

namespace {

// Can the region's buses be re-spanned by its own measurements once `removed`
// leaves? Frozen measurements keep their tree branch; movable ones may take
// any admissible region-internal line; the single unassigned seed joins in.
// Measurement counts make this an all-or-nothing assignment: the region tree
// had |R|-1 branches, one leaves, one seed arrives.
bool region_respannable(const Case& c, const SpanningTreeCertificate& cert,
                        const std::set<int>& region, const std::vector<int>& frozen,
                        const std::vector<int>& movable, int seed) {
    std::vector<std::pair<int, std::vector<int>>> pools;  // measurement -> line options
    auto internal = [&](int lid) {
        const Line& l = c.line(lid);
        return region.count(l.from) && region.count(l.to);
    };
    for (int id : frozen) pools.push_back({id, {cert.assigned_line(id)}});
    auto options = [&](int id) {
        const Measurement& m = c.measurement(id);
        std::vector<int> lines;
        if (m.kind == MeasurementKind::Flow) {
            if (internal(m.target)) lines.push_back(m.target);
        } else {
            for (int lid : c.lines_at(m.target))
                if (internal(lid) && !c.flow_on(lid)) lines.push_back(lid);
        }
        return lines;
    };
    for (int id : movable) pools.push_back({id, options(id)});
    pools.push_back({seed, options(seed)});

    const int need = static_cast<int>(region.size()) - 1;
    if (static_cast<int>(pools.size()) != need) return false;

    std::map<int, int> index;
    int k = 0;
    for (int b : region) index[b] = k++;
    std::set<int> used;
    std::vector<int> parent(k);

    std::function<bool(std::size_t)> place = [&](std::size_t at) -> bool {
        if (at == pools.size()) return true;
        for (int lid : pools[at].second) {
            if (used.count(lid)) continue;
            const Line& l = c.line(lid);
            // forest check against the current partial selection
            std::vector<int> saved = parent;
            std::function<int(int)> find = [&](int x) {
                while (parent[x] != x) x = parent[x] = parent[parent[x]];
                return x;
            };
            int a = find(index.at(l.from)), b = find(index.at(l.to));
            if (a == b) continue;
            parent[a] = b;
            used.insert(lid);
            if (place(at + 1)) return true;
            used.erase(lid);
            parent = saved;
        }
        return false;
    };
    for (int i = 0; i < k; ++i) parent[i] = i;
    return place(0);  // all |R|-1 placed and acyclic == spanning
}

}  // namespace

std::set<int> backup_boundary_injections(const Case& c, const SpanningTreeCertificate& cert,
                                         const TreeSplit& split, int m_prime) {
    const Measurement& mp = c.measurement(m_prime);
    if (mp.kind != MeasurementKind::Injection || !cert.is_assigned(m_prime))
        throw NotApplicable("backup sets are defined for assigned injection candidates only");

    const bool side1 = split.n1.count(mp.target) != 0;
    const std::set<int>& region = side1 ? split.n1 : split.n2;

    // Reassignment targets: cut lines incident to the candidate's bus that are
    // assignable once the owner is removed (its own flow no longer counts).
    bool has_target = false;
    for (int lid : split.cut_lines) {
        const Line& l = c.line(lid);
        if (l.from != mp.target && l.to != mp.target) continue;
        auto flow = c.flow_on(lid);
        if (flow && *flow != split.owner) continue;
        has_target = true;
        break;
    }
    if (!has_target) return {};

    // Repair semantics: the vacated branch may be healed through a chain of
    // reassignments among the region's measurements, as long as the chain
    // never moves another candidate (those stay frozen on their branches) and
    // ends at the single unassigned seed outside the candidate set.
    std::vector<int> frozen, movable;
    for (const auto& meas : c.measurements) {
        if (!cert.is_assigned(meas.id) || meas.id == m_prime) continue;
        const Line& branch = c.line(cert.assigned_line(meas.id));
        if (!region.count(branch.from) || !region.count(branch.to)) continue;
        (split.candidates.count(meas.id) ? frozen : movable).push_back(meas.id);
    }

    std::set<int> out;
    for (const auto& meas : c.measurements) {
        if (cert.is_assigned(meas.id)) continue;
        if (split.candidates.count(meas.id) || meas.id == split.owner) continue;
        if (meas.kind == MeasurementKind::Injection) {
            if (!region.count(meas.target)) continue;
        } else {
            const Line& l = c.line(meas.target);
            if (!region.count(l.from) || !region.count(l.to)) continue;
        }
        if (region_respannable(c, cert, region, frozen, movable, meas.id)) out.insert(meas.id);
    }
    return out;
}

CriticalSet critical_set(const Case& c, const SpanningTreeCertificate& cert, int m) {
    TreeSplit split = split_tree(c, cert, m);

    CriticalSet cs;
    cs.owner = m;
    std::set<int> members{m};
    cs.provenance[m] = Provenance::Self;

    std::vector<int> assigned_injections;
    for (int id : split.candidates) {
        const Measurement& meas = c.measurement(id);
        if (meas.kind == MeasurementKind::Flow) {
            members.insert(id);
            cs.provenance[id] = Provenance::CutFlow;
        } else if (!cert.is_assigned(id)) {
            members.insert(id);
            cs.provenance[id] = Provenance::UnassignedInjection;
        } else {
            assigned_injections.push_back(id);
        }
    }
    std::sort(assigned_injections.begin(), assigned_injections.end());

    // Candidate injections versus their backups, one-to-one.
    BipartiteGraph g;
    std::map<int, std::set<int>> backup_sets;
    std::vector<int> backup_ids;
    for (int id : assigned_injections) {
        backup_sets[id] = backup_boundary_injections(c, cert, split, id);
        for (int b : backup_sets[id])
            if (std::find(backup_ids.begin(), backup_ids.end(), b) == backup_ids.end())
                backup_ids.push_back(b);
    }
    std::sort(backup_ids.begin(), backup_ids.end());
    for (int id : assigned_injections) g.left.push_back(c.measurement_name(id));
    for (int id : backup_ids) g.right.push_back(c.measurement_name(id));
    for (std::size_t i = 0; i < assigned_injections.size(); ++i)
        for (int b : backup_sets[assigned_injections[i]]) {
            auto it = std::lower_bound(backup_ids.begin(), backup_ids.end(), b);
            g.edges.push_back({static_cast<int>(i),
                               static_cast<int>(it - backup_ids.begin())});
        }
    Matching matching = maximum_matching(g);
    for (auto [l, r] : matching.pairs) {
        int id = assigned_injections[l];
        members.insert(id);
        cs.provenance[id] = Provenance::MatchedAssignedInjection;
        cs.backups[id] = std::vector<int>(backup_sets[id].begin(), backup_sets[id].end());
    }

    cs.members.assign(members.begin(), members.end());
    return cs;
}

std::map<int, CriticalSet> all_critical_sets(const Case& c, const SpanningTreeCertificate& cert) {
    std::map<int, CriticalSet> out;
    for (int m : cert.assigned_measurements) out.emplace(m, critical_set(c, cert, m));
    return out;
}

bool is_critical_measurement(const Case& c, const SpanningTreeCertificate& cert, int m) {
    CriticalSet cs = critical_set(c, cert, m);
    return cs.members.size() == 1 && cs.members.front() == m;
}

}  // namespace gridsight
