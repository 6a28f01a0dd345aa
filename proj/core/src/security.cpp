#include <gridsight/security.hpp>

#include <algorithm>

namespace gridsight {

CsmGraph build_csm_graph(const Case& c, const std::map<int, CriticalSet>& critical_sets) {
    CsmGraph g;
    for (const auto& [owner, cs] : critical_sets) g.owners.push_back(owner);
    std::sort(g.owners.begin(), g.owners.end());
    for (const auto& m : c.measurements) g.measurements.push_back(m.id);
    std::sort(g.measurements.begin(), g.measurements.end());

    for (int owner : g.owners) g.graph.left.push_back("C(" + c.measurement_name(owner) + ")");
    for (int id : g.measurements) g.graph.right.push_back(c.measurement_name(id));

    std::map<int, int> right_index;
    for (std::size_t i = 0; i < g.measurements.size(); ++i) right_index[g.measurements[i]] = i;
    for (std::size_t i = 0; i < g.owners.size(); ++i)
        for (int member : critical_sets.at(g.owners[i]).members)
            g.graph.edges.push_back({static_cast<int>(i), right_index.at(member)});

    g.baseline = maximum_matching(g.graph);
    return g;
}

namespace {

// Matching size once the given right-side measurements are deleted.
int matched_without(const CsmGraph& g, const std::set<int>& removed) {
    BipartiteGraph pruned;
    pruned.left = g.graph.left;
    pruned.right = g.graph.right;
    for (auto [l, r] : g.graph.edges)
        if (!removed.count(g.measurements[r])) pruned.edges.push_back({l, r});
    return static_cast<int>(maximum_matching(pruned).pairs.size());
}

}  // namespace

AttackVerdict assess_removal(const CsmGraph& g, const std::set<int>& removed) {
    std::set<int> known(g.measurements.begin(), g.measurements.end());
    for (int id : removed)
        if (!known.count(id))
            throw UnknownMeasurement("unknown measurement id " + std::to_string(id));

    AttackVerdict v;
    v.attacked = removed;

    BipartiteGraph pruned;
    pruned.left = g.graph.left;
    pruned.right = g.graph.right;
    for (auto [l, r] : g.graph.edges)
        if (!removed.count(g.measurements[r])) pruned.edges.push_back({l, r});
    Matching matching = maximum_matching(pruned);
    const int left_count = static_cast<int>(g.graph.left.size());
    v.deficiency = left_count - static_cast<int>(matching.pairs.size());
    for (int u = 0; u < left_count; ++u)
        if (!matching.pairs.count(u)) v.unmatched_owners.push_back(g.owners[u]);

    // Strictly removed: putting any one attacked measurement back must recover
    // exactly one critical set.
    for (int a : removed) {
        std::set<int> rest = removed;
        rest.erase(a);
        int deficiency_without_a = left_count - matched_without(g, rest);
        if (deficiency_without_a != v.deficiency - 1) v.strictness_failures.push_back(a);
    }
    v.stealthy = v.deficiency >= 1 && v.strictness_failures.empty();
    return v;
}

SparsestAttack sparsest_attack(const std::map<int, CriticalSet>& critical_sets) {
    if (critical_sets.empty())
        throw std::invalid_argument("sparsest_attack needs a nonempty critical-set family");
    const CriticalSet* best = nullptr;
    for (const auto& [owner, cs] : critical_sets)
        if (!best || cs.members.size() < best->members.size()) best = &cs;
    SparsestAttack out;
    out.measurements.insert(best->members.begin(), best->members.end());
    out.cardinality = static_cast<int>(best->members.size());
    out.owner = best->owner;
    return out;
}

std::variant<SparsestAttack, NoCoveringSet> sparsest_attack_including(
    const Case& c, const std::map<int, CriticalSet>& critical_sets, int k) {
    if (!c.has_measurement(k))
        throw UnknownMeasurement("unknown measurement id " + std::to_string(k));
    const CriticalSet* best = nullptr;
    for (const auto& [owner, cs] : critical_sets) {
        if (!cs.contains(k)) continue;
        if (!best || cs.members.size() < best->members.size()) best = &cs;
    }
    if (!best) return NoCoveringSet{};
    SparsestAttack out;
    out.measurements.insert(best->members.begin(), best->members.end());
    out.cardinality = static_cast<int>(best->members.size());
    out.owner = best->owner;
    return out;
}

DefensePlan full_defense(const SpanningTreeCertificate& cert) {
    DefensePlan plan;
    plan.protected_measurements.insert(cert.assigned_measurements.begin(),
                                       cert.assigned_measurements.end());
    plan.guarantee = DefenseAll{};
    return plan;
}

std::variant<DefensePlan, HallViolation> threshold_defense(
    const Case& c, const std::map<int, CriticalSet>& critical_sets, int tau) {
    if (tau < 2)
        throw std::invalid_argument("threshold defense needs tau >= 2");
    std::vector<std::pair<std::string, std::vector<std::string>>> family;
    for (const auto& [owner, cs] : critical_sets) {
        if (static_cast<int>(cs.members.size()) >= tau) continue;
        std::vector<std::string> members;
        for (int id : cs.members) members.push_back(c.measurement_name(id));
        family.push_back({"C(" + c.measurement_name(owner) + ")", members});
    }
    DefensePlan plan;
    plan.guarantee = DefenseThreshold{tau};
    if (family.empty()) return plan;

    SdrResult sdr = distinct_representatives(family);
    if (auto* hv = std::get_if<HallViolation>(&sdr)) return *hv;
    for (const auto& [label, member] : std::get<0>(sdr))
        plan.protected_measurements.insert(*c.measurement_by_name(member));
    return plan;
}

}  // namespace gridsight
