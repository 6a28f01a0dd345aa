#ifndef GRIDSIGHT_SECURITY_HPP
#define GRIDSIGHT_SECURITY_HPP

#include <gridsight/critical_sets.hpp>
#include <gridsight/matching.hpp>
#include <gridsight/model.hpp>

#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

namespace gridsight {

struct UnknownMeasurement : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Critical sets on the left, every system measurement on the right, an edge
// whenever the measurement belongs to the set.
struct CsmGraph {
    BipartiteGraph graph;
    Matching baseline;
    std::vector<int> owners;        // left node -> owner measurement id
    std::vector<int> measurements;  // right node -> measurement id
};

CsmGraph build_csm_graph(const Case& c, const std::map<int, CriticalSet>& critical_sets);

struct AttackVerdict {
    std::set<int> attacked;
    int deficiency = 0;
    std::vector<int> unmatched_owners;       // ascending owner ids
    bool stealthy = false;
    std::vector<int> strictness_failures;    // attacked ids whose removal was unnecessary
};

// Deletes the removed right nodes, recomputes the matching, and applies the
// strict-removal rule: every attacked measurement must individually account
// for one lost critical set.
AttackVerdict assess_removal(const CsmGraph& g, const std::set<int>& removed);

struct SparsestAttack {
    std::set<int> measurements;
    int cardinality = 0;
    int owner = 0;  // owning critical set, lowest id among ties
};

SparsestAttack sparsest_attack(const std::map<int, CriticalSet>& critical_sets);

struct NoCoveringSet {};

std::variant<SparsestAttack, NoCoveringSet> sparsest_attack_including(
    const Case& c, const std::map<int, CriticalSet>& critical_sets, int k);

struct DefenseAll {};
struct DefenseThreshold {
    int tau = 0;
};

struct DefensePlan {
    std::set<int> protected_measurements;
    std::variant<DefenseAll, DefenseThreshold> guarantee;
};

// Protect the whole tree set: thwarts every stealthy attack.
DefensePlan full_defense(const SpanningTreeCertificate& cert);

// Protect one distinct member of each critical set smaller than tau: any
// stealthy attack must then manipulate at least tau measurements.
std::variant<DefensePlan, HallViolation> threshold_defense(
    const Case& c, const std::map<int, CriticalSet>& critical_sets, int tau);

}  // namespace gridsight

#endif
