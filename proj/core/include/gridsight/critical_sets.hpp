#ifndef GRIDSIGHT_CRITICAL_SETS_HPP
#define GRIDSIGHT_CRITICAL_SETS_HPP

#include <gridsight/matching.hpp>
#include <gridsight/model.hpp>
#include <gridsight/observability.hpp>

#include <map>
#include <set>
#include <vector>

namespace gridsight {

struct NotAssigned : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotApplicable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The two sides left behind when an assigned measurement's branch is removed
// from the certificate tree, plus everything the set-building procedure needs:
// boundary buses, cut lines and the candidate measurements able to bridge them.
struct TreeSplit {
    int owner = 0;
    std::set<int> n1, n2;            // bus ids; n1 holds the lower endpoint of f(owner)
    std::set<int> b1, b2;            // tree lines per side
    std::set<int> n12, n21;          // boundary buses
    std::set<int> cut_lines;         // lines joining n12 to n21 (includes f(owner))
    std::set<int> candidates;        // measurements able to reconnect, owner excluded
    std::set<int> candidate_flows;   // flow subset of candidates
};

enum class Provenance { Self, CutFlow, UnassignedInjection, MatchedAssignedInjection };

struct CriticalSet {
    int owner = 0;
    std::vector<int> members;  // ascending measurement ids, owner included
    std::map<int, Provenance> provenance;
    std::map<int, std::vector<int>> backups;  // matched assigned injection -> backup ids

    bool contains(int id) const {
        return std::find(members.begin(), members.end(), id) != members.end();
    }
};

TreeSplit split_tree(const Case& c, const SpanningTreeCertificate& cert, int m);

// Unassigned measurements outside the candidate set that can repair the
// sub-split caused by reassigning `m_prime` toward the cut; union over all
// admissible reassignment targets.
std::set<int> backup_boundary_injections(const Case& c, const SpanningTreeCertificate& cert,
                                         const TreeSplit& split, int m_prime);

CriticalSet critical_set(const Case& c, const SpanningTreeCertificate& cert, int m);

std::map<int, CriticalSet> all_critical_sets(const Case& c, const SpanningTreeCertificate& cert);

bool is_critical_measurement(const Case& c, const SpanningTreeCertificate& cert, int m);

}  // namespace gridsight

#endif
