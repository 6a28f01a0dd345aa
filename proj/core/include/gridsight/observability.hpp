#ifndef GRIDSIGHT_OBSERVABILITY_HPP
#define GRIDSIGHT_OBSERVABILITY_HPP

#include <gridsight/model.hpp>

#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

namespace gridsight {

// Partial injective map measurement id -> line id obeying the assignment
// rules: a flow maps only to its own line, an injection only to an unmeasured
// line incident to its bus, and no two measurements share a line.
struct AssignmentFunction {
    std::map<int, int> measurement_to_line;
};

// Proof of topological observability: the assigned lines form a spanning tree.
struct SpanningTreeCertificate {
    AssignmentFunction assignment;
    std::set<int> branches;                  // line ids, |branches| = N-1
    std::vector<int> assigned_measurements;  // ascending measurement ids (the tree set)

    bool is_assigned(int measurement_id) const {
        return assignment.measurement_to_line.count(measurement_id) != 0;
    }
    int assigned_line(int measurement_id) const {
        return assignment.measurement_to_line.at(measurement_id);
    }
};

// Bus partition left behind by the best achievable assignment forest.
struct UnobservabilityWitness {
    std::vector<std::vector<int>> components;  // >=2 blocks, each ascending bus ids
};

using BuildResult = std::variant<SpanningTreeCertificate, UnobservabilityWitness>;

struct InvalidCase : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact deterministic search for a rule-respecting spanning assignment.
// Flows are assigned first in ascending id order (a flow whose line would
// close a cycle among already-assigned flows is dropped); injections are then
// admitted in ascending id order whenever the admitted set remains assignable,
// which is a matroid greedy and therefore complete: a certificate is returned
// whenever any rule-respecting spanning assignment exists.
BuildResult build_assignment(const Case& c);

// Injection measurements on buses incident to at least one flow-measured line
// and at least one line without a flow measurement.
std::set<int> boundary_injections(const Case& c, const SpanningTreeCertificate& cert);

struct ReconnectWitness {
    std::map<int, int> assignment;  // measurement id -> line id
};

// True iff some rule-respecting assignment of measurements in `usable`
// connects a bus of part_a to a bus of part_b inside `region`. Only the
// usable measurements are placed; lines carrying a flow measurement are
// never assignable to injections.
std::optional<ReconnectWitness> reconnectable(const Case& c, const std::set<int>& region,
                                              const std::set<int>& part_a,
                                              const std::set<int>& part_b,
                                              const std::set<int>& usable);

namespace detail {

// Exact feasibility test: can every measurement in `chosen` be assigned to a
// distinct admissible line so the assigned lines form a forest? On success
// returns the canonical assignment (measurements in ascending id order, each
// taking the lowest-id admissible line the backtracking can complete from).
std::optional<AssignmentFunction> assign_exactly(const Case& c, const std::vector<int>& chosen);

}  // namespace detail

}  // namespace gridsight

#endif
