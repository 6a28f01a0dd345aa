#ifndef GRIDSIGHT_MATCHING_HPP
#define GRIDSIGHT_MATCHING_HPP

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gridsight {

// Bipartite graph over opaque ordered labels. The order of the label lists is
// the canonical order used by the deterministic matching below.
struct BipartiteGraph {
    std::vector<std::string> left;
    std::vector<std::string> right;
    std::vector<std::pair<int, int>> edges;  // (left index, right index), no duplicates
};

struct Matching {
    std::map<int, int> pairs;  // left index -> right index, injective both sides
    bool operator==(const Matching& other) const { return pairs == other.pairs; }
};

// Deterministic maximum matching: left nodes are processed in list order and
// the augmenting DFS tries right nodes in list order, so equal graphs always
// produce the identical matching.
Matching maximum_matching(const BipartiteGraph& g);

struct LeftDeficiency {
    int count = 0;
    std::vector<std::string> unmatched;  // left labels in list order
};

LeftDeficiency left_deficiency(const BipartiteGraph& g, const Matching& m);

// Witness of a Hall violation: a sub-family whose member union is smaller
// than the family itself.
struct HallViolation {
    std::vector<std::string> witness;
};

using SdrResult = std::variant<std::map<std::string, std::string>, HallViolation>;

// System of distinct representatives: picks one distinct member per labelled
// set, or reports the violating sub-family.
SdrResult distinct_representatives(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& sets);

}  // namespace gridsight

#endif
