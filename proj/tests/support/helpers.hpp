#ifndef GRIDSIGHT_TEST_HELPERS_HPP
#define GRIDSIGHT_TEST_HELPERS_HPP

#include <gridsight/matching.hpp>
#include <gridsight/model.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gridsight::testing {

std::string data_path(const std::string& name);
Case load_data_case(const std::string& name);

// Measurement ids from names like "F2"/"I4"; throws on unknown names.
std::set<int> ids(const Case& c, const std::vector<std::string>& names);
std::set<std::string> name_set(const Case& c, const std::set<int>& measurement_ids);
std::set<std::string> name_set(const Case& c, const std::vector<int>& measurement_ids);

struct CliResult {
    int exit_code = -1;
    std::string output;
};

// Runs the gridsight binary with the given arguments, capturing stdout.
CliResult run_cli(const std::string& args);

// Independent maximum-matching oracle: BFS max-flow over the unit network.
int max_flow_matching_size(const BipartiteGraph& g);

// Exhaustive distinct-representatives search by backtracking.
bool sdr_backtracking(const std::vector<std::pair<std::string, std::vector<std::string>>>& sets);

// Hall's condition checked over every subfamily.
bool hall_condition(const std::vector<std::pair<std::string, std::vector<std::string>>>& sets);

// Random connected case: 2..8 buses, at most 14 lines, random flows and
// injections with shuffled measurement ids. Susceptances left unset.
Case random_case(std::uint64_t seed);

BipartiteGraph random_bipartite(std::uint64_t seed, int max_side = 12);

}  // namespace gridsight::testing

#endif
