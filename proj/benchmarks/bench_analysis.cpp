#include <benchmark/benchmark.h>

#include <gridsight/critical_sets.hpp>
#include <gridsight/matching.hpp>
#include <gridsight/observability.hpp>
#include <gridsight/oracle.hpp>
#include <gridsight/security.hpp>

#include <random>

using namespace gridsight;

namespace {

Case bundled_case() {
    return parse_case_file(std::string(GRIDSIGHT_DATA_DIR) + "/ieee14_paper.json");
}

void BM_BuildAssignment(benchmark::State& state) {
    Case c = bundled_case();
    for (auto _ : state) benchmark::DoNotOptimize(build_assignment(c));
}
BENCHMARK(BM_BuildAssignment);

void BM_AllCriticalSets(benchmark::State& state) {
    Case c = bundled_case();
    auto cert = std::get<SpanningTreeCertificate>(build_assignment(c));
    for (auto _ : state) benchmark::DoNotOptimize(all_critical_sets(c, cert));
}
BENCHMARK(BM_AllCriticalSets);

void BM_ExactRank(benchmark::State& state) {
    Case c = bundled_case();
    JacobianMatrix H = build_jacobian(c, SusceptancePolicy::from_case());
    std::set<int> all(H.rows.begin(), H.rows.end());
    for (auto _ : state) benchmark::DoNotOptimize(rank_of(H, all));
}
BENCHMARK(BM_ExactRank);

void BM_SupportRealizable(benchmark::State& state) {
    Case c = bundled_case();
    JacobianMatrix H = build_jacobian(c, SusceptancePolicy::from_case());
    std::set<int> support{1, 5, 6, 7, 8, 9};
    for (auto _ : state) benchmark::DoNotOptimize(support_realizable(H, support));
}
BENCHMARK(BM_SupportRealizable);

void BM_MaximumMatching(benchmark::State& state) {
    std::mt19937_64 rng(5);
    BipartiteGraph g;
    const int side = static_cast<int>(state.range(0));
    for (int i = 0; i < side; ++i) {
        g.left.push_back("L" + std::to_string(i));
        g.right.push_back("R" + std::to_string(i));
    }
    for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j)
            if (rng() % 100 < 20) g.edges.push_back({i, j});
    for (auto _ : state) benchmark::DoNotOptimize(maximum_matching(g));
}
BENCHMARK(BM_MaximumMatching)->Arg(16)->Arg(64)->Arg(256);

void BM_AssessRemoval(benchmark::State& state) {
    Case c = bundled_case();
    auto cert = std::get<SpanningTreeCertificate>(build_assignment(c));
    auto sets = all_critical_sets(c, cert);
    CsmGraph g = build_csm_graph(c, sets);
    std::set<int> removed{1, 5, 6, 7, 8, 9};
    for (auto _ : state) benchmark::DoNotOptimize(assess_removal(g, removed));
}
BENCHMARK(BM_AssessRemoval);

}  // namespace

BENCHMARK_MAIN();
