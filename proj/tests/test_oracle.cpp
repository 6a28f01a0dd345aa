#include <catch2/catch_amalgamated.hpp>

#include <gridsight/oracle.hpp>

#include "support/helpers.hpp"

#include <cmath>
#include <random>

using namespace gridsight;
using namespace gridsight::testing;

namespace {

struct Fixture {
    Case c;
    JacobianMatrix H;
    Fixture() : c(load_data_case("ieee14_paper.json")) {
        H = build_jacobian(c, SusceptancePolicy::from_case());
    }
    int id(const std::string& name) const { return *c.measurement_by_name(name); }
    std::set<int> all_rows() const { return {H.rows.begin(), H.rows.end()}; }
};

}  // namespace

TEST_CASE("flow rows live on their line endpoints only") {
    Fixture f;
    const auto& row = f.H.entries[f.H.row_index(f.id("F2"))];
    // line 2 joins buses 1 (reference) and 2
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (f.H.cols[j] == 2)
            CHECK(row[j] != 0);
        else
            CHECK(row[j] == 0);
    }
}

TEST_CASE("the first state column matches the published sensitivities") {
    Fixture f;
    const int col = f.H.col_index(2);  // first non-reference bus
    const std::vector<std::pair<std::string, double>> expected = {
        {"F2", -16.90}, {"I1", -16.90}, {"I2", 33.37},
        {"I3", -5.05},  {"I4", -5.67},  {"I5", -5.75},
    };
    std::set<int> nonzero;
    for (std::size_t r = 0; r < f.H.rows.size(); ++r)
        if (f.H.entries[r][col] != 0) nonzero.insert(f.H.rows[r]);
    CHECK(nonzero == std::set<int>{1, 5, 6, 7, 8, 9});
    for (const auto& [name, value] : expected) {
        double got = f.H.entries[f.H.row_index(f.id(name))][col].get_d();
        CAPTURE(name, got);
        CHECK(std::abs(got - value) <= 0.005);
    }
}

TEST_CASE("two-bus Jacobian is the one-by-one signed susceptance") {
    Case c = load_data_case("two_bus.json");
    JacobianMatrix H = build_jacobian(c, SusceptancePolicy::from_case());
    REQUIRE(H.rows.size() == 1);
    REQUIRE(H.cols.size() == 1);
    CHECK(H.entries[0][0] == Rational(-1));  // from-bus is the reference, so -b
}

TEST_CASE("injection rows are the signed sums of incident flow rows") {
    Fixture f;
    for (const auto& m : f.c.measurements) {
        if (m.kind != MeasurementKind::Injection) continue;
        const auto& row = f.H.entries[f.H.row_index(m.id)];
        std::vector<Rational> rebuilt(f.H.cols.size(), Rational(0));
        for (const auto& l : f.c.lines) {
            if (l.from != m.target && l.to != m.target) continue;
            const Rational& b = *l.susceptance;
            const int sign = l.from == m.target ? 1 : -1;
            if (l.from != f.c.reference_bus)
                rebuilt[f.H.col_index(l.from)] += sign > 0 ? b : -b;
            if (l.to != f.c.reference_bus)
                rebuilt[f.H.col_index(l.to)] += sign > 0 ? -b : b;
        }
        CAPTURE(m.id);
        CHECK(row == rebuilt);
    }
}

TEST_CASE("missing susceptances fail the FromCase policy") {
    Case c = load_data_case("ieee14_paper.json");
    c.lines[0].susceptance.reset();
    CHECK_THROWS_AS(build_jacobian(c, SusceptancePolicy::from_case()), MissingSusceptance);
    CHECK_NOTHROW(build_jacobian(c, SusceptancePolicy::random_generic()));
}

TEST_CASE("bundled ranks reproduce the published values") {
    Fixture f;
    CHECK(rank_all(f.H) == 13);

    std::set<int> keep = f.all_rows();
    for (int id : ids(f.c, {"F2", "I4", "I11", "I13"})) keep.erase(id);
    CHECK(rank_of(f.H, keep) == 12);

    std::set<int> keep2 = f.all_rows();
    for (int id : ids(f.c, {"I6", "I9"})) keep2.erase(id);
    CHECK(rank_of(f.H, keep2) == 12);
}

TEST_CASE("rank is invariant across generic susceptance seeds", "[property]") {
    Case c = load_data_case("ieee14_paper.json");
    JacobianMatrix A = build_jacobian(c, SusceptancePolicy::random_generic(1));
    JacobianMatrix B = build_jacobian(c, SusceptancePolicy::random_generic(2));
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        std::set<int> keep;
        for (int id : A.rows)
            if (rng() % 100 < 60) keep.insert(id);
        CAPTURE(trial);
        CHECK(rank_of(A, keep) == rank_of(B, keep));
    }
}

TEST_CASE("the worked attack support is realizable with the expected support") {
    Fixture f;
    auto A = ids(f.c, {"F2", "I1", "I2", "I3", "I4", "I5"});
    auto result = support_realizable(f.H, A);
    REQUIRE(std::holds_alternative<AttackVector>(result));
    const auto& av = std::get<AttackVector>(result);
    CHECK(av.support == A);
    // a = Hc holds by construction; re-check a few rows
    for (std::size_t r = 0; r < f.H.rows.size(); ++r) {
        Rational dot(0);
        for (std::size_t j = 0; j < f.H.cols.size(); ++j) dot += f.H.entries[r][j] * av.c[j];
        CHECK(dot == av.a[r]);
    }
}

TEST_CASE("a lone non-critical measurement is not a realizable support") {
    Fixture f;
    auto result = support_realizable(f.H, ids(f.c, {"F15"}));
    REQUIRE(std::holds_alternative<Infeasible>(result));
    CHECK(std::get<Infeasible>(result).reason == "complement keeps full rank");
}

TEST_CASE("attacking every measurement is realizable") {
    Fixture f;
    auto result = support_realizable(f.H, f.all_rows());
    REQUIRE(std::holds_alternative<AttackVector>(result));
    CHECK(std::get<AttackVector>(result).support == f.all_rows());
}

TEST_CASE("realizability agrees with random null-space probes", "[property]") {
    Fixture f;
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        std::set<int> A;
        for (int id : f.H.rows)
            if (rng() % 100 < 25) A.insert(id);
        if (A.empty()) continue;
        auto verdict = support_realizable(f.H, A);

        // secondary check: random rational combinations of the null basis of
        // the complement can only ever produce supports inside A, and when the
        // deterministic criterion says feasible some combination hits A
        std::set<int> complement = f.all_rows();
        for (int id : A) complement.erase(id);
        auto basis = null_space(f.H, complement);
        bool hit = false;
        for (int probe = 0; probe < 50 && !hit; ++probe) {
            std::vector<Rational> c(f.H.cols.size(), Rational(0));
            for (const auto& v : basis) {
                long w = static_cast<long>(rng() % 19) - 9;
                for (std::size_t j = 0; j < c.size(); ++j) c[j] += Rational(w) * v[j];
            }
            std::set<int> support;
            for (std::size_t r = 0; r < f.H.rows.size(); ++r) {
                Rational dot(0);
                for (std::size_t j = 0; j < c.size(); ++j) dot += f.H.entries[r][j] * c[j];
                if (dot != 0) support.insert(f.H.rows[r]);
            }
            CHECK(std::includes(A.begin(), A.end(), support.begin(), support.end()));
            if (support == A) hit = true;
        }
        CAPTURE(trial);
        if (hit) CHECK(std::holds_alternative<AttackVector>(verdict));
    }
}

TEST_CASE("brute force finds the sparsest supports") {
    Fixture f;
    auto plain = brute_force_sparsest(f.H, 3);
    REQUIRE(std::holds_alternative<SparsestSupport>(plain));
    CHECK(std::get<SparsestSupport>(plain).cardinality == 2);
    auto names = name_set(f.c, std::get<SparsestSupport>(plain).support);
    bool known = names == std::set<std::string>{"F15", "I7"} ||
                 names == std::set<std::string>{"I6", "I11"} ||
                 names == std::set<std::string>{"I9", "I11"};
    CHECK(known);

    auto with_i4 = brute_force_sparsest(f.H, 3, f.id("I4"));
    REQUIRE(std::holds_alternative<SparsestSupport>(with_i4));
    CHECK(name_set(f.c, std::get<SparsestSupport>(with_i4).support) ==
          std::set<std::string>{"I2", "I3", "I4"});

    auto guarded = brute_force_sparsest(f.H, 2, std::nullopt, ids(f.c, {"I6", "I7", "I9"}));
    CHECK(std::holds_alternative<NoneFound>(guarded));

    CHECK_THROWS_AS(brute_force_sparsest(f.H, 7), BudgetExceeded);
}

TEST_CASE("residual vector ignores attacks in the column space") {
    Fixture f;
    std::vector<Rational> c(f.H.cols.size(), Rational(0));
    c[0] = 1;
    CHECK(residual_invariance(f.H, default_noise(f.H, 5), c, 100) <= 1e-9);

    std::vector<Rational> zero(f.H.cols.size(), Rational(0));
    CHECK(residual_invariance(f.H, default_noise(f.H, 5), zero, 3) == 0.0);
}

TEST_CASE("residual identity holds on random cases", "[property]") {
    std::mt19937_64 rng(31);
    int exercised = 0;
    for (std::uint64_t seed = 900; seed < 940 && exercised < 8; ++seed) {
        Case c = random_case(seed);
        JacobianMatrix H = build_jacobian(c, SusceptancePolicy::random_generic(seed));
        if (rank_all(H) != static_cast<int>(H.cols.size())) continue;
        ++exercised;
        std::vector<Rational> state(H.cols.size());
        for (auto& q : state) q = Rational(static_cast<long>(rng() % 13) - 6);
        CAPTURE(seed);
        CHECK(residual_invariance(H, default_noise(H, seed), state, 25) <= 1e-9);
    }
    CHECK(exercised > 0);
}

TEST_CASE("rank-deficient systems are rejected by the residual check") {
    Case c = load_data_case("ieee14_paper.json");
    auto drop = ids(c, {"I6", "I11"});
    std::erase_if(c.measurements,
                  [&](const Measurement& m) { return drop.count(m.id) != 0; });
    JacobianMatrix H = build_jacobian(c, SusceptancePolicy::from_case());
    std::vector<Rational> state(H.cols.size(), Rational(0));
    CHECK_THROWS_AS(residual_invariance(H, default_noise(H, 1), state, 2),
                    SingularNormalMatrix);
}

TEST_CASE("every bundled critical set passes the three rank checks") {
    Fixture f;
    auto cert = std::get<SpanningTreeCertificate>(build_assignment(f.c));
    auto sets = all_critical_sets(f.c, cert);
    for (const auto& [owner, cs] : sets) {
        auto check = verify_critical_set(f.c, f.H, cert, cs);
        CAPTURE(f.c.measurement_name(owner), check.failures);
        CHECK(check.all_ok());
    }
}

TEST_CASE("a mutated critical set fails the rank checks") {
    Fixture f;
    auto cert = std::get<SpanningTreeCertificate>(build_assignment(f.c));
    CriticalSet cs = critical_set(f.c, cert, f.id("F2"));
    cs.members.erase(std::remove(cs.members.begin(), cs.members.end(), f.id("I13")),
                     cs.members.end());
    auto check = verify_critical_set(f.c, f.H, cert, cs);
    CHECK_FALSE(check.rank_drop_ok);
}

TEST_CASE("two-bus critical set drops the rank to zero and back") {
    Case c = load_data_case("two_bus.json");
    JacobianMatrix H = build_jacobian(c, SusceptancePolicy::from_case());
    auto cert = std::get<SpanningTreeCertificate>(build_assignment(c));
    CriticalSet cs = critical_set(c, cert, 1);
    CHECK(rank_of(H, {}) == 0);
    auto check = verify_critical_set(c, H, cert, cs);
    CHECK(check.all_ok());
}
