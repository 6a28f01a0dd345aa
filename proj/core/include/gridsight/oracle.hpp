#ifndef GRIDSIGHT_ORACLE_HPP
#define GRIDSIGHT_ORACLE_HPP

#include <gridsight/critical_sets.hpp>
#include <gridsight/model.hpp>
#include <gridsight/observability.hpp>
#include <gridsight/rational.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <variant>
#include <vector>

namespace gridsight {

struct MissingSusceptance : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularNormalMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact DC measurement Jacobian. A flow row on line l=(i,j) carries +b_l at
// column i and -b_l at column j (reference column dropped); an injection row
// is the signed sum of the incident flow rows oriented out of the bus.
struct JacobianMatrix {
    std::vector<int> rows;  // measurement ids, ascending
    std::vector<int> cols;  // non-reference bus ids, ascending
    std::vector<std::vector<Rational>> entries;
    std::map<int, Rational> line_susceptance;  // the values the rows were built from
    int reference_bus = 1;

    int row_index(int measurement_id) const;
    int col_index(int bus_id) const;
};

struct SusceptancePolicy {
    enum class Kind { FromCase, RandomGeneric };
    Kind kind = Kind::FromCase;
    std::uint64_t seed = 0xC0FFEE;

    static SusceptancePolicy from_case() { return {Kind::FromCase, 0}; }
    static SusceptancePolicy random_generic(std::uint64_t seed = 0xC0FFEE) {
        return {Kind::RandomGeneric, seed};
    }
};

JacobianMatrix build_jacobian(const Case& c, SusceptancePolicy policy);

// Exact rank of the kept rows, fraction-free elimination, no tolerances.
int rank_of(const JacobianMatrix& H, const std::set<int>& keep_rows);
int rank_all(const JacobianMatrix& H);

struct AttackVector {
    std::vector<Rational> c;  // over states (columns)
    std::vector<Rational> a;  // over measurements (rows), a = H c
    std::set<int> support;    // measurement ids with nonzero a
};

struct Infeasible {
    std::string reason;
    std::optional<int> spanned_row;  // member of A already spanned by the complement
};

// A support is realizable iff dropping it breaks full column rank and every
// dropped row individually restores one rank. On success builds a witness c
// whose attack a = Hc has support exactly A.
std::variant<AttackVector, Infeasible> support_realizable(const JacobianMatrix& H,
                                                          const std::set<int>& A);

struct SparsestSupport {
    std::set<int> support;
    int cardinality = 0;
};
struct NoneFound {};

// Exhaustive enumeration, ascending cardinality then lexicographic; first
// realizable support wins. max_card is capped at 6.
std::variant<SparsestSupport, NoneFound> brute_force_sparsest(
    const JacobianMatrix& H, int max_card, std::optional<int> containing = std::nullopt,
    const std::set<int>& protected_rows = {});

struct NoiseModel {
    std::vector<Rational> covariance;  // diagonal of R, positive, one per row
    std::uint64_t seed = 1;
};

NoiseModel default_noise(const JacobianMatrix& H, std::uint64_t seed = 1);

// Max |r^a - r|_inf over noisy trials for the attack a = Hc; the residual
// identity makes this float-level zero for any c.
double residual_invariance(const JacobianMatrix& H, const NoiseModel& noise,
                           const std::vector<Rational>& c, int trials);

struct CriticalSetCheck {
    bool rank_drop_ok = false;      // (i) rank minus members == N-2
    bool restore_ok = false;        // (ii) each member alone restores N-1
    bool hypothetical_flow_ok = false;  // (iii) injection rows swap for their branch flows
    std::vector<std::string> failures;
    bool all_ok() const { return rank_drop_ok && restore_ok && hypothetical_flow_ok; }
};

CriticalSetCheck verify_critical_set(const Case& c, const JacobianMatrix& H,
                                     const SpanningTreeCertificate& cert, const CriticalSet& cs);

// Null-space basis of the kept rows (exact), used by tests as a secondary
// randomized probe of support_realizable.
std::vector<std::vector<Rational>> null_space(const JacobianMatrix& H,
                                              const std::set<int>& keep_rows);

}  // namespace gridsight

#endif
