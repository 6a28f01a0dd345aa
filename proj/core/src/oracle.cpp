#include <gridsight/oracle.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>

namespace gridsight {

int JacobianMatrix::row_index(int measurement_id) const {
    auto it = std::lower_bound(rows.begin(), rows.end(), measurement_id);
    if (it == rows.end() || *it != measurement_id)
        throw std::out_of_range("no Jacobian row for measurement " +
                                std::to_string(measurement_id));
    return static_cast<int>(it - rows.begin());
}

int JacobianMatrix::col_index(int bus_id) const {
    auto it = std::lower_bound(cols.begin(), cols.end(), bus_id);
    if (it == cols.end() || *it != bus_id)
        throw std::out_of_range("no Jacobian column for bus " + std::to_string(bus_id));
    return static_cast<int>(it - cols.begin());
}

namespace {

std::map<int, Rational> line_susceptances(const Case& c, SusceptancePolicy policy) {
    std::map<int, Rational> b;
    if (policy.kind == SusceptancePolicy::Kind::FromCase) {
        for (const auto& l : c.lines) {
            if (!l.susceptance)
                throw MissingSusceptance("line " + std::to_string(l.id) +
                                         " has no susceptance and policy is FromCase");
            b[l.id] = *l.susceptance;
        }
        return b;
    }
    // Distinct nonzero rationals, deterministic in the seed. The range keeps
    // the floating-point residual path well conditioned while leaving rank
    // degeneracies to measure-zero coincidences (cross-checked by the
    // seed-invariance tests).
    std::mt19937_64 rng(policy.seed);
    std::uniform_int_distribution<long> num(101, 997);
    std::uniform_int_distribution<long> den(1, 13);
    std::set<std::pair<long, long>> used;
    std::vector<int> ids;
    for (const auto& l : c.lines) ids.push_back(l.id);
    std::sort(ids.begin(), ids.end());
    for (int id : ids) {
        long p, q;
        do {
            p = num(rng);
            q = den(rng);
        } while (!used.insert({p, q}).second);
        Rational r(p, q);
        r.canonicalize();
        b[id] = r;
    }
    return b;
}

// Flow row oriented from-bus positive, reference column dropped.
std::vector<Rational> flow_row(const JacobianMatrix& H, const Case& c, const Line& l,
                               const Rational& b) {
    std::vector<Rational> row(H.cols.size(), Rational(0));
    if (l.from != c.reference_bus) row[H.col_index(l.from)] = b;
    if (l.to != c.reference_bus) row[H.col_index(l.to)] = -b;
    return row;
}

}  // namespace

JacobianMatrix build_jacobian(const Case& c, SusceptancePolicy policy) {
    auto b = line_susceptances(c, policy);

    JacobianMatrix H;
    H.line_susceptance = b;
    H.reference_bus = c.reference_bus;
    for (const auto& m : c.measurements) H.rows.push_back(m.id);
    std::sort(H.rows.begin(), H.rows.end());
    for (const auto& bus : c.buses)
        if (bus.id != c.reference_bus) H.cols.push_back(bus.id);
    std::sort(H.cols.begin(), H.cols.end());

    for (int mid : H.rows) {
        const Measurement& m = c.measurement(mid);
        if (m.kind == MeasurementKind::Flow) {
            const Line& l = c.line(m.target);
            H.entries.push_back(flow_row(H, c, l, b.at(l.id)));
        } else {
            std::vector<Rational> row(H.cols.size(), Rational(0));
            for (int lid : c.lines_at(m.target)) {
                const Line& l = c.line(lid);
                auto base = flow_row(H, c, l, b.at(lid));
                const int sign = l.from == m.target ? 1 : -1;
                for (std::size_t j = 0; j < row.size(); ++j)
                    row[j] += sign > 0 ? base[j] : -base[j];
            }
            H.entries.push_back(std::move(row));
        }
    }
    return H;
}

namespace {

// Fraction-free (Bareiss) rank over integer-scaled rows.
int bareiss_rank(std::vector<std::vector<mpz_class>> m) {
    const int rows = static_cast<int>(m.size());
    if (rows == 0) return 0;
    const int cols = static_cast<int>(m[0].size());
    int rank = 0;
    mpz_class prev(1);
    for (int col = 0; col < cols && rank < rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r)
            if (m[r][col] != 0) {
                pivot = r;
                break;
            }
        if (pivot == -1) continue;
        std::swap(m[rank], m[pivot]);
        for (int r = rank + 1; r < rows; ++r) {
            for (int j = col + 1; j < cols; ++j) {
                mpz_class t = m[rank][col] * m[r][j] - m[r][col] * m[rank][j];
                mpz_divexact(m[r][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            m[r][col] = 0;
        }
        prev = m[rank][col];
        ++rank;
    }
    return rank;
}

std::vector<mpz_class> scale_row(const std::vector<Rational>& row) {
    mpz_class lcm(1);
    for (const auto& q : row)
        if (q != 0) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den_mpz_t());
    std::vector<mpz_class> out;
    out.reserve(row.size());
    for (const auto& q : row) {
        mpz_class scaled = q.get_num() * (lcm / q.get_den());
        out.push_back(scaled);
    }
    return out;
}

int rank_of_rows(const JacobianMatrix& H, const std::vector<int>& row_indices) {
    std::vector<std::vector<mpz_class>> m;
    m.reserve(row_indices.size());
    for (int r : row_indices) m.push_back(scale_row(H.entries[r]));
    return bareiss_rank(std::move(m));
}

std::vector<int> indices_of(const JacobianMatrix& H, const std::set<int>& keep_rows) {
    std::vector<int> idx;
    for (int id : keep_rows) idx.push_back(H.row_index(id));
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace

int rank_of(const JacobianMatrix& H, const std::set<int>& keep_rows) {
    return rank_of_rows(H, indices_of(H, keep_rows));
}

int rank_all(const JacobianMatrix& H) {
    std::vector<int> all(H.rows.size());
    std::iota(all.begin(), all.end(), 0);
    return rank_of_rows(H, all);
}

std::vector<std::vector<Rational>> null_space(const JacobianMatrix& H,
                                              const std::set<int>& keep_rows) {
    const int n = static_cast<int>(H.cols.size());
    std::vector<std::vector<Rational>> m;
    for (int id : keep_rows) m.push_back(H.entries[H.row_index(id)]);

    // rational RREF
    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < n && row < static_cast<int>(m.size()); ++col) {
        int pivot = -1;
        for (int r = row; r < static_cast<int>(m.size()); ++r)
            if (m[r][col] != 0) {
                pivot = r;
                break;
            }
        if (pivot == -1) continue;
        std::swap(m[row], m[pivot]);
        Rational inv = m[row][col];
        for (int j = 0; j < n; ++j) m[row][j] /= inv;
        for (int r = 0; r < static_cast<int>(m.size()); ++r) {
            if (r == row || m[r][col] == 0) continue;
            Rational f = m[r][col];
            for (int j = 0; j < n; ++j) m[r][j] -= f * m[row][j];
        }
        pivot_col.push_back(col);
        ++row;
    }

    std::vector<bool> is_pivot(n, false);
    for (int col : pivot_col) is_pivot[col] = true;
    std::vector<std::vector<Rational>> basis;
    for (int free = 0; free < n; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rational> v(n, Rational(0));
        v[free] = 1;
        for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -m[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::variant<AttackVector, Infeasible> support_realizable(const JacobianMatrix& H,
                                                          const std::set<int>& A) {
    if (A.empty()) return Infeasible{"empty support", std::nullopt};
    for (int id : A) H.row_index(id);  // throws on unknown rows

    const int n = static_cast<int>(H.cols.size());
    std::set<int> complement(H.rows.begin(), H.rows.end());
    for (int id : A) complement.erase(id);

    const int base_rank = rank_of(H, complement);
    if (base_rank >= n)
        return Infeasible{"complement keeps full rank", std::nullopt};
    for (int id : A) {
        std::set<int> with = complement;
        with.insert(id);
        if (rank_of(H, with) != base_rank + 1)
            return Infeasible{"row already spanned by the complement", id};
    }

    auto basis = null_space(H, complement);
    // c = sum t^i v_i for the first t that leaves no attacked row at zero;
    // each attacked row gives a nonzero polynomial in t, so some small t works.
    for (long t = 1;; ++t) {
        std::vector<Rational> c(n, Rational(0));
        Rational w(1);
        for (const auto& v : basis) {
            for (int j = 0; j < n; ++j) c[j] += w * v[j];
            w *= t;
        }
        AttackVector av;
        av.c = c;
        av.a.assign(H.rows.size(), Rational(0));
        bool ok = true;
        for (std::size_t r = 0; r < H.rows.size(); ++r) {
            Rational dot(0);
            for (int j = 0; j < n; ++j)
                if (H.entries[r][j] != 0 && c[j] != 0) dot += H.entries[r][j] * c[j];
            av.a[r] = dot;
            const bool nonzero = dot != 0;
            const bool should = A.count(H.rows[r]) != 0;
            if (nonzero != should) {
                ok = false;
                break;
            }
            if (nonzero) av.support.insert(H.rows[r]);
        }
        if (ok) return av;
        if (t > 10000)
            throw std::logic_error("attack witness search failed to terminate");
    }
}

std::variant<SparsestSupport, NoneFound> brute_force_sparsest(const JacobianMatrix& H,
                                                              int max_card,
                                                              std::optional<int> containing,
                                                              const std::set<int>& protected_rows) {
    if (max_card > 6)
        throw BudgetExceeded("enumeration guard: max_card must be <= 6");
    std::vector<int> pool;
    for (int id : H.rows) {
        if (protected_rows.count(id)) continue;
        pool.push_back(id);
    }
    if (containing && !std::count(pool.begin(), pool.end(), *containing))
        return NoneFound{};

    std::vector<int> combo;
    // ascending cardinality, lexicographic within each cardinality
    std::function<std::optional<std::set<int>>(int, int)> search =
        [&](int start, int remaining) -> std::optional<std::set<int>> {
        if (remaining == 0) {
            std::set<int> support(combo.begin(), combo.end());
            if (containing && !support.count(*containing)) return std::nullopt;
            if (std::holds_alternative<AttackVector>(support_realizable(H, support)))
                return support;
            return std::nullopt;
        }
        for (int i = start; i < static_cast<int>(pool.size()); ++i) {
            combo.push_back(pool[i]);
            auto hit = search(i + 1, remaining - 1);
            combo.pop_back();
            if (hit) return hit;
        }
        return std::nullopt;
    };

    for (int card = 1; card <= max_card; ++card) {
        auto hit = search(0, card);
        if (hit) return SparsestSupport{*hit, card};
    }
    return NoneFound{};
}

NoiseModel default_noise(const JacobianMatrix& H, std::uint64_t seed) {
    NoiseModel nm;
    nm.covariance.assign(H.rows.size(), Rational(1, 100));
    nm.seed = seed;
    return nm;
}

double residual_invariance(const JacobianMatrix& H, const NoiseModel& noise,
                           const std::vector<Rational>& c, int trials) {
    const int m = static_cast<int>(H.rows.size());
    const int n = static_cast<int>(H.cols.size());
    if (static_cast<int>(noise.covariance.size()) != m)
        throw std::invalid_argument("noise covariance size mismatch");
    for (const auto& v : noise.covariance)
        if (sgn(v) <= 0) throw std::invalid_argument("noise covariance must be positive");
    if (static_cast<int>(c.size()) != n)
        throw std::invalid_argument("state vector size mismatch");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (rank_all(H) != n)
        throw SingularNormalMatrix("H is rank deficient; normal matrix is singular");

    Eigen::MatrixXd Hd(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) Hd(i, j) = H.entries[i][j].get_d();
    Eigen::VectorXd rinv(m);
    for (int i = 0; i < m; ++i) rinv(i) = 1.0 / noise.covariance[i].get_d();

    Eigen::MatrixXd HtRinv = Hd.transpose() * rinv.asDiagonal();
    Eigen::MatrixXd normal = HtRinv * Hd;
    Eigen::MatrixXd S = Hd * normal.ldlt().solve(HtRinv);
    Eigen::MatrixXd W = Eigen::MatrixXd::Identity(m, m) - S;

    Eigen::VectorXd cd(n);
    for (int j = 0; j < n; ++j) cd(j) = c[j].get_d();
    Eigen::VectorXd a = Hd * cd;

    std::mt19937_64 rng(noise.seed);
    std::uniform_real_distribution<double> angle(-3.14159265358979, 3.14159265358979);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd x(n);
        for (int j = 0; j < n; ++j) x(j) = angle(rng);
        Eigen::VectorXd e(m);
        for (int i = 0; i < m; ++i) {
            std::normal_distribution<double> gauss(0.0, std::sqrt(noise.covariance[i].get_d()));
            e(i) = gauss(rng);
        }
        Eigen::VectorXd z = Hd * x + e;
        Eigen::VectorXd r = W * z;
        Eigen::VectorXd ra = W * (z + a);
        worst = std::max(worst, (ra - r).lpNorm<Eigen::Infinity>());
    }
    return worst;
}

CriticalSetCheck verify_critical_set(const Case& c, const JacobianMatrix& H,
                                     const SpanningTreeCertificate& cert, const CriticalSet& cs) {
    CriticalSetCheck out;
    const int n = static_cast<int>(H.cols.size());

    std::set<int> without(H.rows.begin(), H.rows.end());
    for (int id : cs.members) without.erase(id);

    const int dropped = rank_of(H, without);
    out.rank_drop_ok = dropped == n - 1;
    if (!out.rank_drop_ok)
        out.failures.push_back("rank after removing the set is " + std::to_string(dropped) +
                               ", expected " + std::to_string(n - 1));

    out.restore_ok = true;
    for (int id : cs.members) {
        std::set<int> with = without;
        with.insert(id);
        if (rank_of(H, with) != n) {
            out.restore_ok = false;
            out.failures.push_back("re-adding " + c.measurement_name(id) +
                                   " does not restore full rank");
        }
    }

    // Hypothetical-flow swap: each assigned injection row can be replaced by a
    // flow row on its branch without changing the rank.
    out.hypothetical_flow_ok = true;
    for (int mid : cert.assigned_measurements) {
        const Measurement& m = c.measurement(mid);
        if (m.kind != MeasurementKind::Injection) continue;
        const Line& branch = c.line(cert.assigned_line(mid));
        const Rational& b = H.line_susceptance.at(branch.id);

        JacobianMatrix swapped = H;
        std::vector<Rational> row(H.cols.size(), Rational(0));
        if (branch.from != H.reference_bus) row[H.col_index(branch.from)] = b;
        if (branch.to != H.reference_bus) row[H.col_index(branch.to)] = -b;
        swapped.entries[H.row_index(mid)] = row;

        std::set<int> all(swapped.rows.begin(), swapped.rows.end());
        if (rank_of(swapped, all) != n) {
            out.hypothetical_flow_ok = false;
            out.failures.push_back("swapping " + c.measurement_name(mid) +
                                   " for its branch flow changes the rank");
        }
    }
    return out;
}

}  // namespace gridsight
