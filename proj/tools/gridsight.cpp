// gridsight: observability and data-injection-attack analysis for DC state
// estimation, with an exact linear-algebra cross-check behind --oracle.

#include <gridsight/critical_sets.hpp>
#include <gridsight/matching.hpp>
#include <gridsight/model.hpp>
#include <gridsight/observability.hpp>
#include <gridsight/oracle.hpp>
#include <gridsight/security.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using json = nlohmann::ordered_json;
using namespace gridsight;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNegative = 2;
constexpr int kExitUsage = 64;

std::string iso_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct Session {
    std::string case_path;
    std::uint64_t seed = 0xC0FFEE;
    std::string format = "json";
    bool oracle = false;

    Case grid;
    bool loaded = false;

    const Case& the_case() {
        if (!loaded) {
            grid = parse_case_file(case_path);
            loaded = true;
        }
        return grid;
    }

    SusceptancePolicy policy() {
        const Case& c = the_case();
        bool complete = std::all_of(c.lines.begin(), c.lines.end(),
                                    [](const Line& l) { return l.susceptance.has_value(); });
        return complete ? SusceptancePolicy::from_case()
                        : SusceptancePolicy::random_generic(seed);
    }
};

json report_shell(Session& s, const std::string& command) {
    json r;
    r["command"] = command;
    r["case_digest"] = case_digest(s.the_case());
    r["generated_at"] = iso_now();
    return r;
}

void emit(const json& report) { std::cout << report.dump(2) << "\n"; }

std::vector<std::string> names_of(const Case& c, const std::vector<int>& ids) {
    std::vector<std::string> out;
    for (int id : ids) out.push_back(c.measurement_name(id));
    return out;
}

std::vector<std::string> names_of(const Case& c, const std::set<int>& ids) {
    return names_of(c, std::vector<int>(ids.begin(), ids.end()));
}

int parse_measurement_token(const Case& c, const std::string& token) {
    if (!token.empty() && (token[0] == 'F' || token[0] == 'I')) {
        auto id = c.measurement_by_name(token);
        if (!id) throw ValidationError("no such measurement: " + token);
        return *id;
    }
    int id;
    try {
        id = std::stoi(token);
    } catch (const std::exception&) {
        throw ValidationError("bad measurement token: " + token);
    }
    if (!c.has_measurement(id)) throw ValidationError("no such measurement id: " + token);
    return id;
}

std::set<int> parse_measurement_list(const Case& c, const std::string& csv) {
    std::set<int> out;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        out.insert(parse_measurement_token(c, token));
    }
    return out;
}

std::set<int> load_protected_file(const Case& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SyntaxError("cannot open protected-set file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("protected-set file: ") + e.what());
    }
    if (!doc.is_array()) throw SchemaError("protected-set file must be a JSON list");
    std::set<int> out;
    for (const auto& v : doc) {
        if (v.is_number_integer())
            out.insert(parse_measurement_token(c, std::to_string(v.get<int>())));
        else if (v.is_string())
            out.insert(parse_measurement_token(c, v.get<std::string>()));
        else
            throw SchemaError("protected-set entries must be ids or names");
    }
    return out;
}

struct NotObservable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const SpanningTreeCertificate& require_certificate(const BuildResult& built) {
    if (std::holds_alternative<UnobservabilityWitness>(built))
        throw NotObservable("case is not observable; no spanning assignment exists");
    return std::get<SpanningTreeCertificate>(built);
}

// ---- oracle crosschecks ---------------------------------------------------

json crosscheck_observability(Session& s, bool observable) {
    const Case& c = s.the_case();
    JacobianMatrix H = build_jacobian(c, s.policy());
    int rank = rank_all(H);
    int n = static_cast<int>(c.buses.size()) - 1;
    json j;
    j["rank"] = rank;
    j["full_rank"] = rank == n;
    j["agrees"] = (rank == n) == observable;
    j["passed"] = j["agrees"];
    return j;
}

json crosscheck_critical_sets(Session& s, const SpanningTreeCertificate& cert,
                              const std::map<int, CriticalSet>& sets) {
    const Case& c = s.the_case();
    JacobianMatrix H = build_jacobian(c, s.policy());
    json checks = json::array();
    bool all = true;
    for (const auto& [owner, cs] : sets) {
        CriticalSetCheck check = verify_critical_set(c, H, cert, cs);
        json jc;
        jc["owner"] = c.measurement_name(owner);
        jc["rank_drop"] = check.rank_drop_ok;
        jc["single_restore"] = check.restore_ok;
        jc["hypothetical_flow"] = check.hypothetical_flow_ok;
        if (!check.failures.empty()) jc["failures"] = check.failures;
        all = all && check.all_ok();
        checks.push_back(jc);
    }
    json j;
    j["checks"] = checks;
    j["passed"] = all;
    return j;
}

json crosscheck_attack(Session& s, const std::set<int>& attacked, bool graph_stealthy) {
    const Case& c = s.the_case();
    JacobianMatrix H = build_jacobian(c, s.policy());
    auto realizable = support_realizable(H, attacked);
    json j;
    bool algebra = std::holds_alternative<AttackVector>(realizable);
    j["support_realizable"] = algebra;
    if (algebra) {
        const auto& av = std::get<AttackVector>(realizable);
        j["support"] = names_of(c, av.support);
        double dev = residual_invariance(H, default_noise(H, s.seed), av.c, 100);
        j["residual_max_deviation"] = dev;
        j["residual_ok"] = dev <= 1e-9;
        j["passed"] = graph_stealthy && dev <= 1e-9;
    } else {
        j["infeasible_reason"] = std::get<Infeasible>(realizable).reason;
        j["passed"] = !graph_stealthy;
    }
    j["agrees"] = algebra == graph_stealthy;
    return j;
}

json crosscheck_defense(Session& s, const std::set<int>& protected_set, int max_card) {
    const Case& c = s.the_case();
    JacobianMatrix H = build_jacobian(c, s.policy());
    auto hit = brute_force_sparsest(H, max_card, std::nullopt, protected_set);
    json j;
    j["exhaustive_max_cardinality"] = max_card;
    bool none = std::holds_alternative<NoneFound>(hit);
    j["stealthy_attack_found"] = !none;
    if (!none) j["counterexample"] = names_of(c, std::get<SparsestSupport>(hit).support);
    j["passed"] = none;
    return j;
}

// ---- DOT export -----------------------------------------------------------

void write_dot_network(const Case& c, std::ostream& out) {
    out << "graph network {\n";
    for (const auto& b : c.buses) out << "  \"B" << b.id << "\";\n";
    for (const auto& l : c.lines)
        out << "  \"B" << l.from << "\" -- \"B" << l.to << "\" [label=\"L" << l.id << "\"];\n";
    out << "}\n";
}

void write_dot_csm(const Case& c, const CsmGraph& g, std::ostream& out) {
    out << "graph csm {\n  rankdir=LR;\n";
    out << "  { rank=same;\n";
    for (const auto& label : g.graph.left) out << "    \"" << label << "\";\n";
    out << "  }\n  { rank=same;\n";
    for (const auto& label : g.graph.right) out << "    \"" << label << "\";\n";
    out << "  }\n";
    for (auto [l, r] : g.graph.edges)
        out << "  \"" << g.graph.left[l] << "\" -- \"" << g.graph.right[r] << "\";\n";
    out << "}\n";
    (void)c;
}

void write_dot_split(const Case& c, const TreeSplit& split, std::ostream& out) {
    out << "graph split {\n";
    out << "  subgraph cluster_side1 {\n    label=\"side 1\";\n";
    for (int b : split.n1) out << "    \"B" << b << "\";\n";
    out << "  }\n  subgraph cluster_side2 {\n    label=\"side 2\";\n";
    for (int b : split.n2) out << "    \"B" << b << "\";\n";
    out << "  }\n";
    for (const auto& l : c.lines) {
        bool cut = split.cut_lines.count(l.id) != 0;
        out << "  \"B" << l.from << "\" -- \"B" << l.to << "\" [label=\"L" << l.id << "\""
            << (cut ? ", style=dashed" : "") << "];\n";
    }
    out << "}\n";
}

// ---- subcommand bodies ----------------------------------------------------

int run_observability(Session& s) {
    const Case& c = s.the_case();
    BuildResult built = build_assignment(c);
    json report = report_shell(s, "observability");
    json result;
    bool observable = std::holds_alternative<SpanningTreeCertificate>(built);
    result["observable"] = observable;
    if (observable) {
        const auto& cert = std::get<SpanningTreeCertificate>(built);
        result["branches"] = cert.branches;
        result["assigned_measurements"] = names_of(c, cert.assigned_measurements);
        json assign;
        for (int m : cert.assigned_measurements)
            assign[c.measurement_name(m)] = cert.assigned_line(m);
        result["assignment"] = assign;
        result["boundary_injections"] = names_of(c, boundary_injections(c, cert));
    } else {
        const auto& w = std::get<UnobservabilityWitness>(built);
        result["components"] = w.components;
    }
    report["result"] = result;
    if (s.oracle) report["oracle_crosscheck"] = crosscheck_observability(s, observable);

    if (s.format == "table") {
        if (observable) {
            const auto& cert = std::get<SpanningTreeCertificate>(built);
            std::cout << "observable: yes\nbranches:";
            for (int b : cert.branches) std::cout << " " << b;
            std::cout << "\nassigned:";
            for (int m : cert.assigned_measurements) std::cout << " " << c.measurement_name(m);
            std::cout << "\n";
        } else {
            std::cout << "observable: no\n";
        }
    } else {
        emit(report);
    }
    return observable ? kExitOk : kExitNegative;
}

int run_critical_sets(Session& s) {
    const Case& c = s.the_case();
    const auto built = build_assignment(c);
    const auto& cert = require_certificate(built);
    auto sets = all_critical_sets(c, cert);

    json report = report_shell(s, "critical-sets");
    json rows = json::array();
    for (const auto& [owner, cs] : sets) {
        json row;
        row["measurement"] = c.measurement_name(owner);
        row["critical_set"] = names_of(c, cs.members);
        json prov;
        for (int id : cs.members) {
            switch (cs.provenance.at(id)) {
                case Provenance::Self: prov[c.measurement_name(id)] = "self"; break;
                case Provenance::CutFlow: prov[c.measurement_name(id)] = "cut-flow"; break;
                case Provenance::UnassignedInjection:
                    prov[c.measurement_name(id)] = "unassigned-injection";
                    break;
                case Provenance::MatchedAssignedInjection:
                    prov[c.measurement_name(id)] = "matched-assigned-injection";
                    break;
            }
        }
        row["provenance"] = prov;
        rows.push_back(row);
    }
    report["result"] = json{{"critical_sets", rows}};
    if (s.oracle) report["oracle_crosscheck"] = crosscheck_critical_sets(s, cert, sets);

    if (s.format == "table") {
        for (const auto& [owner, cs] : sets) {
            std::cout << c.measurement_name(owner) << "\t{";
            bool first = true;
            for (int id : cs.members) {
                if (!first) std::cout << ", ";
                std::cout << c.measurement_name(id);
                first = false;
            }
            std::cout << "}\n";
        }
    } else {
        emit(report);
    }
    return kExitOk;
}

int run_sparsest_attack(Session& s, const std::string& include_token,
                        const std::string& protected_path) {
    const Case& c = s.the_case();
    const auto built = build_assignment(c);
    const auto& cert = require_certificate(built);
    auto sets = all_critical_sets(c, cert);

    json report = report_shell(s, "sparsest-attack");
    json result;
    std::optional<SparsestAttack> found;

    if (!include_token.empty()) {
        int k = parse_measurement_token(c, include_token);
        auto answer = sparsest_attack_including(c, sets, k);
        if (std::holds_alternative<NoCoveringSet>(answer)) {
            result["found"] = false;
            result["reason"] = "measurement belongs to no critical set";
            report["result"] = result;
            emit(report);
            return kExitNegative;
        }
        found = std::get<SparsestAttack>(answer);
    } else if (!protected_path.empty()) {
        std::set<int> prot = load_protected_file(c, protected_path);
        const CriticalSet* best = nullptr;
        for (const auto& [owner, cs] : sets) {
            bool touches = std::any_of(cs.members.begin(), cs.members.end(),
                                       [&](int id) { return prot.count(id) != 0; });
            if (touches) continue;
            if (!best || cs.members.size() < best->members.size()) best = &sets.at(owner);
        }
        if (!best) {
            result["found"] = false;
            result["reason"] = "every critical set intersects the protected set";
            report["result"] = result;
            emit(report);
            return kExitNegative;
        }
        found = SparsestAttack{{best->members.begin(), best->members.end()},
                               static_cast<int>(best->members.size()), best->owner};
        result["protected"] = names_of(c, prot);
    } else {
        found = sparsest_attack(sets);
    }

    result["found"] = true;
    result["attack"] = names_of(c, found->measurements);
    result["cardinality"] = found->cardinality;
    result["critical_set_owner"] = c.measurement_name(found->owner);
    report["result"] = result;

    if (s.oracle) {
        JacobianMatrix H = build_jacobian(c, s.policy());
        json j;
        j["support_realizable"] =
            std::holds_alternative<AttackVector>(support_realizable(H, found->measurements));
        if (found->cardinality <= 6 && include_token.empty() && protected_path.empty()) {
            auto brute = brute_force_sparsest(H, found->cardinality);
            j["brute_force_cardinality_matches"] =
                std::holds_alternative<SparsestSupport>(brute) &&
                std::get<SparsestSupport>(brute).cardinality == found->cardinality;
        }
        j["passed"] = j["support_realizable"];
        report["oracle_crosscheck"] = j;
    }

    if (s.format == "table") {
        std::cout << "cardinality: " << found->cardinality << "\nattack:";
        for (int id : found->measurements) std::cout << " " << c.measurement_name(id);
        std::cout << "\n";
    } else {
        emit(report);
    }
    return kExitOk;
}

int run_defense(Session& s, bool all, int tau) {
    const Case& c = s.the_case();
    const auto built = build_assignment(c);
    const auto& cert = require_certificate(built);

    json report = report_shell(s, all ? "defense --all" : "defense --tau");
    json result;
    std::set<int> protected_set;

    if (all) {
        DefensePlan plan = full_defense(cert);
        protected_set = plan.protected_measurements;
        result["guarantee"] = "all";
    } else {
        auto sets = all_critical_sets(c, cert);
        auto plan = threshold_defense(c, sets, tau);
        if (auto* hv = std::get_if<HallViolation>(&plan)) {
            result["hall_violation"] = hv->witness;
            report["result"] = result;
            emit(report);
            return kExitNegative;
        }
        protected_set = std::get<DefensePlan>(plan).protected_measurements;
        result["guarantee"] = "threshold";
        result["tau"] = tau;
    }
    result["protected"] = names_of(c, protected_set);
    result["size"] = protected_set.size();
    report["result"] = result;

    if (s.oracle) {
        int max_card = all ? std::min(4, static_cast<int>(c.measurements.size()))
                           : std::min(tau - 1, 6);
        report["oracle_crosscheck"] = crosscheck_defense(s, protected_set, max_card);
    }

    if (s.format == "table") {
        std::cout << "protected (" << protected_set.size() << "):";
        for (int id : protected_set) std::cout << " " << c.measurement_name(id);
        std::cout << "\n";
    } else {
        emit(report);
    }
    return kExitOk;
}

int run_verify_attack(Session& s, const std::string& csv) {
    const Case& c = s.the_case();
    const auto built = build_assignment(c);
    const auto& cert = require_certificate(built);
    auto sets = all_critical_sets(c, cert);
    CsmGraph g = build_csm_graph(c, sets);

    std::set<int> attacked = parse_measurement_list(c, csv);
    AttackVerdict v = assess_removal(g, attacked);

    json report = report_shell(s, "verify-attack");
    json result;
    result["attacked"] = names_of(c, v.attacked);
    result["deficiency"] = v.deficiency;
    json unmatched = json::array();
    for (int owner : v.unmatched_owners) unmatched.push_back("C(" + c.measurement_name(owner) + ")");
    result["unmatched_critical_sets"] = unmatched;
    result["stealthy"] = v.stealthy;
    result["strictness_failures"] = names_of(c, v.strictness_failures);
    report["result"] = result;
    if (s.oracle) report["oracle_crosscheck"] = crosscheck_attack(s, attacked, v.stealthy);

    if (s.format == "table") {
        std::cout << "stealthy: " << (v.stealthy ? "yes" : "no")
                  << "\ndeficiency: " << v.deficiency << "\n";
    } else {
        emit(report);
    }
    return v.stealthy ? kExitOk : kExitNegative;
}

int run_oracle_rank(Session& s, const std::string& drop_csv, const std::string& keep_csv) {
    const Case& c = s.the_case();
    JacobianMatrix H = build_jacobian(c, s.policy());
    std::set<int> keep(H.rows.begin(), H.rows.end());
    if (!keep_csv.empty()) keep = parse_measurement_list(c, keep_csv);
    for (int id : parse_measurement_list(c, drop_csv)) keep.erase(id);

    json report = report_shell(s, "oracle rank");
    json result;
    result["kept_rows"] = names_of(c, keep);
    result["rank"] = rank_of(H, keep);
    result["states"] = H.cols.size();
    report["result"] = result;
    emit(report);
    return kExitOk;
}

int run_oracle_realizable(Session& s, const std::string& csv) {
    const Case& c = s.the_case();
    JacobianMatrix H = build_jacobian(c, s.policy());
    std::set<int> A = parse_measurement_list(c, csv);
    auto answer = support_realizable(H, A);

    json report = report_shell(s, "oracle realizable");
    json result;
    bool feasible = std::holds_alternative<AttackVector>(answer);
    result["feasible"] = feasible;
    if (feasible) {
        const auto& av = std::get<AttackVector>(answer);
        result["support"] = names_of(c, av.support);
        json cvec = json::array();
        for (const auto& q : av.c) cvec.push_back(to_string(q));
        result["c"] = cvec;
    } else {
        const auto& inf = std::get<Infeasible>(answer);
        result["reason"] = inf.reason;
        if (inf.spanned_row) result["spanned_row"] = c.measurement_name(*inf.spanned_row);
    }
    report["result"] = result;
    emit(report);
    return feasible ? kExitOk : kExitNegative;
}

int run_oracle_brute_force(Session& s, int max_card, const std::string& include_token,
                           const std::string& protected_path) {
    const Case& c = s.the_case();
    JacobianMatrix H = build_jacobian(c, s.policy());
    std::optional<int> containing;
    if (!include_token.empty()) containing = parse_measurement_token(c, include_token);
    std::set<int> prot;
    if (!protected_path.empty()) prot = load_protected_file(c, protected_path);

    auto answer = brute_force_sparsest(H, max_card, containing, prot);
    json report = report_shell(s, "oracle brute-force");
    json result;
    bool found = std::holds_alternative<SparsestSupport>(answer);
    result["found"] = found;
    if (found) {
        const auto& hit = std::get<SparsestSupport>(answer);
        result["support"] = names_of(c, hit.support);
        result["cardinality"] = hit.cardinality;
    }
    report["result"] = result;
    emit(report);
    return found ? kExitOk : kExitNegative;
}

int run_oracle_residual(Session& s, int trials, const std::string& c_csv) {
    const Case& c = s.the_case();
    JacobianMatrix H = build_jacobian(c, s.policy());
    std::vector<Rational> state(H.cols.size(), Rational(0));
    if (c_csv.empty()) {
        if (!state.empty()) state[0] = 1;
    } else {
        std::stringstream ss(c_csv);
        std::string token;
        std::size_t i = 0;
        while (std::getline(ss, token, ',')) {
            if (i >= state.size()) throw ValidationError("state vector too long");
            state[i++] = parse_rational(token);
        }
    }
    double dev = residual_invariance(H, default_noise(H, s.seed), state, trials);

    json report = report_shell(s, "oracle residual");
    json result;
    result["trials"] = trials;
    result["max_deviation"] = dev;
    report["result"] = result;
    emit(report);
    return kExitOk;
}

int run_export(Session& s, const std::string& which, const std::string& meas_token,
               const std::string& out_path) {
    const Case& c = s.the_case();
    std::ofstream out(out_path);
    if (!out) throw SyntaxError("cannot open output file: " + out_path);

    if (which == "network") {
        write_dot_network(c, out);
    } else if (which == "csm") {
        const auto built = build_assignment(c);
        const auto& cert = require_certificate(built);
        auto sets = all_critical_sets(c, cert);
        write_dot_csm(c, build_csm_graph(c, sets), out);
    } else if (which == "split") {
        if (meas_token.empty()) throw ValidationError("split export needs --measurement");
        const auto built = build_assignment(c);
        const auto& cert = require_certificate(built);
        int m = parse_measurement_token(c, meas_token);
        write_dot_split(c, split_tree(c, cert, m), out);
    } else {
        throw ValidationError("unknown export kind: " + which);
    }

    json report = report_shell(s, "export " + which);
    report["result"] = json{{"path", out_path}};
    emit(report);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph-theoretic observability and injection-attack analysis "
                 "for power-system state estimation"};
    app.require_subcommand(1);

    Session s;
    app.add_option("--case", s.case_path, "case file (JSON, or MATPOWER-style .m)");
    app.add_option("--seed", s.seed, "seed for generic susceptances and noise");
    app.add_option("--format", s.format, "output format: json or table")
        ->check(CLI::IsMember({"json", "table"}));

    if (const char* env = std::getenv("GRIDSIGHT_SEED")) s.seed = std::strtoull(env, nullptr, 0);

    auto* obs = app.add_subcommand("observability", "build the assignment spanning tree");
    obs->add_flag("--oracle", s.oracle, "attach the exact-rank cross-check");

    auto* crit = app.add_subcommand("critical-sets", "critical set of every tree measurement");
    crit->add_flag("--oracle", s.oracle, "attach rank-drop verification");

    auto* sparse = app.add_subcommand("sparsest-attack", "minimum-cardinality stealthy attack");
    std::string include_token, protected_path;
    sparse->add_option("--include", include_token, "measurement that must be attacked");
    sparse->add_option("--protected", protected_path, "JSON list of protected measurements");
    sparse->add_flag("--oracle", s.oracle, "attach algebraic confirmation");

    auto* defense = app.add_subcommand("defense", "measurement protection plans");
    bool defense_all = false;
    int tau = 0;
    defense->add_flag("--all", defense_all, "thwart every stealthy attack");
    defense->add_option("--tau", tau, "thwart attacks of cardinality below tau");
    defense->add_flag("--oracle", s.oracle, "attach exhaustive enumeration check");

    auto* verify = app.add_subcommand("verify-attack", "stealthiness of a measurement removal");
    std::string attack_csv;
    verify->add_option("--measurements", attack_csv, "comma-separated names or ids")->required();
    verify->add_flag("--oracle", s.oracle, "attach a = Hc construction and residual check");

    auto* oracle = app.add_subcommand("oracle", "exact linear-algebra primitives");
    oracle->require_subcommand(1);
    auto* orank = oracle->add_subcommand("rank", "exact rank of a row subset");
    std::string drop_csv, keep_csv;
    orank->add_option("--drop", drop_csv, "rows to remove");
    orank->add_option("--keep", keep_csv, "rows to keep (default: all)");
    auto* oreal = oracle->add_subcommand("realizable", "attack-support feasibility a = Hc");
    std::string realizable_csv;
    oreal->add_option("--measurements", realizable_csv, "support to realize")->required();
    auto* obrute = oracle->add_subcommand("brute-force", "sparsest realizable support");
    int max_card = 4;
    std::string brute_include, brute_protected;
    obrute->add_option("--max-card", max_card, "cardinality cap (<= 6)");
    obrute->add_option("--include", brute_include, "support must contain this measurement");
    obrute->add_option("--protected", brute_protected, "JSON list of excluded measurements");
    auto* oresid = oracle->add_subcommand("residual", "residual invariance of a = Hc");
    int trials = 100;
    std::string c_csv;
    oresid->add_option("--trials", trials, "noisy trials");
    oresid->add_option("--c", c_csv, "state direction as comma-separated rationals");

    auto* exp = app.add_subcommand("export", "DOT exports of analysis structures");
    std::string which, meas_token, out_path;
    exp->add_option("kind", which, "csm | network | split")->required();
    exp->add_option("--measurement", meas_token, "measurement for split export");
    exp->add_option("--out", out_path, "output path")->required();

    for (auto* sub : app.get_subcommands(nullptr)) {
        sub->fallthrough();
        for (auto* nested : sub->get_subcommands(nullptr)) nested->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << app.help() << "\n";
        return kExitUsage;
    }

    try {
        if (*obs) return run_observability(s);
        if (*crit) return run_critical_sets(s);
        if (*sparse) return run_sparsest_attack(s, include_token, protected_path);
        if (*defense) {
            if (defense_all == (tau > 0)) {
                std::cerr << "defense needs exactly one of --all or --tau N\n";
                return kExitUsage;
            }
            return run_defense(s, defense_all, tau);
        }
        if (*verify) return run_verify_attack(s, attack_csv);
        if (*oracle) {
            if (*orank) return run_oracle_rank(s, drop_csv, keep_csv);
            if (*oreal) return run_oracle_realizable(s, realizable_csv);
            if (*obrute) return run_oracle_brute_force(s, max_card, brute_include, brute_protected);
            if (*oresid) return run_oracle_residual(s, trials, c_csv);
        }
        if (*exp) return run_export(s, which, meas_token, out_path);
    } catch (const NotObservable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNegative;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitUsage;
}
