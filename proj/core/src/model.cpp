#include <gridsight/model.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>

using json = nlohmann::ordered_json;

namespace gridsight {

const Line& Case::line(int id) const {
    for (const auto& l : lines)
        if (l.id == id) return l;
    throw std::out_of_range("no line with id " + std::to_string(id));
}

const Measurement& Case::measurement(int id) const {
    for (const auto& m : measurements)
        if (m.id == id) return m;
    throw std::out_of_range("no measurement with id " + std::to_string(id));
}

const Bus& Case::bus(int id) const {
    for (const auto& b : buses)
        if (b.id == id) return b;
    throw std::out_of_range("no bus with id " + std::to_string(id));
}

bool Case::has_measurement(int id) const {
    return std::any_of(measurements.begin(), measurements.end(),
                       [id](const Measurement& m) { return m.id == id; });
}

std::vector<int> Case::lines_at(int bus_id) const {
    std::vector<int> out;
    for (const auto& l : lines)
        if (l.from == bus_id || l.to == bus_id) out.push_back(l.id);
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<int> Case::flow_on(int line_id) const {
    for (const auto& m : measurements)
        if (m.kind == MeasurementKind::Flow && m.target == line_id) return m.id;
    return std::nullopt;
}

std::optional<int> Case::injection_at(int bus_id) const {
    for (const auto& m : measurements)
        if (m.kind == MeasurementKind::Injection && m.target == bus_id) return m.id;
    return std::nullopt;
}

std::string Case::measurement_name(int id) const {
    const auto& m = measurement(id);
    return (m.kind == MeasurementKind::Flow ? "F" : "I") + std::to_string(m.target);
}

std::optional<int> Case::measurement_by_name(const std::string& name) const {
    if (name.size() < 2 || (name[0] != 'F' && name[0] != 'I')) return std::nullopt;
    int target;
    try {
        target = std::stoi(name.substr(1));
    } catch (const std::exception&) {
        return std::nullopt;
    }
    MeasurementKind kind = name[0] == 'F' ? MeasurementKind::Flow : MeasurementKind::Injection;
    for (const auto& m : measurements)
        if (m.kind == kind && m.target == target) return m.id;
    return std::nullopt;
}

bool operator==(const Case& a, const Case& b) {
    return serialize_case(a) == serialize_case(b);
}

namespace {

int require_int(const json& obj, const char* key, const char* where) {
    if (!obj.contains(key))
        throw SchemaError(std::string(where) + ": missing field '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number_integer())
        throw SchemaError(std::string(where) + ": field '" + key + "' must be an integer");
    return v.get<int>();
}

Case parse_json_case(const std::string& input) {
    json doc;
    try {
        doc = json::parse(input);
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw SchemaError("top level must be an object");
    for (const char* key : {"buses", "lines", "measurements"})
        if (!doc.contains(key) || !doc.at(key).is_array())
            throw SchemaError(std::string("missing or non-array field '") + key + "'");

    Case c;
    for (const auto& jb : doc.at("buses")) {
        Bus b;
        b.id = require_int(jb, "id", "bus");
        if (jb.contains("name")) {
            if (!jb.at("name").is_string())
                throw SchemaError("bus name must be a string");
            b.name = jb.at("name").get<std::string>();
        }
        c.buses.push_back(std::move(b));
    }
    for (const auto& jl : doc.at("lines")) {
        Line l;
        l.id = require_int(jl, "id", "line");
        l.from = require_int(jl, "from", "line");
        l.to = require_int(jl, "to", "line");
        if (jl.contains("susceptance")) {
            if (!jl.at("susceptance").is_string())
                throw SchemaError("line susceptance must be a \"p/q\" string");
            try {
                l.susceptance = parse_rational(jl.at("susceptance").get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw SchemaError(std::string("line susceptance: ") + e.what());
            }
        }
        c.lines.push_back(std::move(l));
    }
    for (const auto& jm : doc.at("measurements")) {
        Measurement m;
        m.id = require_int(jm, "id", "measurement");
        if (!jm.contains("kind") || !jm.at("kind").is_string())
            throw SchemaError("measurement: missing field 'kind'");
        std::string kind = jm.at("kind").get<std::string>();
        if (kind == "flow")
            m.kind = MeasurementKind::Flow;
        else if (kind == "injection")
            m.kind = MeasurementKind::Injection;
        else
            throw SchemaError("measurement kind must be 'flow' or 'injection', got '" + kind + "'");
        m.target = require_int(jm, "target", "measurement");
        c.measurements.push_back(m);
    }
    if (doc.contains("reference_bus"))
        c.reference_bus = require_int(doc, "reference_bus", "case");
    else
        c.reference_bus = 1;
    return c;
}

// Pulls the numeric rows out of "mpc.<section> = [ ... ];".
std::vector<std::vector<std::string>> matpower_section(const std::string& text,
                                                       const std::string& section) {
    auto pos = text.find("mpc." + section);
    if (pos == std::string::npos)
        throw SchemaError("MATPOWER input: missing section mpc." + section);
    auto open = text.find('[', pos);
    auto close = text.find(']', open);
    if (open == std::string::npos || close == std::string::npos)
        throw SyntaxError("MATPOWER input: unterminated mpc." + section + " matrix");
    std::string body = text.substr(open + 1, close - open - 1);
    std::vector<std::vector<std::string>> rows;
    std::istringstream ss(body);
    std::string row;
    while (std::getline(ss, row, ';')) {
        // strip % comments
        auto cm = row.find('%');
        if (cm != std::string::npos) row = row.substr(0, cm);
        std::istringstream rs(row);
        std::vector<std::string> fields;
        std::string tok;
        while (rs >> tok) fields.push_back(tok);
        if (!fields.empty()) rows.push_back(std::move(fields));
    }
    return rows;
}

Case parse_matpower_case(const std::string& input) {
    Case c;
    for (const auto& row : matpower_section(input, "bus")) {
        Bus b;
        try {
            b.id = std::stoi(row.at(0));
        } catch (const std::exception&) {
            throw SyntaxError("MATPOWER bus row: bad bus id '" + row.at(0) + "'");
        }
        c.buses.push_back(b);
    }
    int next_id = 1;
    for (const auto& row : matpower_section(input, "branch")) {
        if (row.size() < 4)
            throw SchemaError("MATPOWER branch row needs at least fbus, tbus, r, x");
        Line l;
        l.id = next_id++;
        try {
            l.from = std::stoi(row[0]);
            l.to = std::stoi(row[1]);
        } catch (const std::exception&) {
            throw SyntaxError("MATPOWER branch row: bad endpoint");
        }
        Rational x = parse_rational(row[3]);
        if (sgn(x) == 0)
            throw SchemaError("MATPOWER branch with zero reactance");
        l.susceptance = 1 / x;
        c.lines.push_back(std::move(l));
    }
    c.reference_bus = 1;
    return c;
}

}  // namespace

Case parse_case(const std::string& input, CaseFormat format) {
    Case c = format == CaseFormat::Json ? parse_json_case(input) : parse_matpower_case(input);
    ValidationReport report = validate_case(c);
    if (!report.ok())
        throw ValidationError(report.problems.front());
    return c;
}

Case parse_case_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SyntaxError("cannot open case file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    CaseFormat fmt = path.size() > 2 && path.substr(path.size() - 2) == ".m"
                         ? CaseFormat::Matpower
                         : CaseFormat::Json;
    return parse_case(buf.str(), fmt);
}

std::string serialize_case(const Case& c) {
    Case sorted = c;
    std::sort(sorted.buses.begin(), sorted.buses.end(),
              [](const Bus& a, const Bus& b) { return a.id < b.id; });
    std::sort(sorted.lines.begin(), sorted.lines.end(),
              [](const Line& a, const Line& b) { return a.id < b.id; });
    std::sort(sorted.measurements.begin(), sorted.measurements.end(),
              [](const Measurement& a, const Measurement& b) { return a.id < b.id; });

    json doc;
    doc["buses"] = json::array();
    for (const auto& b : sorted.buses) {
        json jb;
        jb["id"] = b.id;
        if (!b.name.empty()) jb["name"] = b.name;
        doc["buses"].push_back(jb);
    }
    doc["lines"] = json::array();
    for (const auto& l : sorted.lines) {
        json jl;
        jl["id"] = l.id;
        jl["from"] = l.from;
        jl["to"] = l.to;
        if (l.susceptance) jl["susceptance"] = to_string(*l.susceptance);
        doc["lines"].push_back(jl);
    }
    doc["measurements"] = json::array();
    for (const auto& m : sorted.measurements) {
        json jm;
        jm["id"] = m.id;
        jm["kind"] = m.kind == MeasurementKind::Flow ? "flow" : "injection";
        jm["target"] = m.target;
        doc["measurements"].push_back(jm);
    }
    doc["reference_bus"] = c.reference_bus;
    return doc.dump(2) + "\n";
}

std::string case_digest(const Case& c) {
    return fnv1a_hex(serialize_case(c));
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

}  // namespace

ValidationReport validate_case(const Case& c) {
    ValidationReport r;
    auto add = [&r](const std::string& p) { r.problems.push_back(p); };

    std::set<int> bus_ids;
    for (const auto& b : c.buses) {
        if (b.id <= 0) add("bus id must be positive: " + std::to_string(b.id));
        if (!bus_ids.insert(b.id).second) add("duplicate bus id " + std::to_string(b.id));
    }
    const int n = static_cast<int>(c.buses.size());
    if (n == 0) {
        add("case has no buses");
        return r;
    }
    for (int i = 1; i <= n; ++i)
        if (!bus_ids.count(i)) {
            add("bus ids not contiguous 1.." + std::to_string(n) + ": missing " +
                std::to_string(i));
            break;
        }

    std::set<int> line_ids;
    std::set<std::pair<int, int>> endpoints;
    for (const auto& l : c.lines) {
        if (l.id <= 0) add("line id must be positive: " + std::to_string(l.id));
        if (!line_ids.insert(l.id).second) add("duplicate line id " + std::to_string(l.id));
        if (l.from == l.to)
            add("line " + std::to_string(l.id) + " is a self-loop at bus " +
                std::to_string(l.from));
        if (!bus_ids.count(l.from) || !bus_ids.count(l.to))
            add("line " + std::to_string(l.id) + " references a missing bus");
        auto pair = std::minmax(l.from, l.to);
        if (!endpoints.insert({pair.first, pair.second}).second)
            add("parallel line " + std::to_string(l.id) + " between buses " +
                std::to_string(pair.first) + " and " + std::to_string(pair.second));
        if (l.susceptance && sgn(*l.susceptance) == 0)
            add("line " + std::to_string(l.id) + " has zero susceptance");
    }

    std::set<int> meas_ids;
    std::set<int> flow_lines;
    std::set<int> injection_buses;
    for (const auto& m : c.measurements) {
        if (m.id <= 0) add("measurement id must be positive: " + std::to_string(m.id));
        if (!meas_ids.insert(m.id).second)
            add("duplicate measurement id " + std::to_string(m.id));
        if (m.kind == MeasurementKind::Flow) {
            if (!line_ids.count(m.target))
                add("measurement " + std::to_string(m.id) + " references missing line " +
                    std::to_string(m.target));
            else if (!flow_lines.insert(m.target).second)
                add("duplicate flow measurement on line " + std::to_string(m.target));
        } else {
            if (!bus_ids.count(m.target))
                add("measurement " + std::to_string(m.id) + " references missing bus " +
                    std::to_string(m.target));
            else if (!injection_buses.insert(m.target).second)
                add("duplicate injection measurement at bus " + std::to_string(m.target));
        }
    }

    if (!bus_ids.count(c.reference_bus))
        add("reference bus " + std::to_string(c.reference_bus) + " does not exist");

    // connectivity over valid lines only
    if (r.problems.empty()) {
        UnionFind uf(n + 1);
        for (const auto& l : c.lines) uf.unite(l.from, l.to);
        for (int i = 2; i <= n; ++i)
            if (uf.find(i) != uf.find(1)) {
                add("graph not connected");
                break;
            }
    }
    return r;
}

}  // namespace gridsight
