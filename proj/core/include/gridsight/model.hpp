#ifndef GRIDSIGHT_MODEL_HPP
#define GRIDSIGHT_MODEL_HPP

#include <gridsight/rational.hpp>

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridsight {

struct Bus {
    int id = 0;
    std::string name;  // empty = unnamed
};

struct Line {
    int id = 0;
    int from = 0;
    int to = 0;
    std::optional<Rational> susceptance;  // per unit, exact
};

enum class MeasurementKind { Flow, Injection };

struct Measurement {
    int id = 0;
    MeasurementKind kind = MeasurementKind::Flow;
    int target = 0;  // line id for Flow, bus id for Injection
};

// A network plus its measurement placement. Immutable after construction;
// all analysis modules take it by const reference.
struct Case {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Measurement> measurements;
    int reference_bus = 1;

    const Line& line(int id) const;
    const Measurement& measurement(int id) const;
    const Bus& bus(int id) const;
    bool has_measurement(int id) const;

    // Lines incident to a bus, ascending line id.
    std::vector<int> lines_at(int bus_id) const;
    // Flow measurement sitting on a line, if any.
    std::optional<int> flow_on(int line_id) const;
    // Injection measurement at a bus, if any.
    std::optional<int> injection_at(int bus_id) const;

    // "F<line>" for flows, "I<bus>" for injections.
    std::string measurement_name(int id) const;
    std::optional<int> measurement_by_name(const std::string& name) const;
};

struct SyntaxError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationReport {
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
};

enum class CaseFormat { Json, Matpower };

Case parse_case(const std::string& input, CaseFormat format);
Case parse_case_file(const std::string& path);  // .m -> Matpower, else Json

// Canonical serialization: schema field order, entities sorted by id,
// susceptances reduced. parse(serialize(c)) == c.
std::string serialize_case(const Case& c);
std::string case_digest(const Case& c);

ValidationReport validate_case(const Case& c);

bool operator==(const Case& a, const Case& b);

}  // namespace gridsight

#endif
