#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "pkmech/cli.hpp"

namespace pkmech::cli {

namespace {

std::vector<double> read_state(const Json& j) {
    std::vector<double> out;
    for (const Json& v : j) {
        if (!v.is_number()) throw ProblemError("initial condition entries must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

template <class T>
T read_number(const Json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number()) throw ProblemError(std::string("field '") + key + "' must be a number");
    return v.get<T>();
}

std::string read_string(const Json& obj, const char* key) {
    const Json& v = obj.at(key);
    if (!v.is_string()) throw ProblemError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

}  // namespace

ProblemFile parse_problem(const Json& doc) {
    if (!doc.is_object()) throw ProblemError("problem file must be a JSON object");
    ProblemFile p;
    if (!doc.contains("n")) throw ProblemError("missing field 'n'");
    if (!doc.at("n").is_number_integer()) throw ProblemError("field 'n' must be an integer");
    p.n = doc.at("n").get<int>();
    if (p.n < 1) throw ProblemError("n must be at least 1");

    if (!doc.contains("kind")) throw ProblemError("missing field 'kind'");
    p.kind = read_string(doc, "kind");
    if (p.kind != "lagrangian" && p.kind != "hamiltonian" && p.kind != "metric") {
        throw ProblemError("kind must be lagrangian, hamiltonian or metric");
    }
    if (p.kind != "metric") {
        if (!doc.contains("function")) throw ProblemError("missing field 'function' for kind " + p.kind);
        p.function = read_string(doc, "function");
    }

    if (doc.contains("metric")) {
        const Json& m = doc.at("metric");
        if (!m.is_object() || !m.contains("type")) throw ProblemError("metric needs a 'type'");
        const std::string type = read_string(m, "type");
        if (type == "model") {
            p.metric.type = MetricSpec::Type::Model;
        } else if (type == "potential") {
            p.metric.type = MetricSpec::Type::Potential;
            if (!m.contains("potential")) throw ProblemError("potential metric needs 'potential'");
            p.metric.potential = read_string(m, "potential");
        } else if (type == "matrix") {
            p.metric.type = MetricSpec::Type::Matrix;
            if (!m.contains("matrix") || !m.at("matrix").is_array()) throw ProblemError("matrix metric needs 'matrix'");
            const auto dim = static_cast<std::size_t>(2 * p.n);
            const Json& rows = m.at("matrix");
            if (rows.size() != dim) throw ProblemError("metric matrix must be 2n x 2n");
            for (const Json& row : rows) {
                if (!row.is_array() || row.size() != dim) throw ProblemError("metric matrix must be 2n x 2n");
                std::vector<std::string> r;
                for (const Json& e : row) {
                    if (e.is_string()) {
                        r.push_back(e.get<std::string>());
                    } else if (e.is_number()) {
                        r.push_back(format_real(e.get<double>()));
                    } else {
                        throw ProblemError("metric entries must be strings or numbers");
                    }
                }
                p.metric.matrix.push_back(std::move(r));
            }
        } else {
            throw ProblemError("unknown metric type '" + type + "'");
        }
    }

    if (doc.contains("initial_conditions")) {
        const Json& ic = doc.at("initial_conditions");
        if (!ic.is_array()) throw ProblemError("initial_conditions must be an array");
        if (!ic.empty() && ic.front().is_array()) {
            for (const Json& s : ic) p.initial_conditions.push_back(read_state(s));
        } else if (!ic.empty()) {
            p.initial_conditions.push_back(read_state(ic));
        }
        for (const auto& s : p.initial_conditions) {
            if (s.size() != static_cast<std::size_t>(2 * p.n)) {
                throw ProblemError("each initial condition needs 2n = " + std::to_string(2 * p.n) + " entries");
            }
        }
    }

    if (doc.contains("integrator")) {
        const Json& in = doc.at("integrator");
        if (!in.is_object()) throw ProblemError("integrator must be an object");
        if (in.contains("scheme")) p.integrator.scheme = read_string(in, "scheme");
        p.integrator.t0 = read_number(in, "t0", p.integrator.t0);
        p.integrator.t1 = read_number(in, "t1", p.integrator.t1);
        p.integrator.h = read_number(in, "h", p.integrator.h);
        if (!(p.integrator.h > 0.0)) throw ProblemError("integrator step h must be positive");
        if (!(p.integrator.t1 > p.integrator.t0)) throw ProblemError("integrator needs t1 > t0");
    }

    if (doc.contains("outputs")) {
        const Json& out = doc.at("outputs");
        if (!out.is_object()) throw ProblemError("outputs must be an object");
        if (out.contains("trajectory")) p.trajectory_output = read_string(out, "trajectory");
        if (out.contains("report")) p.report_output = read_string(out, "report");
    }

    if (doc.contains("seed")) {
        const Json& s = doc.at("seed");
        if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0))
            throw ProblemError("seed must be a non-negative integer");
        p.seed = doc.at("seed").get<std::uint64_t>();
    }
    p.tolerance = read_number(doc, "tolerance", p.tolerance);
    if (!(p.tolerance > 0.0)) throw ProblemError("tolerance must be positive");
    p.trials = read_number(doc, "trials", p.trials);
    if (p.trials < 1) throw ProblemError("trials must be positive");
    return p;
}

ProblemFile load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ProblemError("cannot open problem file " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ProblemError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return parse_problem(doc);
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

std::string format_real(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace pkmech::cli
