#include "vircomp/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "vircomp/errors.hpp"

namespace vircomp {

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::Free: return "free";
        case Mode::ConstantU: return "constant-u";
        case Mode::Ocp: return "ocp";
        case Mode::OcpWsc: return "ocp-wsc";
    }
    return "unknown";
}

void PortraitSpec::validate() const {
    if (!(va_max > 0.0) || !(vb_max > 0.0) || !std::isfinite(va_max) || !std::isfinite(vb_max)) {
        throw ValidationError("portrait window must be a positive rectangle in the non-negative quadrant");
    }
    if (arrow_resolution < 2) throw ValidationError("portrait.arrows must be >= 2");
    if (seed_resolution < 1) throw ValidationError("portrait.seeds must be >= 1");
    if (!(horizon > 0.0)) throw ValidationError("portrait.horizon must be > 0");
    if (!(dt > 0.0)) throw ValidationError("portrait.dt must be > 0");
}

// ---------------------------------------------------------------------------
// Document

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return std::string(line.substr(0, i));
    }
    return std::string(line);
}

bool valid_key(std::string_view k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
    }
    return true;
}

}  // namespace

ScenarioDocument ScenarioDocument::parse(std::string_view text) {
    ScenarioDocument doc;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string cleaned = strip_comment(raw);
        const std::string_view line = trim(cleaned);
        if (line.empty()) continue;
        if (line.front() == '[' && line.find('=') == std::string_view::npos) {
            if (line.back() != ']') throw ParseError("unterminated section header", line_no);
            const std::string_view name = trim(line.substr(1, line.size() - 2));
            if (!valid_key(name)) throw ParseError("invalid section name '" + std::string(name) + "'", line_no);
            section = std::string(name);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (!valid_key(key)) throw ParseError("invalid key '" + std::string(key) + "'", line_no);
        if (value.empty()) throw ParseError("missing value for '" + std::string(key) + "'", line_no);
        const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
        if (doc.entries_.count(full)) throw ParseError("duplicate key '" + full + "'", line_no);
        doc.entries_[full] = {std::string(value), line_no};
    }
    return doc;
}

void ScenarioDocument::apply_override(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ParseError("override '" + std::string(assignment) + "' must look like key=value", 0);
    }
    const std::string_view key = trim(assignment.substr(0, eq));
    const std::string_view value = trim(assignment.substr(eq + 1));
    if (!valid_key(key) || value.empty()) {
        throw ParseError("override '" + std::string(assignment) + "' must look like key=value", 0);
    }
    set(std::string(key), std::string(value));
}

void ScenarioDocument::set(const std::string& key, std::string value) {
    entries_[key] = {std::move(value), 0};
}

// ---------------------------------------------------------------------------
// Typed access

namespace {

class Reader {
public:
    explicit Reader(const ScenarioDocument& doc) : doc_(doc) {}

    [[nodiscard]] bool has(const std::string& key) const { return doc_.entries().count(key) > 0; }

    double number(const std::string& key) {
        const auto& e = entry(key);
        return to_number(key, e.value, e.line);
    }
    double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
    std::optional<double> optional_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    int integer_or(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        const double v = number(key);
        if (v != std::floor(v) || std::abs(v) > 1e9) {
            throw ParseError("'" + key + "' must be an integer", entry(key).line);
        }
        return static_cast<int>(v);
    }

    std::string text(const std::string& key) {
        std::string v = entry(key).value;
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
        return v;
    }
    std::string text_or(const std::string& key, std::string fallback) { return has(key) ? text(key) : fallback; }

    bool boolean_or(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const std::string v = text(key);
        if (v == "true") return true;
        if (v == "false") return false;
        throw ParseError("'" + key + "' must be true or false", entry(key).line);
    }

    std::vector<State> pairs(const std::string& key) {
        const auto& e = entry(key);
        std::string_view v = trim(e.value);
        if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
            throw ParseError("'" + key + "' must be a list like [[1, 1], [2, 8]]", e.line);
        }
        v = trim(v.substr(1, v.size() - 2));
        std::vector<State> out;
        while (!v.empty()) {
            if (v.front() != '[') throw ParseError("'" + key + "': expected '[' starting a pair", e.line);
            const auto close = v.find(']');
            if (close == std::string_view::npos) throw ParseError("'" + key + "': unterminated pair", e.line);
            const std::string_view inner = v.substr(1, close - 1);
            const auto comma = inner.find(',');
            if (comma == std::string_view::npos) throw ParseError("'" + key + "': pair needs two numbers", e.line);
            out.push_back({to_number(key, trim(inner.substr(0, comma)), e.line),
                           to_number(key, trim(inner.substr(comma + 1)), e.line)});
            v = trim(v.substr(close + 1));
            if (!v.empty()) {
                if (v.front() != ',') throw ParseError("'" + key + "': expected ',' between pairs", e.line);
                v = trim(v.substr(1));
            }
        }
        return out;
    }

    /// Keys that were never read.
    [[nodiscard]] std::vector<std::pair<std::string, int>> unused() const {
        std::vector<std::pair<std::string, int>> out;
        for (const auto& [k, e] : doc_.entries()) {
            if (!used_.count(k)) out.emplace_back(k, e.line);
        }
        return out;
    }

private:
    const ScenarioDocument::Entry& entry(const std::string& key) {
        const auto it = doc_.entries().find(key);
        if (it == doc_.entries().end()) throw ParseError("missing required key '" + key + "'", 0);
        used_.insert(key);
        return it->second;
    }

    static double to_number(const std::string& key, std::string_view s, int line) {
        double v = 0.0;
        const char* first = s.data();
        const char* last = s.data() + s.size();
        if (!s.empty() && *first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
            throw ParseError("'" + key + "': '" + std::string(s) + "' is not a finite number", line);
        }
        return v;
    }

    const ScenarioDocument& doc_;
    std::set<std::string> used_;
};

Mode parse_mode(const std::string& s) {
    if (s == "free") return Mode::Free;
    if (s == "constant-u") return Mode::ConstantU;
    if (s == "ocp") return Mode::Ocp;
    if (s == "ocp-wsc") return Mode::OcpWsc;
    throw ValidationError("mode must be one of free, constant-u, ocp, ocp-wsc (got '" + s + "')");
}

}  // namespace

Scenario build_scenario(const ScenarioDocument& doc) {
    Reader r(doc);
    Scenario sc;

    sc.schema = r.integer_or("schema", 0);
    if (sc.schema != 1) throw ValidationError("unsupported scenario schema " + std::to_string(sc.schema) + " (expected 1)");
    sc.name = r.text_or("name", "scenario");
    sc.mode = parse_mode(r.text("mode"));

    sc.phenotype = {r.number("phenotype.r_a"), r.number("phenotype.r_b"), r.number("phenotype.k_a"),
                    r.number("phenotype.k_b")};
    sc.phenotype.validate();

    if (r.has("efficacy.c_a") || r.has("efficacy.c_b") || sc.mode != Mode::Free) {
        sc.efficacy = Efficacy{r.number("efficacy.c_a"), r.number("efficacy.c_b")};
        sc.efficacy->validate();
    }

    sc.u_max = r.number_or("control.u_max", 1.0);
    if (!(sc.u_max > 0.0 && sc.u_max <= 1.0)) throw ValidationError("control.u_max must lie in (0, 1]");

    sc.constant_u = r.optional_number("control.u");
    if (sc.mode == Mode::ConstantU && !sc.constant_u) {
        throw ValidationError("mode constant-u requires control.u");
    }
    if (sc.mode != Mode::ConstantU && sc.constant_u) {
        throw ValidationError("control.u is only allowed with mode constant-u");
    }
    if (sc.constant_u && !(*sc.constant_u >= 0.0 && *sc.constant_u <= sc.u_max)) {
        throw ValidationError("control.u must lie in [0, u_max]");
    }

    sc.grid = {r.number_or("grid.t0", 0.0), r.number("grid.tf"), r.number("grid.dt")};
    sc.grid.validate();

    sc.initial_conditions = r.pairs("initial_conditions");
    if (sc.initial_conditions.empty()) throw ValidationError("initial_conditions must not be empty");
    for (const State& s : sc.initial_conditions) {
        if (s.v_a < 0.0 || s.v_b < 0.0) throw ValidationError("initial conditions must be non-negative");
    }

    sc.cost = CostWeights::for_phenotype(sc.phenotype);
    sc.cost.target_a = r.number_or("cost.target_a", sc.phenotype.k_a);
    sc.xi = r.optional_number("cost.xi");
    if (sc.mode == Mode::OcpWsc && !sc.xi) throw ValidationError("mode ocp-wsc requires cost.xi");
    if (sc.mode != Mode::OcpWsc && sc.xi) throw ValidationError("cost.xi is only allowed with mode ocp-wsc");
    if (sc.xi && !(*sc.xi > 0.0)) throw ValidationError("cost.xi must be > 0");
    sc.cost.validate();

    sc.method = parse_step_method(r.text_or("solver.method", "rk4"));
    sc.fbsm.method = sc.method;
    sc.fbsm.omega = r.number_or("solver.omega", sc.fbsm.omega);
    sc.fbsm.min_omega = r.number_or("solver.min_omega", sc.fbsm.min_omega);
    sc.fbsm.max_iter = r.integer_or("solver.max_iter", sc.fbsm.max_iter);
    sc.fbsm.tolerance = r.number_or("solver.tolerance", sc.fbsm.tolerance);
    sc.fbsm.spectral_scaling = r.boolean_or("solver.spectral_scaling", sc.fbsm.spectral_scaling);
    if (!(sc.fbsm.omega > 0.0 && sc.fbsm.omega <= 1.0)) throw ValidationError("solver.omega must lie in (0, 1]");
    if (!(sc.fbsm.min_omega > 0.0 && sc.fbsm.min_omega <= sc.fbsm.omega)) {
        throw ValidationError("solver.min_omega must lie in (0, omega]");
    }
    if (sc.fbsm.max_iter < 1) throw ValidationError("solver.max_iter must be >= 1");
    if (!(sc.fbsm.tolerance > 0.0)) throw ValidationError("solver.tolerance must be > 0");

    sc.penalty.mu0 = r.number_or("penalty.mu0", sc.penalty.mu0);
    sc.penalty.gamma = r.number_or("penalty.gamma", sc.penalty.gamma);
    sc.penalty.rounds = r.integer_or("penalty.rounds", sc.penalty.rounds);
    sc.penalty.ctol_factor = r.number_or("penalty.ctol_factor", sc.penalty.ctol_factor);
    if (!(sc.penalty.mu0 > 0.0) || !(sc.penalty.gamma > 1.0) || sc.penalty.rounds < 1 ||
        !(sc.penalty.ctol_factor > 0.0)) {
        throw ValidationError("penalty schedule needs mu0 > 0, gamma > 1, rounds >= 1, ctol_factor > 0");
    }

    sc.portrait.va_max = r.number_or("portrait.va_max", 1.2 * sc.phenotype.k_b);
    sc.portrait.vb_max = r.number_or("portrait.vb_max", 1.2 * sc.phenotype.k_b);
    sc.portrait.arrow_resolution = static_cast<std::size_t>(std::max(0, r.integer_or("portrait.arrows", 15)));
    sc.portrait.seed_resolution = static_cast<std::size_t>(std::max(0, r.integer_or("portrait.seeds", 5)));
    sc.portrait.horizon = r.number_or("portrait.horizon", sc.grid.tf - sc.grid.t0);
    sc.portrait.dt = r.number_or("portrait.dt", sc.grid.dt);
    sc.portrait.validate();

    const auto unused = r.unused();
    if (!unused.empty()) throw ParseError("unknown key '" + unused.front().first + "'", unused.front().second);
    return sc;
}

Scenario parse_scenario(std::string_view text, const std::vector<std::string>& overrides) {
    ScenarioDocument doc = ScenarioDocument::parse(text);
    for (const auto& o : overrides) doc.apply_override(o);
    return build_scenario(doc);
}

Scenario load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read scenario file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), overrides);
}

}  // namespace vircomp
