#include "trapflow/config.hpp"

#include "trapflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace trapflow {

using nlohmann::json;

FluxModel ModelSpec::build() const {
    if (preset == "TF1") return FluxModel::tf1(q, P1, P2);
    if (!preset.empty()) throw ConfigError("unknown model preset '" + preset + "'");
    return FluxModel::from_family(q, C, P1, P2, family);
}

bool ModelSpec::operator==(const ModelSpec& o) const {
    const auto& f = family;
    const auto& g = o.family;
    return preset == o.preset && q == o.q && C == o.C && P1 == o.P1 && P2 == o.P2 &&
           f.alpha == g.alpha && f.beta == g.beta && f.a == g.a && f.b == g.b && f.K == g.K;
}

std::function<double(double)> InitialSpec::function() const {
    switch (kind) {
        case Kind::constant: {
            const double v = value;
            return [v](double) { return v; };
        }
        case Kind::riemann: {
            const double l = ul;
            const double r = ur;
            return [l, r](double x) { return x < 0.0 ? l : r; };
        }
        case Kind::indicator: {
            const double lo = a;
            const double hi = b;
            const double v = value;
            return [lo, hi, v](double x) { return x >= lo && x <= hi ? v : 0.0; };
        }
        case Kind::table: {
            const auto x = xs;
            const auto u = us;
            return [x, u](double p) {
                if (p <= x.front()) return u.front();
                if (p >= x.back()) return u.back();
                const auto it = std::upper_bound(x.begin(), x.end(), p);
                const auto k = static_cast<std::size_t>(it - x.begin());
                const double t = (p - x[k - 1]) / (x[k] - x[k - 1]);
                return (1.0 - t) * u[k - 1] + t * u[k];
            };
        }
    }
    return {};
}

BoundaryCondition parse_boundary(const std::string& text) {
    if (text == "outflow") return BoundaryCondition::outflow();
    if (text == "zero_flux" || text == "zero-flux") return BoundaryCondition::zero_flux();
    if (text.rfind("dirichlet:", 0) == 0) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(text.substr(10), &pos);
            if (pos == text.size() - 10) return BoundaryCondition::dirichlet(v);
        } catch (const std::exception&) {
        }
    }
    throw ConfigError("unknown boundary condition '" + text +
                      "' (expected outflow, zero_flux or dirichlet:<value>)");
}

std::string to_string(const BoundaryCondition& bc) {
    switch (bc.kind) {
        case BoundaryCondition::Kind::outflow: return "outflow";
        case BoundaryCondition::Kind::zero_flux: return "zero_flux";
        case BoundaryCondition::Kind::dirichlet: {
            std::ostringstream os;
            os.precision(17);
            os << "dirichlet:" << bc.value;
            return os.str();
        }
    }
    return "?";
}

std::pair<std::vector<double>, std::vector<double>> read_xu_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::vector<double> xs, us;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected x,u");
        try {
            const double x = std::stod(line.substr(0, comma));
            const double u = std::stod(line.substr(comma + 1));
            xs.push_back(x);
            us.push_back(u);
        } catch (const std::exception&) {
            if (lineno == 1) continue;  // header
            throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed number");
        }
    }
    if (xs.size() < 2) throw ConfigError(path + ": need at least two samples");
    if (!std::is_sorted(xs.begin(), xs.end())) throw ConfigError(path + ": x must be increasing");
    return {xs, us};
}

namespace {

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

// Reads optional typed fields, collecting type errors instead of throwing.
class Reader {
public:
    explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

    template <class T>
    void get(const json& obj, const char* key, T& out, const std::string& where) {
        if (!obj.contains(key)) return;
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            errors_.push_back(where + key + ": wrong type");
        }
    }

private:
    std::vector<std::string>& errors_;
};

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where,
                std::vector<std::string>& errors) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
            errors.push_back(where + it.key() + ": unknown key");
    }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        std::ostringstream os;
        os << "parse error at line " << line << ", column " << col << ": " << e.what();
        throw ConfigError(os.str());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    std::vector<std::string> errors;
    Reader rd(errors);
    RunConfig cfg;
    check_keys(doc,
               {"model", "grid", "mode", "interface", "eps", "eta", "cfl", "c_dt", "boundary", "initial",
                "t_end", "snapshots", "output", "seed"},
               "", errors);

    if (doc.contains("model")) {
        const json& m = doc["model"];
        if (!m.is_object()) {
            errors.push_back("model: expected an object");
        } else {
            check_keys(m, {"preset", "q", "C", "P1", "P2", "family"}, "model.", errors);
            cfg.model.preset = m.contains("preset") ? "" : (m.contains("family") ? "" : "TF1");
            rd.get(m, "preset", cfg.model.preset, "model.");
            rd.get(m, "q", cfg.model.q, "model.");
            rd.get(m, "C", cfg.model.C, "model.");
            rd.get(m, "P1", cfg.model.P1, "model.");
            rd.get(m, "P2", cfg.model.P2, "model.");
            if (m.contains("family")) {
                const json& f = m["family"];
                check_keys(f, {"alpha", "beta", "a", "b", "K"}, "model.family.", errors);
                rd.get(f, "alpha", cfg.model.family.alpha, "model.family.");
                rd.get(f, "beta", cfg.model.family.beta, "model.family.");
                rd.get(f, "a", cfg.model.family.a, "model.family.");
                rd.get(f, "b", cfg.model.family.b, "model.family.");
                rd.get(f, "K", cfg.model.family.K, "model.family.");
            }
        }
    }
    if (doc.contains("grid")) {
        const json& g = doc["grid"];
        check_keys(g, {"x_min", "x_max", "n_left", "n_right"}, "grid.", errors);
        rd.get(g, "x_min", cfg.grid.x_min, "grid.");
        rd.get(g, "x_max", cfg.grid.x_max, "grid.");
        rd.get(g, "n_left", cfg.grid.n_left, "grid.");
        rd.get(g, "n_right", cfg.grid.n_right, "grid.");
    }
    auto parse_with = [&](const char* key, auto fn) {
        if (!doc.contains(key)) return;
        try {
            fn(doc.at(key).get<std::string>());
        } catch (const ConfigError& e) {
            errors.push_back(std::string(key) + ": " + e.what());
        } catch (const json::exception&) {
            errors.push_back(std::string(key) + ": expected a string");
        }
    };
    parse_with("mode", [&](const std::string& s) { cfg.mode = Coupling::parse(s); });
    parse_with("interface", [&](const std::string& s) { cfg.interface = InterfaceMode::parse(s); });
    if (doc.contains("eps")) {
        double e = 0.0;
        rd.get(doc, "eps", e, "");
        cfg.eps = e;
    }
    if (doc.contains("eta")) {
        double e = 0.0;
        rd.get(doc, "eta", e, "");
        cfg.eta = e;
    }
    rd.get(doc, "cfl", cfg.cfl, "");
    rd.get(doc, "c_dt", cfg.c_dt, "");
    if (doc.contains("boundary")) {
        const json& b = doc["boundary"];
        check_keys(b, {"left", "right"}, "boundary.", errors);
        for (const char* side : {"left", "right"}) {
            if (!b.contains(side)) continue;
            try {
                auto bc = parse_boundary(b.at(side).get<std::string>());
                (std::string(side) == "left" ? cfg.bc.left : cfg.bc.right) = bc;
            } catch (const ConfigError& e) {
                errors.push_back(std::string("boundary.") + side + ": " + e.what());
            } catch (const json::exception&) {
                errors.push_back(std::string("boundary.") + side + ": expected a string");
            }
        }
    }
    if (doc.contains("initial")) {
        const json& i = doc["initial"];
        check_keys(i, {"type", "ul", "ur", "a", "b", "value", "path", "x", "u"}, "initial.", errors);
        std::string type = "riemann";
        rd.get(i, "type", type, "initial.");
        auto& s = cfg.initial;
        if (type == "riemann") {
            s.kind = InitialSpec::Kind::riemann;
        } else if (type == "constant") {
            s.kind = InitialSpec::Kind::constant;
        } else if (type == "indicator") {
            s.kind = InitialSpec::Kind::indicator;
        } else if (type == "table") {
            s.kind = InitialSpec::Kind::table;
        } else {
            errors.push_back("initial.type: unknown type '" + type + "'");
        }
        rd.get(i, "ul", s.ul, "initial.");
        rd.get(i, "ur", s.ur, "initial.");
        rd.get(i, "a", s.a, "initial.");
        rd.get(i, "b", s.b, "initial.");
        rd.get(i, "value", s.value, "initial.");
        rd.get(i, "path", s.path, "initial.");
        rd.get(i, "x", s.xs, "initial.");
        rd.get(i, "u", s.us, "initial.");
        if (s.kind == InitialSpec::Kind::table && s.xs.empty()) {
            if (s.path.empty()) {
                errors.push_back("initial.path: table data needs a path or inline x/u arrays");
            } else {
                try {
                    std::filesystem::path p(s.path);
                    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
                    auto [x, u] = read_xu_csv(p.string());
                    s.xs = std::move(x);
                    s.us = std::move(u);
                } catch (const ConfigError& e) {
                    errors.push_back(std::string("initial.path: ") + e.what());
                }
            }
        }
    }
    rd.get(doc, "t_end", cfg.t_end, "");
    rd.get(doc, "snapshots", cfg.snapshots, "");
    rd.get(doc, "output", cfg.output, "");
    rd.get(doc, "seed", cfg.seed, "");

    // Semantic checks.
    const auto& m = cfg.model;
    if (!(m.q >= 0.0)) errors.push_back("model.q must be >= 0");
    if (!(m.C > 0.0)) errors.push_back("model.C must be > 0");
    if (!(m.P1 < m.P2)) errors.push_back("model: P1 must be < P2");
    if (cfg.eps) {
        if (!(*cfg.eps > 0.0)) errors.push_back("eps must be > 0");
        if (!(*cfg.eps < m.P2 - m.P1)) errors.push_back("eps must be < P2−P1");
    }
    if (cfg.eta && !(*cfg.eta > 0.0)) errors.push_back("eta must be > 0");
    if (cfg.grid.n_left <= 0 || cfg.grid.n_right <= 0) errors.push_back("grid: cell counts must be positive");
    if (!(cfg.grid.x_min < 0.0 && cfg.grid.x_max > 0.0)) errors.push_back("grid: need x_min < 0 < x_max");
    else if (cfg.grid.n_left > 0 && cfg.grid.n_right > 0) {
        try {
            (void)cfg.grid.build();
        } catch (const ConfigError& e) {
            errors.push_back(std::string("grid: ") + e.what());
        }
    }
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) errors.push_back("cfl must lie in (0, 1]");
    if (!(cfg.c_dt > 0.0)) errors.push_back("c_dt must be > 0");
    if (cfg.mode.kind == Coupling::Kind::prescribed_flux && !(cfg.mode.lambda >= 0.0 && cfg.mode.lambda <= m.q))
        errors.push_back("mode: prescribed flux must lie in [0, q]");
    if (cfg.interface.kind == InterfaceMode::Kind::prescribed_flux &&
        !(cfg.interface.value >= 0.0 && cfg.interface.value <= m.q))
        errors.push_back("interface: prescribed flux must lie in [0, q]");
    for (const BoundaryCondition* bc : {&cfg.bc.left, &cfg.bc.right})
        if (bc->kind == BoundaryCondition::Kind::dirichlet && !(bc->value >= 0.0 && bc->value <= 1.0))
            errors.push_back("boundary: Dirichlet value must lie in [0, 1]");
    const auto& s = cfg.initial;
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (s.kind == InitialSpec::Kind::riemann && !(in01(s.ul) && in01(s.ur)))
        errors.push_back("initial: Riemann states must lie in [0, 1]");
    if ((s.kind == InitialSpec::Kind::indicator || s.kind == InitialSpec::Kind::constant) && !in01(s.value))
        errors.push_back("initial.value must lie in [0, 1]");
    if (s.kind == InitialSpec::Kind::indicator && !(s.a < s.b)) errors.push_back("initial: need a < b");
    if (s.kind == InitialSpec::Kind::table) {
        if (s.xs.size() != s.us.size()) errors.push_back("initial: x and u differ in length");
        if (!std::all_of(s.us.begin(), s.us.end(), in01)) errors.push_back("initial: table values must lie in [0, 1]");
        if (!std::is_sorted(s.xs.begin(), s.xs.end())) errors.push_back("initial: table x must be increasing");
    }
    if (!(cfg.t_end >= 0.0)) errors.push_back("t_end must be >= 0");
    for (double t : cfg.snapshots)
        if (!(t >= 0.0 && t <= cfg.t_end)) errors.push_back("snapshots must lie in [0, t_end]");
    if (cfg.output.empty()) errors.push_back("output must not be empty");
    if (errors.empty() && (m.preset.empty() || m.preset == "TF1")) {
        try {
            (void)m.build();
        } catch (const std::exception& e) {
            errors.push_back(std::string("model: ") + e.what());
        }
    } else if (!m.preset.empty() && m.preset != "TF1") {
        errors.push_back("model.preset: unknown preset '" + m.preset + "'");
    }

    if (!errors.empty()) {
        std::ostringstream os;
        os << "invalid config:";
        for (const auto& e : errors) os << "\n  - " << e;
        throw ConfigError(os.str());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

json to_json(const RunConfig& cfg) {
    json j;
    const auto& m = cfg.model;
    j["model"] = {{"preset", m.preset}, {"q", m.q}, {"C", m.C}, {"P1", m.P1}, {"P2", m.P2}};
    if (m.preset.empty())
        j["model"]["family"] = {{"alpha", m.family.alpha}, {"beta", m.family.beta},
                                {"a", m.family.a},         {"b", m.family.b},
                                {"K", m.family.K}};
    j["grid"] = {{"x_min", cfg.grid.x_min},
                 {"x_max", cfg.grid.x_max},
                 {"n_left", cfg.grid.n_left},
                 {"n_right", cfg.grid.n_right}};
    j["mode"] = cfg.mode.to_string();
    j["interface"] = cfg.interface.to_string();
    if (cfg.eps) j["eps"] = *cfg.eps;
    if (cfg.eta) j["eta"] = *cfg.eta;
    j["cfl"] = cfg.cfl;
    j["c_dt"] = cfg.c_dt;
    j["boundary"] = {{"left", to_string(cfg.bc.left)}, {"right", to_string(cfg.bc.right)}};
    const auto& s = cfg.initial;
    switch (s.kind) {
        case InitialSpec::Kind::constant: j["initial"] = {{"type", "constant"}, {"value", s.value}}; break;
        case InitialSpec::Kind::riemann: j["initial"] = {{"type", "riemann"}, {"ul", s.ul}, {"ur", s.ur}}; break;
        case InitialSpec::Kind::indicator:
            j["initial"] = {{"type", "indicator"}, {"a", s.a}, {"b", s.b}, {"value", s.value}};
            break;
        case InitialSpec::Kind::table:
            j["initial"] = {{"type", "table"}, {"x", s.xs}, {"u", s.us}};
            if (!s.path.empty()) j["initial"]["path"] = s.path;
            break;
    }
    j["t_end"] = cfg.t_end;
    j["snapshots"] = cfg.snapshots;
    j["output"] = cfg.output;
    j["seed"] = cfg.seed;
    return j;
}

std::string serialize_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

}  // namespace trapflow
