#include "pflab/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "pflab/io_util.hpp"

namespace pflab {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
    }
    return out;
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value '" + s + "' for key '" + key + "'");
    }
}

int parse_int(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value '" + s + "' for key '" + key + "'");
    }
}

struct Coefficient {
    ScalarFn value, d1, d2;
    bool constant = false;
    double constant_value = 1.0;
};

// grammar: one | const:c | poly:c0,c1,... | exp:a,b  (a * e^{b x})
Coefficient parse_coefficient(const std::string& desc) {
    Coefficient c;
    if (desc == "one" || desc == "const:1") {
        c.value = [](double) { return 1.0; };
        c.d1 = [](double) { return 0.0; };
        c.d2 = [](double) { return 0.0; };
        c.constant = true;
        c.constant_value = 1.0;
        return c;
    }
    const auto colon = desc.find(':');
    if (colon == std::string::npos) {
        throw ConfigError("bad coefficient descriptor '" + desc + "'");
    }
    const std::string head = desc.substr(0, colon);
    const std::string body = desc.substr(colon + 1);
    if (head == "const") {
        const double v = parse_double(body, desc);
        c.value = [v](double) { return v; };
        c.d1 = [](double) { return 0.0; };
        c.d2 = [](double) { return 0.0; };
        c.constant = true;
        c.constant_value = v;
        return c;
    }
    if (head == "poly") {
        const std::vector<double> coef = parse_double_list(body);
        if (coef.empty()) throw ConfigError("empty polynomial in '" + desc + "'");
        auto horner = [](const std::vector<double>& cs, double x) {
            double acc = 0.0;
            for (auto it = cs.rbegin(); it != cs.rend(); ++it) acc = acc * x + *it;
            return acc;
        };
        std::vector<double> c1, c2;
        for (std::size_t k = 1; k < coef.size(); ++k) c1.push_back(coef[k] * k);
        for (std::size_t k = 1; k < c1.size(); ++k) c2.push_back(c1[k] * k);
        c.value = [coef, horner](double x) { return horner(coef, x); };
        c.d1 = [c1, horner](double x) { return c1.empty() ? 0.0 : horner(c1, x); };
        c.d2 = [c2, horner](double x) { return c2.empty() ? 0.0 : horner(c2, x); };
        c.constant = coef.size() == 1;
        c.constant_value = coef[0];
        return c;
    }
    if (head == "exp") {
        const std::vector<double> ab = parse_double_list(body);
        if (ab.size() != 2) throw ConfigError("exp descriptor needs exactly a,b in '" + desc + "'");
        const double a = ab[0], b = ab[1];
        c.value = [a, b](double x) { return a * std::exp(b * x); };
        c.d1 = [a, b](double x) { return a * b * std::exp(b * x); };
        c.d2 = [a, b](double x) { return a * b * b * std::exp(b * x); };
        c.constant = (b == 0.0);
        c.constant_value = a;
        return c;
    }
    throw ConfigError("unknown coefficient kind '" + head + "' in '" + desc + "'");
}

std::map<std::string, double> parse_param_map(const std::string& body,
                                              const std::string& context) {
    std::map<std::string, double> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected name=value in '" + context + "'");
        }
        out[trim(item.substr(0, eq))] = parse_double(trim(item.substr(eq + 1)), context);
    }
    return out;
}

} // namespace

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(item, text));
    }
    return out;
}

std::string dump_config(const RunConfig& cfg) {
    std::map<std::string, std::string> kv;
    kv["mode"] = cfg.mode;
    kv["problem"] = cfg.problem;
    if (!cfg.g_desc.empty()) kv["g"] = cfg.g_desc;
    if (!cfg.f_desc.empty()) kv["f"] = cfg.f_desc;
    kv["n"] = std::to_string(cfg.n);
    kv["domain"] = cfg.domain;
    kv["h"] = format_double(cfg.h);
    kv["h_r"] = format_double(cfg.h_r);
    kv["R"] = format_double(cfg.R);
    kv["beta"] = join_doubles(cfg.beta);
    kv["lambda_schedule"] = join_doubles(cfg.lambda_schedule);
    kv["tol_shoot"] = format_double(cfg.tol_shoot);
    kv["tol_newton"] = format_double(cfg.tol_newton);
    kv["tol_linear"] = format_double(cfg.tol_linear);
    kv["boundary_samples"] = std::to_string(cfg.boundary_samples);
    kv["out_dir"] = cfg.out_dir;
    if (cfg.alpha_set) kv["alpha"] = format_double(cfg.alpha);
    kv["alpha_min"] = format_double(cfg.alpha_min);
    kv["alpha_max"] = format_double(cfg.alpha_max);
    kv["alpha_count"] = std::to_string(cfg.alpha_count);
    kv["probe_existence"] = cfg.probe_existence ? "true" : "false";
    if (!cfg.h_ladder.empty()) kv["h_ladder"] = join_doubles(cfg.h_ladder);
    std::string out;
    for (const auto& [k, v] : kv) {
        out += k + " = " + v + "\n";
    }
    return out;
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "mode") cfg.mode = value;
    else if (key == "problem") cfg.problem = value;
    else if (key == "g") cfg.g_desc = value;
    else if (key == "f") cfg.f_desc = value;
    else if (key == "n") cfg.n = parse_int(value, key);
    else if (key == "domain") cfg.domain = value;
    else if (key == "h") cfg.h = parse_double(value, key);
    else if (key == "h_r") cfg.h_r = parse_double(value, key);
    else if (key == "R") cfg.R = parse_double(value, key);
    else if (key == "beta") cfg.beta = parse_double_list(value);
    else if (key == "lambda_schedule") cfg.lambda_schedule = parse_double_list(value);
    else if (key == "tol_shoot") cfg.tol_shoot = parse_double(value, key);
    else if (key == "tol_newton") cfg.tol_newton = parse_double(value, key);
    else if (key == "tol_linear") cfg.tol_linear = parse_double(value, key);
    else if (key == "boundary_samples") cfg.boundary_samples = parse_int(value, key);
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "alpha") { cfg.alpha = parse_double(value, key); cfg.alpha_set = true; }
    else if (key == "alpha_min") cfg.alpha_min = parse_double(value, key);
    else if (key == "alpha_max") cfg.alpha_max = parse_double(value, key);
    else if (key == "alpha_count") cfg.alpha_count = parse_int(value, key);
    else if (key == "probe_existence") cfg.probe_existence = (value == "true" || value == "1");
    else if (key == "h_ladder") cfg.h_ladder = parse_double_list(value);
    else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + " is not key = value");
        }
        apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void validate_config(const RunConfig& cfg) {
    const bool known_mode = cfg.mode == "radial" || cfg.mode == "solve2d" ||
                            cfg.mode == "verify" || cfg.mode == "bounds" ||
                            cfg.mode == "sweep";
    if (!known_mode) throw ConfigError("unknown or missing mode '" + cfg.mode + "'");
    for (double t : {cfg.tol_shoot, cfg.tol_newton, cfg.tol_linear}) {
        if (!(t > 0.0)) throw ConfigError("tolerances must be positive");
    }
    if (cfg.n < 2) throw ConfigError("dimension n must be >= 2");
    if (cfg.mode == "radial") {
        if (!(cfg.R > 0.0)) throw ConfigError("radial mode needs R > 0");
    }
    if (cfg.mode == "solve2d" || cfg.mode == "verify") {
        if (!(cfg.h > 0.0)) throw ConfigError("2d modes need h > 0");
        if (cfg.n != 2) throw ConfigError("the 2d solver requires n = 2");
    }
    if (cfg.mode == "sweep" && cfg.h_ladder.empty()) {
        throw ConfigError("sweep mode needs h_ladder");
    }
    if (cfg.mode == "bounds" && !cfg.alpha_set) {
        if (!(cfg.alpha_min > 0.0) || !(cfg.alpha_max > cfg.alpha_min) || cfg.alpha_count < 2) {
            throw ConfigError("bounds mode needs alpha or a valid alpha_min/alpha_max/alpha_count");
        }
    }
    if (cfg.problem == "custom") {
        if (cfg.g_desc.empty() || cfg.f_desc.empty()) {
            throw ConfigError("custom problem needs g and f descriptors");
        }
    }
    if (cfg.boundary_samples < 16) throw ConfigError("boundary_samples too small");
}

ProblemSpec build_problem(const RunConfig& cfg) {
    if (cfg.problem == "euclidean") return ProblemSpec::euclidean(cfg.n);
    if (cfg.problem == "lorentzian") return ProblemSpec::lorentzian(cfg.n);
    if (cfg.problem == "poisson") return ProblemSpec::poisson(cfg.n);
    if (cfg.problem != "custom") {
        throw ConfigError("unknown problem '" + cfg.problem + "'");
    }
    const Coefficient g = parse_coefficient(cfg.g_desc);
    const Coefficient f = parse_coefficient(cfg.f_desc);
    ProblemSpec spec;
    spec.name = "custom(g=" + cfg.g_desc + ",f=" + cfg.f_desc + ")";
    spec.n = cfg.n;
    spec.g = g.value;
    spec.g_prime = g.d1;
    spec.g_second = g.d2;
    spec.f = f.value;
    spec.f_prime = f.d1;
    spec.f_second = f.d2;
    spec.f_is_constant = f.constant;
    spec.f_constant_value = f.constant_value;
    // positivity of g, f, G on a sampled range; descriptors cannot encode poles
    for (double s : default_s_samples(spec, 128, 100.0)) {
        if (!(spec.g(s) > 0.0)) throw ConfigError("custom g is not positive at s = " +
                                                  format_double(s));
        if (!(spec.G(s) > 0.0)) {
            throw ConfigError("custom g violates g + 2 s g' > 0 at s = " + format_double(s));
        }
    }
    for (double u : default_u_samples(-10.0, 128)) {
        if (!(spec.f(u) > 0.0)) throw ConfigError("custom f is not positive at u = " +
                                                  format_double(u));
    }
    return spec;
}

ConvexDomain build_domain(const RunConfig& cfg) {
    const auto colon = cfg.domain.find(':');
    const std::string kind = colon == std::string::npos ? cfg.domain : cfg.domain.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : cfg.domain.substr(colon + 1);
    const auto params = parse_param_map(body, cfg.domain);
    auto get = [&](const std::string& name, double fallback, bool required) {
        const auto it = params.find(name);
        if (it != params.end()) return it->second;
        if (required) throw ConfigError("domain '" + cfg.domain + "' missing " + name);
        return fallback;
    };
    try {
        if (kind == "disk") return ConvexDomain::disk(get("R", 1.0, false));
        if (kind == "ellipse") {
            return ConvexDomain::ellipse(get("a", 0.0, true), get("b", 0.0, true));
        }
        if (kind == "blob") {
            return ConvexDomain::blob(get("R", 1.0, false), get("eps", 0.0, true),
                                      static_cast<int>(get("k", 0.0, true)));
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("bad domain parameters: ") + e.what());
    } catch (const ConvexityError& e) {
        throw ConfigError(std::string("bad domain parameters: ") + e.what());
    }
    throw ConfigError("unknown domain kind '" + kind + "'");
}

} // namespace pflab
