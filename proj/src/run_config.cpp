#include "bcl/run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace bcl {

using nlohmann::json;

namespace {

void reject_unknown(const json &j, const std::set<std::string> &known, const std::string &where) {
    if (!j.is_object()) {
        throw ConfigError(where + " must be a JSON object");
    }
    for (const auto &[key, value] : j.items()) {
        if (!known.count(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

double number(const json &j, const std::string &key) {
    if (!j.is_number()) {
        throw ConfigError("'" + key + "' must be a number");
    }
    return j.get<double>();
}

int integer(const json &j, const std::string &key) {
    if (!j.is_number_integer()) {
        throw ConfigError("'" + key + "' must be an integer");
    }
    return j.get<int>();
}

bool boolean(const json &j, const std::string &key) {
    if (!j.is_boolean()) {
        throw ConfigError("'" + key + "' must be true or false");
    }
    return j.get<bool>();
}

std::string text(const json &j, const std::string &key) {
    if (!j.is_string()) {
        throw ConfigError("'" + key + "' must be a string");
    }
    return j.get<std::string>();
}

template <class T, class F> std::vector<T> list(const json &j, const std::string &key, F item) {
    if (!j.is_array()) {
        throw ConfigError("'" + key + "' must be an array");
    }
    std::vector<T> out;
    for (const auto &v : j) {
        out.push_back(item(v, key));
    }
    return out;
}

} // namespace

int two_j_from_jmax(double jmax) {
    const double two = 2.0 * jmax;
    if (!(jmax >= 0.0) || std::abs(two - std::round(two)) > 1e-9) {
        throw ConfigError("jmax must be a non-negative integer or half-integer");
    }
    return static_cast<int>(std::lround(two));
}

OutputFormat parse_format(const std::string &name) {
    if (name == "csv") {
        return OutputFormat::Csv;
    }
    if (name == "json") {
        return OutputFormat::Json;
    }
    throw ConfigError("format must be 'csv' or 'json'");
}

GridSpec GridSpec::parse(const std::string &t) {
    GridSpec g;
    std::istringstream in(t);
    std::string a, b, c;
    if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c) ||
        c.find(':') != std::string::npos) {
        throw ConfigError("grid must read start:stop:points, got '" + t + "'");
    }
    try {
        std::size_t used = 0;
        g.start = std::stod(a, &used);
        if (used != a.size()) throw std::invalid_argument(a);
        g.stop = std::stod(b, &used);
        if (used != b.size()) throw std::invalid_argument(b);
        g.points = std::stoi(c, &used);
        if (used != c.size()) throw std::invalid_argument(c);
    } catch (const std::logic_error &) {
        throw ConfigError("grid must read start:stop:points, got '" + t + "'");
    }
    return g;
}

std::vector<double> GridSpec::values() const {
    try {
        return linear_grid(start, stop, points);
    } catch (const DomainError &e) {
        throw ConfigError(std::string("invalid grid: ") + e.what());
    }
}

InhomConfig InhomSpec::layout(int n_atoms) const {
    if (positions.empty()) {
        if (!bins) {
            throw ConfigError("inhom needs either 'bins' or 'positions'");
        }
        return InhomConfig::uniform(n_atoms, *bins);
    }
    InhomConfig c;
    c.positions = positions;
    if (counts.empty()) {
        const int m = static_cast<int>(positions.size());
        for (int k = 0; k < m; ++k) {
            c.counts.push_back(n_atoms / m + (k < n_atoms % m ? 1 : 0));
        }
    } else {
        c.counts = counts;
    }
    return c;
}

ModelParams RunConfig::model() const {
    ModelParams p = params;
    if (pump) {
        const EffectivePump e = effective_pump_rates(*pump);
        p.w = e.w;
        p.t2_inv = e.t2_inv;
    }
    return p;
}

MethodSettings RunConfig::settings(int n_atoms) const {
    MethodSettings s;
    s.method = method;
    s.truncation = truncation;
    s.alpha = alpha;
    if (method == Method::Inhom) {
        if (!inhom) {
            throw ConfigError("method 'inhom' needs an 'inhom' section");
        }
        s.inhom = inhom->layout(n_atoms);
        try {
            s.inhom->validate(n_atoms);
        } catch (const DomainError &e) {
            throw ConfigError(e.what());
        }
    }
    return s;
}

void RunConfig::validate() const {
    try {
        model().validate();
    } catch (const DomainError &e) {
        throw ConfigError(e.what());
    }
    if (alpha && !(*alpha >= 0.0)) {
        throw ConfigError("alpha must be non-negative");
    }
    if (threads < 1) {
        throw ConfigError("threads must be at least 1");
    }
    if (grid) {
        grid->values();
    }
    for (int n : n_list) {
        if (n < 1) {
            throw ConfigError("n_list entries must be positive");
        }
    }
    if (bracket && !(bracket->second > bracket->first)) {
        throw ConfigError("bracket must be [lo, hi] with hi > lo");
    }
    if (!(min_tol > 0.0)) {
        throw ConfigError("min_tol must be positive");
    }
    if (inhom && inhom->bins && *inhom->bins < 1) {
        throw ConfigError("bins must be positive");
    }
    if (!(truncation.leak_tol > 0.0) || !(truncation.drift_tol > 0.0)) {
        throw ConfigError("truncation tolerances must be positive");
    }
    if (method == Method::Inhom) {
        settings(params.n_atoms);
    }
}

namespace {

RunConfig read_config(const json &j0) {
    const json *jp = &j0;
    if (j0.is_object() && j0.contains("config") && j0.contains("tool")) {
        jp = &j0.at("config");
    }
    const json &j = *jp;
    reject_unknown(j,
                   {"n_atoms", "gamma", "w", "gamma_c", "t2_inv", "alpha", "method", "grid",
                    "n_list", "bracket", "min_tol", "truncation", "inhom", "pump", "threads",
                    "out", "format"},
                   "config");
    RunConfig c;
    for (const auto &[k, v] : j.items()) {
        if (k == "n_atoms") {
            c.params.n_atoms = integer(v, k);
        } else if (k == "gamma") {
            c.params.gamma = number(v, k);
        } else if (k == "w") {
            c.params.w = number(v, k);
        } else if (k == "gamma_c") {
            c.params.gamma_c = number(v, k);
        } else if (k == "t2_inv") {
            c.params.t2_inv = number(v, k);
        } else if (k == "alpha") {
            if (!v.is_null()) {
                c.alpha = number(v, k);
            }
        } else if (k == "method") {
            c.method = parse_method(text(v, k));
        } else if (k == "grid") {
            if (v.is_string()) {
                c.grid = GridSpec::parse(v.get<std::string>());
            } else if (!v.is_null()) {
                reject_unknown(v, {"start", "stop", "points"}, "grid");
                GridSpec g;
                g.start = number(v.at("start"), "start");
                g.stop = number(v.at("stop"), "stop");
                g.points = integer(v.at("points"), "points");
                c.grid = g;
            }
        } else if (k == "n_list") {
            c.n_list = list<int>(v, k, integer);
        } else if (k == "bracket") {
            if (!v.is_null()) {
                const auto b = list<double>(v, k, number);
                if (b.size() != 2) {
                    throw ConfigError("bracket must have two entries");
                }
                c.bracket = std::pair{b[0], b[1]};
            }
        } else if (k == "min_tol") {
            c.min_tol = number(v, k);
        } else if (k == "truncation") {
            reject_unknown(v, {"auto", "jmax", "depth_max", "leak_tol", "drift_tol"},
                           "truncation");
            for (const auto &[tk, tv] : v.items()) {
                if (tk == "auto") {
                    c.truncation.automatic = boolean(tv, tk);
                } else if (tk == "jmax") {
                    if (!tv.is_null()) c.truncation.two_j_max = two_j_from_jmax(number(tv, tk));
                } else if (tk == "depth_max") {
                    if (!tv.is_null()) c.truncation.depth_max = integer(tv, tk);
                } else if (tk == "leak_tol") {
                    c.truncation.leak_tol = number(tv, tk);
                } else {
                    c.truncation.drift_tol = number(tv, tk);
                }
            }
        } else if (k == "inhom") {
            if (!v.is_null()) {
                reject_unknown(v, {"bins", "positions", "counts"}, "inhom");
                InhomSpec s;
                if (v.contains("bins") && !v.at("bins").is_null()) {
                    s.bins = integer(v.at("bins"), "bins");
                }
                if (v.contains("positions")) {
                    s.positions = list<double>(v.at("positions"), "positions", number);
                }
                if (v.contains("counts")) {
                    s.counts = list<int>(v.at("counts"), "counts", integer);
                }
                c.inhom = s;
            }
        } else if (k == "pump") {
            if (!v.is_null()) {
                reject_unknown(v, {"omega_p", "gamma_p", "gamma_a", "big_gamma"}, "pump");
                PumpLevelScheme s{};
                s.omega_p = number(v.at("omega_p"), "omega_p");
                s.gamma_p = number(v.at("gamma_p"), "gamma_p");
                s.gamma_a = number(v.at("gamma_a"), "gamma_a");
                s.big_gamma = number(v.at("big_gamma"), "big_gamma");
                c.pump = s;
            }
        } else if (k == "threads") {
            c.threads = integer(v, k);
        } else if (k == "out") {
            c.out = text(v, k);
        } else if (k == "format") {
            c.format = parse_format(text(v, k));
        }
    }
    return c;
}

} // namespace

RunConfig config_from_json(const json &j) {
    try {
        return read_config(j);
    } catch (const json::exception &e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

json config_to_json(const RunConfig &c) {
    json j;
    j["n_atoms"] = c.params.n_atoms;
    j["gamma"] = c.params.gamma;
    j["w"] = c.params.w;
    j["gamma_c"] = c.params.gamma_c;
    j["t2_inv"] = c.params.t2_inv;
    j["alpha"] = c.alpha ? json(*c.alpha) : json(nullptr);
    j["method"] = to_string(c.method);
    if (c.grid) {
        j["grid"] = {{"start", c.grid->start}, {"stop", c.grid->stop}, {"points", c.grid->points}};
    } else {
        j["grid"] = nullptr;
    }
    j["n_list"] = c.n_list;
    j["bracket"] = c.bracket ? json::array({c.bracket->first, c.bracket->second}) : json(nullptr);
    j["min_tol"] = c.min_tol;
    json t;
    t["auto"] = c.truncation.automatic;
    t["jmax"] = c.truncation.two_j_max ? json(0.5 * *c.truncation.two_j_max) : json(nullptr);
    t["depth_max"] = c.truncation.depth_max ? json(*c.truncation.depth_max) : json(nullptr);
    t["leak_tol"] = c.truncation.leak_tol;
    t["drift_tol"] = c.truncation.drift_tol;
    j["truncation"] = t;
    if (c.inhom) {
        json h;
        h["bins"] = c.inhom->bins ? json(*c.inhom->bins) : json(nullptr);
        h["positions"] = c.inhom->positions;
        h["counts"] = c.inhom->counts;
        j["inhom"] = h;
    } else {
        j["inhom"] = nullptr;
    }
    if (c.pump) {
        j["pump"] = {{"omega_p", c.pump->omega_p},
                     {"gamma_p", c.pump->gamma_p},
                     {"gamma_a", c.pump->gamma_a},
                     {"big_gamma", c.pump->big_gamma}};
    } else {
        j["pump"] = nullptr;
    }
    j["threads"] = c.threads;
    j["out"] = c.out;
    j["format"] = c.format == OutputFormat::Csv ? "csv" : "json";
    return j;
}

RunConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error &e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

} // namespace bcl
