#include "cli_app.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "bcl/oracle.hpp"
#include "bcl/run_config.hpp"

#ifndef BCL_VERSION
#define BCL_VERSION "unknown"
#endif

namespace bcl::cli {

namespace {

using nlohmann::json;

std::string num(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num(const std::optional<double> &v) { return v ? num(*v) : std::string(); }

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json jnum(const std::optional<double> &v) { return v ? jnum(*v) : json(nullptr); }

// Flags shared by every subcommand; unset values leave the config alone.
struct Flags {
    std::string config;
    std::optional<int> n;
    std::optional<double> w, gamma, gamma_c, t2_inv, alpha, jmax;
    std::optional<std::string> method, grid, out, format, n_list, bracket;
    std::optional<int> threads, bins, depth_max;
    bool jmax_auto = false;

    void attach(CLI::App *app) {
        app->add_option("--config", config, "JSON run configuration (CLI flags override it)");
        app->add_option("--n", n, "number of atoms");
        app->add_option("--w", w, "repump rate");
        app->add_option("--gamma", gamma, "free-space decay rate");
        app->add_option("--gamma-c", gamma_c, "collective cavity decay rate");
        app->add_option("--t2-inv", t2_inv, "single-atom dephasing rate 1/T2");
        app->add_option("--alpha", alpha, "use 1/T2 = alpha * w at every point");
        app->add_option("--method", method,
                        "ed, cumulant2, cumulant3, meanfield, analytic or inhom");
        app->add_option("--jmax", jmax, "fixed ED truncation J <= jmax");
        app->add_option("--depth-max", depth_max, "fixed ED truncation J + M <= depth");
        app->add_flag("--jmax-auto", jmax_auto, "grow the ED truncation automatically");
        app->add_option("--grid", grid, "repump grid start:stop:points");
        app->add_option("--n-list", n_list, "comma-separated atom numbers (scaling)");
        app->add_option("--bracket", bracket, "search bracket lo:hi for the minimum");
        app->add_option("--bins", bins, "uniform bins for the inhomogeneous model");
        app->add_option("--out", out, "output file (stdout when omitted)");
        app->add_option("--format", format, "csv or json");
        app->add_option("--threads", threads, "worker threads");
    }

    RunConfig resolve() const {
        RunConfig c = config.empty() ? RunConfig{} : load_config(config);
        if (n) c.params.n_atoms = *n;
        if (w) c.params.w = *w;
        if (gamma) c.params.gamma = *gamma;
        if (gamma_c) c.params.gamma_c = *gamma_c;
        if (t2_inv) c.params.t2_inv = *t2_inv;
        if (alpha) c.alpha = *alpha;
        if (method) c.method = parse_method(*method);
        if (jmax) {
            c.truncation.two_j_max = two_j_from_jmax(*jmax);
            c.truncation.automatic = false;
        }
        if (depth_max) {
            c.truncation.depth_max = *depth_max;
            c.truncation.automatic = false;
        }
        if (jmax_auto) c.truncation.automatic = true;
        if (grid) c.grid = GridSpec::parse(*grid);
        if (n_list) {
            c.n_list.clear();
            std::stringstream ss(*n_list);
            std::string item;
            while (std::getline(ss, item, ',')) {
                try {
                    std::size_t used = 0;
                    c.n_list.push_back(std::stoi(item, &used));
                    if (used != item.size()) throw std::invalid_argument(item);
                } catch (const std::logic_error &) {
                    throw ConfigError("--n-list expects integers separated by commas");
                }
            }
        }
        if (bracket) {
            const auto colon = bracket->find(':');
            try {
                if (colon == std::string::npos) throw std::invalid_argument(*bracket);
                c.bracket = std::pair{std::stod(bracket->substr(0, colon)),
                                      std::stod(bracket->substr(colon + 1))};
            } catch (const std::logic_error &) {
                throw ConfigError("--bracket expects lo:hi");
            }
        }
        if (bins) {
            InhomSpec s;
            s.bins = *bins;
            c.inhom = s;
        }
        if (out) c.out = *out;
        if (format) c.format = parse_format(*format);
        if (threads) c.threads = *threads;
        c.validate();
        return c;
    }
};

// Destination for the main table plus the metadata sidecar.
class Output {
  public:
    Output(const RunConfig &c, std::string command, std::ostream &fallback)
        : cfg_(c), command_(std::move(command)) {
        if (!c.out.empty()) {
            file_.open(c.out);
            if (!file_) {
                throw ConfigError("cannot write " + c.out);
            }
            os_ = &file_;
        } else {
            os_ = &fallback;
        }
    }

    std::ostream &stream() { return *os_; }

    void finish(std::size_t rows, const json &fails, std::ostream &err,
                const json &extra = json::object()) {
        os_->flush();
        const bool failed = !fails.empty();
        if (cfg_.out.empty()) {
            if (failed) {
                err << json{{"failures", fails}}.dump(2) << "\n";
            }
            return;
        }
        json meta = {{"tool", "bcl"},         {"version", BCL_VERSION},
                     {"command", command_},   {"config", config_to_json(cfg_)},
                     {"rows", rows},          {"failures", fails.size()}};
        for (const auto &[k, v] : extra.items()) {
            meta[k] = v;
        }
        std::ofstream(cfg_.out + ".meta.json") << meta.dump(2) << "\n";
        if (failed) {
            std::ofstream(cfg_.out + ".failures.json")
                << json{{"command", command_}, {"failures", fails}}.dump(2) << "\n";
        }
    }

  private:
    const RunConfig &cfg_;
    std::string command_;
    std::ofstream file_;
    std::ostream *os_ = nullptr;
};

json failure_list(const std::vector<SweepFailure> &failures) {
    json fails = json::array();
    for (const auto &f : failures) {
        fails.push_back({{"w", f.w}, {"error", f.message}});
    }
    return fails;
}

const std::vector<std::string> kSweepColumns = {"w",  "jz_mean", "jz_var", "jpjm",   "sf",
                                                "xi2", "g2",     "method", "n_atoms"};

void write_line(std::ostream &os, const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        os << (i ? "," : "") << cells[i];
    }
    os << "\n";
}

std::vector<std::string> sweep_cells(const PointResult &r, Method m) {
    const auto &o = r.obs;
    return {num(r.w), num(o.jz_mean), num(o.jz_var), num(o.jpjm), num(o.sf),
            num(o.xi2), num(o.g2),     to_string(m),  std::to_string(o.n_atoms)};
}

json sweep_json(const PointResult &r, Method m) {
    const auto &o = r.obs;
    return {{"w", r.w},        {"jz_mean", jnum(o.jz_mean)}, {"jz_var", jnum(o.jz_var)},
            {"jpjm", jnum(o.jpjm)}, {"sf", jnum(o.sf)},     {"xi2", jnum(o.xi2)},
            {"g2", jnum(o.g2)},  {"method", to_string(m)},  {"n_atoms", o.n_atoms}};
}

int cmd_steady(const RunConfig &c, std::ostream &out, std::ostream &err) {
    const ModelParams p = c.model();
    const MethodSettings s = c.settings(p.n_atoms);
    const PointResult r = evaluate(p, s);
    const auto &o = r.obs;
    Output dst(c, "steady", out);
    std::vector<std::pair<std::string, json>> fields = {
        {"n_atoms", o.n_atoms},          {"w", r.w},
        {"t2_inv", r.t2_inv},            {"jz_mean", jnum(o.jz_mean)},
        {"jz_var", jnum(o.jz_var)},      {"jpjm", jnum(o.jpjm)},
        {"jp2jm2", jnum(o.jp2jm2)},      {"j2_mean", jnum(o.j2_mean)},
        {"sf", jnum(o.sf)},              {"xi2", jnum(o.xi2)},
        {"g2", jnum(o.g2)},              {"sigz_mean", jnum(o.sigz_mean)},
        {"spm_corr", jnum(o.spm_corr)},  {"method", to_string(s.method)}};
    if (r.inhom) {
        fields.emplace_back("power", r.inhom->power);
    }
    if (c.format == OutputFormat::Json) {
        json j = json::object();
        for (const auto &[k, v] : fields) {
            j[k] = v;
        }
        dst.stream() << j.dump(2) << "\n";
    } else {
        std::vector<std::string> head, cells;
        for (const auto &[k, v] : fields) {
            head.push_back(k);
            if (v.is_string()) {
                cells.push_back(v.get<std::string>());
            } else if (v.is_number_integer()) {
                cells.push_back(std::to_string(v.get<long>()));
            } else {
                cells.push_back(v.is_null() ? std::string() : num(v.get<double>()));
            }
        }
        write_line(dst.stream(), head);
        write_line(dst.stream(), cells);
    }
    dst.finish(1, json::array(), err);
    return kExitOk;
}

SweepResult run_sweep(const RunConfig &c, const MethodSettings &s) {
    if (!c.grid) {
        throw ConfigError("this command needs --grid start:stop:points");
    }
    SweepOptions opts;
    opts.threads = c.threads;
    opts.keep_going = true;
    return sweep_w(c.model(), c.grid->values(), s, opts);
}

int cmd_sweep(const RunConfig &c, std::ostream &out, std::ostream &err) {
    const MethodSettings s = c.settings(c.params.n_atoms);
    const SweepResult res = run_sweep(c, s);
    Output dst(c, "sweep", out);
    std::size_t rows = 0;
    if (c.format == OutputFormat::Json) {
        json arr = json::array();
        for (const auto &pt : res.points) {
            if (pt) {
                arr.push_back(sweep_json(*pt, s.method));
                ++rows;
            }
        }
        dst.stream() << json{{"rows", arr}}.dump(2) << "\n";
    } else {
        write_line(dst.stream(), kSweepColumns);
        for (const auto &pt : res.points) {
            if (pt) {
                write_line(dst.stream(), sweep_cells(*pt, s.method));
                ++rows;
            }
        }
    }
    dst.finish(rows, failure_list(res.failures), err);
    return res.failures.empty() ? kExitOk : kExitPartial;
}

int cmd_inhom(RunConfig c, std::ostream &out, std::ostream &err) {
    c.method = Method::Inhom;
    c.validate();
    const MethodSettings s = c.settings(c.params.n_atoms);
    SweepResult res;
    if (c.grid) {
        res = run_sweep(c, s);
    } else {
        const ModelParams p = c.model();
        res.method = Method::Inhom;
        res.grid = {p.w};
        res.points = {evaluate(p, s)};
    }
    const std::vector<std::string> cols = {"w",         "jz_mean", "power",   "sf",
                                           "sigz_mean", "method",  "n_atoms", "bins"};
    Output dst(c, "inhom", out);
    std::size_t rows = 0;
    json arr = json::array();
    if (c.format == OutputFormat::Csv) {
        write_line(dst.stream(), cols);
    }
    for (const auto &pt : res.points) {
        if (!pt) {
            continue;
        }
        const InhomObservables &o = *pt->inhom;
        ++rows;
        if (c.format == OutputFormat::Csv) {
            write_line(dst.stream(),
                          {num(pt->w), num(o.jz_mean), num(o.power), num(o.sf), num(o.sigz_mean),
                           "inhom", std::to_string(o.n_atoms), std::to_string(s.inhom->bins())});
        } else {
            arr.push_back({{"w", pt->w},
                           {"jz_mean", o.jz_mean},
                           {"power", o.power},
                           {"sf", o.sf},
                           {"sigz_mean", o.sigz_mean},
                           {"method", "inhom"},
                           {"n_atoms", o.n_atoms},
                           {"bins", s.inhom->bins()}});
        }
    }
    if (c.format == OutputFormat::Json) {
        dst.stream() << json{{"rows", arr}}.dump(2) << "\n";
    }
    dst.finish(rows, failure_list(res.failures), err);
    return res.failures.empty() ? kExitOk : kExitPartial;
}

int cmd_scaling(const RunConfig &c, std::ostream &out, std::ostream &err) {
    if (c.n_list.empty()) {
        throw ConfigError("scaling needs --n-list");
    }
    const std::size_t count = c.n_list.size();
    for (int n : c.n_list) {
        c.settings(n);
    }
    std::vector<std::optional<MinimumResult>> mins(count);
    std::vector<std::string> errors(count);
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            ModelParams p = c.model();
            p.n_atoms = c.n_list[i];
            try {
                MinimizeOptions mo;
                mo.rel_tol = c.min_tol;
                mins[i] = find_min_xi2(p, c.settings(p.n_atoms), c.bracket, mo);
            } catch (const std::exception &e) {
                errors[i] = e.what();
            }
        }
    };
    const int threads = std::clamp(c.threads, 1, static_cast<int>(count));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back(work);
        }
        for (auto &t : pool) {
            t.join();
        }
    }

    std::vector<std::pair<double, double>> pts;
    json failures = json::array();
    for (std::size_t i = 0; i < count; ++i) {
        if (mins[i]) {
            pts.emplace_back(c.n_list[i], mins[i]->value);
        } else {
            failures.push_back({{"n_atoms", c.n_list[i]}, {"error", errors[i]}});
        }
    }
    json fit = nullptr;
    try {
        const PowerLawFit f = fit_power_law(pts);
        fit = {{"exponent", f.exponent},
               {"prefactor", f.prefactor},
               {"residual", f.residual},
               {"points_used", f.points_used}};
    } catch (const DomainError &e) {
        fit = {{"error", e.what()}};
    }

    Output dst(c, "scaling", out);
    const char *method = to_string(c.method);
    std::size_t rows = 0;
    if (c.format == OutputFormat::Json) {
        json arr = json::array();
        for (std::size_t i = 0; i < count; ++i) {
            if (mins[i]) {
                arr.push_back({{"n_atoms", c.n_list[i]},
                               {"w_star", mins[i]->w_star},
                               {"xi2_min", mins[i]->value},
                               {"evaluations", mins[i]->evaluations},
                               {"boundary", mins[i]->boundary},
                               {"method", method}});
                ++rows;
            }
        }
        dst.stream() << json{{"rows", arr}, {"fit", fit}}.dump(2) << "\n";
    } else {
        write_line(dst.stream(),
                         {"n_atoms", "w_star", "xi2_min", "evaluations", "boundary", "method"});
        for (std::size_t i = 0; i < count; ++i) {
            if (mins[i]) {
                write_line(dst.stream(),
                              {std::to_string(c.n_list[i]), num(mins[i]->w_star),
                               num(mins[i]->value), std::to_string(mins[i]->evaluations),
                               mins[i]->boundary ? "1" : "0", method});
                ++rows;
            }
        }
        dst.stream() << "# " << json{{"fit", fit}}.dump() << "\n";
    }
    dst.finish(rows, failures, err, {{"fit", fit}});
    return failures.empty() ? kExitOk : kExitPartial;
}

int cmd_oracle_check(const RunConfig &c, std::ostream &out, std::ostream &err) {
    const ModelParams p = c.model();
    if (p.n_atoms > oracle::kMaxAtoms) {
        throw ConfigError("oracle-check supports at most " + std::to_string(oracle::kMaxAtoms) +
                          " atoms");
    }
    TruncationPolicy full;
    full.automatic = false;
    const ObservablesRecord ed = ed_steady(p, full).obs;
    const ObservablesRecord ref = oracle::oracle_observables(oracle::oracle_steady(p));
    const std::vector<std::tuple<std::string, double, double>> rows = {
        {"jz_mean", ed.jz_mean, ref.jz_mean}, {"jz_var", ed.jz_var, ref.jz_var},
        {"jpjm", ed.jpjm, ref.jpjm},          {"j2_mean", ed.j2_mean, ref.j2_mean},
        {"sf", ed.sf, ref.sf},                {"xi2", ed.xi2, ref.xi2},
        {"g2", ed.g2.value_or(0.0), ref.g2.value_or(0.0)}};
    Output dst(c, "oracle-check", out);
    double worst = 0.0;
    write_line(dst.stream(), {"observable", "ed", "oracle", "abs_diff"});
    for (const auto &[name, a, b] : rows) {
        const double d = std::abs(a - b);
        worst = std::max(worst, d);
        write_line(dst.stream(), {name, num(a), num(b), num(d)});
    }
    dst.finish(rows.size(), json::array(), err, {{"max_abs_diff", worst}});
    if (worst > 1e-8) {
        err << "oracle mismatch: max |diff| = " << num(worst) << "\n";
        return kExitSolver;
    }
    return kExitOk;
}

int cmd_dump_rates(const RunConfig &c, std::ostream &out, std::ostream &err) {
    const ModelParams p = c.model();
    const TruncationPolicy &t = c.truncation;
    const auto space = std::make_shared<const StateSpace>(
        t.automatic ? build_space(p.n_atoms) : build_space(p.n_atoms, t.two_j_max, t.depth_max));
    const RateMatrix r = build_rate_matrix(p, space);
    Output dst(c, "dump-rates", out);
    r.write_coordinates(dst.stream());
    dst.finish(static_cast<std::size_t>(r.matrix().nonZeros()), json::array(), err,
               {{"states", space->size()}});
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Steady states of the incoherently pumped bad-cavity laser"};
    app.set_version_flag("--version", BCL_VERSION);
    app.require_subcommand(1);

    struct Sub {
        const char *name;
        const char *help;
        int (*fn)(const RunConfig &, std::ostream &, std::ostream &);
    };
    const Sub subs[] = {
        {"steady", "observables at one parameter point", cmd_steady},
        {"sweep", "observables along a repump grid", cmd_sweep},
        {"scaling", "minimum squeezing versus atom number with a power-law fit", cmd_scaling},
        {"inhom", "binned cavity coupling (second-order moments)",
         [](const RunConfig &c, std::ostream &o, std::ostream &e) { return cmd_inhom(c, o, e); }},
        {"oracle-check", "compare ED with the brute-force Liouvillian (N <= 4)",
         cmd_oracle_check},
        {"dump-rates", "write the (J, M) rate matrix as row col value triplets", cmd_dump_rates},
    };
    std::vector<Flags> flags(std::size(subs));
    std::vector<CLI::App *> apps;
    for (std::size_t i = 0; i < std::size(subs); ++i) {
        CLI::App *sub = app.add_subcommand(subs[i].name, subs[i].help);
        flags[i].attach(sub);
        apps.push_back(sub);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion &) {
        out << BCL_VERSION << "\n";
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    for (std::size_t i = 0; i < apps.size(); ++i) {
        if (!apps[i]->parsed()) {
            continue;
        }
        try {
            const RunConfig cfg = flags[i].resolve();
            return subs[i].fn(cfg, out, err);
        } catch (const ConfigError &e) {
            err << "configuration error: " << e.what() << "\n";
            return kExitConfig;
        } catch (const DomainError &e) {
            err << "invalid parameters: " << e.what() << "\n";
            return kExitConfig;
        } catch (const CapabilityError &e) {
            err << "unsupported size: " << e.what() << "\n";
            return kExitConfig;
        } catch (const SolverError &e) {
            err << "solver failure: " << e.what() << "\n";
            return kExitSolver;
        }
    }
    return kExitConfig;
}

} // namespace bcl::cli
