// Command-line front end: mfp <command> --input measure.json [options]

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mfp/freepower.hpp"
#include "mfp/measures_io.hpp"
#include "mfp/oracle.hpp"

namespace {

using namespace mfp;
using nlohmann::json;

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_not_member = 2;
constexpr int exit_stage = 3;

struct RunConfig {
    std::string command;
    std::string input;
    std::optional<double> t;
    std::vector<double> t_list;
    std::optional<int> grid;
    double eps = 1e-5;
    std::string out;
    std::string format = "csv";
};

// A failure inside the pipeline, labelled with the stage that raised it.
struct StageFailure {
    std::string stage;
    std::string message;
    int code = exit_stage;
};

template <class F>
auto stage(const std::string& name, F&& f) {
    try {
        return f();
    } catch (const StageFailure&) {
        throw;
    } catch (const std::exception& e) {
        throw StageFailure{name, e.what()};
    }
}

std::vector<double> parse_t_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw ParseError("bad number in t list: \"" + item + "\"");
        out.push_back(v);
    }
    return out;
}

// Fills the fields that were not given on the command line from a JSON config file.
void apply_config(RunConfig& cfg, const std::string& path, const CLI::App& app) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("config must be a JSON object");
    auto unset = [&](const std::string& flag) { return app.count(flag) == 0; };
    try {
        if (j.contains("input") && unset("--input")) cfg.input = j["input"].get<std::string>();
        if (j.contains("t") && unset("--t")) cfg.t = j["t"].get<double>();
        if (j.contains("t_list") && unset("--t-list"))
            cfg.t_list = j["t_list"].is_string() ? parse_t_list(j["t_list"].get<std::string>())
                                                 : j["t_list"].get<std::vector<double>>();
        if (j.contains("grid") && unset("--grid")) cfg.grid = j["grid"].get<int>();
        if (j.contains("eps") && unset("--eps")) cfg.eps = j["eps"].get<double>();
        if (j.contains("out") && unset("--out")) cfg.out = j["out"].get<std::string>();
        if (j.contains("format") && unset("--format")) cfg.format = j["format"].get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
}

void validate_config(const RunConfig& cfg) {
    if (cfg.input.empty()) throw ParseError("--input is required");
    if (cfg.format != "csv" && cfg.format != "json") throw ParseError("--format must be csv or json");
    if (cfg.grid && *cfg.grid < 64) throw ParseError("--grid must be at least 64");
    if (!(cfg.eps > 0.0)) throw ParseError("--eps must be positive");
    if (cfg.t && !(*cfg.t >= 1.0)) throw ParseError("--t must be at least 1");
    for (double t : cfg.t_list)
        if (!(t >= 1.0)) throw ParseError("--t-list values must be at least 1");
    if (!std::is_sorted(cfg.t_list.begin(), cfg.t_list.end())) throw ParseError("--t-list must be ascending");
}

double require_t(const RunConfig& cfg, bool strict) {
    if (!cfg.t) throw ParseError("--t is required for " + cfg.command);
    if (strict && !(*cfg.t > 1.0)) throw ParseError("--t must exceed 1 for " + cfg.command);
    return *cfg.t;
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::create_directories(cfg.out);
    const auto path = std::filesystem::path(cfg.out) / (cfg.command + "." + cfg.format);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw StageFailure{"output", "cannot write " + path.string()};
    os << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

json report_json(const MembershipReport& rep) {
    json j;
    j["member"] = rep.member;
    j["reason"] = rep.reason;
    j["violations"] = rep.violations;
    j["zero_count"] = rep.zero_count;
    j["samples"] = rep.samples;
    j["winding_samples"] = rep.winding_samples;
    return j;
}

MembershipReport membership(const Measure& mu) {
    return std::visit(
        [](const auto& m) -> MembershipReport {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, MeasureR>)
                return membership_r(m);
            else
                return membership_t(m);
        },
        mu);
}

void require_member(const Measure& mu) {
    const auto rep = stage("membership", [&] { return membership(mu); });
    if (!rep.member) throw StageFailure{"membership", rep.reason, exit_not_member};
}

AssembleOptions assemble_options(const RunConfig& cfg) {
    AssembleOptions opt;
    if (cfg.grid) opt.r_grid = opt.theta_grid = *cfg.grid;
    return opt;
}

std::string rows_csv(const std::string& header, const std::vector<std::vector<double>>& rows) {
    std::string s = header + "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_double(row[i]);
        s += "\n";
    }
    return s;
}

std::string cmd_rep(const RunConfig& cfg, const Measure& mu) {
    return std::visit(
        [&](const auto& m) -> std::string {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, MeasureR>) {
                ExtractOptionsR opt;
                if (cfg.grid) opt.grid_size = *cfg.grid;
                const auto rep = stage("rep", [&] { return extract_rep_r(m, opt); });
                if (cfg.format == "json") return dump(to_json(rep));
                std::vector<std::vector<double>> rows;
                for (std::size_t i = 0; i < rep.rho.density.grid.size(); ++i)
                    rows.push_back({rep.rho.density.grid[i], rep.rho.density.values[i]});
                return rows_csv("s,rho_density", rows);
            } else {
                ExtractOptionsT opt;
                if (cfg.grid) opt.grid_size = *cfg.grid;
                const auto rep = stage("rep", [&] { return extract_rep_t(m, opt); });
                const int n = opt.grid_size;
                if (cfg.format == "json") return dump(to_json(rep, n));
                const auto d = rep.sampled(n);
                std::vector<std::vector<double>> rows;
                for (std::size_t i = 0; i < d.grid.size(); ++i) rows.push_back({d.grid[i], d.values[i]});
                return rows_csv("phi,rho_density", rows);
            }
        },
        mu);
}

std::string cmd_boundary(const RunConfig& cfg, const Measure& mu) {
    const double t = require_t(cfg, true);
    const auto opt = assemble_options(cfg);
    return std::visit(
        [&](const auto& m) -> std::string {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, MeasureR>) {
                const auto curve = stage("boundary", [&] {
                    const auto rep = working_rep(m);
                    return boundary_r(m, rep, t, default_r_grid(m, rep, t, opt.r_grid));
                });
                if (cfg.format == "csv") return to_csv(curve);
                json j;
                j["t"] = t;
                j["r"] = curve.r_grid;
                j["A_t"] = curve.angles;
                json g = json::array(), h = json::array();
                for (double v : curve.g) g.push_back(number(v));
                for (double v : curve.h_values) h.push_back(number(v));
                j["g"] = g;
                j["h_t"] = h;
                json v = json::array();
                for (const auto& iv : curve.vt_plus) v.push_back({iv.lo, iv.hi});
                j["vt_plus"] = v;
                return dump(j);
            } else {
                const auto curve = stage("boundary", [&] { return boundary_t(extract_rep_t(m), t, opt.theta_grid); });
                if (cfg.format == "csv") return to_csv(curve);
                json j;
                j["t"] = t;
                j["theta"] = curve.theta_grid;
                j["R_t"] = curve.radii;
                json g = json::array();
                for (double v : curve.g) g.push_back(number(v));
                j["g"] = g;
                j["arg_h_t"] = curve.h_angles;
                json v = json::array();
                for (const auto& a : curve.vt_plus) v.push_back({{"start", a.start}, {"end", a.end}, {"full", a.full}});
                j["vt_plus"] = v;
                return dump(j);
            }
        },
        mu);
}

PowerResult run_assemble(const RunConfig& cfg, const Measure& mu, double t) {
    const auto opt = assemble_options(cfg);
    return stage("assemble", [&] { return std::visit([&](const auto& m) { return assemble(m, t, opt); }, mu); });
}

std::string cmd_density(const RunConfig& cfg, const Measure& mu) {
    const auto res = run_assemble(cfg, mu, require_t(cfg, false));
    return cfg.format == "json" ? dump(to_json(res)) : density_csv(res);
}

std::string cmd_atoms(const RunConfig& cfg, const Measure& mu) {
    const auto res = run_assemble(cfg, mu, require_t(cfg, false));
    if (cfg.format == "json") {
        json j;
        j["t"] = res.t;
        json a = json::array();
        for (const auto& [loc, m] : res.atoms) a.push_back({{"pos", loc}, {"mass", m}});
        j["atoms"] = a;
        if (res.space == Space::half_line) j["mass_at_zero"] = res.mass_at_zero;
        return dump(j);
    }
    std::vector<std::vector<double>> rows;
    for (const auto& [loc, m] : res.atoms) rows.push_back({loc, m});
    return rows_csv("location,mass", rows);
}

std::string cmd_support(const RunConfig& cfg, const Measure& mu) {
    const auto res = run_assemble(cfg, mu, require_t(cfg, false));
    if (cfg.format == "json") {
        json j;
        j["t"] = res.t;
        json c = json::array();
        for (const auto& iv : res.components) c.push_back({iv.lo, iv.hi});
        j["components"] = c;
        j["component_count"] = res.component_count;
        j["mass_balance"] = res.mass_balance;
        return dump(j);
    }
    std::vector<std::vector<double>> rows;
    for (const auto& iv : res.components) rows.push_back({iv.lo, iv.hi});
    return rows_csv("lo,hi", rows);
}

std::string cmd_sweep(const RunConfig& cfg, const Measure& mu) {
    if (cfg.t_list.empty()) throw ParseError("--t-list is required for sweep");
    const auto opt = assemble_options(cfg);
    const auto counts = stage("sweep", [&] {
        return std::visit([&](const auto& m) { return component_count_sweep(m, cfg.t_list, opt); }, mu);
    });
    if (cfg.format == "json") {
        json j;
        j["t_list"] = cfg.t_list;
        j["component_counts"] = counts;
        j["nonincreasing"] = std::is_sorted(counts.rbegin(), counts.rend());
        return dump(j);
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < counts.size(); ++i) rows.push_back({cfg.t_list[i], double(counts[i])});
    return rows_csv("t,component_count", rows);
}

// Formula density against the oracle on the interior 80% of each component.
std::string cmd_oracle_compare(const RunConfig& cfg, const Measure& mu) {
    const double t = require_t(cfg, true);
    const auto res = run_assemble(cfg, mu, t);
    std::vector<double> xs, fs;
    for (const auto& p : res.pieces) {
        const double lo = p.locations.front(), hi = p.locations.back();
        for (std::size_t i = 0; i < p.locations.size(); i += 16) {
            const double x = p.locations[i];
            if (x < lo + 0.1 * (hi - lo) || x > hi - 0.1 * (hi - lo)) continue;
            xs.push_back(x);
            fs.push_back(p.values[i]);
        }
    }
    const auto os = stage("oracle", [&] {
        return std::visit(
            [&](const auto& m) {
                if constexpr (std::is_same_v<std::decay_t<decltype(m)>, MeasureR>)
                    return oracle_density_r(m, t, xs, cfg.eps);
                else
                    return oracle_density_t(m, t, xs, 1.0 - cfg.eps);
            },
            mu);
    });
    double max_abs = 0.0, max_scaled = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = std::abs(fs[i] - os[i]);
        max_abs = std::max(max_abs, d);
        max_scaled = std::max(max_scaled, d / std::max(1e-3, 0.01 * std::abs(os[i])));
    }
    if (cfg.format == "json") {
        json j;
        j["t"] = t;
        j["points"] = xs.size();
        j["max_abs_deviation"] = max_abs;
        j["max_scaled_deviation"] = max_scaled;
        json rows = json::array();
        for (std::size_t i = 0; i < xs.size(); ++i) rows.push_back({xs[i], fs[i], os[i]});
        j["samples"] = rows;
        return dump(j);
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < xs.size(); ++i) rows.push_back({xs[i], fs[i], os[i]});
    std::cerr << "oracle-compare: max_abs_deviation " << format_double(max_abs) << ", max_scaled_deviation "
              << format_double(max_scaled) << "\n";
    return rows_csv("location,formula,oracle", rows);
}

int run(const RunConfig& cfg) {
    const Measure mu = load_measure(cfg.input);
    if (cfg.command == "check") {
        const auto rep = stage("membership", [&] { return membership(mu); });
        emit(cfg, dump(report_json(rep)));
        return rep.member ? exit_ok : exit_not_member;
    }
    require_member(mu);
    std::string text;
    if (cfg.command == "rep") text = cmd_rep(cfg, mu);
    else if (cfg.command == "boundary") text = cmd_boundary(cfg, mu);
    else if (cfg.command == "density") text = cmd_density(cfg, mu);
    else if (cfg.command == "atoms") text = cmd_atoms(cfg, mu);
    else if (cfg.command == "support") text = cmd_support(cfg, mu);
    else if (cfg.command == "sweep") text = cmd_sweep(cfg, mu);
    else text = cmd_oracle_compare(cfg, mu);
    emit(cfg, text);
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free multiplicative powers of measures on the half-line and the circle"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    double t = 0.0;
    int grid = 0;
    std::string t_list, config;
    app.add_option("--input", cfg.input, "Measure JSON file");
    app.add_option("--t", t, "Power t >= 1");
    app.add_option("--t-list", t_list, "Comma-separated ascending powers");
    app.add_option("--grid", grid, "Grid size (r, theta and extraction grids), at least 64");
    app.add_option("--eps", cfg.eps, "Oracle inversion offset");
    app.add_option("--out", cfg.out, "Write <command>.<format> into this directory instead of stdout");
    app.add_option("--format", cfg.format, "csv or json");
    app.add_option("--config", config, "JSON config; flags take precedence");

    for (const char* name : {"check", "rep", "boundary", "density", "atoms", "support", "sweep", "oracle-compare"})
        app.add_subcommand(name)->callback([&cfg, name] { cfg.command = name; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (app.count("--t")) cfg.t = t;
        if (app.count("--grid")) cfg.grid = grid;
        if (app.count("--t-list")) cfg.t_list = parse_t_list(t_list);
        if (!config.empty()) apply_config(cfg, config, app);
        validate_config(cfg);
        return run(cfg);
    } catch (const StageFailure& f) {
        std::cerr << "mfp: stage " << f.stage << ": " << f.message << "\n";
        return f.code;
    } catch (const ParseError& e) {
        std::cerr << "mfp: stage input: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "mfp: stage input: bad number (" << e.what() << ")\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "mfp: stage " << cfg.command << ": " << e.what() << "\n";
        return exit_stage;
    }
}
