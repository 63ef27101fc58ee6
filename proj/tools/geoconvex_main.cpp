#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "geoconvex/runner.hpp"

namespace {

using geoconvex::ConfigError;
using geoconvex::Json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << data;
}

// SPEC grammar: comma-separated key=value with keys counts (per-factor list,
// 'x'-separated), t, rounds, zoom, jitter, seed. Example: counts=33x16,t=17.
geoconvex::SamplingPlan parse_samples_spec(const geoconvex::SamplingPlan& base,
                                           const std::string& spec) {
    geoconvex::SamplingPlan plan = base;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("bad --samples entry '" + item + "'");
        std::string key = item.substr(0, eq);
        std::string val = item.substr(eq + 1);
        try {
            if (key == "counts") {
                plan.factor_counts.clear();
                std::stringstream cs(val);
                std::string c;
                while (std::getline(cs, c, 'x')) plan.factor_counts.push_back(std::stoi(c));
            } else if (key == "t") {
                plan.t_count = std::stoi(val);
            } else if (key == "rounds") {
                plan.refine_rounds = std::stoi(val);
            } else if (key == "zoom") {
                plan.zoom = std::stod(val);
            } else if (key == "jitter") {
                plan.jitter = std::stoi(val) != 0;
            } else if (key == "seed") {
                plan.seed = std::stoull(val);
            } else {
                throw ConfigError("unknown --samples key '" + key + "'");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("bad --samples value '" + item + "'");
        }
    }
    return plan;
}

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<double> fd_step;
    std::string samples;
    std::string out_path;
    std::string format = "json";
    bool timings = false;
    bool serial = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool config_required) {
    auto* c = cmd->add_option("--config", opt.config_path, "config file (JSON)");
    if (config_required) c->required();
    cmd->add_option("--seed", opt.seed, "override the config seed");
    cmd->add_option("--tol", opt.tol, "override the inequality tolerance tau");
    cmd->add_option("--fd-step", opt.fd_step, "override the finite-difference step");
    cmd->add_option("--samples", opt.samples,
                    "sampling plan overrides, e.g. counts=33x16,t=17,rounds=3,zoom=10");
    cmd->add_option("--out", opt.out_path, "write the report to this path");
    cmd->add_option("--format", opt.format, "stdout format: json or text")
        ->check(CLI::IsMember({"json", "text"}));
    cmd->add_flag("--timings", opt.timings, "include wall-clock timings in the report");
    cmd->add_flag("--serial", opt.serial, "run the serial reference kernels");
}

geoconvex::ExecPolicy exec_of(const CommonOptions& opt) {
    geoconvex::ExecPolicy pol = geoconvex::ExecPolicy::from_env();
    if (opt.serial) pol = geoconvex::ExecPolicy::serial();
    return pol;
}

void apply_overrides(geoconvex::RunConfig& cfg, const CommonOptions& opt) {
    if (opt.seed) {
        cfg.seed = *opt.seed;
        cfg.default_plan.seed = *opt.seed;
    }
    if (opt.tol) {
        cfg.tol.tau = *opt.tol;
        cfg.tol.tau_strict = *opt.tol;
    }
    if (opt.fd_step) cfg.tol.fd_step = *opt.fd_step;
    if (!opt.samples.empty()) cfg.default_plan = parse_samples_spec(cfg.default_plan, opt.samples);
}

int emit_report(const geoconvex::RunReport& run, const CommonOptions& opt,
                const std::string& config_out_path) {
    Json rj = geoconvex::report_to_json(run, opt.timings);
    std::string json_text = rj.dump(2) + "\n";
    std::string path = !opt.out_path.empty() ? opt.out_path : config_out_path;
    if (!path.empty()) write_file(path, json_text);
    if (opt.format == "text" || !path.empty())
        std::cout << geoconvex::report_to_text(run);
    else
        std::cout << json_text;
    return run.all_matched ? 0 : 1;
}

int cmd_check(const CommonOptions& opt, const std::string& only_check, bool force_falsify) {
    std::string text = read_file(opt.config_path);
    geoconvex::RunConfig cfg = geoconvex::RunConfig::from_json(geoconvex::parse_config_text(text));
    apply_overrides(cfg, opt);
    if (!only_check.empty()) {
        std::vector<geoconvex::CheckDescriptor> kept;
        for (auto& d : cfg.checks)
            if (d.name == only_check) kept.push_back(d);
        if (kept.empty()) throw ConfigError("no check named '" + only_check + "'");
        if (force_falsify)
            for (auto& d : kept) d.falsify = true;
        cfg.checks = std::move(kept);
    }
    geoconvex::validate_config(cfg);
    auto run = geoconvex::run_checks(cfg, geoconvex::fnv1a_hex(text), exec_of(opt));
    return emit_report(run, opt, cfg.output_path);
}

int cmd_probe(const CommonOptions& opt, const std::string& name) {
    geoconvex::RunConfig cfg;
    if (!opt.config_path.empty()) {
        cfg = geoconvex::RunConfig::from_json(
            geoconvex::parse_config_text(read_file(opt.config_path)));
    }
    apply_overrides(cfg, opt);
    geoconvex::Bifunction phi = cfg.bifunction(name);
    geoconvex::ProbePlan plan;
    plan.tau = cfg.tol.tau;
    Json table = geoconvex::probe_table_json(name, phi, plan, exec_of(opt));
    std::string json_text = table.dump(2) + "\n";
    if (!opt.out_path.empty()) write_file(opt.out_path, json_text);
    if (opt.format == "text" || !opt.out_path.empty())
        std::cout << geoconvex::probe_table_text(table);
    else
        std::cout << json_text;
    return 0;
}

int cmd_curve(const CommonOptions& opt, const std::string& fname, const std::string& phiname,
              const std::string& xs, const std::string& ys, int t_count,
              const std::string& region_name) {
    geoconvex::RunConfig cfg = geoconvex::RunConfig::from_json(
        geoconvex::parse_config_text(read_file(opt.config_path)));
    apply_overrides(cfg, opt);
    const geoconvex::ManifoldSpec& spec = cfg.require_manifold();
    auto parse_coords = [](const std::string& s) {
        std::vector<double> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
        return out;
    };
    geoconvex::Point x = spec.make_point(parse_coords(xs));
    geoconvex::Point y = spec.make_point(parse_coords(ys));
    if (!region_name.empty()) {
        const geoconvex::Region& region = cfg.region(region_name);
        if (!region.contains(x, cfg.tol.tau) || !region.contains(y, cfg.tol.tau))
            throw ConfigError("curve endpoints are outside region '" + region_name + "'");
    }
    geoconvex::FunctionOnManifold f(spec, cfg.function(fname));
    geoconvex::Bifunction phi = cfg.bifunction(phiname);
    std::string csv = geoconvex::curve_csv(f, phi, x, y, t_count);
    if (!opt.out_path.empty())
        write_file(opt.out_path, csv);
    else
        std::cout << csv;
    return 0;
}

int cmd_audit(const CommonOptions& opt) {
    Json cj = geoconvex::audit_paper_config();
    if (opt.seed) cj["seed"] = *opt.seed;
    geoconvex::RunConfig cfg = geoconvex::RunConfig::from_json(cj);
    apply_overrides(cfg, opt);
    geoconvex::validate_config(cfg);
    auto run = geoconvex::run_checks(cfg, geoconvex::fnv1a_hex(cj.dump()), exec_of(opt));
    Json rj = geoconvex::report_to_json(run, opt.timings);
    std::string json_text = rj.dump(2) + "\n";
    if (!opt.out_path.empty()) write_file(opt.out_path, json_text);
    if (opt.format == "json" && opt.out_path.empty()) {
        std::cout << json_text;
    } else {
        std::cout << "paper audit (" << run.outcomes.size() << " scenarios, seed " << cfg.seed
                  << ")\n";
        std::cout << geoconvex::report_to_text(run);
    }
    return run.all_matched ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical certification and falsification for phi-convex and geodesic "
                 "phi-convex functions on catalog manifolds"};
    app.require_subcommand(1);

    CommonOptions check_opt, falsify_opt, probe_opt, curve_opt, audit_opt;
    std::string falsify_name, probe_name, curve_fn, curve_phi = "diff", curve_x, curve_y,
                               curve_region;
    int curve_t = 17;

    CLI::App* check = app.add_subcommand("check", "run the checks of a config");
    add_common(check, check_opt, true);

    CLI::App* falsify = app.add_subcommand("falsify", "refine the worst violation of one check");
    add_common(falsify, falsify_opt, true);
    falsify->add_option("--check", falsify_name, "name of the check to falsify")->required();

    CLI::App* probe = app.add_subcommand("probe", "probe all algebraic properties of a bifunction");
    add_common(probe, probe_opt, false);
    probe->add_option("--bifunction", probe_name, "catalog name, config name or expression")
        ->required();

    CLI::App* curve = app.add_subcommand("curve", "emit lhs/rhs curve data for one endpoint pair");
    add_common(curve, curve_opt, true);
    curve->add_option("--function", curve_fn, "function name")->required();
    curve->add_option("--phi", curve_phi, "bifunction name (default diff)");
    curve->add_option("--x", curve_x, "start point coordinates, comma separated")->required();
    curve->add_option("--y", curve_y, "end point coordinates, comma separated")->required();
    curve->add_option("--t-count", curve_t, "number of t samples (default 17)");
    curve->add_option("--region", curve_region, "validate the endpoints against this region");

    CLI::App* audit = app.add_subcommand("audit-paper", "run the bundled audit scenarios");
    add_common(audit, audit_opt, false);

    try {
        app.parse(argc, argv);
        if (check->parsed()) return cmd_check(check_opt, "", false);
        if (falsify->parsed()) return cmd_check(falsify_opt, falsify_name, true);
        if (probe->parsed()) return cmd_probe(probe_opt, probe_name);
        if (curve->parsed())
            return cmd_curve(curve_opt, curve_fn, curve_phi, curve_x, curve_y, curve_t,
                             curve_region);
        if (audit->parsed()) return cmd_audit(audit_opt);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
