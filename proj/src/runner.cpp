#include "geoconvex/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

#include "geoconvex/util.hpp"

namespace geoconvex {

namespace {

const Json& need(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(std::string("missing field '") + key + "'");
    return *it;
}

std::string need_str(const Json& j, const char* key) {
    const Json& v = need(j, key);
    if (!v.is_string()) throw ConfigError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

double need_num(const Json& j, const char* key) {
    const Json& v = need(j, key);
    if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

std::vector<double> num_array(const Json& v, const char* what) {
    if (!v.is_array()) throw ConfigError(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    for (const Json& e : v) {
        if (!e.is_number()) throw ConfigError(std::string(what) + " must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

constexpr const char* kKnownKinds[] = {
    "phi_convex_interval", "slope_inequality",   "geodesic_phi_convex",
    "geodesic_convex",     "differential_criterion", "restriction_equivalence",
    "mean_value",          "three_point",        "composition",
    "weighted_sum",        "pushforward",        "lipschitz_bound",
    "sup_family",          "local_min",          "phi_limit",
    "endpoint_derivatives", "phi_preinvex",      "g_preinvex_composition",
    "probe",               "set_convex",         "epigraph_characterization",
    "intersection_closure", "sup_via_epigraph",  "revalidate",
};

bool known_kind(const std::string& k) {
    for (const char* s : kKnownKinds)
        if (k == s) return true;
    return false;
}

}  // namespace

Json parse_config_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

ManifoldSpec manifold_from_json(const Json& j) {
    const Json& arr = j.is_array() ? j : need(j, "factors");
    if (!arr.is_array() || arr.empty()) throw ConfigError("manifold factors must be a nonempty array");
    std::vector<Factor> factors;
    for (const Json& fj : arr) {
        if (fj.is_string()) {
            std::string s = fj.get<std::string>();
            if (s == "line")
                factors.push_back(Factor::line());
            else if (s == "circle")
                factors.push_back(Factor::circle());
            else
                throw ConfigError("unknown factor '" + s + "'");
            continue;
        }
        std::string type = need_str(fj, "type");
        if (type == "line") {
            if (fj.contains("interval")) {
                auto iv = num_array(fj["interval"], "factor interval");
                if (iv.size() != 2) throw ConfigError("factor interval must be [a, b]");
                factors.push_back(Factor::line(iv[0], iv[1]));
            } else {
                factors.push_back(Factor::line());
            }
        } else if (type == "circle") {
            factors.push_back(Factor::circle());
        } else {
            throw ConfigError("unknown factor type '" + type + "'");
        }
    }
    return ManifoldSpec(std::move(factors));
}

Json manifold_to_json(const ManifoldSpec& spec) {
    Json arr = Json::array();
    for (const Factor& f : spec.factors()) {
        Json fj;
        fj["type"] = f.kind == Factor::Kind::line ? "line" : "circle";
        if (f.interval) fj["interval"] = Json::array({f.interval->first, f.interval->second});
        arr.push_back(fj);
    }
    Json j;
    j["factors"] = arr;
    return j;
}

Region region_from_json(const ManifoldSpec& spec, const Json& j) {
    if (!j.is_array()) throw ConfigError("a region is an array of per-factor constraints");
    if (j.size() != spec.dim())
        throw ConfigError("region has " + std::to_string(j.size()) + " constraints for a " +
                          std::to_string(spec.dim()) + "-factor manifold");
    std::vector<RegionFactor> factors;
    for (const Json& fj : j) {
        if (fj.is_string()) {
            if (fj.get<std::string>() != "whole")
                throw ConfigError("unknown region constraint '" + fj.get<std::string>() + "'");
            factors.push_back(RegionFactor::whole_circle());
        } else if (fj.contains("interval")) {
            auto iv = num_array(fj["interval"], "region interval");
            if (iv.size() != 2) throw ConfigError("region interval must be [lo, hi]");
            factors.push_back(RegionFactor::interval(iv[0], iv[1]));
        } else if (fj.contains("arc")) {
            auto arc = num_array(fj["arc"], "region arc");
            if (arc.size() != 2) throw ConfigError("region arc must be [start, length]");
            factors.push_back(RegionFactor::arc(arc[0], arc[1]));
        } else {
            throw ConfigError("region constraint needs 'interval', 'arc' or \"whole\"");
        }
    }
    try {
        return Region(spec, std::move(factors));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid region: ") + e.what());
    }
}

Json region_to_json(const Region& region) {
    Json arr = Json::array();
    for (const RegionFactor& rf : region.factors()) {
        switch (rf.kind) {
            case RegionFactor::Kind::interval: {
                Json fj;
                fj["interval"] = Json::array({rf.lo, rf.hi()});
                arr.push_back(fj);
                break;
            }
            case RegionFactor::Kind::whole_circle:
                arr.push_back("whole");
                break;
            case RegionFactor::Kind::arc: {
                Json fj;
                fj["arc"] = Json::array({rf.lo, rf.length});
                arr.push_back(fj);
                break;
            }
        }
    }
    return arr;
}

SamplingPlan plan_from_json(const SamplingPlan& base, const Json& j) {
    SamplingPlan plan = base;
    if (j.is_null()) return plan;
    if (!j.is_object()) throw ConfigError("plan must be an object");
    if (j.contains("factor_counts")) {
        plan.factor_counts.clear();
        for (const Json& c : j["factor_counts"]) plan.factor_counts.push_back(c.get<int>());
    }
    if (j.contains("t_count")) plan.t_count = j["t_count"].get<int>();
    if (j.contains("jitter")) plan.jitter = j["jitter"].get<bool>();
    if (j.contains("seed")) plan.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("refine_rounds")) plan.refine_rounds = j["refine_rounds"].get<int>();
    if (j.contains("zoom")) plan.zoom = j["zoom"].get<double>();
    return plan;
}

RunConfig RunConfig::from_json(const Json& j) {
    RunConfig cfg;
    if (!j.is_object()) throw ConfigError("config root must be an object");
    if (j.contains("manifold")) cfg.manifold = manifold_from_json(j["manifold"]);
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("tolerances")) {
        const Json& t = j["tolerances"];
        if (t.contains("tau")) cfg.tol.tau = t["tau"].get<double>();
        if (t.contains("tau_strict")) cfg.tol.tau_strict = t["tau_strict"].get<double>();
        if (t.contains("fd_step")) cfg.tol.fd_step = t["fd_step"].get<double>();
        if (t.contains("fd_tau")) cfg.tol.fd_tau = t["fd_tau"].get<double>();
    }
    cfg.default_plan.seed = cfg.seed;
    if (j.contains("plan")) cfg.default_plan = plan_from_json(cfg.default_plan, j["plan"]);
    if (j.contains("functions")) {
        for (auto it = j["functions"].begin(); it != j["functions"].end(); ++it)
            cfg.functions[it.key()] = it.value().get<std::string>();
    }
    if (j.contains("bifunctions")) {
        for (auto it = j["bifunctions"].begin(); it != j["bifunctions"].end(); ++it) {
            if (Bifunction::is_catalog_name(it.key()))
                throw ConfigError("bifunction '" + it.key() + "' shadows a catalog name");
            cfg.bifunctions[it.key()] = it.value().get<std::string>();
        }
    }
    if (j.contains("regions")) {
        if (!cfg.manifold) throw ConfigError("regions need a manifold");
        for (auto it = j["regions"].begin(); it != j["regions"].end(); ++it)
            cfg.regions.emplace(it.key(), region_from_json(*cfg.manifold, it.value()));
    }
    if (j.contains("output")) {
        const Json& o = j["output"];
        if (o.is_string())
            cfg.output_path = o.get<std::string>();
        else if (o.contains("report"))
            cfg.output_path = o["report"].get<std::string>();
    }
    if (j.contains("checks")) {
        int n = 0;
        for (const Json& cj : j["checks"]) {
            CheckDescriptor d;
            d.kind = need_str(cj, "kind");
            d.name = cj.value("name", "check" + std::to_string(n));
            d.args = cj;
            d.expect = cj.value("expect", "any");
            d.falsify = cj.value("falsify", false);
            cfg.checks.push_back(std::move(d));
            ++n;
        }
    }
    return cfg;
}

Expression RunConfig::function(const std::string& name) const {
    auto it = functions.find(name);
    const std::string& text = it != functions.end() ? it->second : name;
    try {
        return Expression::parse(text);
    } catch (const ParseError& e) {
        throw ConfigError("cannot resolve function '" + name + "': " + e.what());
    }
}

Bifunction RunConfig::bifunction(const std::string& name) const {
    auto it = bifunctions.find(name);
    if (it != bifunctions.end()) {
        try {
            return Bifunction::parse(it->second);
        } catch (const std::exception& e) {
            throw ConfigError("bifunction '" + name + "': " + e.what());
        }
    }
    if (Bifunction::is_catalog_name(name)) return Bifunction::catalog(name);
    try {
        return Bifunction::parse(name);
    } catch (const std::exception& e) {
        throw ConfigError("cannot resolve bifunction '" + name + "': " + e.what());
    }
}

const Region& RunConfig::region(const std::string& name) const {
    auto it = regions.find(name);
    if (it == regions.end()) throw ConfigError("unknown region '" + name + "'");
    return it->second;
}

const ManifoldSpec& RunConfig::require_manifold() const {
    if (!manifold) throw ConfigError("this check needs a manifold");
    return *manifold;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

Json violation_to_json(const Violation& v) {
    Json j;
    j["x"] = v.x;
    j["y"] = v.y;
    j["t"] = v.t;
    j["lhs"] = v.lhs;
    j["rhs"] = v.rhs;
    j["margin"] = v.margin;
    return j;
}

Json check_report_to_json(const CheckReport& rep) {
    Json j;
    j["kind"] = rep.kind;
    j["status"] = std::string(to_string(rep.status));
    j["samples"] = rep.samples;
    if (rep.worst_margin)
        j["worst_margin"] = *rep.worst_margin;
    else
        j["worst_margin"] = nullptr;
    j["violation"] = rep.violation ? violation_to_json(*rep.violation) : Json(nullptr);
    j["notes"] = rep.notes;
    if (!rep.margin_history.empty()) j["margin_history"] = rep.margin_history;
    if (!rep.conclusion_kind.empty()) j["conclusion_kind"] = rep.conclusion_kind;
    if (!rep.effective_expr.empty()) j["effective_expr"] = rep.effective_expr;
    return j;
}

Json report_to_json(const RunReport& rep, bool with_timings) {
    Json j;
    j["toolkit"] = std::string(kToolkitName);
    j["version"] = std::string(kToolkitVersion);
    j["config_digest"] = rep.config_digest;
    j["seed"] = rep.seed;
    j["overall"] = rep.all_matched ? "ok" : "mismatch";
    Json checks = Json::array();
    for (const CheckOutcome& o : rep.outcomes) {
        Json cj;
        cj["name"] = o.desc.name;
        cj["expect"] = o.desc.expect;
        cj["matched"] = o.matched;
        Json body = check_report_to_json(o.report);
        for (auto it = body.begin(); it != body.end(); ++it) cj[it.key()] = it.value();
        cj["revalidate"] = o.revalidate;
        if (with_timings) cj["wall_ms"] = o.wall_ms;
        checks.push_back(cj);
    }
    j["checks"] = checks;
    return j;
}

std::string report_to_text(const RunReport& rep) {
    std::string out;
    for (const CheckOutcome& o : rep.outcomes) {
        out += o.matched ? "[ ok ] " : "[FAIL] ";
        out += o.desc.name + ": " + std::string(to_string(o.report.status));
        if (o.report.worst_margin)
            out += ", worst margin " + format_double(*o.report.worst_margin);
        out += " (expected " + o.desc.expect + ", " + std::to_string(o.report.samples) +
               " samples)\n";
        if (o.report.violation) {
            const Violation& v = *o.report.violation;
            out += "        witness: x=" + Json(v.x).dump() + " y=" + Json(v.y).dump() +
                   " t=" + format_double(v.t) + " lhs=" + format_double(v.lhs) +
                   " rhs=" + format_double(v.rhs) + " margin=" + format_double(v.margin) + "\n";
        }
        for (const std::string& n : o.report.notes) out += "        note: " + n + "\n";
        if (!o.report.margin_history.empty())
            out += "        margin history: " + Json(o.report.margin_history).dump() + "\n";
    }
    out += rep.all_matched ? "overall: ok\n" : "overall: mismatch\n";
    return out;
}

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

namespace {

bool expectation_matches(const std::string& expect, CheckStatus status) {
    if (expect == "any") return true;
    if (expect == "pass") return status == CheckStatus::pass_on_samples;
    if (expect == "violated") return status == CheckStatus::violated;
    return false;
}

std::pair<double, double> interval_of(const Json& args) {
    auto iv = num_array(need(args, "interval"), "interval");
    if (iv.size() != 2) throw ConfigError("interval must be [a, b]");
    return {iv[0], iv[1]};
}

SetSpec set_from_json(const RunConfig& cfg, const Json& j) {
    const ManifoldSpec& spec = cfg.require_manifold();
    Region region = j["region"].is_string() ? cfg.region(j["region"].get<std::string>())
                                            : region_from_json(spec, need(j, "region"));
    double lambda = j.value("lambda", 2.0);
    if (j.contains("epigraph")) {
        FunctionOnManifold f(spec, cfg.function(need_str(j, "epigraph")));
        return SetSpec::epigraph(f, region, lambda);
    }
    std::vector<SetConstraint> cs;
    if (j.contains("constraints")) {
        for (const Json& cj : j["constraints"]) {
            SetConstraint c{Expression::parse(need_str(cj, "expr")), std::nullopt};
            if (cj.contains("bound") && cj["bound"].is_number())
                c.bound = cj["bound"].get<double>();
            cs.push_back(std::move(c));
        }
    }
    return SetSpec(region, std::move(cs), lambda);
}

Json set_to_json(const SetSpec& set) {
    Json j;
    j["region"] = region_to_json(set.base());
    Json cs = Json::array();
    for (const SetConstraint& c : set.constraints()) {
        Json cj;
        cj["expr"] = c.expr.print();
        if (c.bound) cj["bound"] = *c.bound;
        cs.push_back(cj);
    }
    j["constraints"] = cs;
    j["lambda"] = set.level_range();
    return j;
}

BifunctionProperty property_from_string(const std::string& s) {
    for (BifunctionProperty p :
         {BifunctionProperty::nonneg_homogeneous, BifunctionProperty::additive,
          BifunctionProperty::nonneg_linear, BifunctionProperty::antisymmetric,
          BifunctionProperty::nondecreasing, BifunctionProperty::seq_upper_bounded})
        if (to_string(p) == s) return p;
    throw ConfigError("unknown bifunction property '" + s + "'");
}

CheckReport probe_as_report(const std::string& property, const ProbeReport& probe) {
    CheckReport rep;
    rep.kind = "probe(" + property + ")";
    rep.status = probe.violated ? CheckStatus::violated : CheckStatus::pass_on_samples;
    rep.samples = probe.samples;
    rep.worst_margin = probe.worst_margin;
    rep.notes.push_back(probe.note);
    if (probe.violated) {
        Violation v;
        v.x = probe.witness;
        v.lhs = 0.0;
        v.rhs = 0.0;
        v.margin = probe.worst_margin;
        rep.violation = v;
        rep.notes.push_back("witness layout is property-specific; see the probe documentation");
    }
    return rep;
}

CheckReport run_revalidation(const Json& args, const CheckContext& ctx);

struct Dispatcher {
    const RunConfig& cfg;
    const CheckDescriptor& desc;
    const SamplingPlan plan;
    const CheckContext ctx;
    Json revalidate = nullptr;

    FunctionOnManifold manifold_fn(const char* field) const {
        return FunctionOnManifold(cfg.require_manifold(), cfg.function(need_str(desc.args, field)));
    }

    Json base_reval(const char* base_kind, const CheckReport& rep) const {
        Json r;
        r["kind"] = "revalidate";
        r["base_kind"] = base_kind;
        Json t;
        t["tau"] = ctx.tol.tau;
        t["fd_step"] = ctx.tol.fd_step;
        t["fd_tau"] = ctx.tol.fd_tau;
        r["tolerances"] = t;
        if (rep.violation) r["witness"] = violation_to_json(*rep.violation);
        return r;
    }

    CheckReport run() {
        const Json& a = desc.args;
        const std::string& kind = desc.kind;

        if (kind == "phi_convex_interval" || kind == "slope_inequality") {
            Expression f = cfg.function(need_str(a, "function"));
            Bifunction phi = cfg.bifunction(need_str(a, "phi"));
            auto [lo, hi] = interval_of(a);
            CheckReport rep;
            if (kind == "slope_inequality") {
                rep = check_slope_inequality(f, phi, lo, hi, plan, ctx);
            } else if (desc.falsify) {
                rep = falsify_interval(f, phi, lo, hi, plan, ctx);
            } else {
                rep = check_phi_convex_interval(f, phi, lo, hi, plan, ctx, a.value("strict", false));
            }
            if (rep.violation) {
                Json r = base_reval(kind.c_str(), rep);
                r["function_expr"] = f.print();
                r["phi_expr"] = phi.expression().print();
                revalidate = r;
            }
            return rep;
        }

        if (kind == "geodesic_phi_convex" || kind == "geodesic_convex") {
            FunctionOnManifold f = manifold_fn("function");
            const Region& region = cfg.region(need_str(a, "region"));
            CheckReport rep;
            std::optional<Bifunction> phi;
            if (kind == "geodesic_phi_convex") phi = cfg.bifunction(need_str(a, "phi"));
            if (desc.falsify) {
                rep = falsify_geodesic(f, phi ? &*phi : nullptr, region, plan, ctx);
            } else if (phi) {
                rep = check_geodesic_phi_convex(f, *phi, region, plan, ctx,
                                                a.value("strict", false));
            } else {
                rep = check_geodesic_convex(f, region, plan, ctx);
            }
            if (rep.violation) {
                Json r = base_reval(kind.c_str(), rep);
                r["manifold"] = manifold_to_json(cfg.require_manifold());
                r["function_expr"] = f.expression().print();
                if (phi) r["phi_expr"] = phi->expression().print();
                revalidate = r;
            }
            return rep;
        }

        if (kind == "differential_criterion") {
            FunctionOnManifold f = manifold_fn("function");
            Bifunction phi = cfg.bifunction(need_str(a, "phi"));
            CheckReport rep =
                check_differential_criterion(f, phi, cfg.region(need_str(a, "region")), plan, ctx);
            if (rep.violation) {
                Json r = base_reval("differential_criterion", rep);
                r["manifold"] = manifold_to_json(cfg.require_manifold());
                r["function_expr"] = f.expression().print();
                r["phi_expr"] = phi.expression().print();
                revalidate = r;
            }
            return rep;
        }

        if (kind == "restriction_equivalence") {
            FunctionOnManifold f = manifold_fn("function");
            Bifunction phi = cfg.bifunction(need_str(a, "phi"));
            CheckReport rep =
                verify_restriction_equivalence(f, phi, cfg.region(need_str(a, "region")), plan, ctx);
            if (rep.violation) {
                Json r = base_reval("geodesic_phi_convex", rep);
                r["manifold"] = manifold_to_json(cfg.require_manifold());
                r["function_expr"] = rep.effective_expr;
                r["phi_expr"] = phi.expression().print();
                revalidate = r;
            }
            return rep;
        }

        if (kind == "mean_value") {
            return audit_mean_value(cfg.function(need_str(a, "function")),
                                    cfg.bifunction(need_str(a, "phi")), need_num(a, "x1"),
                                    need_num(a, "x2"), plan, ctx);
        }

        if (kind == "three_point") {
            auto pts = num_array(need(a, "points"), "points");
            if (pts.size() != 3) throw ConfigError("three_point needs points = [x, y, z]");
            Expression f = cfg.function(need_str(a, "function"));
            Bifunction phi = cfg.bifunction(need_str(a, "phi"));
            CheckReport rep = audit_three_point(f, phi, pts[0], pts[1], pts[2], ctx);
            if (rep.violation) {
                Json r = base_reval("three_point", rep);
                r["function_expr"] = f.print();
                r["phi_expr"] = phi.expression().print();
                revalidate = r;
            }
            return rep;
        }

        if (kind == "composition" || kind == "g_preinvex_composition") {
            FunctionOnManifold f = manifold_fn("inner");
            Expression g = cfg.function(need_str(a, "outer"));
            Bifunction phi = cfg.bifunction(need_str(a, "phi"));
            const Region& region = cfg.region(need_str(a, "region"));
            CheckReport rep;
            std::string conclusion_phi;
            if (kind == "composition") {
                rep = check_composition(f, g, phi, region, plan, ctx, a.value("strict", false));
                conclusion_phi = phi.expression().print();
            } else {
                Bifunction psi = cfg.bifunction(need_str(a, "psi"));
                rep = check_g_preinvex_composition(f, g, phi, psi, region, plan, ctx);
                conclusion_phi = psi.expression().print();
            }
            if (rep.violation) {
                Json r = base_reval("geodesic_phi_convex", rep);
                r["manifold"] = manifold_to_json(cfg.require_manifold());
                r["function_expr"] = rep.effective_expr;
                r["phi_expr"] = conclusion_phi;
                revalidate = r;
            }
            return rep;
        }

        if (kind == "weighted_sum" || kind == "sup_family" || kind == "sup_via_epigraph") {
            std::vector<FunctionOnManifold> fs;
            for (const Json& nj : need(a, "functions"))
                fs.emplace_back(cfg.require_manifold(), cfg.function(nj.get<std::string>()));
            Bifunction phi = cfg.bifunction(need_str(a, "phi"));
            const Region& region = cfg.region(need_str(a, "region"));
            CheckReport rep;
            if (kind == "weighted_sum") {
                auto weights = num_array(need(a, "weights"), "weights");
                rep = check_weighted_sum(fs, weights, phi, region, plan, ctx);
            } else if (kind == "sup_family") {
                rep = check_sup_family(fs, phi, region, plan, ctx);
            } else {
                rep = sup_via_epigraph(fs, phi, region, plan, ctx);
            }
            if (rep.violation) {
                Json r = base_reval("geodesic_phi_convex", rep);
                r["manifold"] = manifold_to_json(cfg.require_manifold());
                r["function_expr"] = rep.effective_expr;
                r["phi_expr"] = phi.expression().print();
                revalidate = r;
            }
            return rep;
        }

        if (kind == "pushforward") {
            FunctionOnManifold f = manifold_fn("function");
            Bifunction phi = cfg.bifunction(need_str(a, "phi"));
            std::vector<Expression> fwd, inv;
            for (const Json& e : need(a, "map")) fwd.push_back(Expression::parse(e.get<std::string>()));
            for (const Json& e : need(a, "inverse"))
                inv.push_back(Expression::parse(e.get<std::string>()));
            CheckReport rep =
                check_pushforward(f, phi, fwd, inv, cfg.region(need_str(a, "region")), plan, ctx);
            if (rep.violation) {
                Json r = base_reval("pushforward", rep);
                r["manifold"] = manifold_to_json(cfg.require_manifold());
                r["function_expr"] = f.expression().print();
                r["phi_expr"] = phi.expression().print();
                Json fj = Json::array(), ij = Json::array();
                for (const Expression& e : fwd) fj.push_back(e.print());
                for (const Expression& e : inv) ij.push_back(e.print());
                r["map"] = fj;
                r["inverse"] = ij;
                revalidate = r;
            }
            return rep;
        }

        if (kind == "lipschitz_bound") {
            Bifunction phi = cfg.bifunction(need_str(a, "phi"));
            const bool nd = need(a, "center").is_array();
            CheckReport rep;
            std::string f_text;
            if (nd) {
                FunctionOnManifold f = manifold_fn("function");
                Point center = cfg.require_manifold().make_point(
                    num_array(a["center"], "center"));
                rep = check_lipschitz_bound(f, phi, center, need_num(a, "h"), need_num(a, "r"),
                                            need_num(a, "eps"), plan, ctx);
                f_text = f.expression().print();
            } else {
                Expression f = cfg.function(need_str(a, "function"));
                rep = check_lipschitz_bound(f, phi, need_num(a, "center"), need_num(a, "h"),
                                            need_num(a, "r"), need_num(a, "eps"), plan, ctx);
                f_text = f.print();
            }
            if (rep.violation) {
                Json r = base_reval(nd ? "lipschitz_bound_nd" : "lipschitz_bound", rep);
                if (nd) r["manifold"] = manifold_to_json(cfg.require_manifold());
                r["function_expr"] = f_text;
                r["phi_expr"] = phi.expression().print();
                // K is embedded so the witness config stands alone
                double dist2 = 0.0;
                for (std::size_t d = 0; d < rep.violation->x.size(); ++d) {
                    double delta = rep.violation->y[d] - rep.violation->x[d];
                    dist2 += delta * delta;
                }
                double k_const = rep.violation->rhs /
                                 std::max(std::sqrt(dist2), std::numeric_limits<double>::min());
                r["k_const"] = k_const;
                revalidate = r;
            }
            return rep;
        }

        if (kind == "local_min") {
            FunctionOnManifold f = manifold_fn("function");
            Bifunction phi = cfg.bifunction(need_str(a, "phi"));
            const Region& region = cfg.region(need_str(a, "region"));
            Point x0 = cfg.require_manifold().make_point(num_array(need(a, "x0"), "x0"));
            CheckReport rep = check_local_min_criterion(f, phi, x0, region, plan, ctx,
                                                        a.value("rho", 0.25));
            if (rep.violation) {
                Json r = base_reval("local_min", rep);
                r["manifold"] = manifold_to_json(cfg.require_manifold());
                r["function_expr"] = f.expression().print();
                r["phi_expr"] = phi.expression().print();
                revalidate = r;
            }
            return rep;
        }

        if (kind == "phi_limit") {
            FunctionOnManifold f = manifold_fn("function");
            Expression family = Expression::parse(need_str(a, "family"));
            std::string mode_s = need_str(a, "mode");
            if (mode_s != "pointwise" && mode_s != "series")
                throw ConfigError("phi_limit mode must be pointwise or series");
            PhiLimitMode mode =
                mode_s == "pointwise" ? PhiLimitMode::pointwise : PhiLimitMode::series;
            Bifunction limit = cfg.bifunction(need_str(a, "limit"));
            CheckReport rep = check_phi_limit(f, family, mode, need(a, "n").get<int>(), limit,
                                              cfg.region(need_str(a, "region")), plan, ctx);
            if (rep.violation) {
                Json r = base_reval("geodesic_phi_convex", rep);
                r["manifold"] = manifold_to_json(cfg.require_manifold());
                r["function_expr"] = rep.effective_expr;
                r["phi_expr"] = limit.expression().print();
                revalidate = r;
            }
            return rep;
        }

        if (kind == "endpoint_derivatives") {
            FunctionOnManifold f = manifold_fn("function");
            Bifunction phi = cfg.bifunction(need_str(a, "phi"));
            CheckReport rep =
                audit_endpoint_derivatives(f, phi, cfg.region(need_str(a, "region")), plan, ctx);
            if (rep.violation) {
                Json r = base_reval("endpoint_derivatives", rep);
                r["manifold"] = manifold_to_json(cfg.require_manifold());
                r["function_expr"] = f.expression().print();
                revalidate = r;
            }
            return rep;
        }

        if (kind == "phi_preinvex") {
            Expression f = cfg.function(need_str(a, "function"));
            Bifunction phi = cfg.bifunction(need_str(a, "phi"));
            std::vector<Expression> eta;
            for (const Json& e : need(a, "eta")) eta.push_back(Expression::parse(e.get<std::string>()));
            std::vector<std::pair<double, double>> box;
            for (const Json& bj : need(a, "box")) {
                auto iv = num_array(bj, "box entry");
                if (iv.size() != 2) throw ConfigError("box entries must be [lo, hi]");
                box.emplace_back(iv[0], iv[1]);
            }
            CheckReport rep = check_phi_preinvex(f, phi, eta, box, plan, ctx);
            if (rep.violation) {
                Json r = base_reval("phi_preinvex", rep);
                r["function_expr"] = f.print();
                r["phi_expr"] = phi.expression().print();
                Json ej = Json::array();
                for (const Expression& e : eta) ej.push_back(e.print());
                r["eta"] = ej;
                Json bj = Json::array();
                for (auto [lo, hi] : box) bj.push_back(Json::array({lo, hi}));
                r["box"] = bj;
                revalidate = r;
            }
            return rep;
        }

        if (kind == "probe") {
            Bifunction phi = cfg.bifunction(need_str(a, "bifunction"));
            std::string prop = need_str(a, "property");
            ProbePlan pp;
            pp.tau = ctx.tol.tau;
            ProbeReport pr = probe(phi, property_from_string(prop), pp, ctx.exec);
            CheckReport rep = probe_as_report(prop, pr);
            if (rep.violation) {
                Json r = base_reval("probe", rep);
                r["phi_expr"] = phi.expression().print();
                r["property"] = prop;
                revalidate = r;
            }
            return rep;
        }

        if (kind == "set_convex") {
            SetSpec set = set_from_json(cfg, need(a, "set"));
            Bifunction phi = cfg.bifunction(need_str(a, "phi"));
            CheckReport rep = check_geodesic_phi_convex_set(set, phi, plan, ctx);
            if (rep.violation) {
                Json r = base_reval("set_convex", rep);
                r["manifold"] = manifold_to_json(cfg.require_manifold());
                r["set"] = set_to_json(set);
                r["phi_expr"] = phi.expression().print();
                revalidate = r;
            }
            return rep;
        }

        if (kind == "epigraph_characterization") {
            FunctionOnManifold f = manifold_fn("function");
            Bifunction phi = cfg.bifunction(need_str(a, "phi"));
            CheckReport rep = verify_epigraph_characterization(
                f, phi, cfg.region(need_str(a, "region")), plan, ctx);
            if (rep.violation) {
                Json r = base_reval("geodesic_phi_convex", rep);
                r["manifold"] = manifold_to_json(cfg.require_manifold());
                r["function_expr"] = rep.effective_expr;
                r["phi_expr"] = phi.expression().print();
                revalidate = r;
            }
            return rep;
        }

        if (kind == "intersection_closure") {
            std::vector<SetSpec> sets;
            for (const Json& sj : need(a, "sets")) sets.push_back(set_from_json(cfg, sj));
            Bifunction phi = cfg.bifunction(need_str(a, "phi"));
            CheckReport rep = check_intersection_closure(sets, phi, plan, ctx);
            if (rep.violation) {
                Json r = base_reval("set_convex", rep);
                r["manifold"] = manifold_to_json(cfg.require_manifold());
                std::optional<SetSpec> meet = sets[0];
                for (std::size_t i = 1; i < sets.size() && meet; ++i)
                    meet = SetSpec::conjunction(*meet, sets[i]);
                if (meet) r["set"] = set_to_json(*meet);
                r["phi_expr"] = phi.expression().print();
                revalidate = r;
            }
            return rep;
        }

        if (kind == "revalidate") return run_revalidation(a, ctx);

        throw ConfigError("unknown check kind '" + kind + "'");
    }
};

// Recomputes a stored witness from scratch via the Binding-based slow path
// (expressions re-parsed from text, geodesics through the Geodesic class).
CheckReport run_revalidation(const Json& args, const CheckContext& ctx) {
    CheckReport rep;
    rep.kind = "revalidate";
    const std::string base = need_str(args, "base_kind");
    const Json& w = need(args, "witness");
    Violation stored;
    stored.x = num_array(need(w, "x"), "witness.x");
    stored.y = num_array(need(w, "y"), "witness.y");
    stored.t = need_num(w, "t");
    stored.lhs = need_num(w, "lhs");
    stored.rhs = need_num(w, "rhs");
    stored.margin = need_num(w, "margin");
    double tau = ctx.tol.tau, fd_step = ctx.tol.fd_step, fd_tau = ctx.tol.fd_tau;
    if (args.contains("tolerances")) {
        const Json& t = args["tolerances"];
        tau = t.value("tau", tau);
        fd_step = t.value("fd_step", fd_step);
        fd_tau = t.value("fd_tau", fd_tau);
    }

    auto binding_eval = [](const Expression& e, const ManifoldSpec& spec, const Point& p) {
        Binding b;
        const auto names = spec.coordinate_names();
        for (std::size_t i = 0; i < names.size(); ++i) b[names[i]] = p.coords[i];
        return e.eval(b);
    };
    auto eval_1d = [](const Expression& e, double v) {
        if (e.variables().empty()) return e.eval(Binding{});
        return e.eval(Binding{{e.variables()[0], v}});
    };

    double lhs = 0.0, rhs = 0.0;
    bool confirmed_rule = false;
    rep.samples = 1;

    if (base == "geodesic_phi_convex" || base == "geodesic_convex" ||
        base == "differential_criterion" || base == "endpoint_derivatives" ||
        base == "local_min" || base == "pushforward")
    {
        ManifoldSpec spec = manifold_from_json(need(args, "manifold"));
        Expression f = Expression::parse(need_str(args, "function_expr"));
        Point x = spec.make_point(stored.x);
        Point y = spec.make_point(stored.y);
        if (base == "geodesic_phi_convex" || base == "geodesic_convex") {
            Geodesic g = geodesic_between(spec, x, y);
            lhs = binding_eval(f, spec, g.at(stored.t));
            double fx = binding_eval(f, spec, x);
            double fy = binding_eval(f, spec, y);
            if (base == "geodesic_phi_convex") {
                Bifunction phi = Bifunction::parse(need_str(args, "phi_expr"));
                rhs = fx + stored.t * phi(fy, fx);
            } else {
                rhs = (1.0 - stored.t) * fx + stored.t * fy;
            }
            confirmed_rule = lhs - rhs > tau;
        } else if (base == "differential_criterion") {
            Bifunction phi = Bifunction::parse(need_str(args, "phi_expr"));
            FunctionOnManifold fm(spec, f);
            Geodesic g = geodesic_between(spec, x, y);
            lhs = curve_derivative_fd(fm, g, 0.0, fd_step);
            rhs = phi(binding_eval(f, spec, y), binding_eval(f, spec, x));
            confirmed_rule = lhs - rhs > fd_tau;
        } else if (base == "endpoint_derivatives") {
            FunctionOnManifold fm(spec, f);
            Geodesic g = geodesic_between(spec, x, y);
            lhs = curve_derivative_fd(fm, g, 0.0, fd_step);
            rhs = curve_derivative_fd(fm, g, 1.0, fd_step);
            confirmed_rule = fd_tau - std::abs(lhs - rhs) > 0.0;
        } else if (base == "local_min") {
            Bifunction phi = Bifunction::parse(need_str(args, "phi_expr"));
            lhs = 0.0;
            rhs = phi(binding_eval(f, spec, x), binding_eval(f, spec, y));
            confirmed_rule = -rhs > tau;
        } else {  // pushforward: f∘F⁻¹ along F∘alpha, recomputed in two steps
            Bifunction phi = Bifunction::parse(need_str(args, "phi_expr"));
            std::vector<Expression> fwd, inv;
            for (const Json& e : need(args, "map")) fwd.push_back(Expression::parse(e.get<std::string>()));
            for (const Json& e : need(args, "inverse"))
                inv.push_back(Expression::parse(e.get<std::string>()));
            auto map_point = [&](const std::vector<Expression>& m, const Point& p) {
                Binding b;
                const auto names = spec.coordinate_names();
                for (std::size_t i = 0; i < names.size(); ++i) b[names[i]] = p.coords[i];
                std::vector<double> out;
                for (const Expression& e : m) out.push_back(e.eval(b));
                for (std::size_t i = 0; i < out.size(); ++i)
                    if (spec.factors()[i].kind == Factor::Kind::circle)
                        out[i] = normalize_angle(out[i]);
                return Point{out};
            };
            auto pulled = [&](const Point& image) {
                return binding_eval(f, spec, map_point(inv, image));
            };
            Geodesic g = geodesic_between(spec, x, y);
            lhs = pulled(map_point(fwd, g.at(stored.t)));
            double ex = pulled(map_point(fwd, x));
            double ey = pulled(map_point(fwd, y));
            rhs = ex + stored.t * phi(ey, ex);
            confirmed_rule = lhs - rhs > tau;
        }
    } else if (base == "phi_convex_interval") {
        Expression f = Expression::parse(need_str(args, "function_expr"));
        Bifunction phi = Bifunction::parse(need_str(args, "phi_expr"));
        double x = stored.x.at(0), y = stored.y.at(0);
        lhs = eval_1d(f, stored.t * x + (1.0 - stored.t) * y);
        rhs = eval_1d(f, y) + stored.t * phi(eval_1d(f, x), eval_1d(f, y));
        confirmed_rule = lhs - rhs > tau;
    } else if (base == "slope_inequality") {
        Expression f = Expression::parse(need_str(args, "function_expr"));
        Bifunction phi = Bifunction::parse(need_str(args, "phi_expr"));
        double x1 = stored.x.at(0), x2 = stored.y.at(0), xm = stored.t;
        lhs = (eval_1d(f, x2) - eval_1d(f, xm)) / (x2 - xm);
        rhs = phi(eval_1d(f, x1), eval_1d(f, x2)) / (x1 - x2);
        confirmed_rule = rhs - lhs > tau;
    } else if (base == "three_point") {
        Expression f = Expression::parse(need_str(args, "function_expr"));
        Bifunction phi = Bifunction::parse(need_str(args, "phi_expr"));
        double x = stored.x.at(0), z = stored.y.at(0), y = stored.t;
        const std::string var = f.variables().empty() ? "x" : f.variables()[0];
        double dy = derivative_fd(f, var, Binding{{var, y}}, fd_step);
        double dz = derivative_fd(f, var, Binding{{var, z}}, fd_step);
        lhs = dy * (x - y) + dz * (y - z);
        rhs = phi(eval_1d(f, x), eval_1d(f, y)) + phi(eval_1d(f, y), eval_1d(f, z));
        confirmed_rule = lhs - rhs > fd_tau;
    } else if (base == "lipschitz_bound") {
        Expression f = Expression::parse(need_str(args, "function_expr"));
        double k_const = need_num(args, "k_const");
        double x = stored.x.at(0), y = stored.y.at(0);
        lhs = std::abs(eval_1d(f, x) - eval_1d(f, y));
        rhs = k_const * std::abs(y - x);
        confirmed_rule = lhs - rhs > tau;
    } else if (base == "lipschitz_bound_nd") {
        ManifoldSpec spec = manifold_from_json(need(args, "manifold"));
        Expression f = Expression::parse(need_str(args, "function_expr"));
        double k_const = need_num(args, "k_const");
        double dist2 = 0.0;
        for (std::size_t d = 0; d < stored.x.size(); ++d) {
            double delta = stored.y[d] - stored.x[d];
            dist2 += delta * delta;
        }
        lhs = std::abs(binding_eval(f, spec, spec.make_point(stored.x)) -
                       binding_eval(f, spec, spec.make_point(stored.y)));
        rhs = k_const * std::sqrt(dist2);
        confirmed_rule = lhs - rhs > tau;
    } else if (base == "phi_preinvex") {
        Expression f = Expression::parse(need_str(args, "function_expr"));
        Bifunction phi = Bifunction::parse(need_str(args, "phi_expr"));
        std::vector<Expression> eta;
        for (const Json& e : need(args, "eta")) eta.push_back(Expression::parse(e.get<std::string>()));
        const std::size_t dim = stored.x.size();
        Binding b;
        for (std::size_t d = 0; d < dim; ++d) {
            b["x" + std::to_string(d + 1)] = stored.x[d];
            b["y" + std::to_string(d + 1)] = stored.y[d];
        }
        Binding zb;
        for (std::size_t d = 0; d < dim; ++d)
            zb["x" + std::to_string(d + 1)] = stored.y[d] + stored.t * eta[d].eval(b);
        Binding xb, yb;
        for (std::size_t d = 0; d < dim; ++d) {
            xb["x" + std::to_string(d + 1)] = stored.x[d];
            yb["x" + std::to_string(d + 1)] = stored.y[d];
        }
        lhs = f.eval(zb);
        rhs = f.eval(yb) + stored.t * phi(f.eval(xb), f.eval(yb));
        confirmed_rule = lhs - rhs > tau;
    } else if (base == "set_convex") {
        ManifoldSpec spec = manifold_from_json(need(args, "manifold"));
        const Json& sj = need(args, "set");
        Region region = region_from_json(spec, need(sj, "region"));
        std::vector<SetConstraint> cs;
        for (const Json& cj : need(sj, "constraints")) {
            SetConstraint c{Expression::parse(need_str(cj, "expr")), std::nullopt};
            if (cj.contains("bound") && cj["bound"].is_number())
                c.bound = cj["bound"].get<double>();
            cs.push_back(std::move(c));
        }
        Bifunction phi = Bifunction::parse(need_str(args, "phi_expr"));
        std::vector<double> xb(stored.x.begin(), stored.x.end() - 1);
        std::vector<double> yb(stored.y.begin(), stored.y.end() - 1);
        double alpha = stored.x.back(), beta = stored.y.back();
        Point x = spec.make_point(xb), y = spec.make_point(yb);
        Geodesic g = geodesic_between(spec, x, y);
        Point q = g.at(stored.t);
        double level = alpha + stored.t * phi(beta, alpha);
        Binding b;
        const auto names = spec.coordinate_names();
        for (std::size_t i = 0; i < names.size(); ++i) b[names[i]] = q.coords[i];
        lhs = -std::numeric_limits<double>::infinity();
        rhs = 0.0;
        for (const SetConstraint& c : cs) {
            double v = c.expr.eval(b);
            double bound = c.bound ? *c.bound : level;
            if (v - bound > lhs - rhs) {
                lhs = v;
                rhs = bound;
            }
        }
        confirmed_rule = lhs - rhs > tau;
    } else if (base == "probe") {
        Bifunction phi = Bifunction::parse(need_str(args, "phi_expr"));
        const std::string prop = need_str(args, "property");
        const std::vector<double>& wit = stored.x;
        if (prop == "nonneg_homogeneous") {
            lhs = phi(wit.at(0) * wit.at(1), wit.at(0) * wit.at(2));
            rhs = wit.at(0) * phi(wit.at(1), wit.at(2));
            confirmed_rule = std::abs(lhs - rhs) > tau;
        } else if (prop == "additive") {
            lhs = phi(wit.at(0) + wit.at(2), wit.at(1) + wit.at(3));
            rhs = phi(wit.at(0), wit.at(1)) + phi(wit.at(2), wit.at(3));
            confirmed_rule = std::abs(lhs - rhs) > tau;
        } else if (prop == "nonneg_linear") {
            // witness is from whichever component probe failed
            if (wit.size() >= 6) {
                lhs = phi(wit.at(0) + wit.at(2), wit.at(1) + wit.at(3));
                rhs = phi(wit.at(0), wit.at(1)) + phi(wit.at(2), wit.at(3));
            } else {
                lhs = phi(wit.at(0) * wit.at(1), wit.at(0) * wit.at(2));
                rhs = wit.at(0) * phi(wit.at(1), wit.at(2));
            }
            confirmed_rule = std::abs(lhs - rhs) > tau;
        } else if (prop == "antisymmetric") {
            lhs = phi(wit.at(0), wit.at(1));
            rhs = -phi(wit.at(1), wit.at(0));
            confirmed_rule = std::abs(lhs - rhs) > tau;
        } else if (prop == "nondecreasing") {
            lhs = phi(wit.at(0), wit.at(1));
            rhs = phi(wit.at(2), wit.at(3));
            confirmed_rule = lhs - rhs > tau;
        } else if (prop == "seq_upper_bounded") {
            std::size_t n = static_cast<std::size_t>(wit.at(2));
            double sup_phi = -std::numeric_limits<double>::infinity();
            double sup_x = sup_phi, sup_y = sup_phi;
            for (std::size_t k = 0; k < n; ++k) {
                double xk = wit.at(3 + k), yk = wit.at(3 + n + k);
                sup_phi = std::max(sup_phi, phi(xk, yk));
                sup_x = std::max(sup_x, xk);
                sup_y = std::max(sup_y, yk);
            }
            lhs = sup_phi;
            rhs = phi(sup_x, sup_y);
            confirmed_rule = lhs - rhs > tau;
        } else {
            throw ConfigError("unknown probe property '" + prop + "'");
        }
        // probe witnesses carry no stored lhs/rhs to compare against
        rep.status = confirmed_rule ? CheckStatus::violated : CheckStatus::inconclusive;
        rep.worst_margin = lhs - rhs;
        rep.notes.push_back(confirmed_rule ? "probe witness re-evaluates to a violation"
                                           : "probe witness did not re-validate");
        if (confirmed_rule) rep.violation = stored;
        return rep;
    } else {
        throw ConfigError("revalidation does not support base kind '" + base + "'");
    }

    const bool values_match =
        std::abs(lhs - stored.lhs) <= 1e-12 && std::abs(rhs - stored.rhs) <= 1e-12;
    rep.worst_margin = lhs - rhs;
    rep.notes.push_back("recomputed lhs=" + format_double(lhs) + " rhs=" + format_double(rhs) +
                        " (stored lhs=" + format_double(stored.lhs) +
                        " rhs=" + format_double(stored.rhs) + ")");
    if (confirmed_rule && values_match) {
        rep.status = CheckStatus::violated;
        Violation v = stored;
        v.lhs = lhs;
        v.rhs = rhs;
        rep.violation = v;
        rep.notes.push_back("witness confirmed through the independent evaluation path");
    } else {
        rep.status = CheckStatus::inconclusive;
        rep.notes.push_back(values_match ? "witness no longer violates the inequality"
                                         : "recomputed values differ from the stored witness");
    }
    return rep;
}

}  // namespace

void validate_config(const RunConfig& cfg) {
    std::set<std::string> names;
    for (const CheckDescriptor& d : cfg.checks) {
        if (!known_kind(d.kind)) throw ConfigError("unknown check kind '" + d.kind + "'");
        if (d.expect != "pass" && d.expect != "violated" && d.expect != "any")
            throw ConfigError("check '" + d.name + "': expectation must be pass, violated or any");
        if (d.falsify && d.kind != "phi_convex_interval" && d.kind != "geodesic_phi_convex" &&
            d.kind != "geodesic_convex")
            throw ConfigError("check '" + d.name + "': falsify is only supported for "
                              "phi_convex_interval, geodesic_phi_convex and geodesic_convex");
        if (!names.insert(d.name).second)
            throw ConfigError("duplicate check name '" + d.name + "'");
        // resolve the standard name references up front
        const Json& a = d.args;
        auto touch_fn = [&](const char* key) {
            if (a.contains(key)) cfg.function(a[key].get<std::string>());
        };
        auto touch_phi = [&](const char* key) {
            if (a.contains(key)) cfg.bifunction(a[key].get<std::string>());
        };
        touch_fn("function");
        touch_fn("inner");
        touch_fn("outer");
        touch_phi("phi");
        touch_phi("psi");
        if (a.contains("bifunction")) cfg.bifunction(a["bifunction"].get<std::string>());
        if (a.contains("region") && a["region"].is_string())
            cfg.region(a["region"].get<std::string>());
        if (a.contains("functions"))
            for (const Json& nj : a["functions"]) cfg.function(nj.get<std::string>());
    }
}

RunReport run_checks(const RunConfig& cfg, std::string config_digest, const ExecPolicy& exec) {
    RunReport run;
    run.seed = cfg.seed;
    run.config_digest = std::move(config_digest);
    for (const CheckDescriptor& d : cfg.checks) {
        CheckOutcome out;
        out.desc = d;
        SamplingPlan plan = plan_from_json(cfg.default_plan, d.args.value("plan", Json()));
        Dispatcher dispatcher{cfg, d, plan, CheckContext{cfg.tol, exec}};
        auto start = std::chrono::steady_clock::now();
        try {
            out.report = dispatcher.run();
            out.revalidate = dispatcher.revalidate;
        } catch (const ConfigError&) {
            throw;  // malformed descriptor: surfaced as exit code 2
        } catch (const std::exception& e) {
            out.report.kind = d.kind;
            out.report.status = CheckStatus::inconclusive;
            out.report.notes.push_back(std::string("check failed: ") + e.what());
        }
        out.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
        out.matched = expectation_matches(d.expect, out.report.status);
        run.all_matched = run.all_matched && out.matched;
        run.outcomes.push_back(std::move(out));
    }
    return run;
}

Json probe_table_json(const std::string& name, const Bifunction& phi, const ProbePlan& plan,
                      const ExecPolicy& exec) {
    Json j;
    j["bifunction"] = name;
    j["expr"] = phi.expression().print();
    Json probes = Json::array();
    for (BifunctionProperty p :
         {BifunctionProperty::nonneg_homogeneous, BifunctionProperty::additive,
          BifunctionProperty::nonneg_linear, BifunctionProperty::antisymmetric,
          BifunctionProperty::nondecreasing, BifunctionProperty::seq_upper_bounded})
    {
        ProbeReport rep = probe(phi, p, plan, exec);
        Json pj;
        pj["property"] = std::string(to_string(p));
        pj["verdict"] = rep.violated ? "violated" : "holds-on-samples";
        pj["samples"] = rep.samples;
        pj["worst_margin"] = rep.worst_margin;
        pj["witness"] = rep.witness;
        pj["note"] = rep.note;
        probes.push_back(pj);
    }
    j["probes"] = probes;
    return j;
}

std::string probe_table_text(const Json& table) {
    std::string out = "bifunction " + table["bifunction"].get<std::string>() + " = " +
                      table["expr"].get<std::string>() + "\n";
    for (const Json& pj : table["probes"]) {
        std::string verdict = pj["verdict"].get<std::string>();
        out += "  " + pj["property"].get<std::string>() + ": " + verdict;
        if (verdict == "violated") out += "  [" + pj["note"].get<std::string>() + "]";
        out += "\n";
    }
    return out;
}

std::string curve_csv(const FunctionOnManifold& f, const Bifunction& phi, const Point& x,
                      const Point& y, int t_count) {
    if (t_count < 2) throw ConfigError("curve needs at least 2 t samples");
    Geodesic g = geodesic_between(f.spec(), x, y);
    double fx = f.value(x);
    double fy = f.value(y);
    double phival = phi(fy, fx);
    std::string out = "t,lhs,rhs_phi,rhs_chord\n";
    char buf[128];
    for (int k = 0; k < t_count; ++k) {
        double t = static_cast<double>(k) / (t_count - 1);
        double lhs = f.value(g.at(t));
        double rhs_phi = fx + t * phival;
        double rhs_chord = (1.0 - t) * fx + t * fy;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", t, lhs, rhs_phi, rhs_chord);
        out += buf;
    }
    return out;
}

}  // namespace geoconvex
