#include "geoconvex/epigraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "geoconvex/util.hpp"

namespace geoconvex {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxDim = 16;
}  // namespace

SetSpec::SetSpec(Region base, std::vector<SetConstraint> constraints, double level_range)
    : base_(std::move(base)), constraints_(std::move(constraints)), level_range_(level_range) {
    if (level_range_ < 0.0) throw std::invalid_argument("level range must be nonnegative");
    const auto names = base_.spec().coordinate_names();
    for (const SetConstraint& c : constraints_) {
        std::vector<int> slots;
        for (const std::string& var : c.expr.variables()) {
            auto it = std::find(names.begin(), names.end(), var);
            if (it == names.end())
                throw std::invalid_argument("constraint variable '" + var +
                                            "' is not a coordinate name");
            slots.push_back(static_cast<int>(it - names.begin()));
        }
        var_factor_.push_back(std::move(slots));
    }
}

SetSpec SetSpec::epigraph(const FunctionOnManifold& f, const Region& region, double level_range) {
    if (!(f.spec() == region.spec()))
        throw std::invalid_argument("function and region manifolds differ");
    std::vector<SetConstraint> cs;
    cs.push_back(SetConstraint{f.expression(), std::nullopt});
    return SetSpec(region, std::move(cs), level_range);
}

SetSpec SetSpec::whole_product(const Region& region, double level_range) {
    return SetSpec(region, {}, level_range);
}

double SetSpec::constraint_value(std::size_t c, std::span<const double> coords) const {
    double vals[kMaxDim];
    const auto& slots = var_factor_[c];
    for (std::size_t k = 0; k < slots.size(); ++k) vals[k] = coords[slots[k]];
    return constraints_[c].expr.eval(std::span<const double>(vals, slots.size()));
}

bool SetSpec::contains(const ProductPoint& p, double tau) const {
    if (!base_.contains(p.base, tau)) return false;
    for (std::size_t c = 0; c < constraints_.size(); ++c) {
        double v = constraint_value(c, p.base.coords);
        double bound = constraints_[c].bound ? *constraints_[c].bound : p.level;
        if (v > bound + tau) return false;
    }
    return true;
}

double SetSpec::active_bound(const Point& x) const {
    double bound = 0.0;
    bool any = false;
    for (std::size_t c = 0; c < constraints_.size(); ++c) {
        if (constraints_[c].bound) continue;
        double v = constraint_value(c, x.coords);
        bound = any ? std::max(bound, v) : v;
        any = true;
    }
    return any ? bound : 0.0;
}

std::optional<SetSpec> SetSpec::conjunction(const SetSpec& a, const SetSpec& b) {
    std::optional<Region> base = Region::intersect(a.base_, b.base_);
    if (!base) return std::nullopt;
    std::vector<SetConstraint> cs = a.constraints_;
    cs.insert(cs.end(), b.constraints_.begin(), b.constraints_.end());
    return SetSpec(*base, std::move(cs), std::max(a.level_range_, b.level_range_));
}

bool epigraph_contains(const FunctionOnManifold& f, const ProductPoint& p, double tau) {
    return f.value(p.base) <= p.level + tau;
}

CheckReport check_geodesic_phi_convex_set(const SetSpec& set, const Bifunction& phi,
                                          const SamplingPlan& plan, const CheckContext& ctx) {
    const Region& region = set.base();
    const ManifoldSpec& spec = region.spec();
    std::vector<Point> bases = sample_region(region, plan.counts_for(region), plan.jitter,
                                             plan.seed);

    // members: per base point, levels active, active + k*Lambda/4
    std::vector<ProductPoint> members;
    for (const Point& b : bases) {
        double active = set.active_bound(b);
        for (int k = 0; k <= 4; ++k) {
            ProductPoint p{b, active + set.level_range() * k / 4.0};
            if (set.contains(p, ctx.tol.tau)) members.push_back(std::move(p));
        }
    }

    CheckReport rep;
    rep.kind = "set_convex";
    if (members.empty()) {
        rep.status = CheckStatus::inconclusive;
        rep.notes.push_back("no member samples found (degenerate set spec)");
        return rep;
    }

    const std::vector<double> ts = plan.t_grid();
    const std::uint64_t m = members.size();
    rep.samples = m * m * ts.size();

    // worst excess of any constraint at the displaced point
    auto pair_margin = [&](std::uint64_t p, double* best_t, double* best_lhs, double* best_rhs) {
        const ProductPoint& a = members[p / m];
        const ProductPoint& b = members[p % m];
        Geodesic g = geodesic_between(spec, a.base, b.base);
        double phival = phi(b.level, a.level);
        double best = -kInf;
        for (double t : ts) {
            Point q = g.at(t);
            double level = a.level + t * phival;
            double worst = -kInf, wl = 0.0, wr = 0.0;
            for (std::size_t c = 0; c < set.constraints().size(); ++c) {
                double v = set.constraint_value(c, q.coords);
                double bound = set.constraints()[c].bound ? *set.constraints()[c].bound : level;
                if (v - bound > worst) {
                    worst = v - bound;
                    wl = v;
                    wr = bound;
                }
            }
            if (set.constraints().empty()) {
                worst = -kInf;
                wl = wr = level;
            }
            if (worst > best) {
                best = worst;
                if (best_t) {
                    *best_t = t;
                    *best_lhs = wl;
                    *best_rhs = wr;
                }
            }
        }
        return best;
    };

    SweepResult sweep = sweep_worst(m * m, ctx.exec, [&](std::uint64_t p) {
        SampleOutcome out;
        try {
            out.margin = pair_margin(p, nullptr, nullptr, nullptr);
        } catch (const EvalError&) {
            out.failed = true;
        }
        return out;
    });

    rep.notes.push_back(std::to_string(m) + " sampled members");
    if (!region.totally_convex())
        rep.notes.push_back(
            "region has a whole-circle factor: total convexity not guaranteed; antipodal pairs "
            "use the counterclockwise arc");
    if (sweep.has_error()) {
        rep.status = CheckStatus::inconclusive;
        rep.notes.push_back("evaluation error at sample " + std::to_string(sweep.error_index));
        return rep;
    }
    if (!sweep.has_worst()) {
        rep.status = CheckStatus::pass_on_samples;
        rep.worst_margin = 0.0;
        rep.notes.push_back("no constraints to violate; membership is base-region only");
        return rep;
    }
    rep.worst_margin = sweep.worst_margin;
    if (sweep.worst_margin > ctx.tol.tau) {
        rep.status = CheckStatus::violated;
        const ProductPoint& a = members[sweep.worst_index / m];
        const ProductPoint& b = members[sweep.worst_index % m];
        Violation v;
        v.x = a.base.coords;
        v.x.push_back(a.level);
        v.y = b.base.coords;
        v.y.push_back(b.level);
        pair_margin(sweep.worst_index, &v.t, &v.lhs, &v.rhs);
        v.margin = v.lhs - v.rhs;
        rep.violation = v;
        rep.notes.push_back("witness coordinates carry the level as the last entry");
    } else {
        rep.status = CheckStatus::pass_on_samples;
    }
    return rep;
}

CheckReport verify_epigraph_characterization(const FunctionOnManifold& f, const Bifunction& phi,
                                             const Region& region, const SamplingPlan& plan,
                                             const CheckContext& ctx) {
    ProbePlan probe_plan;
    probe_plan.tau = ctx.tol.tau;
    ProbeReport mono = probe_nondecreasing(phi, probe_plan, ctx.exec);
    if (mono.violated) {
        CheckReport rep;
        rep.kind = "epigraph_characterization";
        rep.status = CheckStatus::hypothesis_failed;
        rep.notes.push_back("phi is not non-decreasing on samples: " + mono.note);
        return rep;
    }
    CheckReport fn_rep = check_geodesic_phi_convex(f, phi, region, plan, ctx);
    CheckReport set_rep =
        check_geodesic_phi_convex_set(SetSpec::epigraph(f, region), phi, plan, ctx);

    CheckReport rep;
    rep.kind = "epigraph_characterization";
    rep.samples = fn_rep.samples + set_rep.samples;
    rep.notes.push_back("function check: " + std::string(to_string(fn_rep.status)));
    rep.notes.push_back("epigraph set check: " + std::string(to_string(set_rep.status)));
    if (fn_rep.status == set_rep.status &&
        (fn_rep.status == CheckStatus::pass_on_samples ||
         fn_rep.status == CheckStatus::violated))
    {
        rep.status = fn_rep.status;
        rep.worst_margin = fn_rep.worst_margin;
        if (fn_rep.status == CheckStatus::violated) {
            rep.violation = fn_rep.violation;
            rep.conclusion_kind = "geodesic_phi_convex";
            rep.effective_expr = f.expression().print();
        }
        rep.notes.push_back("verdicts agree");
    } else {
        rep.status = CheckStatus::inconclusive;
        rep.notes.push_back("verdicts disagree or a sub-check was inconclusive");
    }
    return rep;
}

CheckReport check_intersection_closure(std::span<const SetSpec> sets, const Bifunction& phi,
                                       const SamplingPlan& plan, const CheckContext& ctx) {
    if (sets.empty()) throw std::invalid_argument("intersection closure needs at least one set");
    for (std::size_t i = 0; i < sets.size(); ++i) {
        CheckReport base = check_geodesic_phi_convex_set(sets[i], phi, plan, ctx);
        if (base.status != CheckStatus::pass_on_samples) {
            CheckReport rep;
            rep.kind = "intersection_closure";
            rep.status = CheckStatus::hypothesis_failed;
            rep.samples = base.samples;
            rep.notes.push_back("set " + std::to_string(i) + " is not geodesic phi-convex: " +
                                std::string(to_string(base.status)));
            return rep;
        }
    }
    std::optional<SetSpec> meet = sets[0];
    for (std::size_t i = 1; i < sets.size() && meet; ++i)
        meet = SetSpec::conjunction(*meet, sets[i]);
    CheckReport rep;
    rep.kind = "intersection_closure";
    if (!meet) {
        rep.status = CheckStatus::inconclusive;
        rep.notes.push_back("empty intersection on samples");
        return rep;
    }
    CheckReport inter = check_geodesic_phi_convex_set(*meet, phi, plan, ctx);
    if (inter.status == CheckStatus::inconclusive) {
        inter.kind = "intersection_closure";
        return inter;
    }
    rep = inter;
    rep.kind = "intersection_closure";
    rep.notes.insert(rep.notes.begin(), "all " + std::to_string(sets.size()) +
                                            " sets individually pass; conjunction checked");
    return rep;
}

CheckReport sup_via_epigraph(std::span<const FunctionOnManifold> fs, const Bifunction& phi,
                             const Region& region, const SamplingPlan& plan,
                             const CheckContext& ctx) {
    if (fs.empty()) throw std::invalid_argument("sup family must be nonempty");
    ProbePlan probe_plan;
    probe_plan.tau = ctx.tol.tau;
    ProbeReport mono = probe_nondecreasing(phi, probe_plan, ctx.exec);
    if (mono.violated) {
        CheckReport rep;
        rep.kind = "sup_via_epigraph";
        rep.status = CheckStatus::hypothesis_failed;
        rep.notes.push_back("phi is not non-decreasing on samples: " + mono.note);
        return rep;
    }
    for (std::size_t i = 0; i < fs.size(); ++i) {
        CheckReport base =
            check_geodesic_phi_convex_set(SetSpec::epigraph(fs[i], region), phi, plan, ctx);
        if (base.status != CheckStatus::pass_on_samples) {
            CheckReport rep;
            rep.kind = "sup_via_epigraph";
            rep.status = CheckStatus::hypothesis_failed;
            rep.samples = base.samples;
            rep.notes.push_back("epigraph of family member " + std::to_string(i) +
                                " is not a geodesic phi-convex set: " +
                                std::string(to_string(base.status)));
            return rep;
        }
    }

    std::string text = "(" + fs[0].expression().print() + ")";
    for (std::size_t i = 1; i < fs.size(); ++i)
        text = "max(" + text + ",(" + fs[i].expression().print() + "))";
    FunctionOnManifold sup = FunctionOnManifold::parse(fs[0].spec(), text);

    // E_phi(sup f_i) = intersection of E_phi(f_i), membership-exact on samples
    std::vector<Point> bases =
        sample_region(region, plan.counts_for(region), plan.jitter, plan.seed);
    std::uint64_t mismatches = 0, product_points = 0;
    const double level_step = 0.5;  // default Lambda = 2 split into quarters
    for (const Point& b : bases) {
        double active = sup.value(b);
        for (int k = -1; k <= 4; ++k) {  // one level below the sup exercises non-members
            ProductPoint p{b, active + level_step * k};
            bool in_sup = epigraph_contains(sup, p, ctx.tol.tau);
            bool in_all = true;
            for (const FunctionOnManifold& fi : fs)
                in_all = in_all && epigraph_contains(fi, p, ctx.tol.tau);
            if (in_sup != in_all) ++mismatches;
            ++product_points;
        }
    }

    CheckReport rep = check_geodesic_phi_convex(sup, phi, region, plan, ctx);
    rep.kind = "sup_via_epigraph";
    rep.conclusion_kind = "geodesic_phi_convex";
    rep.effective_expr = sup.expression().print();
    rep.notes.insert(rep.notes.begin(), "epigraph identity E(sup) = intersection(E(f_i)) held at " +
                                            std::to_string(product_points - mismatches) + "/" +
                                            std::to_string(product_points) +
                                            " sampled product points");
    if (mismatches > 0) {
        rep.status = CheckStatus::inconclusive;
        rep.violation.reset();
        rep.notes.push_back("epigraph identity mismatches indicate an implementation defect");
    }
    return rep;
}

}  // namespace geoconvex
