#include "geoconvex/checker.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "geoconvex/util.hpp"

namespace geoconvex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxDim = 16;

std::string coords_str(std::span<const double> c) {
    std::string s = "(";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ",";
        s += format_double(c[i]);
    }
    return s + ")";
}

}  // namespace

std::string_view to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass_on_samples: return "pass-on-samples";
        case CheckStatus::violated: return "violated";
        case CheckStatus::hypothesis_failed: return "hypothesis-failed";
        case CheckStatus::inconclusive: return "inconclusive";
    }
    return "?";
}

FunctionOnManifold::FunctionOnManifold(ManifoldSpec spec, Expression expr)
    : spec_(std::move(spec)), expr_(std::move(expr)) {
    if (spec_.dim() > kMaxDim) throw std::invalid_argument("too many manifold factors");
    const auto names = spec_.coordinate_names();
    for (const std::string& var : expr_.variables()) {
        auto it = std::find(names.begin(), names.end(), var);
        if (it == names.end())
            throw std::invalid_argument("expression variable '" + var +
                                        "' is not a coordinate of this manifold");
        var_factor_.push_back(static_cast<int>(it - names.begin()));
    }
}

FunctionOnManifold FunctionOnManifold::parse(ManifoldSpec spec, std::string_view text) {
    return FunctionOnManifold(std::move(spec), Expression::parse(text));
}

double FunctionOnManifold::value(std::span<const double> coords) const {
    if (coords.size() != spec_.dim()) throw EvalError("coordinate count mismatch");
    double vals[kMaxDim];
    for (std::size_t k = 0; k < var_factor_.size(); ++k) vals[k] = coords[var_factor_[k]];
    return expr_.eval(std::span<const double>(vals, var_factor_.size()));
}

std::vector<int> SamplingPlan::counts_for(const Region& region) const {
    const std::size_t dim = region.spec().dim();
    std::vector<int> counts;
    if (factor_counts.empty()) {
        counts.reserve(dim);
        for (const Factor& f : region.spec().factors())
            counts.push_back(f.kind == Factor::Kind::line ? 33 : 16);
    } else if (factor_counts.size() == dim) {
        counts = factor_counts;
    } else {
        throw std::invalid_argument("sampling plan has " + std::to_string(factor_counts.size()) +
                                    " factor counts for a " + std::to_string(dim) +
                                    "-factor region");
    }
    for (int c : counts)
        if (c < 2) throw std::invalid_argument("factor grid counts must be at least 2");
    return counts;
}

std::vector<double> SamplingPlan::t_grid() const {
    if (t_count < 2) throw std::invalid_argument("t grid must contain t=0 and t=1");
    std::vector<double> ts(t_count);
    for (int k = 0; k < t_count; ++k) ts[k] = static_cast<double>(k) / (t_count - 1);
    return ts;
}

int SamplingPlan::interval_count() const {
    int n = factor_counts.empty() ? 33 : factor_counts[0];
    if (n < 2) throw std::invalid_argument("factor grid counts must be at least 2");
    return n;
}

PairSample geodesic_phi_sample(const FunctionOnManifold& f, const Bifunction* phi,
                               const ManifoldSpec& spec, const Point& x, const Point& y,
                               double t) {
    Geodesic g = geodesic_between(spec, x, y);
    PairSample s;
    s.lhs = f.value(g.at(t));
    double fx = f.value(x);
    double fy = f.value(y);
    s.rhs = phi ? fx + t * (*phi)(fy, fx) : (1.0 - t) * fx + t * fy;
    return s;
}

PairSample interval_phi_sample(const Expression& f, const Bifunction& phi, double x, double y,
                               double t) {
    auto eval1 = [&](double v) {
        return f.variables().empty() ? f.eval(std::span<const double>())
                                     : f.eval(std::span<const double>(&v, 1));
    };
    PairSample s;
    s.lhs = eval1(t * x + (1.0 - t) * y);
    s.rhs = eval1(y) + t * phi(eval1(x), eval1(y));
    return s;
}

double curve_derivative_fd(const FunctionOnManifold& f, const Geodesic& g, double t, double step) {
    double hi = f.value(g.at_extended(t + step));
    double lo = f.value(g.at_extended(t - step));
    return (hi - lo) / (2.0 * step);
}

namespace {

// ---------------------------------------------------------------------------
// shared sweep machinery
// ---------------------------------------------------------------------------

using PhiFn = std::function<double(double, double)>;

PhiFn phi_fn(const Bifunction& phi) {
    return [&phi](double u, double v) { return phi(u, v); };
}

// Optional per-coordinate map applied to curve points before evaluating f
// (the pushforward check evaluates f∘F⁻¹ along F∘α).
struct PointMap {
    const ManifoldSpec* spec = nullptr;
    std::vector<Expression> exprs;               // one per factor
    std::vector<std::vector<int>> var_factor;    // per expr: var slot -> factor

    static PointMap build(const ManifoldSpec& spec, std::span<const Expression> exprs) {
        if (exprs.size() != spec.dim())
            throw std::invalid_argument("coordinate map needs one expression per factor");
        PointMap m;
        m.spec = &spec;
        const auto names = spec.coordinate_names();
        for (const Expression& e : exprs) {
            std::vector<int> slots;
            for (const std::string& var : e.variables()) {
                auto it = std::find(names.begin(), names.end(), var);
                if (it == names.end())
                    throw std::invalid_argument("map variable '" + var +
                                                "' is not a coordinate name");
                slots.push_back(static_cast<int>(it - names.begin()));
            }
            m.exprs.push_back(e);
            m.var_factor.push_back(std::move(slots));
        }
        return m;
    }

    void apply(std::span<const double> in, double* out) const {
        double vals[kMaxDim];
        for (std::size_t i = 0; i < exprs.size(); ++i) {
            const auto& slots = var_factor[i];
            for (std::size_t k = 0; k < slots.size(); ++k) vals[k] = in[slots[k]];
            double v = exprs[i].eval(std::span<const double>(vals, slots.size()));
            if (spec->factors()[i].kind == Factor::Kind::circle) v = normalize_angle(v);
            out[i] = v;
        }
    }

    Point apply(const Point& p) const {
        std::vector<double> out(p.coords.size());
        apply(p.coords, out.data());
        return Point{std::move(out)};
    }
};

struct GeodesicSweepSpec {
    const ManifoldSpec* spec = nullptr;
    const FunctionOnManifold* f = nullptr;
    PhiFn phi;  // empty callable -> chord bound
    const std::vector<Point>* xs = nullptr;
    const std::vector<Point>* ys = nullptr;
    std::vector<double> ts;
    bool strict = false;
    const PointMap* transform = nullptr;
    Tolerances tol;
};

struct SweepOutcome {
    SweepResult sweep;
    std::uint64_t samples = 0;
    std::vector<double> fx, fy;
    bool ok = true;
    std::string error_note;
};

// Interpolates the closed-form geodesic between xs[i] and ys[j] at t into
// `out`; endpoints are copied exactly.
void interp_point(const ManifoldSpec& spec, const Point& x, const Point& y, double t,
                  double* out) {
    const std::size_t dim = spec.dim();
    if (t == 0.0) {
        std::copy(x.coords.begin(), x.coords.end(), out);
        return;
    }
    if (t == 1.0) {
        std::copy(y.coords.begin(), y.coords.end(), out);
        return;
    }
    for (std::size_t d = 0; d < dim; ++d) {
        if (spec.factors()[d].kind == Factor::Kind::circle) {
            double delta = signed_angle_delta(x.coords[d], y.coords[d]);
            out[d] = normalize_angle(x.coords[d] + t * delta);
        } else {
            out[d] = x.coords[d] + t * (y.coords[d] - x.coords[d]);
        }
    }
}

double eval_with_transform(const GeodesicSweepSpec& s, std::span<const double> coords) {
    if (!s.transform) return s.f->value(coords);
    double mapped[kMaxDim];
    s.transform->apply(coords, mapped);
    return s.f->value(std::span<const double>(mapped, coords.size()));
}

std::vector<double> endpoint_values(const GeodesicSweepSpec& s, const std::vector<Point>& pts) {
    std::vector<double> out(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) out[i] = eval_with_transform(s, pts[i].coords);
    return out;
}

// Evaluates all t-samples of one endpoint pair. Returns the reducible worst
// margin (raw for standard sweeps, strictness-adjusted for strict sweeps) and
// the count of excluded degenerate-pair samples.
SampleOutcome pair_outcome(const GeodesicSweepSpec& s, const std::vector<double>& fx,
                           const std::vector<double>& fy, std::uint64_t i, std::uint64_t j,
                           double* best_t, double* best_lhs, double* best_rhs) {
    SampleOutcome out;
    const Point& x = (*s.xs)[i];
    const Point& y = (*s.ys)[j];
    const bool degen = x.coords == y.coords;
    const double fxv = fx[i];
    const double fyv = fy[j];
    double coords[kMaxDim];
    try {
        const double phival = s.phi ? s.phi(fyv, fxv) : 0.0;
        double best = -kInf;
        for (double t : s.ts) {
            interp_point(*s.spec, x, y, t, coords);
            double lhs = eval_with_transform(s, std::span<const double>(coords, s.spec->dim()));
            double rhs = s.phi ? fxv + t * phival : (1.0 - t) * fxv + t * fyv;
            double margin = lhs - rhs;
            if (degen && s.phi && phival < 0.0 && margin > s.tol.tau) {
                ++out.excluded;  // x = y with phi(c,c) < 0: reported, never a violation
                continue;
            }
            double reducible = margin;
            if (s.strict) {
                bool interior = t > 0.0 && t < 1.0;
                reducible = (!degen && interior) ? margin + s.tol.tau_strict : margin - s.tol.tau;
            }
            if (reducible > best) {
                best = reducible;
                if (best_t) {
                    *best_t = t;
                    *best_lhs = lhs;
                    *best_rhs = rhs;
                }
            }
        }
        out.margin = best;
    } catch (const EvalError&) {
        out.failed = true;
    }
    return out;
}

SweepOutcome run_geodesic_sweep(const GeodesicSweepSpec& s, const ExecPolicy& exec) {
    SweepOutcome out;
    out.fx = endpoint_values(s, *s.xs);
    out.fy = (s.xs == s.ys) ? out.fx : endpoint_values(s, *s.ys);
    const std::uint64_t ny = s.ys->size();
    const std::uint64_t pairs = s.xs->size() * ny;
    out.samples = pairs * s.ts.size();
    out.sweep = sweep_worst(pairs, exec, [&](std::uint64_t p) {
        return pair_outcome(s, out.fx, out.fy, p / ny, p % ny, nullptr, nullptr, nullptr);
    });
    if (out.sweep.has_error()) {
        std::uint64_t p = out.sweep.error_index;
        try {
            double coords[kMaxDim];
            if (s.phi) s.phi(out.fy[p % ny], out.fx[p / ny]);
            for (double t : s.ts) {
                interp_point(*s.spec, (*s.xs)[p / ny], (*s.ys)[p % ny], t, coords);
                eval_with_transform(s, std::span<const double>(coords, s.spec->dim()));
            }
            out.error_note = "evaluation error at sample " + std::to_string(p);
        } catch (const std::exception& e) {
            out.error_note = "evaluation error at sample " + std::to_string(p) + ": " + e.what();
        }
        out.ok = false;
    }
    return out;
}

Violation materialize_geodesic(const GeodesicSweepSpec& s, const SweepOutcome& out,
                               std::uint64_t pair_index) {
    const std::uint64_t ny = s.ys->size();
    double t = 0.0, lhs = 0.0, rhs = 0.0;
    pair_outcome(s, out.fx, out.fy, pair_index / ny, pair_index % ny, &t, &lhs, &rhs);
    Violation v;
    v.x = (*s.xs)[pair_index / ny].coords;
    v.y = (*s.ys)[pair_index % ny].coords;
    v.t = t;
    v.lhs = lhs;
    v.rhs = rhs;
    v.margin = lhs - rhs;
    return v;
}

CheckReport finish_geodesic_sweep(std::string kind, const GeodesicSweepSpec& s,
                                  const SweepOutcome& out) {
    CheckReport rep;
    rep.kind = std::move(kind);
    rep.samples = out.samples;
    if (!out.ok) {
        rep.status = CheckStatus::inconclusive;
        rep.notes.push_back(out.error_note);
        return rep;
    }
    if (out.sweep.excluded > 0)
        rep.notes.push_back(std::to_string(out.sweep.excluded) +
                            " degenerate x=y samples with phi(c,c) < 0 excluded (phi-pathology)");
    if (!out.sweep.has_worst()) {
        rep.status = CheckStatus::pass_on_samples;
        rep.notes.push_back("no reducible samples");
        return rep;
    }
    if (s.strict) {
        const bool bad = out.sweep.worst_margin > 0.0;
        rep.status = bad ? CheckStatus::violated : CheckStatus::pass_on_samples;
        if (bad) {
            rep.violation = materialize_geodesic(s, out, out.sweep.worst_index);
            rep.worst_margin = rep.violation->margin;
            rep.notes.push_back("strict mode: margin must stay below -tau_strict at interior t");
        } else {
            Violation v = materialize_geodesic(s, out, out.sweep.worst_index);
            rep.worst_margin = v.margin;
        }
        return rep;
    }
    rep.worst_margin = out.sweep.worst_margin;
    if (out.sweep.worst_margin > s.tol.tau) {
        rep.status = CheckStatus::violated;
        rep.violation = materialize_geodesic(s, out, out.sweep.worst_index);
    } else {
        rep.status = CheckStatus::pass_on_samples;
    }
    return rep;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = (i == n - 1) ? b : a + (b - a) * i / (n - 1);
    if (n == 1) g[0] = a;
    return g;
}

// 1-D edition of the sweep for the interval inequality
// f(t x + (1-t) y) <= f(y) + t phi(f(x), f(y)).
struct IntervalSweepSpec {
    const Expression* f = nullptr;
    const Bifunction* phi = nullptr;
    const std::vector<double>* xs = nullptr;
    const std::vector<double>* ys = nullptr;
    std::vector<double> ts;
    bool strict = false;
    Tolerances tol;
};

double eval1(const Expression& f, double v) {
    return f.variables().empty() ? f.eval(std::span<const double>())
                                 : f.eval(std::span<const double>(&v, 1));
}

SampleOutcome interval_pair_outcome(const IntervalSweepSpec& s, const std::vector<double>& fx,
                                    const std::vector<double>& fy, std::uint64_t i,
                                    std::uint64_t j, double* best_t, double* best_lhs,
                                    double* best_rhs) {
    const double x = (*s.xs)[i];
    const double y = (*s.ys)[j];
    const bool degen = x == y;
    SampleOutcome result;
    try {
        const double phival = (*s.phi)(fx[i], fy[j]);
        double best = -kInf;
        for (double t : s.ts) {
            double lhs = eval1(*s.f, t * x + (1.0 - t) * y);
            double rhs = fy[j] + t * phival;
            double margin = lhs - rhs;
            if (degen && phival < 0.0 && margin > s.tol.tau) {
                ++result.excluded;
                continue;
            }
            double reducible = margin;
            if (s.strict) {
                bool interior = t > 0.0 && t < 1.0;
                reducible = (!degen && interior) ? margin + s.tol.tau_strict : margin - s.tol.tau;
            }
            if (reducible > best) {
                best = reducible;
                if (best_t) {
                    *best_t = t;
                    *best_lhs = lhs;
                    *best_rhs = rhs;
                }
            }
        }
        result.margin = best;
    } catch (const EvalError&) {
        result.failed = true;
    }
    return result;
}

struct IntervalSweepOutcome {
    SweepResult sweep;
    std::uint64_t samples = 0;
    std::vector<double> fx, fy;
    bool ok = true;
    std::string error_note;
};

IntervalSweepOutcome run_interval_sweep(const IntervalSweepSpec& s, const ExecPolicy& exec) {
    IntervalSweepOutcome out;
    auto values = [&](const std::vector<double>& pts) {
        std::vector<double> v(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) v[i] = eval1(*s.f, pts[i]);
        return v;
    };
    out.fx = values(*s.xs);
    out.fy = (s.xs == s.ys) ? out.fx : values(*s.ys);
    const std::uint64_t ny = s.ys->size();
    const std::uint64_t pairs = s.xs->size() * ny;
    out.samples = pairs * s.ts.size();
    out.sweep = sweep_worst(pairs, exec, [&](std::uint64_t p) {
        return interval_pair_outcome(s, out.fx, out.fy, p / ny, p % ny, nullptr, nullptr, nullptr);
    });
    if (out.sweep.has_error()) {
        std::uint64_t p = out.sweep.error_index;
        try {
            for (double t : s.ts)
                eval1(*s.f, t * (*s.xs)[p / ny] + (1.0 - t) * (*s.ys)[p % ny]);
            out.error_note = "evaluation error at sample " + std::to_string(p);
        } catch (const std::exception& e) {
            out.error_note = "evaluation error at sample " + std::to_string(p) + ": " + e.what();
        }
        out.ok = false;
    }
    return out;
}

CheckReport finish_interval_sweep(std::string kind, const IntervalSweepSpec& s,
                                  const IntervalSweepOutcome& out) {
    CheckReport rep;
    rep.kind = std::move(kind);
    rep.samples = out.samples;
    if (!out.ok) {
        rep.status = CheckStatus::inconclusive;
        rep.notes.push_back(out.error_note);
        return rep;
    }
    if (out.sweep.excluded > 0)
        rep.notes.push_back(std::to_string(out.sweep.excluded) +
                            " degenerate x=y samples with phi(c,c) < 0 excluded (phi-pathology)");
    if (!out.sweep.has_worst()) {
        rep.status = CheckStatus::pass_on_samples;
        return rep;
    }
    auto materialize = [&](std::uint64_t p) {
        const std::uint64_t ny = s.ys->size();
        double t = 0.0, lhs = 0.0, rhs = 0.0;
        interval_pair_outcome(s, out.fx, out.fy, p / ny, p % ny, &t, &lhs, &rhs);
        Violation v;
        v.x = {(*s.xs)[p / ny]};
        v.y = {(*s.ys)[p % ny]};
        v.t = t;
        v.lhs = lhs;
        v.rhs = rhs;
        v.margin = lhs - rhs;
        return v;
    };
    if (s.strict) {
        const bool bad = out.sweep.worst_margin > 0.0;
        rep.status = bad ? CheckStatus::violated : CheckStatus::pass_on_samples;
        Violation v = materialize(out.sweep.worst_index);
        rep.worst_margin = v.margin;
        if (bad) {
            rep.violation = v;
            rep.notes.push_back("strict mode: margin must stay below -tau_strict at interior t");
        }
        return rep;
    }
    rep.worst_margin = out.sweep.worst_margin;
    if (out.sweep.worst_margin > s.tol.tau) {
        rep.status = CheckStatus::violated;
        rep.violation = materialize(out.sweep.worst_index);
    } else {
        rep.status = CheckStatus::pass_on_samples;
    }
    return rep;
}

void require_univariate(const Expression& f, const char* what) {
    if (f.variables().size() > 1)
        throw std::invalid_argument(std::string(what) + " must have at most one variable");
}

CheckReport hypothesis_failed(std::string kind, std::string why, std::uint64_t samples = 0) {
    CheckReport rep;
    rep.kind = std::move(kind);
    rep.status = CheckStatus::hypothesis_failed;
    rep.samples = samples;
    rep.notes.push_back(std::move(why));
    return rep;
}

std::string summarize(const CheckReport& rep) {
    std::string s(to_string(rep.status));
    if (rep.worst_margin) s += ", worst margin " + format_double(*rep.worst_margin);
    if (rep.violation)
        s += ", witness x=" + coords_str(rep.violation->x) + " y=" + coords_str(rep.violation->y) +
             " t=" + format_double(rep.violation->t);
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// interval checks
// ---------------------------------------------------------------------------

CheckReport check_phi_convex_interval(const Expression& f, const Bifunction& phi, double a,
                                      double b, const SamplingPlan& plan, const CheckContext& ctx,
                                      bool strict) {
    require_univariate(f, "interval check function");
    if (!(a <= b)) throw std::invalid_argument("interval requires a <= b");
    std::vector<double> grid = linspace(a, b, plan.interval_count());
    IntervalSweepSpec s{&f, &phi, &grid, &grid, plan.t_grid(), strict, ctx.tol};
    return finish_interval_sweep("phi_convex_interval", s, run_interval_sweep(s, ctx.exec));
}

CheckReport check_slope_inequality(const Expression& f, const Bifunction& phi, double a, double b,
                                   const SamplingPlan& plan, const CheckContext& ctx) {
    require_univariate(f, "interval check function");
    const int n = plan.interval_count();
    if (!(a < b) || n < 3)
        throw std::invalid_argument("slope inequality needs a < b and at least 3 grid points");
    std::vector<double> grid = linspace(a, b, n);
    const double min_gap = 0.45 * (b - a) / (n - 1);
    std::vector<std::array<int, 3>> triples;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                if (grid[j] - grid[i] >= min_gap && grid[k] - grid[j] >= min_gap)
                    triples.push_back({i, j, k});
    if (triples.empty())
        throw std::invalid_argument("minimum gap not satisfiable by the grid");

    std::vector<double> fv(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) fv[i] = eval1(f, grid[i]);

    // slope form: (f(x2)-f(x))/(x2-x) >= phi(f(x1),f(x2))/(x1-x2); margin is the
    // phi side minus the difference-quotient side.
    auto margins = [&](std::uint64_t idx, double* lhs, double* rhs) {
        auto [i, j, k] = triples[idx];
        double quotient = (fv[k] - fv[j]) / (grid[k] - grid[j]);
        double phi_side = phi(fv[i], fv[k]) / (grid[i] - grid[k]);
        if (lhs) *lhs = quotient;
        if (rhs) *rhs = phi_side;
        return phi_side - quotient;
    };
    SweepResult sweep = sweep_worst(triples.size(), ctx.exec, [&](std::uint64_t idx) {
        SampleOutcome out;
        try {
            out.margin = margins(idx, nullptr, nullptr);
        } catch (const EvalError&) {
            out.failed = true;
        }
        return out;
    });

    CheckReport rep;
    rep.kind = "slope_inequality";
    rep.samples = triples.size();
    rep.notes.push_back("violation margin = phi side minus difference-quotient side");
    if (sweep.has_error()) {
        rep.status = CheckStatus::inconclusive;
        rep.notes.push_back("evaluation error at sample " + std::to_string(sweep.error_index));
        return rep;
    }
    rep.worst_margin = sweep.worst_margin;
    if (sweep.worst_margin > ctx.tol.tau) {
        rep.status = CheckStatus::violated;
        auto [i, j, k] = triples[sweep.worst_index];
        Violation v;
        v.x = {grid[i]};
        v.y = {grid[k]};
        v.t = grid[j];  // the middle point of the triple
        margins(sweep.worst_index, &v.lhs, &v.rhs);
        v.margin = v.rhs - v.lhs;
        rep.violation = v;
    } else {
        rep.status = CheckStatus::pass_on_samples;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// geodesic checks
// ---------------------------------------------------------------------------

namespace {

CheckReport geodesic_check(std::string kind, const FunctionOnManifold& f, const Bifunction* phi,
                           const Region& region, const SamplingPlan& plan, const CheckContext& ctx,
                           bool strict, const PointMap* transform = nullptr) {
    if (!(f.spec() == region.spec()))
        throw std::invalid_argument("function and region manifolds differ");
    std::vector<Point> pts =
        sample_region(region, plan.counts_for(region), plan.jitter, plan.seed);
    GeodesicSweepSpec s;
    s.spec = &region.spec();
    s.f = &f;
    if (phi) s.phi = phi_fn(*phi);
    s.xs = &pts;
    s.ys = &pts;
    s.ts = plan.t_grid();
    s.strict = strict;
    s.transform = transform;
    s.tol = ctx.tol;
    CheckReport rep = finish_geodesic_sweep(std::move(kind), s, run_geodesic_sweep(s, ctx.exec));
    if (!region.totally_convex())
        rep.notes.push_back(
            "region has a whole-circle factor: total convexity not guaranteed; antipodal pairs "
            "use the counterclockwise arc");
    return rep;
}

}  // namespace

CheckReport check_geodesic_phi_convex(const FunctionOnManifold& f, const Bifunction& phi,
                                      const Region& region, const SamplingPlan& plan,
                                      const CheckContext& ctx, bool strict) {
    return geodesic_check("geodesic_phi_convex", f, &phi, region, plan, ctx, strict);
}

CheckReport check_geodesic_convex(const FunctionOnManifold& f, const Region& region,
                                  const SamplingPlan& plan, const CheckContext& ctx) {
    return geodesic_check("geodesic_convex", f, nullptr, region, plan, ctx, false);
}

CheckReport check_differential_criterion(const FunctionOnManifold& f, const Bifunction& phi,
                                         const Region& region, const SamplingPlan& plan,
                                         const CheckContext& ctx) {
    if (!(f.spec() == region.spec()))
        throw std::invalid_argument("function and region manifolds differ");
    std::vector<Point> pts =
        sample_region(region, plan.counts_for(region), plan.jitter, plan.seed);
    const std::uint64_t m = pts.size();
    std::vector<double> fv(m);
    for (std::uint64_t i = 0; i < m; ++i) fv[i] = f.value(pts[i]);

    auto derivative = [&](const Point& x, const Point& y) {
        Geodesic g = geodesic_between(f.spec(), x, y);
        try {
            return curve_derivative_fd(f, g, 0.0, ctx.tol.fd_step);
        } catch (const EvalError&) {
            // stencil left the domain: shrink once, then give up
            return curve_derivative_fd(f, g, 0.0, ctx.tol.fd_step / 10.0);
        }
    };

    SweepResult sweep = sweep_worst(m * m, ctx.exec, [&](std::uint64_t p) {
        SampleOutcome out;
        const Point& x = pts[p / m];
        const Point& y = pts[p % m];
        try {
            double rhs = phi(fv[p % m], fv[p / m]);
            double d = derivative(x, y);
            double margin = d - rhs;
            if (x.coords == y.coords && rhs < 0.0 && margin > ctx.tol.fd_tau) {
                out.excluded = 1;
                return out;
            }
            out.margin = margin;
        } catch (const EvalError&) {
            out.failed = true;
        }
        return out;
    });

    CheckReport rep;
    rep.kind = "differential_criterion";
    rep.samples = m * m;
    rep.notes.push_back("directional derivative by central difference along the geodesic, step " +
                        format_double(ctx.tol.fd_step) + ", tolerance " +
                        format_double(ctx.tol.fd_tau));
    if (sweep.excluded > 0)
        rep.notes.push_back(std::to_string(sweep.excluded) +
                            " degenerate x=y samples with phi(c,c) < 0 excluded (phi-pathology)");
    if (sweep.has_error()) {
        rep.status = CheckStatus::inconclusive;
        rep.notes.push_back("finite-difference stencil failed at sample " +
                            std::to_string(sweep.error_index) + " after one retry");
        return rep;
    }
    rep.worst_margin = sweep.worst_margin;
    if (sweep.worst_margin > ctx.tol.fd_tau) {
        rep.status = CheckStatus::violated;
        const Point& x = pts[sweep.worst_index / m];
        const Point& y = pts[sweep.worst_index % m];
        Violation v;
        v.x = x.coords;
        v.y = y.coords;
        v.t = 0.0;
        v.lhs = derivative(x, y);
        v.rhs = phi(fv[sweep.worst_index % m], fv[sweep.worst_index / m]);
        v.margin = v.lhs - v.rhs;
        rep.violation = v;
    } else {
        rep.status = CheckStatus::pass_on_samples;
    }
    return rep;
}

CheckReport verify_restriction_equivalence(const FunctionOnManifold& f, const Bifunction& phi,
                                           const Region& region, const SamplingPlan& plan,
                                           const CheckContext& ctx) {
    if (!(f.spec() == region.spec()))
        throw std::invalid_argument("function and region manifolds differ");
    const ManifoldSpec& spec = f.spec();
    std::vector<Point> pts =
        sample_region(region, plan.counts_for(region), plan.jitter, plan.seed);
    const std::vector<double> ss = plan.t_grid();  // restriction parameters s1, s2
    const std::vector<double> us = plan.t_grid();  // interval-form parameter
    const std::uint64_t m = pts.size();
    const std::uint64_t pairs = m * m;

    struct PairVerdicts {
        bool one_d = false;
        bool manifold = false;
        double max_delta = 0.0;
        bool failed = false;
    };
    auto verdicts_of = [&](std::uint64_t p) {
        PairVerdicts out;
        const Point& x = pts[p / m];
        const Point& y = pts[p % m];
        double coords[kMaxDim];
        try {
            Geodesic alpha = geodesic_between(spec, x, y);
            // g_xy(s) = f(alpha(s)); the interval inequality over (s1, s2, u) versus
            // the geodesic form over the reconstructed sub-geodesic between alpha(s2), alpha(s1)
            for (double s1 : ss) {
                for (double s2 : ss) {
                    Point pa = alpha.at(s2);
                    Point pb = alpha.at(s1);
                    double ga = f.value(pa);
                    double gb = f.value(pb);
                    double phival = phi(gb, ga);
                    Geodesic sub = geodesic_between(spec, pa, pb);
                    for (double u : us) {
                        double su = u * s1 + (1.0 - u) * s2;
                        interp_point(spec, x, y, su, coords);
                        double lhs1 =
                            f.value(std::span<const double>(coords, spec.dim()));
                        double rhs = ga + u * phival;
                        double m1 = lhs1 - rhs;
                        double lhs2 = f.value(sub.at(u));
                        double m2 = lhs2 - rhs;
                        if (m1 > ctx.tol.tau) out.one_d = true;
                        if (m2 > ctx.tol.tau) out.manifold = true;
                        out.max_delta = std::max(out.max_delta, std::abs(m1 - m2));
                    }
                }
            }
        } catch (const EvalError&) {
            out.failed = true;
        }
        return out;
    };

    std::uint64_t disagreements = 0, violated_pairs = 0;
    std::uint64_t first_disagreement = kNoIndex, first_error = kNoIndex;
    double max_delta = 0.0;
    const std::int64_t spairs = static_cast<std::int64_t>(pairs);
    const int threads = ctx.exec.resolved_threads();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)                              \
    reduction(+ : disagreements, violated_pairs) reduction(min : first_disagreement, first_error) \
    reduction(max : max_delta) if (ctx.exec.parallel)
#endif
    for (std::int64_t p = 0; p < spairs; ++p) {
        PairVerdicts v = verdicts_of(static_cast<std::uint64_t>(p));
        if (v.failed) {
            first_error = std::min(first_error, static_cast<std::uint64_t>(p));
            continue;
        }
        if (v.one_d != v.manifold) {
            ++disagreements;
            first_disagreement = std::min(first_disagreement, static_cast<std::uint64_t>(p));
        }
        if (v.one_d) ++violated_pairs;
        max_delta = std::max(max_delta, v.max_delta);
    }

    CheckReport rep;
    rep.kind = "restriction_equivalence";
    rep.samples = pairs * ss.size() * ss.size() * us.size() * 2;
    rep.notes.push_back(std::to_string(pairs) + " pairs, " +
                        std::to_string(ss.size() * ss.size() * us.size()) +
                        " (s1,s2,u) triples per pair, " + std::to_string(disagreements) +
                        " verdict disagreements");
    rep.notes.push_back("max cross-route margin delta " + format_double(max_delta));
    rep.notes.push_back(std::to_string(violated_pairs) + " pairs violate the 1-D reduction");
    if (first_error != kNoIndex) {
        rep.status = CheckStatus::inconclusive;
        rep.notes.push_back("evaluation error at pair " + std::to_string(first_error));
        return rep;
    }
    if (disagreements > 0) {
        rep.status = CheckStatus::inconclusive;
        const Point& x = pts[first_disagreement / m];
        const Point& y = pts[first_disagreement % m];
        rep.notes.push_back("first disagreeing pair: x=" + coords_str(x.coords) +
                            " y=" + coords_str(y.coords));
        return rep;
    }
    rep.status = violated_pairs > 0 ? CheckStatus::violated : CheckStatus::pass_on_samples;
    if (rep.status == CheckStatus::violated) {
        // agreed violation: surface the worst sub-pair sample as a plain
        // geodesic-form witness between interior curve points
        Violation best;
        bool have = false;
        for (std::uint64_t p = 0; p < pairs && !have; ++p) {
            PairVerdicts v = verdicts_of(p);
            if (!v.manifold) continue;
            Geodesic alpha = geodesic_between(spec, pts[p / m], pts[p % m]);
            for (double s1 : ss) {
                for (double s2 : ss) {
                    Point pa = alpha.at(s2);
                    Point pb = alpha.at(s1);
                    Geodesic sub = geodesic_between(spec, pa, pb);
                    double ga = f.value(pa);
                    double phival = phi(f.value(pb), ga);
                    for (double u : us) {
                        double lhs = f.value(sub.at(u));
                        double rhs = ga + u * phival;
                        if (lhs - rhs > (have ? best.margin : ctx.tol.tau)) {
                            best = Violation{pa.coords, pb.coords, u, lhs, rhs, lhs - rhs};
                            have = true;
                        }
                    }
                }
            }
        }
        if (have) {
            rep.violation = best;
            rep.worst_margin = best.margin;
            rep.conclusion_kind = "geodesic_phi_convex";
            rep.effective_expr = f.expression().print();
        } else {
            rep.status = CheckStatus::pass_on_samples;  // cannot materialize: keep invariant
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// mean-value audits
// ---------------------------------------------------------------------------

CheckReport audit_mean_value(const Expression& f, const Bifunction& phi, double x1, double x2,
                             const SamplingPlan& plan, const CheckContext& ctx) {
    require_univariate(f, "mean-value audit function");
    if (!(x1 < x2)) throw std::invalid_argument("mean-value audit requires x1 < x2");
    const std::string var = f.variables().empty() ? "x" : f.variables()[0];
    double f1 = eval1(f, x1), f2 = eval1(f, x2);
    if (std::abs(f1 - f2) <= ctx.tol.tau)
        return hypothesis_failed("mean_value", "f(x1) = f(x2); the ratio in (3.3) is undefined");

    const double ratio = phi(f1, f2) / (f1 - f2);
    const int n = plan.interval_count();
    std::vector<double> xi(n), deriv(n);
    for (int k = 0; k < n; ++k) {
        xi[k] = x1 + (x2 - x1) * (k + 1) / (n + 1);  // interior grid
        deriv[k] = derivative_fd(f, var, Binding{{var, xi[k]}}, ctx.tol.fd_step);
    }

    CheckReport rep;
    rep.kind = "mean_value";
    rep.samples = static_cast<std::uint64_t>(n) * n;
    rep.notes.push_back("ratio phi(f(x1),f(x2))/(f(x1)-f(x2)) = " + format_double(ratio));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double mid = ratio * deriv[j];
            if (deriv[i] >= mid - ctx.tol.fd_tau && mid >= deriv[j] - ctx.tol.fd_tau) {
                rep.status = CheckStatus::pass_on_samples;
                rep.notes.push_back(
                    "witness chain: f'(" + format_double(xi[i]) + ") = " + format_double(deriv[i]) +
                    " >= ratio*f'(" + format_double(xi[j]) + ") = " + format_double(mid) +
                    " >= f'(eta) = " + format_double(deriv[j]));
                rep.worst_margin = 0.0;
                return rep;
            }
        }
    }
    rep.status = CheckStatus::inconclusive;
    rep.notes.push_back(
        "no (xi, eta) satisfied the chain; existence claims cannot be falsified by sampling");
    return rep;
}

CheckReport audit_three_point(const Expression& f, const Bifunction& phi, double x, double y,
                              double z, const CheckContext& ctx) {
    require_univariate(f, "three-point audit function");
    if (!(x < y && y < z)) throw std::invalid_argument("three-point audit requires x < y < z");
    const std::string var = f.variables().empty() ? "x" : f.variables()[0];
    double dy = derivative_fd(f, var, Binding{{var, y}}, ctx.tol.fd_step);
    double dz = derivative_fd(f, var, Binding{{var, z}}, ctx.tol.fd_step);
    double phixy = phi(eval1(f, x), eval1(f, y));
    double phiyz = phi(eval1(f, y), eval1(f, z));

    double i_lhs = dy * (x - y) + dz * (y - z);
    double i_rhs = phixy + phiyz;
    bool holds_i = i_lhs <= i_rhs + ctx.tol.fd_tau;

    double c_lhs = dy + dz;
    double c_rhs = i_rhs / (x - z);
    bool holds_ii = c_lhs <= c_rhs + ctx.tol.fd_tau;
    bool holds_iii = c_lhs >= c_rhs - ctx.tol.fd_tau;

    CheckReport rep;
    rep.kind = "three_point";
    rep.samples = 3;
    rep.notes.push_back("(i) proof-step inequality: " + format_double(i_lhs) +
                        " <= " + format_double(i_rhs) + ": " + (holds_i ? "holds" : "violated"));
    rep.notes.push_back("(ii) displayed conclusion f'(y)+f'(z) <= [phi+phi]/(x-z): " +
                        format_double(c_lhs) + " <= " + format_double(c_rhs) + ": " +
                        (holds_ii ? "holds" : "violated"));
    rep.notes.push_back("(iii) sign-corrected conclusion (>=, division by x-z < 0): " +
                        format_double(c_lhs) + " >= " + format_double(c_rhs) + ": " +
                        (holds_iii ? "holds" : "violated"));
    rep.worst_margin = i_lhs - i_rhs;
    if (holds_i) {
        rep.status = CheckStatus::pass_on_samples;
    } else {
        rep.status = CheckStatus::violated;
        Violation v;
        v.x = {x};
        v.y = {z};
        v.t = y;
        v.lhs = i_lhs;
        v.rhs = i_rhs;
        v.margin = i_lhs - i_rhs;
        rep.violation = v;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// closure theorems
// ---------------------------------------------------------------------------

namespace {

std::pair<double, double> sampled_range(const FunctionOnManifold& f, const std::vector<Point>& pts) {
    double lo = kInf, hi = -kInf;
    for (const Point& p : pts) {
        double v = f.value(p);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

// g(a) <= g(b) + tau for every ordered value pair of the grid
bool nondecreasing_on(const Expression& g, const std::vector<double>& grid, double tau,
                      std::string* why) {
    std::vector<double> gv(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) gv[i] = eval1(g, grid[i]);
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i; j < grid.size(); ++j)
            if (gv[i] > gv[j] + tau) {
                if (why)
                    *why = "g(" + format_double(grid[i]) + ") = " + format_double(gv[i]) +
                           " > g(" + format_double(grid[j]) + ") = " + format_double(gv[j]);
                return false;
            }
    return true;
}

FunctionOnManifold compose_outer(const FunctionOnManifold& f, const Expression& g) {
    const std::string var = g.variables().empty() ? "u" : g.variables()[0];
    Expression comp = g.substitute({{var, f.expression()}});
    return FunctionOnManifold(f.spec(), std::move(comp));
}

}  // namespace

CheckReport check_composition(const FunctionOnManifold& f, const Expression& g,
                              const Bifunction& phi, const Region& region,
                              const SamplingPlan& plan, const CheckContext& ctx, bool strict) {
    require_univariate(g, "outer function");
    CheckReport hyp1 = check_geodesic_convex(f, region, plan, ctx);
    if (hyp1.status != CheckStatus::pass_on_samples)
        return hypothesis_failed("composition",
                                 "inner function is not geodesic convex on the region: " +
                                     summarize(hyp1),
                                 hyp1.samples);

    std::vector<Point> pts = sample_region(region, plan.counts_for(region), plan.jitter, plan.seed);
    auto [lo, hi] = sampled_range(f, pts);
    std::vector<double> value_grid = linspace(lo, hi, plan.interval_count());
    std::string why;
    if (!nondecreasing_on(g, value_grid, ctx.tol.tau, &why))
        return hypothesis_failed("composition",
                                 "outer function is not non-decreasing on the sampled range of f: " +
                                     why);
    CheckReport hyp3 = check_phi_convex_interval(g, phi, lo, hi, plan, ctx, strict);
    if (hyp3.status != CheckStatus::pass_on_samples)
        return hypothesis_failed(
            "composition",
            "outer function is not phi-convex on the sampled range of f: " + summarize(hyp3),
            hyp3.samples);

    FunctionOnManifold comp = compose_outer(f, g);
    CheckReport rep = check_geodesic_phi_convex(comp, phi, region, plan, ctx, strict);
    rep.kind = "composition";
    rep.conclusion_kind = "geodesic_phi_convex";
    rep.effective_expr = comp.expression().print();
    rep.notes.insert(rep.notes.begin(),
                     "hypotheses hold on samples: geodesic convexity of f, monotonicity and "
                     "phi-convexity of g on [" +
                         format_double(lo) + ", " + format_double(hi) + "]");
    return rep;
}

CheckReport check_weighted_sum(std::span<const FunctionOnManifold> fs,
                               std::span<const double> lambdas, const Bifunction& phi,
                               const Region& region, const SamplingPlan& plan,
                               const CheckContext& ctx) {
    if (fs.empty() || fs.size() != lambdas.size())
        throw std::invalid_argument("weighted sum needs matching nonempty function/weight lists");
    for (double l : lambdas)
        if (l < 0.0)
            return hypothesis_failed("weighted_sum", "weights must be nonnegative, got " +
                                                         format_double(l));
    ProbePlan probe_plan;
    probe_plan.tau = ctx.tol.tau;
    ProbeReport linear = probe_nonneg_linear(phi, probe_plan, ctx.exec);
    if (linear.violated)
        return hypothesis_failed("weighted_sum",
                                 "phi is not nonnegatively linear on samples: " + linear.note,
                                 linear.samples);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        CheckReport base = check_geodesic_phi_convex(fs[i], phi, region, plan, ctx);
        if (base.status != CheckStatus::pass_on_samples)
            return hypothesis_failed("weighted_sum",
                                     "component " + std::to_string(i) +
                                         " is not geodesic phi-convex: " + summarize(base),
                                     base.samples);
    }
    std::string text;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (i) text += " + ";
        text += "(" + format_double(lambdas[i]) + ")*(" + fs[i].expression().print() + ")";
    }
    FunctionOnManifold sum = FunctionOnManifold::parse(fs[0].spec(), text);
    CheckReport rep = check_geodesic_phi_convex(sum, phi, region, plan, ctx);
    rep.kind = "weighted_sum";
    rep.conclusion_kind = "geodesic_phi_convex";
    rep.effective_expr = sum.expression().print();
    rep.notes.insert(rep.notes.begin(),
                     "hypotheses hold on samples: phi nonnegatively linear, every component "
                     "geodesic phi-convex, weights nonnegative");
    return rep;
}

CheckReport check_pushforward(const FunctionOnManifold& f, const Bifunction& phi,
                              std::span<const Expression> forward,
                              std::span<const Expression> inverse, const Region& region,
                              const SamplingPlan& plan, const CheckContext& ctx) {
    const ManifoldSpec& spec = f.spec();
    PointMap fwd = PointMap::build(spec, forward);
    PointMap inv = PointMap::build(spec, inverse);

    std::vector<Point> pts = sample_region(region, plan.counts_for(region), plan.jitter, plan.seed);
    for (const Point& p : pts) {
        Point round = inv.apply(fwd.apply(p));
        for (std::size_t d = 0; d < spec.dim(); ++d) {
            double err = spec.factors()[d].kind == Factor::Kind::circle
                             ? std::abs(signed_angle_delta(p.coords[d], round.coords[d]))
                             : std::abs(round.coords[d] - p.coords[d]);
            if (err > 1e-9)
                return hypothesis_failed(
                    "pushforward", "F_inv(F(p)) != p at p=" + coords_str(p.coords) +
                                       " (coordinate " + std::to_string(d) + " off by " +
                                       format_double(err) + ")");
        }
    }
    CheckReport base = check_geodesic_phi_convex(f, phi, region, plan, ctx);
    if (base.status != CheckStatus::pass_on_samples)
        return hypothesis_failed("pushforward",
                                 "f is not geodesic phi-convex on the source region: " +
                                     summarize(base),
                                 base.samples);

    // f∘F⁻¹ as one expression; evaluated along the image curves F∘alpha.
    std::map<std::string, Expression> repl;
    const auto names = spec.coordinate_names();
    for (std::size_t d = 0; d < spec.dim(); ++d) repl.emplace(names[d], inverse[d]);
    FunctionOnManifold pulled(spec, f.expression().substitute(repl));

    GeodesicSweepSpec s;
    s.spec = &spec;
    s.f = &pulled;
    s.phi = phi_fn(phi);
    s.xs = &pts;
    s.ys = &pts;
    s.ts = plan.t_grid();
    s.tol = ctx.tol;
    s.transform = &fwd;
    CheckReport rep = finish_geodesic_sweep("pushforward", s, run_geodesic_sweep(s, ctx.exec));
    rep.conclusion_kind = "pushforward";
    rep.effective_expr = pulled.expression().print();
    rep.notes.insert(rep.notes.begin(),
                     "inverse pair verified to 1e-9 on " + std::to_string(pts.size()) +
                         " samples; conclusion checked along image curves F(alpha(t))");
    return rep;
}

CheckReport check_lipschitz_bound(const Expression& f, const Bifunction& phi, double center,
                                  double h, double r, double eps, const SamplingPlan& plan,
                                  const CheckContext& ctx) {
    require_univariate(f, "Lipschitz check function");
    if (!(h > 0.0 && r > 0.0 && eps > 0.0 && r + eps < h))
        throw std::invalid_argument("Lipschitz bound needs 0 < r, 0 < eps, r + eps < h");
    const int n = plan.interval_count();
    std::vector<double> outer = linspace(center - h, center + h, n);
    std::vector<double> fb(outer.size());
    for (std::size_t i = 0; i < outer.size(); ++i) fb[i] = eval1(f, outer[i]);

    double m_phi = -kInf;
    for (double u : fb)
        for (double v : fb) m_phi = std::max(m_phi, phi(u, v));
    const double k_const = m_phi / eps;

    std::vector<double> inner = linspace(center - r, center + r, n);
    std::vector<double> fr(inner.size());
    for (std::size_t i = 0; i < inner.size(); ++i) fr[i] = eval1(f, inner[i]);

    const std::uint64_t m = inner.size();
    SweepResult sweep = sweep_worst(m * m, ctx.exec, [&](std::uint64_t p) {
        SampleOutcome out;
        std::uint64_t i = p / m, j = p % m;
        out.margin = std::abs(fr[i] - fr[j]) - k_const * std::abs(inner[j] - inner[i]);
        return out;
    });
    double max_quotient = 0.0;
    for (std::uint64_t i = 0; i < m; ++i)
        for (std::uint64_t j = 0; j < m; ++j)
            if (inner[i] != inner[j])
                max_quotient = std::max(max_quotient,
                                        std::abs(fr[i] - fr[j]) / std::abs(inner[j] - inner[i]));

    CheckReport rep;
    rep.kind = "lipschitz_bound";
    rep.samples = m * m;
    rep.notes.push_back("M_phi = " + format_double(m_phi) + " over sampled f(B) x f(B), K = " +
                        format_double(k_const));
    rep.notes.push_back("max empirical quotient |f(x)-f(y)| / |y-x| = " +
                        format_double(max_quotient));
    rep.worst_margin = sweep.worst_margin;
    if (sweep.worst_margin > ctx.tol.tau) {
        rep.status = CheckStatus::violated;
        std::uint64_t i = sweep.worst_index / m, j = sweep.worst_index % m;
        Violation v;
        v.x = {inner[i]};
        v.y = {inner[j]};
        v.t = 0.0;
        v.lhs = std::abs(fr[i] - fr[j]);
        v.rhs = k_const * std::abs(inner[j] - inner[i]);
        v.margin = v.lhs - v.rhs;
        rep.violation = v;
    } else {
        rep.status = CheckStatus::pass_on_samples;
    }
    return rep;
}

CheckReport check_lipschitz_bound(const FunctionOnManifold& f, const Bifunction& phi,
                                  const Point& center, double h, double r, double eps,
                                  const SamplingPlan& plan, const CheckContext& ctx) {
    const ManifoldSpec& spec = f.spec();
    for (const Factor& fac : spec.factors())
        if (fac.kind != Factor::Kind::line)
            throw std::invalid_argument("the Lipschitz check needs Euclidean factors only");
    if (center.coords.size() != spec.dim())
        throw std::invalid_argument("center does not match the manifold dimension");
    if (!(h > 0.0 && r > 0.0 && eps > 0.0 && r + eps < h))
        throw std::invalid_argument("Lipschitz bound needs 0 < r, 0 < eps, r + eps < h");

    auto ball_points = [&](double radius) {
        std::vector<RegionFactor> box;
        for (std::size_t d = 0; d < spec.dim(); ++d)
            box.push_back(RegionFactor::interval(center.coords[d] - radius,
                                                 center.coords[d] + radius));
        Region region(spec, box);
        std::vector<int> counts(spec.dim(), spec.dim() == 1 ? plan.interval_count() : 9);
        std::vector<Point> pts = sample_region(region, counts, false, plan.seed);
        std::vector<Point> inside;
        for (Point& p : pts) {
            double dist2 = 0.0;
            for (std::size_t d = 0; d < spec.dim(); ++d) {
                double delta = p.coords[d] - center.coords[d];
                dist2 += delta * delta;
            }
            if (dist2 <= radius * radius + ctx.tol.tau) inside.push_back(std::move(p));
        }
        return inside;
    };
    auto norm = [&](const Point& a, const Point& b) {
        double dist2 = 0.0;
        for (std::size_t d = 0; d < spec.dim(); ++d) {
            double delta = b.coords[d] - a.coords[d];
            dist2 += delta * delta;
        }
        return std::sqrt(dist2);
    };

    std::vector<Point> outer = ball_points(h);
    std::vector<double> fb(outer.size());
    for (std::size_t i = 0; i < outer.size(); ++i) fb[i] = f.value(outer[i]);
    double m_phi = -kInf;
    for (double u : fb)
        for (double v : fb) m_phi = std::max(m_phi, phi(u, v));
    const double k_const = m_phi / eps;

    std::vector<Point> inner = ball_points(r);
    std::vector<double> fr(inner.size());
    for (std::size_t i = 0; i < inner.size(); ++i) fr[i] = f.value(inner[i]);

    const std::uint64_t m = inner.size();
    SweepResult sweep = sweep_worst(m * m, ctx.exec, [&](std::uint64_t p) {
        SampleOutcome out;
        std::uint64_t i = p / m, j = p % m;
        out.margin = std::abs(fr[i] - fr[j]) - k_const * norm(inner[i], inner[j]);
        return out;
    });
    double max_quotient = 0.0;
    for (std::uint64_t i = 0; i < m; ++i)
        for (std::uint64_t j = 0; j < m; ++j) {
            double dist = norm(inner[i], inner[j]);
            if (dist > 0.0)
                max_quotient = std::max(max_quotient, std::abs(fr[i] - fr[j]) / dist);
        }

    CheckReport rep;
    rep.kind = "lipschitz_bound";
    rep.samples = m * m;
    rep.notes.push_back("M_phi = " + format_double(m_phi) + " over sampled f(B) x f(B), K = " +
                        format_double(k_const));
    rep.notes.push_back("max empirical quotient |f(x)-f(y)| / ||y-x|| = " +
                        format_double(max_quotient));
    rep.worst_margin = sweep.has_worst() ? std::optional<double>(sweep.worst_margin) : std::nullopt;
    if (sweep.has_worst() && sweep.worst_margin > ctx.tol.tau) {
        rep.status = CheckStatus::violated;
        std::uint64_t i = sweep.worst_index / m, j = sweep.worst_index % m;
        Violation v;
        v.x = inner[i].coords;
        v.y = inner[j].coords;
        v.t = 0.0;
        v.lhs = std::abs(fr[i] - fr[j]);
        v.rhs = k_const * norm(inner[i], inner[j]);
        v.margin = v.lhs - v.rhs;
        rep.violation = v;
    } else {
        rep.status = CheckStatus::pass_on_samples;
    }
    return rep;
}

CheckReport check_sup_family(std::span<const FunctionOnManifold> fs, const Bifunction& phi,
                             const Region& region, const SamplingPlan& plan,
                             const CheckContext& ctx) {
    if (fs.empty()) throw std::invalid_argument("sup family must be nonempty");
    ProbePlan probe_plan;
    probe_plan.tau = ctx.tol.tau;
    ProbeReport seq = probe_seq_upper_bounded(phi, probe_plan, ctx.exec);
    if (seq.violated)
        return hypothesis_failed("sup_family",
                                 "phi is not sequentially upper bounded on samples: " + seq.note,
                                 seq.samples);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        CheckReport base = check_geodesic_phi_convex(fs[i], phi, region, plan, ctx);
        if (base.status != CheckStatus::pass_on_samples)
            return hypothesis_failed("sup_family",
                                     "family member " + std::to_string(i) +
                                         " is not geodesic phi-convex: " + summarize(base),
                                     base.samples);
    }
    std::string text = "(" + fs[0].expression().print() + ")";
    for (std::size_t i = 1; i < fs.size(); ++i)
        text = "max(" + text + ",(" + fs[i].expression().print() + "))";
    FunctionOnManifold sup = FunctionOnManifold::parse(fs[0].spec(), text);
    CheckReport rep = check_geodesic_phi_convex(sup, phi, region, plan, ctx);
    rep.kind = "sup_family";
    rep.conclusion_kind = "geodesic_phi_convex";
    rep.effective_expr = sup.expression().print();
    rep.notes.insert(rep.notes.begin(),
                     "hypotheses hold on samples: phi sequentially upper bounded, every family "
                     "member geodesic phi-convex");
    return rep;
}

CheckReport check_local_min_criterion(const FunctionOnManifold& f, const Bifunction& phi,
                                      const Point& x0, const Region& region,
                                      const SamplingPlan& plan, const CheckContext& ctx,
                                      double rho) {
    if (!(f.spec() == region.spec()))
        throw std::invalid_argument("function and region manifolds differ");
    if (!region.contains(x0, ctx.tol.tau))
        return hypothesis_failed("local_min", "x0 is not in the region");
    // interior at radius rho, factor-wise
    std::vector<RegionFactor> ball;
    for (std::size_t d = 0; d < region.factors().size(); ++d) {
        const RegionFactor& rf = region.factors()[d];
        double c = x0.coords[d];
        switch (rf.kind) {
            case RegionFactor::Kind::interval:
                if (c - rho < rf.lo - ctx.tol.tau || c + rho > rf.hi() + ctx.tol.tau)
                    return hypothesis_failed("local_min",
                                             "x0 is not interior to the region at radius " +
                                                 format_double(rho));
                ball.push_back(RegionFactor::interval(c - rho, c + rho));
                break;
            case RegionFactor::Kind::whole_circle:
                ball.push_back(RegionFactor::arc(c - rho, 2.0 * rho));
                break;
            case RegionFactor::Kind::arc: {
                double rel = normalize_angle(c - rf.lo);
                if (rel - rho < -ctx.tol.tau || rel + rho > rf.length + ctx.tol.tau)
                    return hypothesis_failed("local_min",
                                             "x0 is not interior to the region at radius " +
                                                 format_double(rho));
                ball.push_back(RegionFactor::arc(c - rho, 2.0 * rho));
                break;
            }
        }
    }
    Region ball_region(region.spec(), std::move(ball));
    std::vector<int> ball_counts(region.spec().dim(), 9);
    std::vector<Point> ball_pts = sample_region(ball_region, ball_counts, false, plan.seed);
    const double f0 = f.value(x0);
    for (const Point& p : ball_pts)
        if (f.value(p) < f0 - ctx.tol.tau)
            return hypothesis_failed("local_min",
                                     "no local minimum at x0: f" + coords_str(p.coords) + " = " +
                                         format_double(f.value(p)) + " < f(x0) = " +
                                         format_double(f0),
                                     ball_pts.size());

    std::vector<Point> pts = sample_region(region, plan.counts_for(region), plan.jitter, plan.seed);
    SweepResult sweep = sweep_worst(pts.size(), ctx.exec, [&](std::uint64_t i) {
        SampleOutcome out;
        try {
            out.margin = -phi(f.value(pts[i]), f0);
        } catch (const EvalError&) {
            out.failed = true;
        }
        return out;
    });
    CheckReport rep;
    rep.kind = "local_min";
    rep.samples = pts.size();
    rep.notes.push_back("local minimality verified on a radius-" + format_double(rho) +
                        " ball (" + std::to_string(ball_pts.size()) + " samples)");
    rep.notes.push_back("conclusion phi(f(x), f(x0)) >= 0; violation margin = -phi");
    if (sweep.has_error()) {
        rep.status = CheckStatus::inconclusive;
        rep.notes.push_back("evaluation error at sample " + std::to_string(sweep.error_index));
        return rep;
    }
    rep.worst_margin = sweep.worst_margin;
    if (sweep.worst_margin > ctx.tol.tau) {
        rep.status = CheckStatus::violated;
        Violation v;
        v.x = pts[sweep.worst_index].coords;
        v.y = x0.coords;
        v.t = 0.0;
        v.lhs = 0.0;
        v.rhs = phi(f.value(pts[sweep.worst_index]), f0);
        v.margin = -v.rhs;
        rep.violation = v;
    } else {
        rep.status = CheckStatus::pass_on_samples;
    }
    return rep;
}

CheckReport check_phi_limit(const FunctionOnManifold& f, const Expression& family,
                            PhiLimitMode mode, int limit_n, const Bifunction& phi_limit,
                            const Region& region, const SamplingPlan& plan,
                            const CheckContext& ctx) {
    if (limit_n < 1) throw std::invalid_argument("phi limit check needs N >= 1");
    for (const std::string& var : family.variables())
        if (var != "u" && var != "v" && var != "n")
            throw std::invalid_argument("phi family variables must be u, v, n");
    auto family_at = [&family](double u, double v, double n) {
        Binding b{{"u", u}, {"v", v}, {"n", n}};
        Binding pruned;
        for (const std::string& var : family.variables()) pruned[var] = b[var];
        return family.eval(pruned);
    };
    std::vector<Point> pts = sample_region(region, plan.counts_for(region), plan.jitter, plan.seed);
    std::vector<double> ts = plan.t_grid();

    for (int k = 1; k <= limit_n; ++k) {
        PhiFn phik;
        if (mode == PhiLimitMode::pointwise) {
            phik = [&, k](double u, double v) { return family_at(u, v, k); };
        } else {
            phik = [&, k](double u, double v) {
                double s = 0.0;
                for (int i = 1; i <= k; ++i) s += family_at(u, v, i);
                return s;
            };
        }
        GeodesicSweepSpec s;
        s.spec = &region.spec();
        s.f = &f;
        s.phi = phik;
        s.xs = &pts;
        s.ys = &pts;
        s.ts = ts;
        s.tol = ctx.tol;
        SweepOutcome out = run_geodesic_sweep(s, ctx.exec);
        if (!out.ok)
            return hypothesis_failed("phi_limit", "hypothesis check failed at n=" +
                                                      std::to_string(k) + ": " + out.error_note);
        if (out.sweep.has_worst() && out.sweep.worst_margin > ctx.tol.tau) {
            Violation v = materialize_geodesic(s, out, out.sweep.worst_index);
            return hypothesis_failed(
                "phi_limit",
                "f is not geodesic phi_" + std::to_string(k) + "-convex" +
                    std::string(mode == PhiLimitMode::series ? " (partial sum)" : "") +
                    ": margin " + format_double(v.margin) + " at x=" + coords_str(v.x) +
                    " y=" + coords_str(v.y) + " t=" + format_double(v.t),
                out.samples);
        }
    }

    // deviation between the last hypothesis bifunction and the limit on
    // sampled argument pairs
    std::vector<double> args;
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / 64);
    for (std::size_t i = 0; i < pts.size(); i += stride) args.push_back(f.value(pts[i]));
    double max_dev = 0.0;
    for (double u : args)
        for (double v : args) {
            double last = 0.0;
            if (mode == PhiLimitMode::pointwise) {
                last = family_at(u, v, limit_n);
            } else {
                for (int i = 1; i <= limit_n; ++i) last += family_at(u, v, i);
            }
            max_dev = std::max(max_dev, std::abs(last - phi_limit(u, v)));
        }

    CheckReport rep = check_geodesic_phi_convex(f, phi_limit, region, plan, ctx);
    rep.kind = "phi_limit";
    rep.conclusion_kind = "geodesic_phi_convex";
    rep.effective_expr = f.expression().print();
    rep.notes.insert(rep.notes.begin(),
                     "hypotheses hold for n = 1.." + std::to_string(limit_n) +
                         "; max deviation between phi_N and the limit on sampled arguments = " +
                         format_double(max_dev));
    return rep;
}

CheckReport audit_endpoint_derivatives(const FunctionOnManifold& f, const Bifunction& phi,
                                       const Region& region, const SamplingPlan& plan,
                                       const CheckContext& ctx) {
    ProbePlan probe_plan;
    probe_plan.tau = ctx.tol.tau;
    ProbeReport anti = probe_antisymmetric(phi, probe_plan, ctx.exec);
    if (anti.violated)
        return hypothesis_failed("endpoint_derivatives",
                                 "phi is not antisymmetric on samples: " + anti.note,
                                 anti.samples);
    CheckReport strict = check_geodesic_phi_convex(f, phi, region, plan, ctx, true);
    if (strict.status != CheckStatus::pass_on_samples)
        return hypothesis_failed("endpoint_derivatives",
                                 "f is not strictly geodesic phi-convex: " + summarize(strict),
                                 strict.samples);

    std::vector<Point> pts = sample_region(region, plan.counts_for(region), plan.jitter, plan.seed);
    const std::uint64_t m = pts.size();
    auto derivatives = [&](const Point& x, const Point& y) {
        Geodesic g = geodesic_between(f.spec(), x, y);
        return std::pair{curve_derivative_fd(f, g, 0.0, ctx.tol.fd_step),
                         curve_derivative_fd(f, g, 1.0, ctx.tol.fd_step)};
    };
    SweepResult sweep = sweep_worst(m * m, ctx.exec, [&](std::uint64_t p) {
        SampleOutcome out;
        const Point& x = pts[p / m];
        const Point& y = pts[p % m];
        if (x.coords == y.coords) {
            out.excluded = 1;  // the claim is about x != y
            return out;
        }
        try {
            auto [d0, d1] = derivatives(x, y);
            out.margin = ctx.tol.fd_tau - std::abs(d0 - d1);
        } catch (const EvalError&) {
            out.failed = true;
        }
        return out;
    });

    CheckReport rep;
    rep.kind = "endpoint_derivatives";
    rep.samples = m * m;
    rep.notes.push_back(
        "conclusion df_x(alpha') != df_y(alpha'); violation margin = fd_tau - |d0 - d1|");
    if (sweep.has_error()) {
        rep.status = CheckStatus::inconclusive;
        rep.notes.push_back("finite-difference error at sample " +
                            std::to_string(sweep.error_index));
        return rep;
    }
    rep.worst_margin = sweep.has_worst() ? sweep.worst_margin : 0.0;
    if (sweep.has_worst() && sweep.worst_margin > 0.0) {
        rep.status = CheckStatus::violated;
        const Point& x = pts[sweep.worst_index / m];
        const Point& y = pts[sweep.worst_index % m];
        auto [d0, d1] = derivatives(x, y);
        Violation v;
        v.x = x.coords;
        v.y = y.coords;
        v.t = 0.0;
        v.lhs = d0;
        v.rhs = d1;
        v.margin = ctx.tol.fd_tau - std::abs(d0 - d1);
        rep.violation = v;
    } else {
        rep.status = CheckStatus::pass_on_samples;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// preinvexity in R^n
// ---------------------------------------------------------------------------

CheckReport check_phi_preinvex(const Expression& f, const Bifunction& phi,
                               std::span<const Expression> eta,
                               std::span<const std::pair<double, double>> box,
                               const SamplingPlan& plan, const CheckContext& ctx) {
    const std::size_t dim = box.size();
    if (dim == 0 || dim > kMaxDim) throw std::invalid_argument("preinvex box must have 1..16 dims");
    if (eta.size() != dim) throw std::invalid_argument("eta needs one expression per dimension");

    std::vector<std::string> xnames(dim), ynames(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        xnames[d] = "x" + std::to_string(d + 1);
        ynames[d] = "y" + std::to_string(d + 1);
    }
    auto slot_map = [&](const Expression& e) {
        std::vector<int> slots;  // variable slot -> index into (x...,y...) tuple
        for (const std::string& var : e.variables()) {
            auto xit = std::find(xnames.begin(), xnames.end(), var);
            auto yit = std::find(ynames.begin(), ynames.end(), var);
            if (xit != xnames.end())
                slots.push_back(static_cast<int>(xit - xnames.begin()));
            else if (yit != ynames.end())
                slots.push_back(static_cast<int>(dim + (yit - ynames.begin())));
            else
                throw std::invalid_argument("variable '" + var + "' is not x1..xn / y1..yn");
        }
        return slots;
    };
    std::vector<std::vector<int>> eta_slots;
    for (const Expression& e : eta) eta_slots.push_back(slot_map(e));
    std::vector<int> f_slots;
    for (const std::string& var : f.variables()) {
        auto xit = std::find(xnames.begin(), xnames.end(), var);
        if (xit == xnames.end())
            throw std::invalid_argument("preinvex function variables must be x1..xn");
        f_slots.push_back(static_cast<int>(xit - xnames.begin()));
    }
    auto f_at = [&](const double* p) {
        double vals[kMaxDim];
        for (std::size_t k = 0; k < f_slots.size(); ++k) vals[k] = p[f_slots[k]];
        return f.eval(std::span<const double>(vals, f_slots.size()));
    };

    const int per_dim = plan.factor_counts.empty() ? (dim == 1 ? 33 : 9)
                                                   : plan.interval_count();
    std::vector<std::vector<double>> grids(dim);
    std::size_t m = 1;
    for (std::size_t d = 0; d < dim; ++d) {
        grids[d] = linspace(box[d].first, box[d].second, per_dim);
        m *= grids[d].size();
    }
    std::vector<std::vector<double>> pts(m, std::vector<double>(dim));
    {
        std::vector<std::size_t> idx(dim, 0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t d = 0; d < dim; ++d) pts[i][d] = grids[d][idx[d]];
            for (std::size_t d = dim; d-- > 0;) {
                if (++idx[d] < grids[d].size()) break;
                idx[d] = 0;
            }
        }
    }
    std::vector<double> fv(m);
    for (std::size_t i = 0; i < m; ++i) fv[i] = f_at(pts[i].data());
    std::vector<double> ts = plan.t_grid();

    auto eta_at = [&](const double* xy, double* out) {
        for (std::size_t d = 0; d < dim; ++d) {
            double vals[kMaxDim];
            const auto& slots = eta_slots[d];
            for (std::size_t k = 0; k < slots.size(); ++k) vals[k] = xy[slots[k]];
            out[d] = eta[d].eval(std::span<const double>(vals, slots.size()));
        }
    };

    // hypothesis: the box is invex w.r.t. eta on samples
    SweepResult hyp = sweep_worst(m * m, ctx.exec, [&](std::uint64_t p) {
        SampleOutcome out;
        try {
            double xy[2 * kMaxDim];
            const auto& x = pts[p / m];
            const auto& y = pts[p % m];
            std::copy(x.begin(), x.end(), xy);
            std::copy(y.begin(), y.end(), xy + dim);
            double disp[kMaxDim] = {};
            eta_at(xy, disp);
            double worst = -kInf;
            for (double t : ts) {
                for (std::size_t d = 0; d < dim; ++d) {
                    double z = y[d] + t * disp[d];
                    worst = std::max(worst, std::max(box[d].first - z, z - box[d].second));
                }
            }
            out.margin = worst;
        } catch (const EvalError&) {
            out.failed = true;
        }
        return out;
    });
    if (hyp.has_error())
        return hypothesis_failed("phi_preinvex", "eta evaluation failed at sample " +
                                                     std::to_string(hyp.error_index));
    if (hyp.has_worst() && hyp.worst_margin > ctx.tol.tau)
        return hypothesis_failed("phi_preinvex",
                                 "box is not invex w.r.t. eta on samples: a path point leaves the "
                                 "box by " +
                                     format_double(hyp.worst_margin),
                                 m * m * ts.size());

    auto sample_at = [&](std::uint64_t p, double t, double* lhs, double* rhs) {
        double xy[2 * kMaxDim];
        const auto& x = pts[p / m];
        const auto& y = pts[p % m];
        std::copy(x.begin(), x.end(), xy);
        std::copy(y.begin(), y.end(), xy + dim);
        double disp[kMaxDim] = {};
        eta_at(xy, disp);
        double z[kMaxDim];
        for (std::size_t d = 0; d < dim; ++d) z[d] = y[d] + t * disp[d];
        double l = f_at(z);
        double r = fv[p % m] + t * phi(fv[p / m], fv[p % m]);
        if (lhs) *lhs = l;
        if (rhs) *rhs = r;
        return l - r;
    };

    SweepResult sweep = sweep_worst(m * m, ctx.exec, [&](std::uint64_t p) {
        SampleOutcome out;
        try {
            const bool degen = pts[p / m] == pts[p % m];
            double best = -kInf;
            double phival = phi(fv[p / m], fv[p % m]);
            for (double t : ts) {
                double margin = sample_at(p, t, nullptr, nullptr);
                if (degen && phival < 0.0 && margin > ctx.tol.tau) {
                    double xy[2 * kMaxDim];
                    std::copy(pts[p / m].begin(), pts[p / m].end(), xy);
                    std::copy(pts[p % m].begin(), pts[p % m].end(), xy + dim);
                    double disp[kMaxDim] = {};
                    eta_at(xy, disp);
                    bool zero_disp = std::all_of(disp, disp + dim,
                                                 [](double v) { return v == 0.0; });
                    if (zero_disp) {
                        ++out.excluded;  // degenerate path with phi(c,c) < 0
                        continue;
                    }
                }
                best = std::max(best, margin);
            }
            out.margin = best;
        } catch (const EvalError&) {
            out.failed = true;
        }
        return out;
    });

    CheckReport rep;
    rep.kind = "phi_preinvex";
    rep.samples = m * m * ts.size();
    if (sweep.excluded > 0)
        rep.notes.push_back(std::to_string(sweep.excluded) +
                            " degenerate x=y samples with phi(c,c) < 0 excluded (phi-pathology)");
    if (sweep.has_error()) {
        rep.status = CheckStatus::inconclusive;
        rep.notes.push_back("evaluation error at sample " + std::to_string(sweep.error_index));
        return rep;
    }
    rep.worst_margin = sweep.has_worst() ? std::optional<double>(sweep.worst_margin) : std::nullopt;
    if (sweep.has_worst() && sweep.worst_margin > ctx.tol.tau) {
        rep.status = CheckStatus::violated;
        // re-scan the winning pair for its worst t
        std::uint64_t p = sweep.worst_index;
        double best = -kInf, bt = 0.0, bl = 0.0, br = 0.0;
        for (double t : ts) {
            double l, r;
            double margin = sample_at(p, t, &l, &r);
            if (margin > best) {
                best = margin;
                bt = t;
                bl = l;
                br = r;
            }
        }
        Violation v;
        v.x = pts[p / m];
        v.y = pts[p % m];
        v.t = bt;
        v.lhs = bl;
        v.rhs = br;
        v.margin = bl - br;
        rep.violation = v;
    } else {
        rep.status = CheckStatus::pass_on_samples;
    }
    return rep;
}

CheckReport check_g_preinvex_composition(const FunctionOnManifold& f, const Expression& g,
                                         const Bifunction& phi, const Bifunction& psi,
                                         const Region& region, const SamplingPlan& plan,
                                         const CheckContext& ctx) {
    require_univariate(g, "outer function");
    CheckReport base = check_geodesic_phi_convex(f, phi, region, plan, ctx);
    if (base.status != CheckStatus::pass_on_samples)
        return hypothesis_failed("g_preinvex_composition",
                                 "f is not geodesic phi-convex: " + summarize(base), base.samples);
    std::vector<Point> pts = sample_region(region, plan.counts_for(region), plan.jitter, plan.seed);
    auto [lo, hi] = sampled_range(f, pts);
    std::vector<double> grid = linspace(lo, hi, plan.interval_count());
    std::string why;
    if (!nondecreasing_on(g, grid, ctx.tol.tau, &why))
        return hypothesis_failed("g_preinvex_composition",
                                 "g is not non-decreasing on the sampled range of f: " + why);
    // G-preinvexity with eta(a, b) = phi(a, b): g(b + t phi(a,b)) <= g(b) + t psi(g(a), g(b))
    std::vector<double> ts = plan.t_grid();
    for (double a : grid) {
        for (double b : grid) {
            double step = phi(a, b);
            double gb = eval1(g, b);
            double psival = psi(eval1(g, a), gb);
            for (double t : ts) {
                double lhs = eval1(g, b + t * step);
                double rhs = gb + t * psival;
                if (lhs - rhs > ctx.tol.tau)
                    return hypothesis_failed(
                        "g_preinvex_composition",
                        "g is not G-preinvex w.r.t. (phi, psi) on the sampled range: g(" +
                            format_double(b + t * step) + ") = " + format_double(lhs) + " > " +
                            format_double(rhs) + " at a=" + format_double(a) +
                            ", b=" + format_double(b) + ", t=" + format_double(t));
            }
        }
    }
    FunctionOnManifold comp = compose_outer(f, g);
    CheckReport rep = check_geodesic_phi_convex(comp, psi, region, plan, ctx);
    rep.kind = "g_preinvex_composition";
    rep.conclusion_kind = "geodesic_phi_convex";
    rep.effective_expr = comp.expression().print();
    rep.notes.insert(rep.notes.begin(),
                     "hypotheses hold on samples: f geodesic phi-convex, g non-decreasing and "
                     "G-preinvex w.r.t. (phi, psi) on [" +
                         format_double(lo) + ", " + format_double(hi) + "]");
    return rep;
}

// ---------------------------------------------------------------------------
// counterexample search
// ---------------------------------------------------------------------------

namespace {

struct RefineWindow {
    std::vector<RegionFactor> x_factors, y_factors;
    double t_lo = 0.0, t_hi = 1.0;
};

RefineWindow make_window(const Region& region, const Violation& w, int round, double zoom) {
    RefineWindow win;
    const double shrink = std::pow(zoom, round);
    for (std::size_t d = 0; d < region.factors().size(); ++d) {
        const RegionFactor& rf = region.factors()[d];
        auto window_factor = [&](double center) {
            switch (rf.kind) {
                case RegionFactor::Kind::interval: {
                    double half = 0.5 * (rf.hi() - rf.lo) / shrink;
                    double lo = std::max(rf.lo, center - half);
                    double hi = std::min(rf.hi(), center + half);
                    return RegionFactor::interval(lo, hi);
                }
                case RegionFactor::Kind::whole_circle: {
                    double len = std::min(kTwoPi / shrink, 0.999 * kPi);
                    return RegionFactor::arc(center - 0.5 * len, len);
                }
                case RegionFactor::Kind::arc: {
                    double len = rf.length / shrink;
                    double rel = normalize_angle(center - rf.lo);
                    if (rel > rf.length) rel = rf.length;  // clamp onto the arc
                    double lo = std::clamp(rel - 0.5 * len, 0.0, rf.length - len);
                    return RegionFactor::arc(rf.lo + lo, len);
                }
            }
            return rf;
        };
        win.x_factors.push_back(window_factor(w.x[d]));
        win.y_factors.push_back(window_factor(w.y[d]));
    }
    double t_half = 0.5 / shrink;
    win.t_lo = std::clamp(w.t - t_half, 0.0, 1.0);
    win.t_hi = std::clamp(w.t + t_half, 0.0, 1.0);
    return win;
}

}  // namespace

CheckReport falsify_geodesic(const FunctionOnManifold& f, const Bifunction* phi,
                             const Region& region, const SamplingPlan& plan,
                             const CheckContext& ctx) {
    CheckReport base = phi ? check_geodesic_phi_convex(f, *phi, region, plan, ctx)
                           : check_geodesic_convex(f, region, plan, ctx);
    CheckReport rep = base;
    rep.kind = phi ? "falsify(geodesic_phi_convex)" : "falsify(geodesic_convex)";
    if (!rep.worst_margin) return rep;
    rep.margin_history.push_back(*rep.worst_margin);

    // refinement needs a concrete witness to zoom in on, violated or not
    Violation best;
    if (base.violation) {
        best = *base.violation;
    } else {
        GeodesicSweepSpec probe;
        std::vector<Point> pts =
            sample_region(region, plan.counts_for(region), plan.jitter, plan.seed);
        probe.spec = &region.spec();
        probe.f = &f;
        if (phi) probe.phi = phi_fn(*phi);
        probe.xs = &pts;
        probe.ys = &pts;
        probe.ts = plan.t_grid();
        probe.tol = ctx.tol;
        SweepOutcome out = run_geodesic_sweep(probe, ctx.exec);
        if (!out.sweep.has_worst()) return rep;
        best = materialize_geodesic(probe, out, out.sweep.worst_index);
    }

    std::vector<double> ts(plan.t_count);
    for (int round = 1; round <= plan.refine_rounds; ++round) {
        RefineWindow win = make_window(region, best, round, plan.zoom);
        Region xwin(region.spec(), win.x_factors);
        Region ywin(region.spec(), win.y_factors);
        std::vector<int> counts(region.spec().dim(), 9);
        std::vector<Point> xs = sample_region(xwin, counts, false, plan.seed);
        std::vector<Point> ys = sample_region(ywin, counts, false, plan.seed);
        for (int k = 0; k < plan.t_count; ++k)
            ts[k] = win.t_lo + (win.t_hi - win.t_lo) * k / (plan.t_count - 1);

        GeodesicSweepSpec s;
        s.spec = &region.spec();
        s.f = &f;
        if (phi) s.phi = phi_fn(*phi);
        s.xs = &xs;
        s.ys = &ys;
        s.ts = ts;
        s.tol = ctx.tol;
        SweepOutcome out = run_geodesic_sweep(s, ctx.exec);
        rep.samples += out.samples;
        if (out.ok && out.sweep.has_worst()) {
            if (out.sweep.worst_margin > best.margin)
                best = materialize_geodesic(s, out, out.sweep.worst_index);
        }
        rep.margin_history.push_back(best.margin);
    }

    rep.worst_margin = best.margin;
    if (best.margin > ctx.tol.tau) {
        rep.status = CheckStatus::violated;
        rep.violation = best;
    } else {
        rep.status = CheckStatus::pass_on_samples;
        rep.violation.reset();
    }
    rep.notes.push_back("refined " + std::to_string(plan.refine_rounds) + " rounds at zoom " +
                        format_double(plan.zoom));
    return rep;
}

CheckReport falsify_interval(const Expression& f, const Bifunction& phi, double a, double b,
                             const SamplingPlan& plan, const CheckContext& ctx) {
    CheckReport base = check_phi_convex_interval(f, phi, a, b, plan, ctx);
    CheckReport rep = base;
    rep.kind = "falsify(phi_convex_interval)";
    if (!rep.worst_margin) return rep;
    rep.margin_history.push_back(*rep.worst_margin);

    Violation best;
    if (base.violation) {
        best = *base.violation;
    } else {
        std::vector<double> grid = linspace(a, b, plan.interval_count());
        IntervalSweepSpec s{&f, &phi, &grid, &grid, plan.t_grid(), false, ctx.tol};
        IntervalSweepOutcome out = run_interval_sweep(s, ctx.exec);
        if (!out.sweep.has_worst()) return rep;
        const std::uint64_t ny = grid.size();
        double t = 0, lhs = 0, rhs = 0;
        interval_pair_outcome(s, out.fx, out.fy, out.sweep.worst_index / ny,
                              out.sweep.worst_index % ny, &t, &lhs, &rhs);
        best = Violation{{grid[out.sweep.worst_index / ny]},
                         {grid[out.sweep.worst_index % ny]},
                         t,
                         lhs,
                         rhs,
                         lhs - rhs};
    }

    for (int round = 1; round <= plan.refine_rounds; ++round) {
        const double shrink = std::pow(plan.zoom, round);
        double half = 0.5 * (b - a) / shrink;
        auto window = [&](double c) {
            return linspace(std::max(a, c - half), std::min(b, c + half), 9);
        };
        std::vector<double> xs = window(best.x[0]);
        std::vector<double> ys = window(best.y[0]);
        double t_half = 0.5 / shrink;
        double t_lo = std::clamp(best.t - t_half, 0.0, 1.0);
        double t_hi = std::clamp(best.t + t_half, 0.0, 1.0);
        std::vector<double> ts(plan.t_count);
        for (int k = 0; k < plan.t_count; ++k)
            ts[k] = t_lo + (t_hi - t_lo) * k / (plan.t_count - 1);

        IntervalSweepSpec s{&f, &phi, &xs, &ys, ts, false, ctx.tol};
        IntervalSweepOutcome out = run_interval_sweep(s, ctx.exec);
        rep.samples += out.samples;
        if (out.ok && out.sweep.has_worst() && out.sweep.worst_margin > best.margin) {
            const std::uint64_t ny = ys.size();
            double t = 0, lhs = 0, rhs = 0;
            interval_pair_outcome(s, out.fx, out.fy, out.sweep.worst_index / ny,
                                  out.sweep.worst_index % ny, &t, &lhs, &rhs);
            best = Violation{{xs[out.sweep.worst_index / ny]},
                             {ys[out.sweep.worst_index % ny]},
                             t,
                             lhs,
                             rhs,
                             lhs - rhs};
        }
        rep.margin_history.push_back(best.margin);
    }

    rep.worst_margin = best.margin;
    if (best.margin > ctx.tol.tau) {
        rep.status = CheckStatus::violated;
        rep.violation = best;
    } else {
        rep.status = CheckStatus::pass_on_samples;
        rep.violation.reset();
    }
    rep.notes.push_back("refined " + std::to_string(plan.refine_rounds) + " rounds at zoom " +
                        format_double(plan.zoom));
    return rep;
}

}  // namespace geoconvex
