#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geoconvex/checker.hpp"

namespace geoconvex {

/// A point of M x R: a base point plus a level.
struct ProductPoint {
    Point base;
    double level = 0.0;
};

/// One membership constraint: expr(coords) <= level (bound absent) or
/// expr(coords) <= constant.
struct SetConstraint {
    Expression expr;
    std::optional<double> bound;  // nullopt: compared against the level coordinate
};

/// A subset of M x R given as a base sampling region plus a finite
/// conjunction of constraints. The phi-epigraph of f is the single
/// level-bounded constraint f(x) <= alpha.
class SetSpec {
public:
    SetSpec(Region base, std::vector<SetConstraint> constraints, double level_range = 2.0);

    static SetSpec epigraph(const FunctionOnManifold& f, const Region& region,
                            double level_range = 2.0);
    /// A x R: no constraints beyond base-region membership.
    static SetSpec whole_product(const Region& region, double level_range = 2.0);

    const Region& base() const { return base_; }
    const std::vector<SetConstraint>& constraints() const { return constraints_; }
    double level_range() const { return level_range_; }

    bool contains(const ProductPoint& p, double tau) const;
    /// Smallest level that makes (x, level) a member; 0 when no constraint
    /// involves the level.
    double active_bound(const Point& x) const;

    /// Conjunction of two specs over the same manifold; nullopt when the base
    /// regions do not intersect.
    static std::optional<SetSpec> conjunction(const SetSpec& a, const SetSpec& b);

private:
    Region base_;
    std::vector<SetConstraint> constraints_;
    std::vector<std::vector<int>> var_factor_;  // per constraint
    double level_range_;

    double constraint_value(std::size_t c, std::span<const double> coords) const;
    friend CheckReport check_geodesic_phi_convex_set(const SetSpec&, const Bifunction&,
                                                     const SamplingPlan&, const CheckContext&);
};

/// (x, alpha) in E_phi(f) <=> f(x) <= alpha + tau (closed epigraph).
bool epigraph_contains(const FunctionOnManifold& f, const ProductPoint& p, double tau = 1e-9);

/// Geodesic phi-convexity of a set: member pairs ((x,alpha), (y,beta)) stay
/// members under the displacement (alpha_xy(t), alpha + t phi(beta, alpha)).
CheckReport check_geodesic_phi_convex_set(const SetSpec& set, const Bifunction& phi,
                                          const SamplingPlan& plan, const CheckContext& ctx);

/// Characterization: f geodesic phi-convex <=> E_phi(f) geodesic phi-convex set, for
/// non-decreasing phi. Status is the agreed verdict; any disagreement makes
/// the check inconclusive.
CheckReport verify_epigraph_characterization(const FunctionOnManifold& f, const Bifunction& phi,
                                             const Region& region, const SamplingPlan& plan,
                                             const CheckContext& ctx);

/// Closure: the conjunction of individually geodesic phi-convex sets is
/// geodesic phi-convex.
CheckReport check_intersection_closure(std::span<const SetSpec> sets, const Bifunction& phi,
                                       const SamplingPlan& plan, const CheckContext& ctx);

/// Sup of a bounded family through its epigraphs; also verifies
/// E_phi(sup f_i) = intersection of E_phi(f_i) on every sampled product point.
CheckReport sup_via_epigraph(std::span<const FunctionOnManifold> fs, const Bifunction& phi,
                             const Region& region, const SamplingPlan& plan,
                             const CheckContext& ctx);

}  // namespace geoconvex
