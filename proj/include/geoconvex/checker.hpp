#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geoconvex/bifunction.hpp"
#include "geoconvex/expr.hpp"
#include "geoconvex/manifold.hpp"
#include "geoconvex/parallel.hpp"

namespace geoconvex {

enum class CheckStatus : std::uint8_t {
    pass_on_samples,
    violated,
    hypothesis_failed,
    inconclusive,
};

std::string_view to_string(CheckStatus s);

/// Absolute tolerances: tau for closed-form inequalities, tau_strict for the
/// numeric analog of strict inequality, fd_step/fd_tau for finite-difference
/// comparisons.
struct Tolerances {
    double tau = 1e-9;
    double tau_strict = 1e-9;
    double fd_step = 1e-5;
    double fd_tau = 1e-4;
};

struct CheckContext {
    Tolerances tol;
    ExecPolicy exec = ExecPolicy::from_env();
};

/// Counterexample witness: endpoints as flat coordinate arrays in factor
/// order (set checks append the level), the curve parameter, and both sides
/// of the violated inequality. margin = lhs - rhs unless the check's notes
/// say otherwise. Re-evaluation reproduces lhs and rhs to 1e-12.
struct Violation {
    std::vector<double> x;
    std::vector<double> y;
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
};

struct CheckReport {
    std::string kind;
    CheckStatus status = CheckStatus::inconclusive;
    std::uint64_t samples = 0;
    std::optional<double> worst_margin;
    std::optional<Violation> violation;
    std::vector<std::string> notes;
    /// Falsification only: worst margin after the base pass and after each
    /// refinement round.
    std::vector<double> margin_history;
    /// Composite checks record the conclusion they actually swept so reports
    /// can be re-validated from scratch.
    std::string conclusion_kind;
    std::string effective_expr;
};

/// A scalar function on a catalog manifold: an expression over the
/// coordinate names (h1, h2, ... for Euclidean factors; th1, ... for circle
/// factors).
class FunctionOnManifold {
public:
    FunctionOnManifold(ManifoldSpec spec, Expression expr);
    static FunctionOnManifold parse(ManifoldSpec spec, std::string_view text);

    double value(const Point& p) const { return value(std::span<const double>(p.coords)); }
    double value(std::span<const double> coords) const;

    const ManifoldSpec& spec() const { return spec_; }
    const Expression& expression() const { return expr_; }

private:
    ManifoldSpec spec_;
    Expression expr_;
    std::vector<int> var_factor_;  // expression variable slot -> factor index
};

/// Endpoint/parameter grids for the sample sweeps. Factor counts default to
/// 33 per Euclidean factor and 16 per circle factor; the t-grid always
/// contains 0 and 1.
struct SamplingPlan {
    std::vector<int> factor_counts;  // empty -> per-kind defaults
    int t_count = 17;
    bool jitter = false;
    std::uint64_t seed = 0;
    int refine_rounds = 3;
    double zoom = 10.0;

    std::vector<int> counts_for(const Region& region) const;
    std::vector<double> t_grid() const;
    int interval_count() const;  // grid count for one-dimensional interval checks
};

// --- phi-convexity on an interval and its slope form ---

CheckReport check_phi_convex_interval(const Expression& f, const Bifunction& phi, double a,
                                      double b, const SamplingPlan& plan, const CheckContext& ctx,
                                      bool strict = false);

CheckReport check_slope_inequality(const Expression& f, const Bifunction& phi, double a, double b,
                                   const SamplingPlan& plan, const CheckContext& ctx);

// --- geodesic convexity on catalog manifolds ---

CheckReport check_geodesic_phi_convex(const FunctionOnManifold& f, const Bifunction& phi,
                                      const Region& region, const SamplingPlan& plan,
                                      const CheckContext& ctx, bool strict = false);

CheckReport check_geodesic_convex(const FunctionOnManifold& f, const Region& region,
                                  const SamplingPlan& plan, const CheckContext& ctx);

CheckReport check_differential_criterion(const FunctionOnManifold& f, const Bifunction& phi,
                                         const Region& region, const SamplingPlan& plan,
                                         const CheckContext& ctx);

CheckReport verify_restriction_equivalence(const FunctionOnManifold& f, const Bifunction& phi,
                                           const Region& region, const SamplingPlan& plan,
                                           const CheckContext& ctx);

// --- mean-value style audits ---

CheckReport audit_mean_value(const Expression& f, const Bifunction& phi, double x1, double x2,
                             const SamplingPlan& plan, const CheckContext& ctx);

CheckReport audit_three_point(const Expression& f, const Bifunction& phi, double x, double y,
                              double z, const CheckContext& ctx);

// --- closure theorems ---

CheckReport check_composition(const FunctionOnManifold& f, const Expression& g,
                              const Bifunction& phi, const Region& region,
                              const SamplingPlan& plan, const CheckContext& ctx,
                              bool strict = false);

CheckReport check_weighted_sum(std::span<const FunctionOnManifold> fs,
                               std::span<const double> lambdas, const Bifunction& phi,
                               const Region& region, const SamplingPlan& plan,
                               const CheckContext& ctx);

CheckReport check_pushforward(const FunctionOnManifold& f, const Bifunction& phi,
                              std::span<const Expression> forward,
                              std::span<const Expression> inverse, const Region& region,
                              const SamplingPlan& plan, const CheckContext& ctx);

CheckReport check_lipschitz_bound(const Expression& f, const Bifunction& phi, double center,
                                  double h, double r, double eps, const SamplingPlan& plan,
                                  const CheckContext& ctx);

/// Euclidean-factor edition: balls around `center` in the 2-norm on a
/// manifold whose factors are all lines.
CheckReport check_lipschitz_bound(const FunctionOnManifold& f, const Bifunction& phi,
                                  const Point& center, double h, double r, double eps,
                                  const SamplingPlan& plan, const CheckContext& ctx);

CheckReport check_sup_family(std::span<const FunctionOnManifold> fs, const Bifunction& phi,
                             const Region& region, const SamplingPlan& plan,
                             const CheckContext& ctx);

CheckReport check_local_min_criterion(const FunctionOnManifold& f, const Bifunction& phi,
                                      const Point& x0, const Region& region,
                                      const SamplingPlan& plan, const CheckContext& ctx,
                                      double rho = 0.25);

enum class PhiLimitMode : std::uint8_t { pointwise, series };

CheckReport check_phi_limit(const FunctionOnManifold& f, const Expression& family,
                            PhiLimitMode mode, int limit_n, const Bifunction& phi_limit,
                            const Region& region, const SamplingPlan& plan,
                            const CheckContext& ctx);

CheckReport audit_endpoint_derivatives(const FunctionOnManifold& f, const Bifunction& phi,
                                       const Region& region, const SamplingPlan& plan,
                                       const CheckContext& ctx);

// --- preinvexity (Euclidean eta) ---

CheckReport check_phi_preinvex(const Expression& f, const Bifunction& phi,
                               std::span<const Expression> eta,
                               std::span<const std::pair<double, double>> box,
                               const SamplingPlan& plan, const CheckContext& ctx);

CheckReport check_g_preinvex_composition(const FunctionOnManifold& f, const Expression& g,
                                         const Bifunction& phi, const Bifunction& psi,
                                         const Region& region, const SamplingPlan& plan,
                                         const CheckContext& ctx);

// --- counterexample search ---

/// Runs the base check, then performs plan.refine_rounds rounds of local
/// re-gridding around the current worst-margin sample, shrinking the (x,y,t)
/// windows by plan.zoom each round. Returns the maximal-margin violation
/// found; margin_history records the worst margin per round.
CheckReport falsify_geodesic(const FunctionOnManifold& f, const Bifunction* phi,
                             const Region& region, const SamplingPlan& plan,
                             const CheckContext& ctx);

CheckReport falsify_interval(const Expression& f, const Bifunction& phi, double a, double b,
                             const SamplingPlan& plan, const CheckContext& ctx);

// --- shared helpers (also used by the revalidation path and tests) ---

/// lhs, rhs and margin of the geodesic phi-convexity inequality for one
/// (x, y, t) sample.
struct PairSample {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin() const { return lhs - rhs; }
};

PairSample geodesic_phi_sample(const FunctionOnManifold& f, const Bifunction* phi,
                               const ManifoldSpec& spec, const Point& x, const Point& y, double t);

PairSample interval_phi_sample(const Expression& f, const Bifunction& phi, double x, double y,
                               double t);

/// Central-difference derivative of f along the geodesic at parameter t.
double curve_derivative_fd(const FunctionOnManifold& f, const Geodesic& g, double t, double step);

}  // namespace geoconvex
