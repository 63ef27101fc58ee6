#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "geoconvex/checker.hpp"

using namespace geoconvex;

namespace {

const CheckContext kCtx{Tolerances{}, ExecPolicy::from_env()};

SamplingPlan small_plan() {
    SamplingPlan plan;
    plan.factor_counts = {9, 6};
    plan.t_count = 9;
    return plan;
}

SamplingPlan line_plan(int n = 17, int t = 9) {
    SamplingPlan plan;
    plan.factor_counts = {n};
    plan.t_count = t;
    return plan;
}

Region cylinder_region(double lo, double hi) {
    return Region(ManifoldSpec::cylinder(),
                  {RegionFactor::interval(lo, hi), RegionFactor::whole_circle()});
}

Region line_region(double lo, double hi) {
    return Region(ManifoldSpec::euclidean_line(), {RegionFactor::interval(lo, hi)});
}

// Independent brute-force oracle for the geodesic sweep: Binding-based
// evaluation and the Geodesic class, enumerated the slow way.
double oracle_worst_geodesic_margin(const std::string& f_text, const Bifunction* phi,
                                    const Region& region, const SamplingPlan& plan, double tau) {
    const ManifoldSpec& spec = region.spec();
    Expression f = Expression::parse(f_text);
    auto names = spec.coordinate_names();
    auto feval = [&](const Point& p) {
        Binding b;
        for (std::size_t i = 0; i < names.size(); ++i) b[names[i]] = p.coords[i];
        return f.eval(b);
    };
    auto pts = sample_region(region, plan.counts_for(region), plan.jitter, plan.seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (const Point& x : pts) {
        for (const Point& y : pts) {
            Geodesic g = geodesic_between(spec, x, y);
            double fx = feval(x), fy = feval(y);
            double pv = phi ? (*phi)(fy, fx) : 0.0;
            bool degen = x.coords == y.coords;
            for (double t : plan.t_grid()) {
                double lhs = feval(g.at(t));
                double rhs = phi ? fx + t * pv : (1.0 - t) * fx + t * fy;
                double margin = lhs - rhs;
                if (degen && phi && pv < 0.0 && margin > tau) continue;
                worst = std::max(worst, margin);
            }
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("phi-convexity on an interval") {
    Bifunction diff = Bifunction::catalog("diff");
    Expression sq = Expression::parse("x^2");
    Expression cube = Expression::parse("x^3");

    CheckReport pass = check_phi_convex_interval(sq, diff, 0.0, 1.0, line_plan(33, 17), kCtx);
    CHECK(pass.status == CheckStatus::pass_on_samples);
    CHECK(*pass.worst_margin <= 1e-9);

    CheckReport neg = check_phi_convex_interval(cube, diff, -2.0, 0.0, line_plan(33, 17), kCtx);
    REQUIRE(neg.status == CheckStatus::violated);
    REQUIRE(neg.violation.has_value());
    // the documented witness evaluates directly: f(-1) = -1 > f(0) + 0.5(f(-2)-f(0)) = -4
    PairSample doc = interval_phi_sample(cube, diff, -2.0, 0.0, 0.5);
    CHECK(doc.lhs == -1.0);
    CHECK(doc.rhs == -4.0);
    CHECK(doc.margin() == 3.0);
    CHECK(*neg.worst_margin >= 3.0);
    // witness soundness: re-evaluate through the sample helper
    PairSample re = interval_phi_sample(cube, diff, neg.violation->x[0], neg.violation->y[0],
                                        neg.violation->t);
    CHECK(std::abs(re.lhs - neg.violation->lhs) <= 1e-12);
    CHECK(std::abs(re.rhs - neg.violation->rhs) <= 1e-12);
    CHECK(re.margin() > kCtx.tol.tau);

    CheckReport nonneg = check_phi_convex_interval(cube, diff, 0.0, 2.0, line_plan(33, 17), kCtx);
    CHECK(nonneg.status == CheckStatus::pass_on_samples);
}

TEST_CASE("slope form of interval phi-convexity") {
    Bifunction diff = Bifunction::catalog("diff");
    CheckReport pass = check_slope_inequality(Expression::parse("x^2"), diff, 0.0, 1.0,
                                              line_plan(17), kCtx);
    CHECK(pass.status == CheckStatus::pass_on_samples);

    CheckReport neg = check_slope_inequality(Expression::parse("x^3"), diff, -2.0, 0.0,
                                             line_plan(17), kCtx);
    REQUIRE(neg.status == CheckStatus::violated);
    REQUIRE(neg.violation.has_value());
    CHECK(neg.violation->rhs - neg.violation->lhs > kCtx.tol.tau);

    CheckReport flat = check_slope_inequality(Expression::parse("3"), diff, 0.0, 1.0,
                                              line_plan(17), kCtx);
    CHECK(flat.status == CheckStatus::pass_on_samples);

    // the triple x1 < x < x2 with the minimum gap needs at least three points
    CHECK_THROWS_AS(check_slope_inequality(Expression::parse("x^2"), diff, 0.0, 1.0,
                                           line_plan(2), kCtx),
                    std::invalid_argument);
    CHECK_THROWS_AS(check_slope_inequality(Expression::parse("x^2"), diff, 1.0, 1.0,
                                           line_plan(17), kCtx),
                    std::invalid_argument);
}

TEST_CASE("geodesic phi-convexity of the cubic height on the cylinder") {
    Bifunction diff = Bifunction::catalog("diff");
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    FunctionOnManifold cube = FunctionOnManifold::parse(cyl, "h1^3");

    SamplingPlan plan = small_plan();
    CheckReport nonneg = check_geodesic_phi_convex(cube, diff, cylinder_region(0, 3), plan, kCtx);
    CHECK(nonneg.status == CheckStatus::pass_on_samples);
    CHECK(*nonneg.worst_margin <= 1e-9);

    CheckReport full = check_geodesic_phi_convex(cube, diff, cylinder_region(-3, 3), plan, kCtx);
    REQUIRE(full.status == CheckStatus::violated);
    // the documented witness values
    PairSample doc = geodesic_phi_sample(cube, &diff, cyl, cyl.make_point({-2.0, 0.0}),
                                         cyl.make_point({-1.0, 1.0}), 0.5);
    CHECK(doc.lhs == doctest::Approx(-3.375));
    CHECK(doc.rhs == doctest::Approx(-4.5));
    CHECK(doc.margin() == doctest::Approx(1.125));
    CHECK(*full.worst_margin >= 1.125);

    // oracle agreement: brute force over the same grids
    double oracle = oracle_worst_geodesic_margin("h1^3", &diff, cylinder_region(-3, 3), plan,
                                                 kCtx.tol.tau);
    CHECK(*full.worst_margin == doctest::Approx(oracle).epsilon(1e-12));

    // witness soundness through the fresh evaluation path
    const Violation& v = *full.violation;
    PairSample re = geodesic_phi_sample(cube, &diff, cyl, cyl.make_point(v.x),
                                        cyl.make_point(v.y), v.t);
    CHECK(std::abs(re.lhs - v.lhs) <= 1e-12);
    CHECK(std::abs(re.rhs - v.rhs) <= 1e-12);
    CHECK(re.margin() > kCtx.tol.tau);

    // the literal reading of the example's phi fails even on nonnegative heights
    Bifunction cube_diff = Bifunction::catalog("cube_diff");
    CheckReport literal =
        check_geodesic_phi_convex(cube, cube_diff, cylinder_region(0, 3), plan, kCtx);
    CHECK(literal.status == CheckStatus::violated);
}

TEST_CASE("classical reduction: phi = diff matches the chord bound") {
    Bifunction diff = Bifunction::catalog("diff");
    SamplingPlan plan = small_plan();
    for (const char* text : {"h1^2", "h1^3", "h1^4", "exp(h1)", "abs(h1)", "2*h1 - 1"}) {
        FunctionOnManifold f = FunctionOnManifold::parse(ManifoldSpec::cylinder(), text);
        for (const Region& region : {cylinder_region(-3, 3), cylinder_region(0, 3)}) {
            CheckReport a = check_geodesic_phi_convex(f, diff, region, plan, kCtx);
            CheckReport b = check_geodesic_convex(f, region, plan, kCtx);
            INFO(text);
            CHECK(a.status == b.status);
            CHECK(std::abs(*a.worst_margin - *b.worst_margin) <= 1e-12);
        }
    }
}

TEST_CASE("endpoint consistency: margins vanish at t = 0 and t = 1") {
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    FunctionOnManifold f = FunctionOnManifold::parse(cyl, "h1^3 - 2*h1");
    Bifunction diff = Bifunction::catalog("diff");
    for (double xh : {-2.0, 0.5, 3.0}) {
        for (double yh : {-1.0, 2.0}) {
            Point x = cyl.make_point({xh, 0.3});
            Point y = cyl.make_point({yh, 4.0});
            PairSample at0 = geodesic_phi_sample(f, &diff, cyl, x, y, 0.0);
            CHECK(at0.margin() == 0.0);  // exact
            PairSample at1 = geodesic_phi_sample(f, &diff, cyl, x, y, 1.0);
            CHECK(std::abs(at1.margin()) <= 1e-12);
        }
    }
}

TEST_CASE("strict mode separates strict from non-strict convexity") {
    Bifunction diff = Bifunction::catalog("diff");
    ManifoldSpec line = ManifoldSpec::euclidean_line();
    Region seg = line_region(0, 1);
    FunctionOnManifold sq = FunctionOnManifold::parse(line, "h1^2");
    FunctionOnManifold lin = FunctionOnManifold::parse(line, "h1");
    SamplingPlan plan = line_plan(17, 9);
    CHECK(check_geodesic_phi_convex(sq, diff, seg, plan, kCtx, true).status ==
          CheckStatus::pass_on_samples);
    CHECK(check_geodesic_phi_convex(lin, diff, seg, plan, kCtx, true).status ==
          CheckStatus::violated);
    CHECK(check_geodesic_phi_convex(lin, diff, seg, plan, kCtx, false).status ==
          CheckStatus::pass_on_samples);
}

TEST_CASE("differential criterion for geodesic phi-convexity") {
    Bifunction diff = Bifunction::catalog("diff");
    ManifoldSpec line = ManifoldSpec::euclidean_line();
    SamplingPlan plan = line_plan(17);

    FunctionOnManifold sq = FunctionOnManifold::parse(line, "h1^2");
    CheckReport pass = check_differential_criterion(sq, diff, line_region(0, 1), plan, kCtx);
    CHECK(pass.status == CheckStatus::pass_on_samples);

    FunctionOnManifold cube = FunctionOnManifold::parse(line, "h1^3");
    CheckReport neg = check_differential_criterion(cube, diff, line_region(-2, 0), plan, kCtx);
    REQUIRE(neg.status == CheckStatus::violated);
    // at x=-2 toward y=0 the directional derivative is 3 x^2 (y-x) = 24
    // against phi = f(0) - f(-2) = 8
    Geodesic g = geodesic_between(line, Point{{-2.0}}, Point{{0.0}});
    double d = curve_derivative_fd(cube, g, 0.0, kCtx.tol.fd_step);
    CHECK(d == doctest::Approx(24.0).epsilon(1e-6));
    CHECK(d - 8.0 > kCtx.tol.fd_tau);

    // x = y pairs have zero derivative and phi(c,c) = 0
    PairSample same = geodesic_phi_sample(sq, &diff, line, Point{{0.5}}, Point{{0.5}}, 0.0);
    CHECK(same.margin() == 0.0);
}

TEST_CASE("FD cross-check: infinitesimal violations appear at small t") {
    Bifunction diff = Bifunction::catalog("diff");
    ManifoldSpec line = ManifoldSpec::euclidean_line();
    FunctionOnManifold cube = FunctionOnManifold::parse(line, "h1^3");
    CheckReport neg =
        check_differential_criterion(cube, diff, line_region(-2, 0), line_plan(17), kCtx);
    REQUIRE(neg.violation.has_value());
    Point x{neg.violation->x}, y{neg.violation->y};
    bool found = false;
    for (double t : {1e-4, 1e-3, 1e-2}) {
        PairSample s = geodesic_phi_sample(cube, &diff, line, x, y, t);
        found = found || s.margin() > kCtx.tol.tau;
    }
    CHECK(found);
}

TEST_CASE("restriction equivalence: manifold check vs 1-D reduction") {
    Bifunction diff = Bifunction::catalog("diff");
    FunctionOnManifold cube = FunctionOnManifold::parse(ManifoldSpec::cylinder(), "h1^3");
    SamplingPlan plan;
    plan.factor_counts = {6, 4};
    plan.t_count = 7;

    CheckReport pass = verify_restriction_equivalence(cube, diff, cylinder_region(0, 3), plan, kCtx);
    CHECK(pass.status == CheckStatus::pass_on_samples);
    CHECK(pass.notes[0].find(" 0 verdict disagreements") != std::string::npos);

    CheckReport fail =
        verify_restriction_equivalence(cube, diff, cylinder_region(-3, 3), plan, kCtx);
    CHECK(fail.status == CheckStatus::violated);
    CHECK(fail.notes[0].find(" 0 verdict disagreements") != std::string::npos);
    REQUIRE(fail.violation.has_value());

    FunctionOnManifold flat = FunctionOnManifold::parse(ManifoldSpec::cylinder(), "2");
    CheckReport constant =
        verify_restriction_equivalence(flat, diff, cylinder_region(-3, 3), plan, kCtx);
    CHECK(constant.status == CheckStatus::pass_on_samples);
}

TEST_CASE("mean-value chain audit") {
    Bifunction diff = Bifunction::catalog("diff");
    CheckReport sq = audit_mean_value(Expression::parse("x^2"), diff, 0.0, 1.0, line_plan(33), kCtx);
    CHECK(sq.status == CheckStatus::pass_on_samples);

    CheckReport lin = audit_mean_value(Expression::parse("x"), diff, 0.0, 1.0, line_plan(33), kCtx);
    CHECK(lin.status == CheckStatus::pass_on_samples);

    CheckReport flat = audit_mean_value(Expression::parse("5"), diff, 0.0, 1.0, line_plan(33), kCtx);
    CHECK(flat.status == CheckStatus::hypothesis_failed);
}

TEST_CASE("three-point audit reports all three statements") {
    Bifunction diff = Bifunction::catalog("diff");
    CheckReport rep = audit_three_point(Expression::parse("x^2"), diff, 0.0, 1.0, 2.0, kCtx);
    CHECK(rep.status == CheckStatus::pass_on_samples);
    // exact values: (i) -6 <= -4, (ii) 6 <= 2 violated, (iii) 6 >= 2 holds
    REQUIRE(rep.notes.size() >= 3);
    CHECK(rep.notes[0].find("-6") != std::string::npos);
    CHECK(rep.notes[0].find("holds") != std::string::npos);
    CHECK(rep.notes[1].find("violated") != std::string::npos);
    CHECK(rep.notes[2].find("holds") != std::string::npos);
    CHECK(*rep.worst_margin == doctest::Approx(-2.0).epsilon(1e-9));

    CheckReport lin = audit_three_point(Expression::parse("x"), diff, 0.0, 1.0, 2.0, kCtx);
    CHECK(lin.status == CheckStatus::pass_on_samples);

    CheckReport cube = audit_three_point(Expression::parse("x^3"), diff, 0.0, 1.0, 2.0, kCtx);
    CHECK(cube.status == CheckStatus::pass_on_samples);

    CHECK_THROWS_AS(audit_three_point(Expression::parse("x^2"), diff, 2.0, 1.0, 0.0, kCtx),
                    std::invalid_argument);
}

TEST_CASE("composition with a non-decreasing phi-convex outer function") {
    Bifunction diff = Bifunction::catalog("diff");
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    FunctionOnManifold sq = FunctionOnManifold::parse(cyl, "h1^2");
    SamplingPlan plan = small_plan();

    CheckReport ident = check_composition(sq, Expression::parse("u"), diff,
                                          cylinder_region(-1, 1), plan, kCtx);
    CHECK(ident.status == CheckStatus::pass_on_samples);
    CHECK(ident.conclusion_kind == "geodesic_phi_convex");

    CheckReport expo = check_composition(sq, Expression::parse("exp(u)"), diff,
                                         cylinder_region(-1, 1), plan, kCtx);
    CHECK(expo.status == CheckStatus::pass_on_samples);
    CHECK(expo.effective_expr.find("exp") != std::string::npos);

    FunctionOnManifold cube = FunctionOnManifold::parse(cyl, "h1^3");
    CheckReport hyp = check_composition(cube, Expression::parse("u"), diff,
                                        cylinder_region(-3, 3), plan, kCtx);
    CHECK(hyp.status == CheckStatus::hypothesis_failed);
    CHECK_FALSE(hyp.violation.has_value());

    CheckReport dec = check_composition(sq, Expression::parse("-u"), diff,
                                        cylinder_region(-1, 1), plan, kCtx);
    CHECK(dec.status == CheckStatus::hypothesis_failed);
}

TEST_CASE("nonnegative weighted sums") {
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    std::vector<FunctionOnManifold> fs;
    fs.push_back(FunctionOnManifold::parse(cyl, "h1^2"));
    fs.push_back(FunctionOnManifold::parse(cyl, "h1^4"));
    SamplingPlan plan = small_plan();
    Region region = cylinder_region(-1, 1);

    double weights[] = {2.0, 3.0};
    CheckReport rep =
        check_weighted_sum(fs, weights, Bifunction::catalog("diff"), region, plan, kCtx);
    CHECK(rep.status == CheckStatus::pass_on_samples);

    double zeros[] = {0.0, 0.0};
    CheckReport zero =
        check_weighted_sum(fs, zeros, Bifunction::catalog("diff"), region, plan, kCtx);
    CHECK(zero.status == CheckStatus::pass_on_samples);
    CHECK(*zero.worst_margin <= 1e-12);

    CheckReport bad =
        check_weighted_sum(fs, weights, Bifunction::catalog("cube_diff"), region, plan, kCtx);
    CHECK(bad.status == CheckStatus::hypothesis_failed);
}

TEST_CASE("pushforward along a diffeomorphism") {
    Bifunction diff = Bifunction::catalog("diff");
    ManifoldSpec line = ManifoldSpec::euclidean_line();
    FunctionOnManifold sq = FunctionOnManifold::parse(line, "h1^2");
    SamplingPlan plan = line_plan(17, 9);
    Region region = line_region(-1, 1);

    std::vector<Expression> shift = {Expression::parse("h1 + 1")};
    std::vector<Expression> unshift = {Expression::parse("h1 - 1")};
    CheckReport moved = check_pushforward(sq, diff, shift, unshift, region, plan, kCtx);
    CHECK(moved.status == CheckStatus::pass_on_samples);

    std::vector<Expression> scale = {Expression::parse("2*h1")};
    std::vector<Expression> unscale = {Expression::parse("h1/2")};
    CheckReport scaled = check_pushforward(sq, diff, scale, unscale, region, plan, kCtx);
    CHECK(scaled.status == CheckStatus::pass_on_samples);

    std::vector<Expression> cube_map = {Expression::parse("h1^3")};
    std::vector<Expression> wrong_inv = {Expression::parse("h1^2")};
    CheckReport wrong = check_pushforward(sq, diff, cube_map, wrong_inv, region, plan, kCtx);
    CHECK(wrong.status == CheckStatus::hypothesis_failed);
}

TEST_CASE("Lipschitz bound from the continuity theorem") {
    Bifunction diff = Bifunction::catalog("diff");
    Expression sq = Expression::parse("x^2");
    SamplingPlan plan = line_plan(33);

    CheckReport rep = check_lipschitz_bound(sq, diff, 0.0, 1.0, 0.5, 0.25, plan, kCtx);
    CHECK(rep.status == CheckStatus::pass_on_samples);
    // M_phi = 1 over f([-1,1])^2, so K = 4; the true quotient never exceeds 1
    CHECK(rep.notes[0].find("K = 4") != std::string::npos);

    CheckReport flat = check_lipschitz_bound(Expression::parse("7"), diff, 0.0, 1.0, 0.5, 0.25,
                                             plan, kCtx);
    CHECK(flat.status == CheckStatus::pass_on_samples);

    CheckReport tight = check_lipschitz_bound(sq, diff, 0.0, 1.0, 0.5, 0.01, plan, kCtx);
    CHECK(tight.status == CheckStatus::pass_on_samples);

    CHECK_THROWS_AS(check_lipschitz_bound(sq, diff, 0.0, 1.0, 0.9, 0.25, plan, kCtx),
                    std::invalid_argument);
}

TEST_CASE("Lipschitz bound on a Euclidean product") {
    Bifunction diff = Bifunction::catalog("diff");
    ManifoldSpec plane({Factor::line(), Factor::line()});
    FunctionOnManifold radial = FunctionOnManifold::parse(plane, "h1^2 + h2^2");
    SamplingPlan plan;
    Point center = plane.make_point({0.0, 0.0});

    // f(B(0,1)) = [0,1], so M_phi = 1 and K = 4; the quotient on the inner
    // ball is ||x|| + ||y|| <= 1
    CheckReport rep = check_lipschitz_bound(radial, diff, center, 1.0, 0.5, 0.25, plan, kCtx);
    CHECK(rep.status == CheckStatus::pass_on_samples);
    CHECK(rep.notes[0].find("K = 4") != std::string::npos);

    ManifoldSpec cyl = ManifoldSpec::cylinder();
    FunctionOnManifold on_cyl = FunctionOnManifold::parse(cyl, "h1^2");
    CHECK_THROWS_AS(check_lipschitz_bound(on_cyl, diff, cyl.make_point({0.0, 0.0}), 1.0, 0.5,
                                          0.25, plan, kCtx),
                    std::invalid_argument);
}

TEST_CASE("sup of a family of geodesic phi-convex functions") {
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    SamplingPlan plan = small_plan();
    Bifunction sum = Bifunction::catalog("sum");

    // nonnegative members keep the phi = sum bound slack
    std::vector<FunctionOnManifold> fs;
    fs.push_back(FunctionOnManifold::parse(cyl, "h1^2"));
    fs.push_back(FunctionOnManifold::parse(cyl, "h1^4"));
    CheckReport rep = check_sup_family(fs, sum, cylinder_region(-1, 1), plan, kCtx);
    CHECK(rep.status == CheckStatus::pass_on_samples);
    CHECK(rep.effective_expr.find("max") != std::string::npos);

    std::vector<FunctionOnManifold> single;
    single.push_back(FunctionOnManifold::parse(cyl, "h1^2"));
    CheckReport one = check_sup_family(single, sum, cylinder_region(0, 1), plan, kCtx);
    CheckReport direct = check_geodesic_phi_convex(single[0], sum, cylinder_region(0, 1), plan, kCtx);
    CHECK(one.status == direct.status);
    CHECK(*one.worst_margin == *direct.worst_margin);

    // negative member values break the hypothesis for phi = sum: the check
    // reports that honestly
    std::vector<FunctionOnManifold> shifted;
    shifted.push_back(FunctionOnManifold::parse(cyl, "h1^2"));
    shifted.push_back(FunctionOnManifold::parse(cyl, "h1^2 - 1"));
    CheckReport hyp = check_sup_family(shifted, sum, cylinder_region(0, 1), plan, kCtx);
    CHECK(hyp.status == CheckStatus::hypothesis_failed);

    CheckReport prod = check_sup_family(fs, Bifunction::catalog("prod"),
                                        cylinder_region(-1, 1), plan, kCtx);
    CHECK(prod.status == CheckStatus::hypothesis_failed);
    CHECK(prod.notes[0].find("sequentially upper bounded") != std::string::npos);
}

TEST_CASE("local minimum criterion") {
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    FunctionOnManifold sq = FunctionOnManifold::parse(cyl, "h1^2");
    SamplingPlan plan = small_plan();
    Region region = cylinder_region(-1, 1);
    Point x0 = cyl.make_point({0.0, 0.0});

    for (const char* phi_name : {"diff", "sum"}) {
        CheckReport rep = check_local_min_criterion(sq, Bifunction::catalog(phi_name), x0, region,
                                                    plan, kCtx);
        INFO(phi_name);
        CHECK(rep.status == CheckStatus::pass_on_samples);
        CHECK(*rep.worst_margin <= 1e-9);
    }

    FunctionOnManifold lin = FunctionOnManifold::parse(cyl, "h1");
    CheckReport hyp = check_local_min_criterion(lin, Bifunction::catalog("diff"), x0, region, plan,
                                                kCtx);
    CHECK(hyp.status == CheckStatus::hypothesis_failed);

    Point edge = cyl.make_point({-1.0, 0.0});
    CheckReport interior = check_local_min_criterion(sq, Bifunction::catalog("diff"), edge, region,
                                                     plan, kCtx);
    CHECK(interior.status == CheckStatus::hypothesis_failed);
}

TEST_CASE("phi limits and series") {
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    FunctionOnManifold sq = FunctionOnManifold::parse(cyl, "h1^2");
    SamplingPlan plan = small_plan();
    Region region = cylinder_region(0, 1);

    CheckReport pointwise = check_phi_limit(sq, Expression::parse("u - v + 1/n"),
                                            PhiLimitMode::pointwise, 10,
                                            Bifunction::catalog("diff"), region, plan, kCtx);
    CHECK(pointwise.status == CheckStatus::pass_on_samples);
    CHECK(pointwise.notes[0].find("max deviation") != std::string::npos);

    // the geometric series (u-v)/2^n has partial sums (1 - 2^-n)(u - v),
    // which genuinely violate the hypothesis at t = 1 whenever f(y) > f(x)
    CheckReport tight = check_phi_limit(sq, Expression::parse("(u - v)/2^n"),
                                        PhiLimitMode::series, 10, Bifunction::catalog("diff"),
                                        region, plan, kCtx);
    CHECK(tight.status == CheckStatus::hypothesis_failed);

    // a slack series does converge with every partial sum passing
    CheckReport slack = check_phi_limit(sq, Expression::parse("(u - v + 2)/2^n"),
                                        PhiLimitMode::series, 10,
                                        Bifunction::parse("u - v + 2"), region, plan, kCtx);
    CHECK(slack.status == CheckStatus::pass_on_samples);

    CHECK_THROWS_AS(check_phi_limit(sq, Expression::parse("u - v"), PhiLimitMode::pointwise, 0,
                                    Bifunction::catalog("diff"), region, plan, kCtx),
                    std::invalid_argument);
}

TEST_CASE("endpoint derivatives of strictly convex functions differ") {
    ManifoldSpec line = ManifoldSpec::euclidean_line();
    FunctionOnManifold sq = FunctionOnManifold::parse(line, "h1^2");
    Bifunction diff = Bifunction::catalog("diff");
    SamplingPlan plan = line_plan(17, 9);

    CheckReport rep = audit_endpoint_derivatives(sq, diff, line_region(0, 1), plan, kCtx);
    CHECK(rep.status == CheckStatus::pass_on_samples);

    // symmetric pair: derivatives -4c^2 vs 4c^2 at x=-c, y=c
    Geodesic g = geodesic_between(line, Point{{-0.5}}, Point{{0.5}});
    double d0 = curve_derivative_fd(sq, g, 0.0, kCtx.tol.fd_step);
    double d1 = curve_derivative_fd(sq, g, 1.0, kCtx.tol.fd_step);
    CHECK(d0 == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(d1 == doctest::Approx(1.0).epsilon(1e-6));

    FunctionOnManifold lin = FunctionOnManifold::parse(line, "h1");
    CheckReport hyp = audit_endpoint_derivatives(lin, diff, line_region(0, 1), plan, kCtx);
    CHECK(hyp.status == CheckStatus::hypothesis_failed);

    CheckReport sym = audit_endpoint_derivatives(sq, Bifunction::catalog("sum"),
                                                 line_region(0, 1), plan, kCtx);
    CHECK(sym.status == CheckStatus::hypothesis_failed);  // sum is not antisymmetric
}

TEST_CASE("phi-preinvexity with Euclidean eta") {
    Bifunction diff = Bifunction::catalog("diff");
    SamplingPlan plan = line_plan(17, 9);
    std::pair<double, double> unit[] = {{0.0, 1.0}};
    std::pair<double, double> neg[] = {{-2.0, 0.0}};

    std::vector<Expression> segment = {Expression::parse("x1 - y1")};
    CheckReport sq = check_phi_preinvex(Expression::parse("x1^2"), diff, segment, unit, plan, kCtx);
    CHECK(sq.status == CheckStatus::pass_on_samples);

    std::vector<Expression> frozen = {Expression::parse("0")};
    CheckReport rep = check_phi_preinvex(Expression::parse("x1^2"), diff, frozen, unit, plan, kCtx);
    REQUIRE(rep.status == CheckStatus::violated);
    // documented witness: x=0, y=1, t=1 gives lhs f(y)=1 > rhs 1 + (0-1) = 0
    REQUIRE(rep.violation.has_value());
    CHECK(rep.violation->margin >= 1.0 - 1e-12);

    CheckReport cube = check_phi_preinvex(Expression::parse("x1^3"), diff, segment, neg, plan, kCtx);
    CHECK(cube.status == CheckStatus::violated);

    std::vector<Expression> escape = {Expression::parse("x1 - y1 + 10")};
    CheckReport inv = check_phi_preinvex(Expression::parse("x1^2"), diff, escape, unit, plan, kCtx);
    CHECK(inv.status == CheckStatus::hypothesis_failed);
}

TEST_CASE("G-preinvex composition") {
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    FunctionOnManifold sq = FunctionOnManifold::parse(cyl, "h1^2");
    Bifunction diff = Bifunction::catalog("diff");
    SamplingPlan plan = small_plan();
    Region region = cylinder_region(0, 1);

    CheckReport ident =
        check_g_preinvex_composition(sq, Expression::parse("u"), diff, diff, region, plan, kCtx);
    CHECK(ident.status == CheckStatus::pass_on_samples);

    CheckReport expo = check_g_preinvex_composition(sq, Expression::parse("exp(u)"), diff, diff,
                                                    region, plan, kCtx);
    CHECK(expo.status == CheckStatus::pass_on_samples);

    CheckReport dec =
        check_g_preinvex_composition(sq, Expression::parse("-u"), diff, diff, region, plan, kCtx);
    CHECK(dec.status == CheckStatus::hypothesis_failed);
}

TEST_CASE("falsification refines toward the continuous maximum") {
    Bifunction diff = Bifunction::catalog("diff");

    // cube on [-2, 0]: the interval inequality is anchored at y, so the margin along the
    // (-2, 0) pair is -8t^3 + 8t, maximal at t = 1/sqrt(3) with value
    // 16/(3 sqrt(3)) ≈ 3.0792
    SamplingPlan plan = line_plan(33, 17);
    CheckReport cube = falsify_interval(Expression::parse("x^3"), diff, -2.0, 0.0, plan, kCtx);
    REQUIRE(cube.status == CheckStatus::violated);
    CHECK(*cube.worst_margin >= 3.0);
    CHECK(*cube.worst_margin <= 16.0 / (3.0 * std::sqrt(3.0)) + 1e-9);
    REQUIRE(cube.margin_history.size() == static_cast<std::size_t>(plan.refine_rounds) + 1);
    for (std::size_t i = 1; i < cube.margin_history.size(); ++i)
        CHECK(cube.margin_history[i] >= cube.margin_history[i - 1]);
    CHECK(std::abs(cube.violation->x[0] + 2.0) <= 0.1);
    CHECK(std::abs(cube.violation->y[0] - 0.0) <= 0.1);
    CHECK(std::abs(cube.violation->t - 1.0 / std::sqrt(3.0)) <= 0.05);

    // the witness-window falsification of the cylinder example converges to
    // margin (14/3) sqrt(7/3) - 6 ≈ 1.128452 near (-2, -1, 0.4725)
    FunctionOnManifold cube_fn = FunctionOnManifold::parse(ManifoldSpec::cylinder(), "h1^3");
    SamplingPlan cplan;
    cplan.factor_counts = {33, 16};
    CheckReport win = falsify_geodesic(cube_fn, &diff, cylinder_region(-2, -1), cplan, kCtx);
    REQUIRE(win.status == CheckStatus::violated);
    CHECK(*win.worst_margin >= 1.125);
    CHECK(*win.worst_margin <= 1.1285);
    CHECK(std::abs(win.violation->x[0] + 2.0) <= 0.1);
    CHECK(std::abs(win.violation->y[0] + 1.0) <= 0.1);
    CHECK(std::abs(win.violation->t - 0.5) <= 0.1);

    // a passing check keeps its margin history at zero
    CheckReport ok = falsify_interval(Expression::parse("x^2"), diff, 0.0, 1.0, plan, kCtx);
    CHECK(ok.status == CheckStatus::pass_on_samples);
    for (double m : ok.margin_history) CHECK(m <= kCtx.tol.tau);
}

TEST_CASE("checks are deterministic given identical inputs") {
    Bifunction diff = Bifunction::catalog("diff");
    FunctionOnManifold cube = FunctionOnManifold::parse(ManifoldSpec::cylinder(), "h1^3");
    SamplingPlan plan = small_plan();
    CheckReport a = check_geodesic_phi_convex(cube, diff, cylinder_region(-3, 3), plan, kCtx);
    CheckReport b = check_geodesic_phi_convex(cube, diff, cylinder_region(-3, 3), plan, kCtx);
    CHECK(a.status == b.status);
    CHECK(*a.worst_margin == *b.worst_margin);
    REQUIRE(a.violation.has_value());
    REQUIRE(b.violation.has_value());
    CHECK(a.violation->x == b.violation->x);
    CHECK(a.violation->y == b.violation->y);
    CHECK(a.violation->t == b.violation->t);
    CHECK(a.notes == b.notes);
}

TEST_CASE("degenerate pairs with phi(c,c) < 0 are excluded, not violations") {
    // f = h1^3 with phi = sum: at x = y with f < 0 the right side drops below
    // f(x); the design decision excludes those samples and notes them
    FunctionOnManifold cube = FunctionOnManifold::parse(ManifoldSpec::cylinder(), "h1^3");
    SamplingPlan plan = small_plan();
    CheckReport rep = check_geodesic_phi_convex(cube, Bifunction::catalog("sum"),
                                                cylinder_region(-3, -1), plan, kCtx);
    bool noted = false;
    for (const std::string& n : rep.notes) noted = noted || n.find("phi-pathology") != std::string::npos;
    CHECK(noted);
    // genuine x != y violations still decide the status
    CHECK(rep.status == CheckStatus::violated);
    REQUIRE(rep.violation.has_value());
    CHECK(rep.violation->x != rep.violation->y);
}
