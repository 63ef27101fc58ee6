#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "geoconvex/checker.hpp"
#include "geoconvex/epigraph.hpp"

using namespace geoconvex;

namespace {

SamplingPlan plan_of(std::vector<int> counts, int t) {
    SamplingPlan plan;
    plan.factor_counts = std::move(counts);
    plan.t_count = t;
    return plan;
}

bool same_report(const CheckReport& a, const CheckReport& b) {
    if (a.status != b.status || a.samples != b.samples) return false;
    if (a.worst_margin.has_value() != b.worst_margin.has_value()) return false;
    if (a.worst_margin && *a.worst_margin != *b.worst_margin) return false;  // bitwise
    if (a.violation.has_value() != b.violation.has_value()) return false;
    if (a.violation) {
        if (a.violation->x != b.violation->x || a.violation->y != b.violation->y) return false;
        if (a.violation->t != b.violation->t) return false;
        if (a.violation->lhs != b.violation->lhs || a.violation->rhs != b.violation->rhs)
            return false;
    }
    return a.notes == b.notes && a.margin_history == b.margin_history;
}

}  // namespace

TEST_CASE("sweep_worst: serial and parallel reductions are identical") {
    auto fn = [](std::uint64_t i) {
        SampleOutcome out;
        // a few exact ties to exercise the smallest-index rule
        out.margin = static_cast<double>((i * 2654435761u) % 1000) / 7.0;
        out.excluded = i % 13 == 0;
        if (out.excluded) out.margin = -std::numeric_limits<double>::infinity();
        return out;
    };
    SweepResult ser = sweep_worst(200000, ExecPolicy::serial(), fn);
    SweepResult par = sweep_worst(200000, ExecPolicy{true, 0}, fn);
    CHECK(ser.worst_margin == par.worst_margin);
    CHECK(ser.worst_index == par.worst_index);
    CHECK(ser.excluded == par.excluded);
    CHECK(ser.error_index == par.error_index);

    auto failing = [](std::uint64_t i) {
        SampleOutcome out;
        out.margin = 1.0;
        out.failed = i >= 777 && i % 3 == 0;
        return out;
    };
    CHECK(sweep_worst(10000, ExecPolicy::serial(), failing).error_index ==
          sweep_worst(10000, ExecPolicy{true, 0}, failing).error_index);
    CHECK(sweep_worst(10000, ExecPolicy::serial(), failing).error_index == 777);
}

TEST_CASE("geodesic checks: OpenMP path matches the serial reference") {
    const CheckContext serial{Tolerances{}, ExecPolicy::serial()};
    const CheckContext parallel{Tolerances{}, ExecPolicy{true, 0}};
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    Region full(cyl, {RegionFactor::interval(-3, 3), RegionFactor::whole_circle()});
    Region nonneg(cyl, {RegionFactor::interval(0, 3), RegionFactor::whole_circle()});
    Bifunction diff = Bifunction::catalog("diff");
    SamplingPlan plan = plan_of({17, 8}, 9);

    for (const char* text : {"h1^3", "h1^2", "exp(h1)"}) {
        FunctionOnManifold f = FunctionOnManifold::parse(cyl, text);
        for (const Region* region : {&full, &nonneg}) {
            INFO(text);
            CHECK(same_report(check_geodesic_phi_convex(f, diff, *region, plan, serial),
                              check_geodesic_phi_convex(f, diff, *region, plan, parallel)));
            CHECK(same_report(check_geodesic_convex(f, *region, plan, serial),
                              check_geodesic_convex(f, *region, plan, parallel)));
        }
    }

    FunctionOnManifold cube = FunctionOnManifold::parse(cyl, "h1^3");
    Region window(cyl, {RegionFactor::interval(-2, -1), RegionFactor::whole_circle()});
    CHECK(same_report(falsify_geodesic(cube, &diff, window, plan, serial),
                      falsify_geodesic(cube, &diff, window, plan, parallel)));

    CHECK(same_report(check_differential_criterion(cube, diff, full, plan, serial),
                      check_differential_criterion(cube, diff, full, plan, parallel)));

    CheckReport set_ser = check_geodesic_phi_convex_set(
        SetSpec::epigraph(cube, full), diff, plan, serial);
    CheckReport set_par = check_geodesic_phi_convex_set(
        SetSpec::epigraph(cube, full), diff, plan, parallel);
    CHECK(same_report(set_ser, set_par));
}

TEST_CASE("probes: OpenMP path matches the serial reference") {
    ProbePlan plan;
    for (const char* name : {"diff", "sum", "prod", "cube_diff"}) {
        Bifunction phi = Bifunction::catalog(name);
        for (BifunctionProperty prop :
             {BifunctionProperty::nonneg_homogeneous, BifunctionProperty::additive,
              BifunctionProperty::antisymmetric, BifunctionProperty::nondecreasing,
              BifunctionProperty::seq_upper_bounded})
        {
            ProbeReport a = probe(phi, prop, plan, ExecPolicy::serial());
            ProbeReport b = probe(phi, prop, plan, ExecPolicy{true, 0});
            INFO(name << "/" << to_string(prop));
            CHECK(a.violated == b.violated);
            CHECK(a.worst_margin == b.worst_margin);
            CHECK(a.witness == b.witness);
            CHECK(a.samples == b.samples);
        }
    }
}

TEST_CASE("GEOCONVEX_THREADS caps the worker count") {
    setenv("GEOCONVEX_THREADS", "1", 1);
    ExecPolicy one = ExecPolicy::from_env();
    CHECK(one.resolved_threads() == 1);
    CHECK_FALSE(one.parallel);

    setenv("GEOCONVEX_THREADS", "2", 1);
    ExecPolicy two = ExecPolicy::from_env();
    CHECK(two.max_threads == 2);
    CHECK(two.parallel);
    CHECK(two.resolved_threads() <= 2);

    unsetenv("GEOCONVEX_THREADS");
    ExecPolicy def = ExecPolicy::from_env();
    CHECK(def.parallel);
    CHECK(def.max_threads == 0);
}
