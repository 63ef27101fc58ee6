// Times the OpenMP sweep kernels against the serial reference and verifies
// that both produce identical results.

#include <chrono>
#include <cstdio>

#include "geoconvex/checker.hpp"
#include "geoconvex/runner.hpp"

using namespace geoconvex;

namespace {

double time_ms(const std::function<void()>& fn) {
    auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

void report(const char* name, std::uint64_t samples, double serial_ms, double parallel_ms,
            bool identical) {
    std::printf("%-28s %12llu samples  serial %9.2f ms  parallel %9.2f ms  speedup %5.2fx  %s\n",
                name, static_cast<unsigned long long>(samples), serial_ms, parallel_ms,
                parallel_ms > 0 ? serial_ms / parallel_ms : 0.0,
                identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
    const ExecPolicy parallel = ExecPolicy::from_env();
    const ExecPolicy serial = ExecPolicy::serial();
    CheckContext par_ctx{Tolerances{}, parallel};
    CheckContext ser_ctx{Tolerances{}, serial};
    SamplingPlan plan;

    std::printf("geoconvex kernel benchmark (%d worker threads)\n\n", parallel.resolved_threads());

    {
        // the full-cylinder cubic-height sweep
        ManifoldSpec cyl = ManifoldSpec::cylinder();
        FunctionOnManifold cube = FunctionOnManifold::parse(cyl, "h1^3");
        Bifunction diff = Bifunction::catalog("diff");
        Region full(cyl, {RegionFactor::interval(-3, 3), RegionFactor::whole_circle()});
        CheckReport a, b;
        double ser = time_ms([&] { a = check_geodesic_phi_convex(cube, diff, full, plan, ser_ctx); });
        double par = time_ms([&] { b = check_geodesic_phi_convex(cube, diff, full, plan, par_ctx); });
        bool same = a.status == b.status && a.worst_margin == b.worst_margin &&
                    a.violation.has_value() == b.violation.has_value() &&
                    (!a.violation || (a.violation->x == b.violation->x &&
                                      a.violation->y == b.violation->y &&
                                      a.violation->t == b.violation->t));
        report("geodesic_phi_convex sweep", a.samples, ser, par, same);
    }

    {
        // interval sweep on a finer grid
        Expression cube = Expression::parse("x^3");
        Bifunction diff = Bifunction::catalog("diff");
        SamplingPlan fine = plan;
        fine.factor_counts = {257};
        CheckReport a, b;
        double ser = time_ms([&] { a = check_phi_convex_interval(cube, diff, -2, 0, fine, ser_ctx); });
        double par = time_ms([&] { b = check_phi_convex_interval(cube, diff, -2, 0, fine, par_ctx); });
        bool same = a.status == b.status && a.worst_margin == b.worst_margin;
        report("phi_convex_interval sweep", a.samples, ser, par, same);
    }

    {
        // bifunction property probe
        Bifunction prod = Bifunction::catalog("prod");
        ProbePlan pp;
        pp.grid = 33;
        ProbeReport a, b;
        double ser = time_ms([&] { a = probe_additive(prod, pp, serial); });
        double par = time_ms([&] { b = probe_additive(prod, pp, parallel); });
        bool same = a.violated == b.violated && a.worst_margin == b.worst_margin &&
                    a.witness == b.witness;
        report("additivity probe", a.samples, ser, par, same);
    }

    {
        // falsification with refinement rounds
        ManifoldSpec cyl = ManifoldSpec::cylinder();
        FunctionOnManifold cube = FunctionOnManifold::parse(cyl, "h1^3");
        Bifunction diff = Bifunction::catalog("diff");
        Region window(cyl, {RegionFactor::interval(-2, -1), RegionFactor::whole_circle()});
        CheckReport a, b;
        double ser = time_ms([&] { a = falsify_geodesic(cube, &diff, window, plan, ser_ctx); });
        double par = time_ms([&] { b = falsify_geodesic(cube, &diff, window, plan, par_ctx); });
        bool same = a.worst_margin == b.worst_margin && a.margin_history == b.margin_history;
        report("falsify with refinement", a.samples, ser, par, same);
    }

    return 0;
}
