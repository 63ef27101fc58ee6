#include "geoconvex/runner.hpp"

namespace geoconvex {

// The bundled audit scenarios. Everything here is fixed: functions, regions,
// plans and the expected outcome of every check, so a run is reproducible
// byte for byte given the same seed.
Json audit_paper_config() {
    Json j;
    j["manifold"] = Json::parse(R"({"factors":[{"type":"line"},{"type":"circle"}]})");
    j["seed"] = 0;
    j["functions"] = Json::object({
        {"cube", "h1^3"},
        {"square", "h1^2"},
        {"quart", "h1^4"},
        {"square_minus_one", "h1^2 - 1"},
        {"square_1d", "x^2"},
    });
    j["regions"] = Json::object({
        {"full", Json::parse(R"([{"interval":[-3,3]},"whole"])")},
        {"nonneg", Json::parse(R"([{"interval":[0,3]},"whole"])")},
        {"witness_window", Json::parse(R"([{"interval":[-2,-1]},"whole"])")},
        {"unit", Json::parse(R"([{"interval":[0,1]},"whole"])")},
        {"sym", Json::parse(R"([{"interval":[-1,1]},"whole"])")},
    });

    Json checks = Json::array();
    auto add = [&checks](Json c) { checks.push_back(std::move(c)); };

    // (a) the cylinder example: the displayed inequality reads phi = u - v on
    // f-values; the literal reading applies u^3 - v^3 to f-values. Both fail
    // on the full cylinder; the displayed reading holds for nonnegative
    // heights.
    add(Json{{"name", "cylinder_cubic_restricted_displayed"},
             {"kind", "geodesic_phi_convex"},
             {"function", "cube"},
             {"phi", "diff"},
             {"region", "nonneg"},
             {"expect", "pass"}});
    add(Json{{"name", "cylinder_cubic_full_displayed"},
             {"kind", "geodesic_phi_convex"},
             {"function", "cube"},
             {"phi", "diff"},
             {"region", "full"},
             {"expect", "violated"}});
    add(Json{{"name", "cylinder_cubic_full_literal"},
             {"kind", "geodesic_phi_convex"},
             {"function", "cube"},
             {"phi", "cube_diff"},
             {"region", "full"},
             {"expect", "violated"}});
    add(Json{{"name", "cylinder_cubic_witness_falsify"},
             {"kind", "geodesic_phi_convex"},
             {"function", "cube"},
             {"phi", "diff"},
             {"region", "witness_window"},
             {"falsify", true},
             {"expect", "violated"}});

    // (b) sequentially upper bounded probes
    add(Json{{"name", "seq_upper_bounded_sum"},
             {"kind", "probe"},
             {"bifunction", "sum"},
             {"property", "seq_upper_bounded"},
             {"expect", "pass"}});
    add(Json{{"name", "seq_upper_bounded_prod"},
             {"kind", "probe"},
             {"bifunction", "prod"},
             {"property", "seq_upper_bounded"},
             {"expect", "violated"}});

    // (c) the three-point audit on x^2 at (0, 1, 2)
    add(Json{{"name", "three_point_square"},
             {"kind", "three_point"},
             {"function", "square_1d"},
             {"phi", "diff"},
             {"points", Json::array({0.0, 1.0, 2.0})},
             {"expect", "pass"}});

    // (d) restriction equivalence and epigraph characterization agreement
    Json small_plan = Json{{"factor_counts", Json::array({8, 4})}, {"t_count", 9}};
    add(Json{{"name", "restriction_equivalence_pass"},
             {"kind", "restriction_equivalence"},
             {"function", "cube"},
             {"phi", "diff"},
             {"region", "nonneg"},
             {"plan", small_plan},
             {"expect", "pass"}});
    add(Json{{"name", "restriction_equivalence_fail"},
             {"kind", "restriction_equivalence"},
             {"function", "cube"},
             {"phi", "diff"},
             {"region", "full"},
             {"plan", small_plan},
             {"expect", "violated"}});

    Json epi_plan = Json{{"factor_counts", Json::array({9, 6})}, {"t_count", 9}};
    add(Json{{"name", "epigraph_characterization_square"},
             {"kind", "epigraph_characterization"},
             {"function", "square"},
             {"phi", "sum"},
             {"region", "sym"},
             {"plan", epi_plan},
             {"expect", "pass"}});
    add(Json{{"name", "epigraph_characterization_quart"},
             {"kind", "epigraph_characterization"},
             {"function", "quart"},
             {"phi", "sum"},
             {"region", "sym"},
             {"plan", epi_plan},
             {"expect", "pass"}});
    add(Json{{"name", "epigraph_characterization_cube_nonneg"},
             {"kind", "epigraph_characterization"},
             {"function", "cube"},
             {"phi", "sum"},
             {"region", "nonneg"},
             {"plan", epi_plan},
             {"expect", "pass"}});
    add(Json{{"name", "epigraph_characterization_cube_full"},
             {"kind", "epigraph_characterization"},
             {"function", "cube"},
             {"phi", "sum"},
             {"region", "full"},
             {"plan", epi_plan},
             {"expect", "violated"}});
    add(Json{{"name", "sup_via_epigraph_squares"},
             {"kind", "sup_via_epigraph"},
             {"functions", Json::array({"square", "quart"})},
             {"phi", "sum"},
             {"region", "sym"},
             {"plan", epi_plan},
             {"expect", "pass"}});
    // the shifted family keeps negative values, so the phi = sum hypothesis
    // honestly fails; the audit pins that outcome
    add(Json{{"name", "sup_via_epigraph_shifted_hypothesis"},
             {"kind", "sup_via_epigraph"},
             {"functions", Json::array({"square", "square_minus_one"})},
             {"phi", "sum"},
             {"region", "unit"},
             {"plan", epi_plan},
             {"expect", "any"}});

    j["checks"] = checks;
    return j;
}

}  // namespace geoconvex
