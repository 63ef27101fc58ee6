#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "geoconvex/runner.hpp"

using namespace geoconvex;

namespace {

const ExecPolicy kPar = ExecPolicy::from_env();

const char* kBaseConfig = R"({
  "manifold": {"factors": [{"type": "line"}, {"type": "circle"}]},
  "seed": 0,
  "functions": {"cube": "h1^3", "square": "h1^2", "sq1d": "x^2"},
  "regions": {
    "full": [{"interval": [-3, 3]}, "whole"],
    "nonneg": [{"interval": [0, 3]}, "whole"]
  },
  "plan": {"factor_counts": [9, 6], "t_count": 9},
  "checks": [
    {"name": "pass_case", "kind": "geodesic_phi_convex", "function": "square",
     "phi": "diff", "region": "full", "expect": "pass"},
    {"name": "fail_case", "kind": "geodesic_phi_convex", "function": "cube",
     "phi": "diff", "region": "full", "expect": "violated"},
    {"name": "interval_case", "kind": "phi_convex_interval", "function": "sq1d",
     "phi": "diff", "interval": [0, 1], "expect": "pass"}
  ]
})";

RunConfig base_config() {
    return RunConfig::from_json(parse_config_text(kBaseConfig));
}

}  // namespace

TEST_CASE("config parsing and name resolution") {
    RunConfig cfg = base_config();
    CHECK(cfg.manifold->is_cylinder());
    CHECK(cfg.checks.size() == 3);
    CHECK(cfg.regions.count("full") == 1);
    CHECK_NOTHROW(validate_config(cfg));

    // inline expressions resolve when no named entry exists
    CHECK_NOTHROW(cfg.function("h1^2 + 1"));
    CHECK_NOTHROW(cfg.bifunction("u - 2*v"));
    CHECK_THROWS_AS(cfg.region("nope"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);

    Json bad = parse_config_text(kBaseConfig);
    bad["checks"][0]["kind"] = "unknown_kind";
    CHECK_THROWS_AS(validate_config(RunConfig::from_json(bad)), ConfigError);

    Json badexpect = parse_config_text(kBaseConfig);
    badexpect["checks"][0]["expect"] = "maybe";
    CHECK_THROWS_AS(validate_config(RunConfig::from_json(badexpect)), ConfigError);

    Json shadow = parse_config_text(kBaseConfig);
    shadow["bifunctions"] = Json{{"diff", "u+v"}};
    CHECK_THROWS_AS(RunConfig::from_json(shadow), ConfigError);
}

TEST_CASE("run_checks: expectations drive the overall verdict") {
    RunConfig cfg = base_config();
    RunReport run = run_checks(cfg, "deadbeef", kPar);
    CHECK(run.all_matched);
    REQUIRE(run.outcomes.size() == 3);
    CHECK(run.outcomes[0].report.status == CheckStatus::pass_on_samples);
    CHECK(run.outcomes[1].report.status == CheckStatus::violated);
    CHECK(run.outcomes[2].report.status == CheckStatus::pass_on_samples);

    // flipping an expectation produces a mismatch, which maps to exit code 1
    cfg.checks[0].expect = "violated";
    RunReport bad = run_checks(cfg, "deadbeef", kPar);
    CHECK_FALSE(bad.all_matched);
    CHECK_FALSE(bad.outcomes[0].matched);
}

TEST_CASE("reports are byte-deterministic for identical config and seed") {
    RunConfig cfg = base_config();
    std::string a = report_to_json(run_checks(cfg, "d", kPar)).dump(2);
    std::string b = report_to_json(run_checks(cfg, "d", kPar)).dump(2);
    CHECK(a == b);

    // serial and parallel agree too
    std::string c = report_to_json(run_checks(cfg, "d", ExecPolicy::serial())).dump(2);
    CHECK(a == c);

    // timings are opt-in so they cannot break determinism
    CHECK(a.find("wall_ms") == std::string::npos);
    std::string timed = report_to_json(run_checks(cfg, "d", kPar), true).dump(2);
    CHECK(timed.find("wall_ms") != std::string::npos);
}

TEST_CASE("violated checks ship self-contained revalidation configs") {
    RunConfig cfg = base_config();
    RunReport run = run_checks(cfg, "d", kPar);
    const CheckOutcome& fail = run.outcomes[1];
    REQUIRE(fail.report.violation.has_value());
    REQUIRE(!fail.revalidate.is_null());

    // run the generated config through cmd_check's path: it must confirm
    Json wrapper;
    wrapper["checks"] = Json::array({fail.revalidate});
    wrapper["checks"][0]["name"] = "witness";
    wrapper["checks"][0]["expect"] = "violated";
    RunConfig wcfg = RunConfig::from_json(wrapper);
    validate_config(wcfg);
    RunReport wrun = run_checks(wcfg, "w", kPar);
    CHECK(wrun.all_matched);
    CHECK(wrun.outcomes[0].report.status == CheckStatus::violated);

    // a corrupted witness no longer re-validates
    Json corrupt = wrapper;
    corrupt["checks"][0]["witness"]["lhs"] = 12345.0;
    RunReport crun = run_checks(RunConfig::from_json(corrupt), "w", kPar);
    CHECK(crun.outcomes[0].report.status == CheckStatus::inconclusive);
}

TEST_CASE("probe table covers all six properties") {
    Bifunction diff = Bifunction::catalog("diff");
    Json table = probe_table_json("diff", diff, ProbePlan{}, kPar);
    REQUIRE(table["probes"].size() == 6);
    std::map<std::string, std::string> verdicts;
    for (const Json& p : table["probes"])
        verdicts[p["property"].get<std::string>()] = p["verdict"].get<std::string>();
    CHECK(verdicts["nonneg_homogeneous"] == "holds-on-samples");
    CHECK(verdicts["additive"] == "holds-on-samples");
    CHECK(verdicts["nonneg_linear"] == "holds-on-samples");
    CHECK(verdicts["antisymmetric"] == "holds-on-samples");
    CHECK(verdicts["nondecreasing"] == "violated");
    CHECK(verdicts["seq_upper_bounded"] == "holds-on-samples");

    std::string text = probe_table_text(table);
    CHECK(text.find("nondecreasing: violated") != std::string::npos);
}

TEST_CASE("curve data has exact endpoints and both bounds") {
    RunConfig cfg = base_config();
    const ManifoldSpec& spec = *cfg.manifold;
    FunctionOnManifold cube(spec, cfg.function("cube"));
    Bifunction diff = cfg.bifunction("diff");
    Point x = spec.make_point({-2.0, 0.0});
    Point y = spec.make_point({-1.0, kPi / 2});
    std::string csv = curve_csv(cube, diff, x, y, 5);

    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,lhs,rhs_phi,rhs_chord");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    REQUIRE(rows.size() == 5);
    CHECK(rows[0][0] == 0.0);
    CHECK(rows[4][0] == 1.0);
    // the documented midpoint values: lhs -3.375, rhs_phi -4.5
    CHECK(rows[2][1] == doctest::Approx(-3.375));
    CHECK(rows[2][2] == doctest::Approx(-4.5));
    CHECK(rows[0][1] == rows[0][2]);  // t=0: lhs equals f(x)

    // two-point curve has exactly the endpoint rows
    std::string two = curve_csv(cube, diff, x, y, 2);
    CHECK(std::count(two.begin(), two.end(), '\n') == 3);
}

TEST_CASE("the paper audit runs green and is byte-deterministic") {
    Json cj = audit_paper_config();
    RunConfig cfg = RunConfig::from_json(cj);
    validate_config(cfg);
    RunReport a = run_checks(cfg, fnv1a_hex(cj.dump()), kPar);
    CHECK(a.all_matched);
    for (const CheckOutcome& o : a.outcomes) {
        INFO(o.desc.name);
        CHECK(o.matched);
    }
    RunReport b = run_checks(cfg, fnv1a_hex(cj.dump()), kPar);
    CHECK(report_to_json(a).dump(2) == report_to_json(b).dump(2));

    // verdicts survive a coarse tolerance: every catalog margin is far from 1e-3
    RunConfig coarse = RunConfig::from_json(cj);
    coarse.tol.tau = 1e-3;
    coarse.tol.tau_strict = 1e-3;
    RunReport c = run_checks(coarse, fnv1a_hex(cj.dump()), kPar);
    REQUIRE(c.outcomes.size() == a.outcomes.size());
    for (std::size_t i = 0; i < c.outcomes.size(); ++i) {
        INFO(a.outcomes[i].desc.name);
        CHECK(c.outcomes[i].report.status == a.outcomes[i].report.status);
    }
}

TEST_CASE("per-check plans override the config default") {
    Json cj = parse_config_text(kBaseConfig);
    cj["checks"][0]["plan"] = Json{{"factor_counts", Json::array({5, 4})}, {"t_count", 5}};
    RunConfig cfg = RunConfig::from_json(cj);
    RunReport run = run_checks(cfg, "d", kPar);
    CHECK(run.outcomes[0].report.samples == 20ull * 20 * 5);
    CHECK(run.outcomes[1].report.samples == 54ull * 54 * 9);
}
