#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoconvex/checker.hpp"
#include "geoconvex/epigraph.hpp"

namespace geoconvex {

inline constexpr std::string_view kToolkitName = "geoconvex";
inline constexpr std::string_view kToolkitVersion = "1.0.0";

using Json = nlohmann::ordered_json;

/// Raised for malformed configs and unresolved names; the CLI maps it to
/// exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct CheckDescriptor {
    std::string name;
    std::string kind;
    Json args;  // the raw descriptor object
    SamplingPlan plan;
    std::string expect = "any";  // pass | violated | any
    bool falsify = false;
};

struct RunConfig {
    std::optional<ManifoldSpec> manifold;
    std::map<std::string, std::string> functions;  // name -> expression text
    std::map<std::string, std::string> bifunctions;
    std::map<std::string, Region> regions;
    std::vector<CheckDescriptor> checks;
    std::uint64_t seed = 0;
    Tolerances tol;
    SamplingPlan default_plan;
    std::string output_path;  // optional report destination from the config

    static RunConfig from_json(const Json& j);

    Expression function(const std::string& name) const;
    Bifunction bifunction(const std::string& name) const;
    const Region& region(const std::string& name) const;
    const ManifoldSpec& require_manifold() const;
};

Json parse_config_text(const std::string& text);
Region region_from_json(const ManifoldSpec& spec, const Json& j);
Json region_to_json(const Region& region);
Json manifold_to_json(const ManifoldSpec& spec);
ManifoldSpec manifold_from_json(const Json& j);
SamplingPlan plan_from_json(const SamplingPlan& base, const Json& j);

struct CheckOutcome {
    CheckDescriptor desc;
    CheckReport report;
    bool matched = true;
    double wall_ms = 0.0;
    Json revalidate;  // self-contained witness re-check config; null unless violated
};

struct RunReport {
    std::vector<CheckOutcome> outcomes;
    bool all_matched = true;
    std::uint64_t seed = 0;
    std::string config_digest;
};

/// Validates every descriptor (kinds, name references); throws ConfigError.
void validate_config(const RunConfig& cfg);

/// Runs all descriptors in config order. Evaluation-level failures inside a
/// check become status=inconclusive outcomes rather than aborting the run.
RunReport run_checks(const RunConfig& cfg, std::string config_digest, const ExecPolicy& exec);

/// Deterministic report serialization: fixed field order, timings only on
/// request so identical (config, seed) runs are byte-identical.
Json report_to_json(const RunReport& rep, bool with_timings = false);
std::string report_to_text(const RunReport& rep);

Json violation_to_json(const Violation& v);
Json check_report_to_json(const CheckReport& rep);

std::string fnv1a_hex(std::string_view data);

/// The six property probes of one bifunction (the `probe` subcommand).
Json probe_table_json(const std::string& name, const Bifunction& phi, const ProbePlan& plan,
                      const ExecPolicy& exec);
std::string probe_table_text(const Json& table);

/// Curve data for one endpoint pair: rows t, lhs, rhs_phi, rhs_chord.
std::string curve_csv(const FunctionOnManifold& f, const Bifunction& phi, const Point& x,
                      const Point& y, int t_count);

/// The built-in paper audit scenarios with coded expectations.
Json audit_paper_config();

}  // namespace geoconvex
