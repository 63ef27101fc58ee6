#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "geoconvex/expr.hpp"
#include "geoconvex/parallel.hpp"

namespace geoconvex {

enum class BifunctionProperty : std::uint8_t {
    nonneg_homogeneous,
    additive,
    nonneg_linear,
    antisymmetric,
    nondecreasing,
    seq_upper_bounded,
};

std::string_view to_string(BifunctionProperty p);

/// A bifunction phi: R x R -> R given as an expression in (u, v), with an
/// optional set of declared algebraic properties carried through to reports.
class Bifunction {
public:
    explicit Bifunction(Expression expr, std::set<BifunctionProperty> declared = {});

    static Bifunction parse(std::string_view text, std::set<BifunctionProperty> declared = {});
    /// Built-in catalog: "diff" (u-v), "sum" (u+v), "prod" (u*v),
    /// "cube_diff" (u^3-v^3).
    static Bifunction catalog(std::string_view name);
    static bool is_catalog_name(std::string_view name);

    double operator()(double u, double v) const;

    const Expression& expression() const { return expr_; }
    const std::set<BifunctionProperty>& declared_properties() const { return declared_; }

private:
    Expression expr_;
    std::set<BifunctionProperty> declared_;
    int u_slot_ = -1, v_slot_ = -1;
};

/// Sampling plan for the property probes. The default grid covers signed
/// arguments; the bounded-sequence family pairs each test sequence with
/// itself (set pair_all_sequences for the stronger cross pairing).
struct ProbePlan {
    double lo = -4.0;
    double hi = 4.0;
    int grid = 17;
    std::vector<double> lambdas = {0.0, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> seq_values = {-2.0, -1.0, 1.0, 2.0};
    int seq_len = 16;
    bool pair_all_sequences = false;
    double tau = 1e-9;
};

/// Outcome of one property probe. A probe is a falsifier, not a verifier:
/// verdict "holds" means holds-on-samples only, and the note says so.
/// A violated verdict ships a witness that independently re-evaluates to a
/// violation with margin > tau.
struct ProbeReport {
    BifunctionProperty property;
    bool violated = false;
    double worst_margin = 0.0;
    std::uint64_t samples = 0;
    std::vector<double> witness;  // property-specific layout, empty when holding
    std::string note;
};

ProbeReport probe(const Bifunction& phi, BifunctionProperty property, const ProbePlan& plan = {},
                  const ExecPolicy& exec = ExecPolicy::from_env());

ProbeReport probe_nonneg_homogeneous(const Bifunction& phi, const ProbePlan& plan = {},
                                     const ExecPolicy& exec = ExecPolicy::from_env());
ProbeReport probe_additive(const Bifunction& phi, const ProbePlan& plan = {},
                           const ExecPolicy& exec = ExecPolicy::from_env());
ProbeReport probe_nonneg_linear(const Bifunction& phi, const ProbePlan& plan = {},
                                const ExecPolicy& exec = ExecPolicy::from_env());
ProbeReport probe_antisymmetric(const Bifunction& phi, const ProbePlan& plan = {},
                                const ExecPolicy& exec = ExecPolicy::from_env());
ProbeReport probe_nondecreasing(const Bifunction& phi, const ProbePlan& plan = {},
                                const ExecPolicy& exec = ExecPolicy::from_env());
ProbeReport probe_seq_upper_bounded(const Bifunction& phi, const ProbePlan& plan = {},
                                    const ExecPolicy& exec = ExecPolicy::from_env());

/// One bounded test sequence used by the sequentially-upper-bounded probe.
struct TestSequence {
    std::string desc;
    std::vector<double> values;
};

/// The deterministic family: constants, eventually-constant, alternating, and
/// monotone sequences over plan.seq_values, truncated to plan.seq_len. The
/// enumeration order is part of the witness tie-break contract.
std::vector<TestSequence> bounded_sequence_family(const ProbePlan& plan);

}  // namespace geoconvex
