#include "geoconvex/bifunction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "geoconvex/util.hpp"

namespace geoconvex {

std::string_view to_string(BifunctionProperty p) {
    switch (p) {
        case BifunctionProperty::nonneg_homogeneous: return "nonneg_homogeneous";
        case BifunctionProperty::additive: return "additive";
        case BifunctionProperty::nonneg_linear: return "nonneg_linear";
        case BifunctionProperty::antisymmetric: return "antisymmetric";
        case BifunctionProperty::nondecreasing: return "nondecreasing";
        case BifunctionProperty::seq_upper_bounded: return "seq_upper_bounded";
    }
    return "?";
}

Bifunction::Bifunction(Expression expr, std::set<BifunctionProperty> declared)
    : expr_(std::move(expr)), declared_(std::move(declared)) {
    for (std::size_t i = 0; i < expr_.variables().size(); ++i) {
        const std::string& name = expr_.variables()[i];
        if (name == "u")
            u_slot_ = static_cast<int>(i);
        else if (name == "v")
            v_slot_ = static_cast<int>(i);
        else
            throw std::invalid_argument("bifunctions take variables u and v, got '" + name + "'");
    }
}

Bifunction Bifunction::parse(std::string_view text, std::set<BifunctionProperty> declared) {
    return Bifunction(Expression::parse(text), std::move(declared));
}

Bifunction Bifunction::catalog(std::string_view name) {
    if (name == "diff") return parse("u - v");
    if (name == "sum") return parse("u + v");
    if (name == "prod") return parse("u * v");
    if (name == "cube_diff") return parse("u^3 - v^3");
    throw std::invalid_argument("unknown catalog bifunction '" + std::string(name) + "'");
}

bool Bifunction::is_catalog_name(std::string_view name) {
    return name == "diff" || name == "sum" || name == "prod" || name == "cube_diff";
}

double Bifunction::operator()(double u, double v) const {
    double values[2];
    std::size_t n = expr_.variables().size();
    if (u_slot_ >= 0) values[u_slot_] = u;
    if (v_slot_ >= 0) values[v_slot_] = v;
    return expr_.eval(std::span<const double>(values, n));
}

std::vector<TestSequence> bounded_sequence_family(const ProbePlan& plan) {
    std::vector<double> vals = plan.seq_values;
    std::sort(vals.begin(), vals.end());
    const int n = std::max(plan.seq_len, 2);
    std::vector<TestSequence> family;

    for (double c : vals)
        family.push_back({"const(" + format_double(c) + ")", std::vector<double>(n, c)});

    for (double a : vals)
        for (double b : vals) {
            if (a == b) continue;
            std::vector<double> seq(n, b);
            seq[0] = a;
            family.push_back({"eventually(" + format_double(a) + "," + format_double(b) + ")",
                              std::move(seq)});
        }

    for (double a : vals)
        for (double b : vals) {
            if (a == b) continue;
            std::vector<double> seq(n);
            for (int k = 0; k < n; ++k) seq[k] = (k % 2 == 0) ? a : b;
            family.push_back({"alternating(" + format_double(a) + "," + format_double(b) + ")",
                              std::move(seq)});
        }

    for (double a : vals)
        for (double b : vals) {
            if (a == b) continue;
            std::vector<double> seq(n);
            for (int k = 0; k < n; ++k) seq[k] = a + (b - a) * k / (n - 1);
            family.push_back({"monotone(" + format_double(a) + "," + format_double(b) + ")",
                              std::move(seq)});
        }

    return family;
}

namespace {

std::vector<double> axis_grid(const ProbePlan& plan) {
    std::vector<double> g(plan.grid);
    for (int i = 0; i < plan.grid; ++i)
        g[i] = plan.grid == 1 ? plan.lo : plan.lo + (plan.hi - plan.lo) * i / (plan.grid - 1);
    return g;
}

std::string holds_note(std::uint64_t samples) {
    return "holds on " + std::to_string(samples) + " samples (sampled falsifier, not a proof)";
}

ProbeReport finish(BifunctionProperty prop, const SweepResult& sweep, std::uint64_t samples,
                   double tau, std::vector<double> witness, std::string witness_note) {
    ProbeReport rep;
    rep.property = prop;
    rep.samples = samples;
    if (sweep.has_error()) {
        rep.note = "evaluation error at sample " + std::to_string(sweep.error_index);
        rep.violated = false;
        return rep;
    }
    rep.worst_margin = sweep.has_worst() ? sweep.worst_margin : 0.0;
    rep.violated = sweep.has_worst() && sweep.worst_margin > tau;
    if (rep.violated) {
        rep.witness = std::move(witness);
        rep.note = std::move(witness_note);
    } else {
        rep.note = holds_note(samples);
    }
    return rep;
}

}  // namespace

ProbeReport probe_nonneg_homogeneous(const Bifunction& phi, const ProbePlan& plan,
                                     const ExecPolicy& exec) {
    const auto grid = axis_grid(plan);
    const auto& lambdas = plan.lambdas;
    const std::uint64_t g = grid.size();
    const std::uint64_t total = lambdas.size() * g * g;
    auto decode = [&](std::uint64_t i) {
        std::uint64_t l = i / (g * g), rest = i % (g * g);
        return std::tuple{lambdas[l], grid[rest / g], grid[rest % g]};
    };
    SweepResult sweep = sweep_worst(total, exec, [&](std::uint64_t i) {
        auto [lam, u, v] = decode(i);
        SampleOutcome out;
        try {
            out.margin = std::abs(phi(lam * u, lam * v) - lam * phi(u, v));
        } catch (const EvalError&) {
            out.failed = true;
        }
        return out;
    });
    std::vector<double> witness;
    std::string note;
    if (sweep.has_worst()) {
        auto [lam, u, v] = decode(sweep.worst_index);
        witness = {lam, u, v, phi(lam * u, lam * v), lam * phi(u, v)};
        note = "phi(" + format_double(lam * u) + "," + format_double(lam * v) + ") = " +
               format_double(witness[3]) + " but lambda*phi(u,v) = " + format_double(witness[4]) +
               " at lambda=" + format_double(lam) + ", u=" + format_double(u) +
               ", v=" + format_double(v);
    }
    return finish(BifunctionProperty::nonneg_homogeneous, sweep, total, plan.tau,
                  std::move(witness), std::move(note));
}

ProbeReport probe_additive(const Bifunction& phi, const ProbePlan& plan, const ExecPolicy& exec) {
    const auto grid = axis_grid(plan);
    const std::uint64_t g = grid.size();
    const std::uint64_t total = g * g * g * g;
    auto decode = [&](std::uint64_t i) {
        double u1 = grid[i / (g * g * g) % g];
        double v1 = grid[i / (g * g) % g];
        double u2 = grid[i / g % g];
        double v2 = grid[i % g];
        return std::tuple{u1, v1, u2, v2};
    };
    SweepResult sweep = sweep_worst(total, exec, [&](std::uint64_t i) {
        auto [u1, v1, u2, v2] = decode(i);
        SampleOutcome out;
        try {
            out.margin = std::abs(phi(u1 + u2, v1 + v2) - phi(u1, v1) - phi(u2, v2));
        } catch (const EvalError&) {
            out.failed = true;
        }
        return out;
    });
    std::vector<double> witness;
    std::string note;
    if (sweep.has_worst()) {
        auto [u1, v1, u2, v2] = decode(sweep.worst_index);
        witness = {u1, v1, u2, v2, phi(u1 + u2, v1 + v2), phi(u1, v1) + phi(u2, v2)};
        note = "phi(u1+u2,v1+v2) = " + format_double(witness[4]) +
               " but phi(u1,v1)+phi(u2,v2) = " + format_double(witness[5]) + " at (u1,v1,u2,v2)=(" +
               format_double(u1) + "," + format_double(v1) + "," + format_double(u2) + "," +
               format_double(v2) + ")";
    }
    return finish(BifunctionProperty::additive, sweep, total, plan.tau, std::move(witness),
                  std::move(note));
}

ProbeReport probe_nonneg_linear(const Bifunction& phi, const ProbePlan& plan,
                                const ExecPolicy& exec) {
    ProbeReport h = probe_nonneg_homogeneous(phi, plan, exec);
    ProbeReport a = probe_additive(phi, plan, exec);
    ProbeReport rep;
    rep.property = BifunctionProperty::nonneg_linear;
    rep.samples = h.samples + a.samples;
    rep.worst_margin = std::max(h.worst_margin, a.worst_margin);
    rep.violated = h.violated || a.violated;
    if (h.violated) {
        rep.witness = h.witness;
        rep.note = "homogeneity violated: " + h.note;
    } else if (a.violated) {
        rep.witness = a.witness;
        rep.note = "additivity violated: " + a.note;
    } else {
        rep.note = holds_note(rep.samples);
    }
    return rep;
}

ProbeReport probe_antisymmetric(const Bifunction& phi, const ProbePlan& plan,
                                const ExecPolicy& exec) {
    const auto grid = axis_grid(plan);
    const std::uint64_t g = grid.size();
    const std::uint64_t total = g * g;
    SweepResult sweep = sweep_worst(total, exec, [&](std::uint64_t i) {
        double u = grid[i / g], v = grid[i % g];
        SampleOutcome out;
        try {
            out.margin = std::abs(phi(u, v) + phi(v, u));
        } catch (const EvalError&) {
            out.failed = true;
        }
        return out;
    });
    std::vector<double> witness;
    std::string note;
    if (sweep.has_worst()) {
        double u = grid[sweep.worst_index / g], v = grid[sweep.worst_index % g];
        witness = {u, v, phi(u, v), phi(v, u)};
        note = "phi(u,v) = " + format_double(witness[2]) + " but -phi(v,u) = " +
               format_double(-witness[3]) + " at u=" + format_double(u) + ", v=" + format_double(v);
    }
    return finish(BifunctionProperty::antisymmetric, sweep, total, plan.tau, std::move(witness),
                  std::move(note));
}

ProbeReport probe_nondecreasing(const Bifunction& phi, const ProbePlan& plan,
                                const ExecPolicy& exec) {
    const auto grid = axis_grid(plan);
    // ordered index pairs a <= b per axis, enumerated lexicographically
    std::vector<std::pair<int, int>> ordered;
    for (int a = 0; a < plan.grid; ++a)
        for (int b = a; b < plan.grid; ++b) ordered.emplace_back(a, b);
    const std::uint64_t p = ordered.size();
    const std::uint64_t total = p * p;
    auto decode = [&](std::uint64_t i) {
        auto [ua, ub] = ordered[i / p];
        auto [va, vb] = ordered[i % p];
        return std::tuple{grid[ua], grid[va], grid[ub], grid[vb]};
    };
    SweepResult sweep = sweep_worst(total, exec, [&](std::uint64_t i) {
        auto [u1, v1, u2, v2] = decode(i);
        SampleOutcome out;
        try {
            out.margin = phi(u1, v1) - phi(u2, v2);
        } catch (const EvalError&) {
            out.failed = true;
        }
        return out;
    });
    std::vector<double> witness;
    std::string note;
    if (sweep.has_worst()) {
        auto [u1, v1, u2, v2] = decode(sweep.worst_index);
        witness = {u1, v1, u2, v2, phi(u1, v1), phi(u2, v2)};
        note = "phi(" + format_double(u1) + "," + format_double(v1) + ") = " +
               format_double(witness[4]) + " > phi(" + format_double(u2) + "," +
               format_double(v2) + ") = " + format_double(witness[5]) +
               " although (u1,v1) <= (u2,v2)";
    }
    return finish(BifunctionProperty::nondecreasing, sweep, total, plan.tau, std::move(witness),
                  std::move(note));
}

ProbeReport probe_seq_upper_bounded(const Bifunction& phi, const ProbePlan& plan,
                                    const ExecPolicy& exec) {
    const std::vector<TestSequence> family = bounded_sequence_family(plan);
    const std::uint64_t f = family.size();
    const std::uint64_t total = plan.pair_all_sequences ? f * f : f;
    auto pair_of = [&](std::uint64_t i) -> std::pair<const TestSequence&, const TestSequence&> {
        if (plan.pair_all_sequences) return {family[i / f], family[i % f]};
        return {family[i], family[i]};
    };
    auto margin_of = [&](const TestSequence& xs, const TestSequence& ys, double* parts) {
        double sup_phi = -std::numeric_limits<double>::infinity();
        double sup_x = sup_phi, sup_y = sup_phi;
        for (std::size_t n = 0; n < xs.values.size(); ++n) {
            sup_phi = std::max(sup_phi, phi(xs.values[n], ys.values[n]));
            sup_x = std::max(sup_x, xs.values[n]);
            sup_y = std::max(sup_y, ys.values[n]);
        }
        double bound = phi(sup_x, sup_y);
        if (parts) {
            parts[0] = sup_phi;
            parts[1] = bound;
            parts[2] = sup_x;
            parts[3] = sup_y;
        }
        return sup_phi - bound;
    };
    SweepResult sweep = sweep_worst(total, exec, [&](std::uint64_t i) {
        auto [xs, ys] = pair_of(i);
        SampleOutcome out;
        try {
            out.margin = margin_of(xs, ys, nullptr);
        } catch (const EvalError&) {
            out.failed = true;
        }
        return out;
    });
    std::vector<double> witness;
    std::string note;
    if (sweep.has_worst()) {
        auto [xs, ys] = pair_of(sweep.worst_index);
        double parts[4];
        margin_of(xs, ys, parts);
        witness = {parts[0], parts[1], static_cast<double>(xs.values.size())};
        witness.insert(witness.end(), xs.values.begin(), xs.values.end());
        witness.insert(witness.end(), ys.values.begin(), ys.values.end());
        note = "sup phi(x_n,y_n) = " + format_double(parts[0]) + " > phi(sup x, sup y) = " +
               format_double(parts[1]) + " for x = " + xs.desc + ", y = " + ys.desc;
    }
    return finish(BifunctionProperty::seq_upper_bounded, sweep, total, plan.tau,
                  std::move(witness), std::move(note));
}

ProbeReport probe(const Bifunction& phi, BifunctionProperty property, const ProbePlan& plan,
                  const ExecPolicy& exec) {
    switch (property) {
        case BifunctionProperty::nonneg_homogeneous: return probe_nonneg_homogeneous(phi, plan, exec);
        case BifunctionProperty::additive: return probe_additive(phi, plan, exec);
        case BifunctionProperty::nonneg_linear: return probe_nonneg_linear(phi, plan, exec);
        case BifunctionProperty::antisymmetric: return probe_antisymmetric(phi, plan, exec);
        case BifunctionProperty::nondecreasing: return probe_nondecreasing(phi, plan, exec);
        case BifunctionProperty::seq_upper_bounded: return probe_seq_upper_bounded(phi, plan, exec);
    }
    throw std::invalid_argument("unknown bifunction property");
}

}  // namespace geoconvex
