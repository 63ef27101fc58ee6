#pragma once

#include <cstdint>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace geoconvex {

/// Worker policy for the sample sweeps. `parallel = false` selects the serial
/// reference path, which must produce bit-identical results; tests and the
/// benchmark compare the two. GEOCONVEX_THREADS caps the worker count.
struct ExecPolicy {
    bool parallel = true;
    int max_threads = 0;  // 0 = OpenMP default

    static ExecPolicy serial() { return ExecPolicy{false, 1}; }
    static ExecPolicy from_env();

    int resolved_threads() const;
};

/// Outcome of evaluating one (super-)sample: the worst margin over its inner
/// loop, how many inner samples were excluded from the reduction, and whether
/// evaluation failed.
struct SampleOutcome {
    double margin = -std::numeric_limits<double>::infinity();
    std::uint32_t excluded = 0;
    bool failed = false;
};

inline constexpr std::uint64_t kNoIndex = std::numeric_limits<std::uint64_t>::max();

struct SweepResult {
    double worst_margin = -std::numeric_limits<double>::infinity();
    std::uint64_t worst_index = kNoIndex;
    std::uint64_t excluded = 0;
    std::uint64_t error_index = kNoIndex;  // smallest failing sample

    bool has_worst() const { return worst_index != kNoIndex; }
    bool has_error() const { return error_index != kNoIndex; }
};

namespace detail {

inline void merge(SweepResult& into, const SweepResult& from) {
    if (from.worst_index != kNoIndex &&
        (into.worst_index == kNoIndex || from.worst_margin > into.worst_margin ||
         (from.worst_margin == into.worst_margin && from.worst_index < into.worst_index)))
    {
        into.worst_margin = from.worst_margin;
        into.worst_index = from.worst_index;
    }
    into.excluded += from.excluded;
    if (from.error_index < into.error_index) into.error_index = from.error_index;
}

inline void absorb(SweepResult& into, std::uint64_t i, const SampleOutcome& s) {
    if (s.failed) {
        if (i < into.error_index) into.error_index = i;
        return;
    }
    into.excluded += s.excluded;
    if (s.margin == -std::numeric_limits<double>::infinity()) return;
    if (into.worst_index == kNoIndex || s.margin > into.worst_margin ||
        (s.margin == into.worst_margin && i < into.worst_index))
    {
        into.worst_margin = s.margin;
        into.worst_index = i;
    }
}

}  // namespace detail

/// Evaluates fn(i) -> SampleOutcome for i in [0, n) and reduces to the worst
/// margin. Samples are enumerated in grid order, which the generators keep
/// aligned with the lexicographic order of the witness coordinates, so the
/// smallest-index tie-break realizes the smallest-witness rule. The reduction
/// (max margin, min index, sums) is order independent: the serial and OpenMP
/// paths return identical results for pure fn.
template <typename Fn>
SweepResult sweep_worst(std::uint64_t n, const ExecPolicy& pol, Fn&& fn) {
    SweepResult out;
    const std::int64_t sn = static_cast<std::int64_t>(n);
    if (!pol.parallel || n < 256) {
        for (std::int64_t i = 0; i < sn; ++i)
            detail::absorb(out, static_cast<std::uint64_t>(i), fn(static_cast<std::uint64_t>(i)));
        return out;
    }
#ifdef _OPENMP
    const int threads = pol.resolved_threads();
#pragma omp parallel num_threads(threads)
    {
        SweepResult local;
#pragma omp for schedule(static) nowait
        for (std::int64_t i = 0; i < sn; ++i)
            detail::absorb(local, static_cast<std::uint64_t>(i), fn(static_cast<std::uint64_t>(i)));
#pragma omp critical(geoconvex_sweep_merge)
        detail::merge(out, local);
    }
#else
    for (std::int64_t i = 0; i < sn; ++i)
        detail::absorb(out, static_cast<std::uint64_t>(i), fn(static_cast<std::uint64_t>(i)));
#endif
    return out;
}

}  // namespace geoconvex
