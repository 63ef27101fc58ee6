#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace geoconvex {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Maps any angle to [0, 2*pi).
double normalize_angle(double theta);

/// Representative of (to - from) in (-pi, pi]; the antipodal tie |d| = pi is
/// resolved counterclockwise (+pi).
double signed_angle_delta(double from, double to);

/// One factor of a product manifold: a Euclidean line (optionally restricted
/// to an interval) or the unit circle with angular coordinate in [0, 2*pi).
struct Factor {
    enum class Kind : std::uint8_t { line, circle };
    Kind kind = Kind::line;
    std::optional<std::pair<double, double>> interval;  // line restriction, a < b

    static Factor line() { return Factor{Kind::line, std::nullopt}; }
    static Factor line(double lo, double hi);
    static Factor circle() { return Factor{Kind::circle, std::nullopt}; }
};

/// A point in factor coordinates: one real per factor, circle coordinates
/// normalized to [0, 2*pi).
struct Point {
    std::vector<double> coords;

    bool operator==(const Point& other) const { return coords == other.coords; }
};

/// Ordered list of factors. The cylinder R x S1 of the bundled audit is
/// exactly the two-factor spec [line, circle].
class ManifoldSpec {
public:
    explicit ManifoldSpec(std::vector<Factor> factors);

    static ManifoldSpec euclidean_line() { return ManifoldSpec({Factor::line()}); }
    static ManifoldSpec cylinder() { return ManifoldSpec({Factor::line(), Factor::circle()}); }

    std::size_t dim() const { return factors_.size(); }
    const std::vector<Factor>& factors() const { return factors_; }
    bool is_cylinder() const;

    /// Coordinate names in factor order: Euclidean factors h1, h2, ...;
    /// circle factors th1, th2, ...
    std::vector<std::string> coordinate_names() const;

    /// Validates interval bounds, normalizes circle coordinates.
    Point make_point(std::vector<double> coords) const;

    bool operator==(const ManifoldSpec& other) const;

private:
    std::vector<Factor> factors_;
};

/// Closed-form geodesic t in [0,1] |-> M with g(0) = x and g(1) = y.
/// Euclidean factors interpolate linearly; circle factors move by the
/// shorter (signed) arc, ties counterclockwise.
class Geodesic {
public:
    Geodesic(const ManifoldSpec& spec, Point x, Point y);

    const Point& start() const { return x_; }
    const Point& end() const { return y_; }
    /// Per-factor constant velocity components (y_i - x_i; delta theta).
    const std::vector<double>& delta() const { return delta_; }

    /// Point at parameter t; throws std::out_of_range outside [0,1].
    /// Endpoints are exact: at(0) == x and at(1) == y bitwise.
    Point at(double t) const;

    /// Same interpolation formula without the [0,1] restriction and without
    /// interval validation; used by finite-difference stencils that step
    /// slightly outside the parameter range.
    Point at_extended(double t) const;

    /// Velocity at t (constant); t validated against [0,1].
    std::vector<double> velocity(double t) const;

private:
    const ManifoldSpec* spec_;
    Point x_, y_;
    std::vector<double> delta_;
};

Geodesic geodesic_between(const ManifoldSpec& spec, const Point& x, const Point& y);

/// Per-factor constraint of a sampling region.
struct RegionFactor {
    enum class Kind : std::uint8_t { interval, whole_circle, arc };
    Kind kind = Kind::interval;
    double lo = 0.0;      // interval lower bound / arc start angle
    double length = 0.0;  // interval length / arc angular length (< pi)

    static RegionFactor interval(double lo, double hi);
    static RegionFactor whole_circle() { return RegionFactor{Kind::whole_circle, 0.0, kTwoPi}; }
    static RegionFactor arc(double start, double length);

    double hi() const { return lo + length; }
};

/// Box-like region: a closed subinterval per line factor and, per circle
/// factor, either the whole circle or a closed arc of length < pi.
///
/// Arc-only circle factors make the region totally convex. Whole-circle
/// factors are flagged not guaranteed: antipodal endpoint pairs have a
/// second, non-minimal geodesic this toolkit never constructs.
class Region {
public:
    Region(ManifoldSpec spec, std::vector<RegionFactor> factors);

    static Region box(const ManifoldSpec& spec, std::vector<RegionFactor> factors) {
        return Region(spec, std::move(factors));
    }

    const ManifoldSpec& spec() const { return spec_; }
    const std::vector<RegionFactor>& factors() const { return factors_; }

    bool totally_convex() const;
    bool contains(const Point& p, double tol) const;

    /// Factor-wise intersection; nullopt when any factor intersection is empty.
    static std::optional<Region> intersect(const Region& a, const Region& b);

private:
    ManifoldSpec spec_;
    std::vector<RegionFactor> factors_;
};

/// Deterministic tensor-product grid over the region: `counts[i]` samples per
/// factor (line/arc grids include both ends; whole circles are equally spaced
/// without duplicating 0 and 2*pi). With jitter on, each coordinate moves by a
/// seeded pseudo-random offset of at most half a cell, clamped to the factor.
/// Enumeration is row-major with factor 0 slowest, so the sequence is ordered
/// by coordinates for non-wrapping grids.
std::vector<Point> sample_region(const Region& region, std::span<const int> counts, bool jitter,
                                 std::uint64_t seed);

}  // namespace geoconvex
