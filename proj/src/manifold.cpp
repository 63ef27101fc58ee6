#include "geoconvex/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace geoconvex {

double normalize_angle(double theta) {
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;  // fmod rounding at the seam
    return r;
}

double signed_angle_delta(double from, double to) {
    double d = std::remainder(to - from, kTwoPi);  // [-pi, pi]
    if (d <= -kPi) d = kPi;                        // tie at the cut locus: counterclockwise
    return d;
}

Factor Factor::line(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("line factor interval requires a < b");
    return Factor{Kind::line, std::make_pair(lo, hi)};
}

ManifoldSpec::ManifoldSpec(std::vector<Factor> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw std::invalid_argument("manifold needs at least one factor");
}

bool ManifoldSpec::is_cylinder() const {
    return factors_.size() == 2 && factors_[0].kind == Factor::Kind::line &&
           !factors_[0].interval && factors_[1].kind == Factor::Kind::circle;
}

std::vector<std::string> ManifoldSpec::coordinate_names() const {
    std::vector<std::string> names;
    names.reserve(factors_.size());
    int lines = 0, circles = 0;
    for (const Factor& f : factors_) {
        if (f.kind == Factor::Kind::line)
            names.push_back("h" + std::to_string(++lines));
        else
            names.push_back("th" + std::to_string(++circles));
    }
    return names;
}

Point ManifoldSpec::make_point(std::vector<double> coords) const {
    if (coords.size() != factors_.size())
        throw std::invalid_argument("point has " + std::to_string(coords.size()) +
                                    " coordinates for a " + std::to_string(factors_.size()) +
                                    "-factor manifold");
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const Factor& f = factors_[i];
        if (f.kind == Factor::Kind::circle) {
            coords[i] = normalize_angle(coords[i]);
        } else if (f.interval) {
            if (coords[i] < f.interval->first || coords[i] > f.interval->second)
                throw std::invalid_argument("coordinate " + std::to_string(i) +
                                            " outside the factor interval");
        }
    }
    return Point{std::move(coords)};
}

bool ManifoldSpec::operator==(const ManifoldSpec& other) const {
    if (factors_.size() != other.factors_.size()) return false;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (factors_[i].kind != other.factors_[i].kind) return false;
        if (factors_[i].interval != other.factors_[i].interval) return false;
    }
    return true;
}

Geodesic::Geodesic(const ManifoldSpec& spec, Point x, Point y)
    : spec_(&spec), x_(std::move(x)), y_(std::move(y)) {
    if (x_.coords.size() != spec.dim() || y_.coords.size() != spec.dim())
        throw std::invalid_argument("geodesic endpoints do not match the manifold dimension");
    delta_.resize(spec.dim());
    for (std::size_t i = 0; i < spec.dim(); ++i) {
        if (spec.factors()[i].kind == Factor::Kind::circle)
            delta_[i] = signed_angle_delta(x_.coords[i], y_.coords[i]);
        else
            delta_[i] = y_.coords[i] - x_.coords[i];
    }
}

Point Geodesic::at(double t) const {
    if (t < 0.0 || t > 1.0) throw std::out_of_range("geodesic parameter outside [0, 1]");
    if (t == 0.0) return x_;
    if (t == 1.0) return y_;
    return at_extended(t);
}

Point Geodesic::at_extended(double t) const {
    Point p;
    p.coords.resize(delta_.size());
    for (std::size_t i = 0; i < delta_.size(); ++i) {
        double c = x_.coords[i] + t * delta_[i];
        if (spec_->factors()[i].kind == Factor::Kind::circle) c = normalize_angle(c);
        p.coords[i] = c;
    }
    return p;
}

std::vector<double> Geodesic::velocity(double t) const {
    if (t < 0.0 || t > 1.0) throw std::out_of_range("geodesic parameter outside [0, 1]");
    return delta_;
}

Geodesic geodesic_between(const ManifoldSpec& spec, const Point& x, const Point& y) {
    return Geodesic(spec, x, y);
}

RegionFactor RegionFactor::interval(double lo, double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("region interval requires lo <= hi");
    return RegionFactor{Kind::interval, lo, hi - lo};
}

RegionFactor RegionFactor::arc(double start, double length) {
    if (!(length > 0.0) || !(length < kPi))
        throw std::invalid_argument("circle arcs must have angular length in (0, pi)");
    return RegionFactor{Kind::arc, start, length};
}

Region::Region(ManifoldSpec spec, std::vector<RegionFactor> factors)
    : spec_(std::move(spec)), factors_(std::move(factors)) {
    if (factors_.size() != spec_.dim())
        throw std::invalid_argument("region constraint count does not match the manifold");
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        const Factor& f = spec_.factors()[i];
        const RegionFactor& rf = factors_[i];
        if (f.kind == Factor::Kind::line) {
            if (rf.kind != RegionFactor::Kind::interval)
                throw std::invalid_argument("line factors need interval constraints");
            if (f.interval &&
                (rf.lo < f.interval->first - 1e-12 || rf.hi() > f.interval->second + 1e-12))
                throw std::invalid_argument("region interval exceeds the factor restriction");
        } else if (rf.kind == RegionFactor::Kind::interval) {
            throw std::invalid_argument("circle factors need whole-circle or arc constraints");
        }
    }
}

bool Region::totally_convex() const {
    for (const RegionFactor& rf : factors_)
        if (rf.kind == RegionFactor::Kind::whole_circle) return false;
    return true;
}

bool Region::contains(const Point& p, double tol) const {
    if (p.coords.size() != factors_.size()) return false;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        const RegionFactor& rf = factors_[i];
        double c = p.coords[i];
        switch (rf.kind) {
            case RegionFactor::Kind::interval:
                if (c < rf.lo - tol || c > rf.hi() + tol) return false;
                break;
            case RegionFactor::Kind::whole_circle:
                break;
            case RegionFactor::Kind::arc: {
                double rel = normalize_angle(c - rf.lo);
                if (rel > rf.length + tol && rel < kTwoPi - tol) return false;
                break;
            }
        }
    }
    return true;
}

std::optional<Region> Region::intersect(const Region& a, const Region& b) {
    if (!(a.spec_ == b.spec_)) return std::nullopt;
    std::vector<RegionFactor> out;
    out.reserve(a.factors_.size());
    for (std::size_t i = 0; i < a.factors_.size(); ++i) {
        const RegionFactor& fa = a.factors_[i];
        const RegionFactor& fb = b.factors_[i];
        if (fa.kind == RegionFactor::Kind::interval) {
            double lo = std::max(fa.lo, fb.lo);
            double hi = std::min(fa.hi(), fb.hi());
            if (lo > hi) return std::nullopt;
            out.push_back(RegionFactor::interval(lo, hi));
        } else if (fa.kind == RegionFactor::Kind::whole_circle) {
            out.push_back(fb);
        } else if (fb.kind == RegionFactor::Kind::whole_circle) {
            out.push_back(fa);
        } else {
            // two arcs, each shorter than pi, overlap in at most one arc
            double rel = normalize_angle(fb.lo - fa.lo);
            double lo = std::max(0.0, rel < kPi ? rel : rel - kTwoPi);
            double hi = std::min(fa.length, (rel < kPi ? rel : rel - kTwoPi) + fb.length);
            if (lo >= hi) return std::nullopt;
            out.push_back(RegionFactor::arc(fa.lo + lo, hi - lo));
        }
    }
    return Region(a.spec_, std::move(out));
}

std::vector<Point> sample_region(const Region& region, std::span<const int> counts, bool jitter,
                                 std::uint64_t seed) {
    const auto& factors = region.factors();
    if (counts.size() != factors.size())
        throw std::invalid_argument("per-factor grid count list does not match the region");
    for (int c : counts)
        if (c <= 0) throw std::invalid_argument("grid counts must be positive");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    std::vector<std::vector<double>> grids(factors.size());
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const RegionFactor& rf = factors[i];
        int n = counts[i];
        std::vector<double>& g = grids[i];
        g.reserve(static_cast<std::size_t>(n));
        double cell = 0.0;
        double lo = rf.lo, hi = rf.hi();
        if (rf.kind == RegionFactor::Kind::whole_circle) {
            cell = kTwoPi / n;
            for (int k = 0; k < n; ++k) g.push_back(cell * k);
            hi = std::nextafter(kTwoPi, 0.0);
            lo = 0.0;
        } else if (n == 1) {
            g.push_back(0.5 * (lo + hi));
        } else {
            cell = (hi - lo) / (n - 1);
            for (int k = 0; k < n; ++k) g.push_back(k == n - 1 ? hi : lo + cell * k);
        }
        if (jitter && cell > 0.0) {
            for (double& v : g) v = std::clamp(v + 0.5 * cell * unit(rng), lo, hi);
        }
    }

    std::size_t total = 1;
    for (const auto& g : grids) total *= g.size();
    std::vector<Point> points;
    points.reserve(total);
    std::vector<std::size_t> idx(factors.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
        std::vector<double> coords(factors.size());
        for (std::size_t i = 0; i < factors.size(); ++i) coords[i] = grids[i][idx[i]];
        points.push_back(region.spec().make_point(std::move(coords)));
        for (std::size_t i = factors.size(); i-- > 0;) {
            if (++idx[i] < grids[i].size()) break;
            idx[i] = 0;
        }
    }
    return points;
}

}  // namespace geoconvex
