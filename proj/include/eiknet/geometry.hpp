#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

namespace eiknet {

// Points and tangents live in R^N with N fixed per network.
using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double distance(const Vec& a, const Vec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline Vec lerp(const Vec& a, const Vec& b, double t) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t * (b[i] - a[i]);
    return r;
}

// Distance from point p to segment [a,b].
inline double point_segment_distance(const Vec& p, const Vec& a, const Vec& b) {
    Vec ab(a.size()), ap(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab[i] = b[i] - a[i];
        ap[i] = p[i] - a[i];
    }
    double len2 = dot(ab, ab);
    double t = len2 > 0 ? dot(ap, ab) / len2 : 0.0;
    t = std::fmin(1.0, std::fmax(0.0, t));
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = p[i] - (a[i] + t * ab[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

// Distance between segments [a,b] and [c,d], by sampled projection.
// Good enough for the proximity screening done on polylines.
inline double segment_segment_distance(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
    double best = point_segment_distance(a, c, d);
    best = std::fmin(best, point_segment_distance(b, c, d));
    best = std::fmin(best, point_segment_distance(c, a, b));
    best = std::fmin(best, point_segment_distance(d, a, b));
    const int K = 8;
    for (int k = 1; k < K; ++k) {
        double t = static_cast<double>(k) / K;
        best = std::fmin(best, point_segment_distance(lerp(a, b, t), c, d));
        best = std::fmin(best, point_segment_distance(lerp(c, d, t), a, b));
    }
    return best;
}

struct SegmentGeometry {
    Vec from, to;
};

// Planar circular arc: gamma(s) = center + radius * (cos, sin)(theta0 + s*(theta1-theta0)).
// Requires a 2-d embedding; theta1 - theta0 = 2*pi gives a loop.
struct CircularArcGeometry {
    Vec center;
    double radius = 1.0;
    double theta0 = 0.0;
    double theta1 = 1.0;
};

// Uniformly parametrized polyline through the given points.
struct SampleGeometry {
    std::vector<Vec> points;
};

class ArcGeometry {
public:
    ArcGeometry() = default;
    explicit ArcGeometry(SegmentGeometry g) : rep_(std::move(g)) {}
    explicit ArcGeometry(CircularArcGeometry g) : rep_(std::move(g)) {}
    explicit ArcGeometry(SampleGeometry g) : rep_(std::move(g)) {
        if (std::get<SampleGeometry>(rep_).points.size() < 2)
            throw std::invalid_argument("sample geometry needs at least two points");
    }

    Vec point(double s) const {
        if (const auto* seg = std::get_if<SegmentGeometry>(&rep_)) return lerp(seg->from, seg->to, s);
        if (const auto* cir = std::get_if<CircularArcGeometry>(&rep_)) {
            double th = cir->theta0 + s * (cir->theta1 - cir->theta0);
            Vec p = cir->center;
            p[0] += cir->radius * std::cos(th);
            p[1] += cir->radius * std::sin(th);
            return p;
        }
        const auto& pts = std::get<SampleGeometry>(rep_).points;
        auto [k, t] = locate(pts.size(), s);
        return lerp(pts[k], pts[k + 1], t);
    }

    Vec tangent(double s) const {
        if (const auto* seg = std::get_if<SegmentGeometry>(&rep_)) {
            Vec d(seg->from.size());
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = seg->to[i] - seg->from[i];
            return d;
        }
        if (const auto* cir = std::get_if<CircularArcGeometry>(&rep_)) {
            double span = cir->theta1 - cir->theta0;
            double th = cir->theta0 + s * span;
            Vec d(cir->center.size(), 0.0);
            d[0] = -cir->radius * span * std::sin(th);
            d[1] = cir->radius * span * std::cos(th);
            return d;
        }
        const auto& pts = std::get<SampleGeometry>(rep_).points;
        auto [k, t] = locate(pts.size(), s);
        (void)t;
        double n = static_cast<double>(pts.size() - 1);
        Vec d(pts[k].size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = (pts[k + 1][i] - pts[k][i]) * n;
        return d;
    }

    double speed(double s) const { return norm(tangent(s)); }

    // Arc length of gamma([s1,s2]); exact for each family.
    double length(double s1, double s2) const {
        if (const auto* seg = std::get_if<SegmentGeometry>(&rep_))
            return distance(seg->from, seg->to) * (s2 - s1);
        if (const auto* cir = std::get_if<CircularArcGeometry>(&rep_))
            return cir->radius * std::fabs(cir->theta1 - cir->theta0) * (s2 - s1);
        const auto& pts = std::get<SampleGeometry>(rep_).points;
        double n = static_cast<double>(pts.size() - 1);
        auto partial = [&](double s) {
            auto [k, t] = locate(pts.size(), s);
            double acc = 0;
            for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i)
                acc += distance(pts[i], pts[i + 1]);
            acc += distance(pts[k], pts[k + 1]) * t;
            return acc;
        };
        (void)n;
        return partial(s2) - partial(s1);
    }

    double total_length() const { return length(0.0, 1.0); }

    bool is_samples() const { return std::holds_alternative<SampleGeometry>(rep_); }
    const std::variant<SegmentGeometry, CircularArcGeometry, SampleGeometry>& rep() const { return rep_; }

private:
    static std::pair<int, double> locate(std::size_t npts, double s) {
        double n = static_cast<double>(npts - 1);
        double u = s * n;
        int k = static_cast<int>(std::floor(u));
        if (k < 0) k = 0;
        if (k >= static_cast<int>(npts) - 1) k = static_cast<int>(npts) - 2;
        return {k, u - k};
    }

    std::variant<SegmentGeometry, CircularArcGeometry, SampleGeometry> rep_;
};

} // namespace eiknet
