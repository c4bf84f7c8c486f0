#include "parce/geometry.hpp"

#include <cmath>
#include <limits>

namespace parce {

double polygon_area(const Polygon& poly) {
    double s = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        s += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * std::abs(s);
}

bool point_in_convex(const Polygon& poly, const Vec2& p) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    int sign = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e = poly[(i + 1) % n] - poly[i];
        const Vec2 d = p - poly[i];
        const double cross = e.x() * d.y() - e.y() * d.x();
        if (cross > 0) {
            if (sign < 0) return false;
            sign = 1;
        } else if (cross < 0) {
            if (sign > 0) return false;
            sign = -1;
        }
        // cross == 0: on the supporting line, keep going (boundary inclusive)
    }
    return true;
}

namespace {

void project_onto(const Polygon& poly, const Vec2& axis, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -std::numeric_limits<double>::infinity();
    for (const Vec2& v : poly) {
        const double d = v.dot(axis);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
}

void edge_normals(const Polygon& poly, std::vector<Vec2>& out) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e = poly[(i + 1) % n] - poly[i];
        const double len = e.norm();
        if (len < 1e-15) continue;
        out.emplace_back(-e.y() / len, e.x() / len);
    }
}

}  // namespace

bool convex_intersect(const Polygon& a, const Polygon& b) {
    return convex_mtv(a, b).has_value();
}

std::optional<Vec2> convex_mtv(const Polygon& a, const Polygon& b) {
    std::vector<Vec2> axes;
    axes.reserve(a.size() + b.size());
    edge_normals(a, axes);
    edge_normals(b, axes);

    double best_overlap = std::numeric_limits<double>::infinity();
    Vec2 best_axis = Vec2::Zero();
    for (const Vec2& axis : axes) {
        double alo, ahi, blo, bhi;
        project_onto(a, axis, alo, ahi);
        project_onto(b, axis, blo, bhi);
        const double overlap = std::min(ahi, bhi) - std::max(alo, blo);
        if (overlap < 0) return std::nullopt;  // strict gap: separated
        if (overlap < best_overlap) {
            best_overlap = overlap;
            // push a away from b along the axis
            const double a_center = 0.5 * (alo + ahi);
            const double b_center = 0.5 * (blo + bhi);
            best_axis = (a_center >= b_center) ? axis : Vec2(-axis);
        }
    }
    return Vec2(best_axis * best_overlap);
}

Polygon oriented_rect(double cx, double cy, double theta, double length, double width) {
    const double c = std::cos(theta), s = std::sin(theta);
    const double hl = 0.5 * length, hw = 0.5 * width;
    Polygon poly;
    poly.reserve(4);
    for (const auto& [lx, ly] : {std::pair{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}})
        poly.emplace_back(cx + c * lx - s * ly, cy + s * lx + c * ly);
    return poly;
}

}  // namespace parce
