#include "fpc/geom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpc/measures.hpp"

namespace fpc {

double dot(CSpan x, CSpan y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(CSpan x) { return dot(x, x); }

Vec embed(CSpan y, int d) {
    Vec x{};
    for (size_t i = 0; i < y.size() && static_cast<int>(i) < d; ++i) x[i] = y[i];
    return x;
}

LineParam LineParam::from_chart(int d, CSpan a_head, CSpan p_head) {
    if (d < 2 || d > kMaxDim) throw std::invalid_argument("dimension out of range");
    LineParam L;
    L.d = d;
    for (int i = 0; i < d - 1; ++i) {
        L.a[i] = a_head[i];
        L.p[i] = p_head[i];
    }
    L.a[d - 1] = 1.0;
    L.p[d - 1] = 0.0;
    return L;
}

std::optional<LineParam> LineParam::from_point_direction(int d, CSpan x, CSpan u, double min_ud) {
    double ud = u[d - 1];
    if (std::abs(ud) < min_ud) return std::nullopt;
    LineParam L;
    L.d = d;
    double t = -x[d - 1] / ud;
    for (int i = 0; i < d - 1; ++i) {
        L.a[i] = u[i] / ud;
        L.p[i] = x[i] + t * u[i];
    }
    L.a[d - 1] = 1.0;
    L.p[d - 1] = 0.0;
    return L;
}

double LineParam::a_norm2() const { return norm2({a.data(), static_cast<size_t>(d)}); }

Vec LineParam::at(double t) const {
    Vec x{};
    for (int i = 0; i < d; ++i) x[i] = a[i] * t + p[i];
    return x;
}

double point_line_distance2(CSpan x, const LineParam& L) {
    const int d = L.d;
    double ap = 0.0, aa = 0.0;
    for (int i = 0; i < d; ++i) {
        ap += L.a[i] * (L.p[i] - x[i]);
        aa += L.a[i] * L.a[i];
    }
    double t = -ap / aa;
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        double v = L.a[i] * t + L.p[i] - x[i];
        s += v * v;
    }
    return s;
}

double point_line_distance(CSpan x, const LineParam& L) {
    return std::sqrt(point_line_distance2(x, L));
}

bool line_hits_ball(const LineParam& L, CSpan center, double radius) {
    return point_line_distance(center, L) < radius;
}

bool cylinder_contains(const Cylinder& C, CSpan x) {
    return point_line_distance2(x, C.line) < C.r * C.r;
}

double DyadicBox::side() const { return std::ldexp(1.0, -n); }

Box DyadicBox::to_box(int d) const {
    Box b;
    b.d = d;
    double h = side();
    for (int i = 0; i < d; ++i) {
        b.lo[i] = i < k ? static_cast<double>(index[i]) * h : 0.0;
        b.hi[i] = b.lo[i] + h;
    }
    return b;
}

double point_box_distance2(CSpan x, const Box& X) {
    double s = 0.0;
    for (int i = 0; i < X.d; ++i) {
        double v = 0.0;
        if (x[i] < X.lo[i])
            v = X.lo[i] - x[i];
        else if (x[i] > X.hi[i])
            v = x[i] - X.hi[i];
        s += v * v;
    }
    return s;
}

double line_box_distance(const LineParam& L, const Box& X) {
    const int d = L.d;
    double aa = L.a_norm2();
    double ap = 0.0, tmin = 0.0, tmax = 0.0;
    for (int i = 0; i < d; ++i) {
        ap += L.a[i] * L.p[i];
        double u = L.a[i] * X.lo[i], v = L.a[i] * X.hi[i];
        tmin += std::min(u, v);
        tmax += std::max(u, v);
    }
    // the minimiser lies between the extreme corner projections
    double lo = (tmin - ap) / aa, hi = (tmax - ap) / aa;
    auto f = [&](double t) {
        Vec x = L.at(t);
        return point_box_distance2({x.data(), static_cast<size_t>(d)}, X);
    };
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    double best = std::min(f1, f2);
    for (int it = 0; it < 200 && best > 0.0; ++it) {
        if (hi - lo <= 1e-12 * std::max(1.0, std::abs(lo))) break;
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
        best = std::min({best, f1, f2});
    }
    best = std::min({best, f(0.5 * (lo + hi))});
    return std::sqrt(best);
}

double line_box_distance(const LineParam& L, const DyadicBox& X) {
    return line_box_distance(L, X.to_box(L.d));
}

bool box_inside_cylinder(const Cylinder& C, const Box& X) {
    const int d = X.d;
    const double r2 = C.r * C.r;
    Vec x{};
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        for (int i = 0; i < d; ++i) x[i] = (mask >> i) & 1u ? X.hi[i] : X.lo[i];
        if (!(point_line_distance2({x.data(), static_cast<size_t>(d)}, C.line) < r2)) return false;
    }
    return true;
}

std::optional<Ellipsoid> cylinder_subspace_ellipse(const Cylinder& C, int k) {
    const LineParam& L = C.line;
    const int d = L.d;
    if (k < 1 || k > d - 1) throw std::invalid_argument("subspace dimension k out of range");
    auto aup = L.a_up(k), pup = L.p_up(k);
    double s = 1.0 + norm2(aup);
    double ip = dot(aup, pup);
    double tau2 = C.r * C.r - norm2(pup) + ip * ip / s;
    if (!(tau2 > 0.0)) return std::nullopt;
    double tau = std::sqrt(tau2);

    Ellipsoid E;
    E.k = k;
    double alow2 = norm2(L.a_low(k));
    for (int i = 0; i < k; ++i) E.center[i] = L.p[i] - ip / s * L.a[i];
    if (alow2 > 0.0) {
        double na = std::sqrt(alow2);
        for (int i = 0; i < k; ++i) E.major_dir[i] = L.a[i] / na;
    } else {
        E.major_dir[0] = 1.0;
    }
    E.minor_len = tau;
    E.major_len = std::sqrt((s + alow2) / s) * tau;
    return E;
}

namespace {

// squared axis coordinates of y - center: (along major axis, orthogonal)
std::pair<double, double> ellipse_coords(const Ellipsoid& E, CSpan y) {
    double along = 0.0, all = 0.0;
    for (int i = 0; i < E.k; ++i) {
        double w = y[i] - E.center[i];
        along += w * E.major_dir[i];
        all += w * w;
    }
    return {along * along, std::max(0.0, all - along * along)};
}

}  // namespace

bool ellipse_contains(const Ellipsoid& E, CSpan y) {
    auto [al2, perp2] = ellipse_coords(E, y);
    return al2 / (E.major_len * E.major_len) + perp2 / (E.minor_len * E.minor_len) < 1.0;
}

double ellipse_arg(const Ellipsoid& E) {
    if (E.k != 2) throw std::invalid_argument("arg is only defined for k = 2");
    double th = std::atan2(E.major_dir[1], E.major_dir[0]);
    if (th >= M_PI / 2) th -= M_PI;
    if (th < -M_PI / 2) th += M_PI;
    if (th >= M_PI / 2) th = -M_PI / 2;
    return th;
}

EllipseStats ellipse_stats(const Ellipsoid& E) {
    EllipseStats st;
    st.diameter = 2.0 * E.major_len;
    st.volume = psi(E.k + 1) / (2.0 * M_PI) * E.major_len * std::pow(E.minor_len, E.k - 1);
    if (E.k == 2) st.arg = ellipse_arg(E);
    return st;
}

bool ellipse_hits_segment(const Ellipsoid& E, CSpan p0, CSpan p1) {
    if (E.k != 2) throw std::invalid_argument("segment test needs k = 2");
    // Q(s) = |B (p0 + s v - c)|^2 with B scaling the axes; minimise over s in [0,1]
    const double ux = E.major_dir[0], uy = E.major_dir[1];
    auto to_axes = [&](double x, double y) {
        return std::pair{(x * ux + y * uy) / E.major_len, (-x * uy + y * ux) / E.minor_len};
    };
    auto [w0, w1] = to_axes(p0[0] - E.center[0], p0[1] - E.center[1]);
    auto [v0, v1] = to_axes(p1[0] - p0[0], p1[1] - p0[1]);
    double vv = v0 * v0 + v1 * v1;
    double s = vv > 0.0 ? std::clamp(-(w0 * v0 + w1 * v1) / vv, 0.0, 1.0) : 0.0;
    double q0 = w0 + s * v0, q1 = w1 + s * v1;
    return q0 * q0 + q1 * q1 < 1.0;
}

Vec ellipse_half_extents(const Ellipsoid& E) {
    Vec h{};
    double M2 = E.major_len * E.major_len, m2 = E.minor_len * E.minor_len;
    for (int i = 0; i < E.k; ++i) {
        double u2 = E.major_dir[i] * E.major_dir[i];
        h[i] = std::sqrt(M2 * u2 + m2 * std::max(0.0, 1.0 - u2));
    }
    return h;
}

}  // namespace fpc
