#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace fpc {

inline constexpr int kMaxDim = 8;
using Vec = std::array<double, kMaxDim>;
using CSpan = std::span<const double>;

// Line {a t + p} in R^d with a[d-1] = 1 and p[d-1] = 0.
struct LineParam {
    int d = 2;
    Vec a{};
    Vec p{};

    // a_head, p_head hold the first d-1 coordinates
    static LineParam from_chart(int d, CSpan a_head, CSpan p_head);
    // Line through x with direction u; nullopt when u is (numerically) parallel to H_{d-1}.
    static std::optional<LineParam> from_point_direction(int d, CSpan x, CSpan u,
                                                         double min_ud = 1e-14);

    CSpan a_low(int k) const { return {a.data(), static_cast<size_t>(k)}; }
    CSpan a_up(int k) const { return {a.data() + k, static_cast<size_t>(d - 1 - k)}; }
    CSpan p_low(int k) const { return {p.data(), static_cast<size_t>(k)}; }
    CSpan p_up(int k) const { return {p.data() + k, static_cast<size_t>(d - 1 - k)}; }

    double a_norm2() const;
    Vec at(double t) const;
};

struct Cylinder {
    LineParam line;
    double r = 1.0;
};

struct Ellipsoid {
    int k = 2;
    Vec center{};
    Vec major_dir{};
    double major_len = 0.0;
    double minor_len = 0.0;
};

struct Box {
    int d = 2;
    Vec lo{};
    Vec hi{};
};

// index * 2^-n + [0, 2^-n]^d, base in H_k
struct DyadicBox {
    int k = 2;
    int n = 0;
    std::array<std::int64_t, kMaxDim> index{};

    double side() const;
    Box to_box(int d) const;
};

struct EllipseStats {
    double diameter = 0.0;
    double volume = 0.0;
    std::optional<double> arg;  // only for k = 2
};

double dot(CSpan x, CSpan y);
double norm2(CSpan x);

Vec embed(CSpan y, int d);

double point_line_distance(CSpan x, const LineParam& L);
double point_line_distance2(CSpan x, const LineParam& L);
bool line_hits_ball(const LineParam& L, CSpan center, double radius);
bool cylinder_contains(const Cylinder& C, CSpan x);

double point_box_distance2(CSpan x, const Box& X);
double line_box_distance(const LineParam& L, const Box& X);
double line_box_distance(const LineParam& L, const DyadicBox& X);
// every corner strictly inside the open cylinder; exact for convex boxes
bool box_inside_cylinder(const Cylinder& C, const Box& X);

std::optional<Ellipsoid> cylinder_subspace_ellipse(const Cylinder& C, int k);
bool ellipse_contains(const Ellipsoid& E, CSpan y);
EllipseStats ellipse_stats(const Ellipsoid& E);
double ellipse_arg(const Ellipsoid& E);
// closed segment [p0,p1] in R^2 meets the open ellipse (k = 2)
bool ellipse_hits_segment(const Ellipsoid& E, CSpan p0, CSpan p1);
// axis-aligned half extents of the ellipse's bounding box
Vec ellipse_half_extents(const Ellipsoid& E);

}  // namespace fpc
