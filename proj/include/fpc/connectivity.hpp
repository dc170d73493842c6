#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpc/samplers.hpp"

namespace fpc {

struct Rect {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

// K(s,t) = [-s/2, s/2] x [-t/2, t/2], shifted by (cx, cy)
Rect K(double s, double t, double cx = 0.0, double cy = 0.0);

struct RasterGrid {
    Rect window;
    double delta = 0.0;
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> covered;  // row-major, index = iy * nx + ix

    bool at(int ix, int iy) const { return covered[static_cast<size_t>(iy) * nx + ix]; }
    double covered_fraction() const;
};

RasterGrid rasterize(const ProcessSample& shapes, const Rect& window, double delta);

enum class Direction { left_right, bottom_top };

// 4-connected vacant path between the two opposite sides
bool vacant_crossing(const RasterGrid& grid, Direction dir = Direction::left_right);
// 8-connected covered path between the two opposite sides
bool covered_crossing(const RasterGrid& grid, Direction dir = Direction::bottom_top);

// covered 8-connected crossing of the annulus K(3 eps) \ K(eps) around center
bool arm_event(const ProcessSample& shapes, const double center[2], double epsilon, double delta);

struct Lr1Census {
    std::int64_t count = 0;
    std::int64_t not_in_lr = 0;  // members failing the direct side-intersection test
};
Lr1Census lr1_census(const ProcessSample& ellipses, double epsilon);
bool ellipse_in_lr1(const Ellipsoid& E, double epsilon);
bool ellipse_in_lr(const Ellipsoid& E, double epsilon);

// Expected LR_1 count for d = 3 with radii cut off below at r_min.
double lr1_expected(double lambda, double epsilon, double r_min);

struct CrossingReport {
    std::string event;
    int d = 0;
    int k = 2;
    double lambda = 0.0;
    int n = 0;
    double delta = 0.0;
    std::int64_t replicas = 0;
    double frequency = 0.0;
    double se = 0.0;
    double ball_frequency = 0.0;
    double ball_se = 0.0;
    double h_empty_frequency = 0.0;
    double h_empty_se = 0.0;
    std::int64_t coupling_violations = 0;
};

// delta <= 0 selects 2^-(n+2)
std::vector<CrossingReport> connectivity_trend(int d, double lambda, const std::vector<int>& n_list,
                                               const Rect& window, std::int64_t replicas, double delta,
                                               std::uint64_t seed, int threads = 0);

}  // namespace fpc
