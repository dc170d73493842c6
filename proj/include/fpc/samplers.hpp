#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fpc/geom.hpp"
#include "fpc/measures.hpp"
#include "fpc/rng.hpp"

namespace fpc {

enum class ItemKind { lines, cylinders, ellipses, balls };
const char* kind_name(ItemKind k);

struct Ball {
    int k = 2;
    Vec center{};
    double R = 0.0;  // closed ball
};

// Ball window in R^d, or (k > 0) an axis-aligned patch [lo, hi] of H_k.
struct WindowSpec {
    int d = 2;
    Vec center{};
    double radius = 0.0;
    int k = 0;
    Vec lo{};
    Vec hi{};

    static WindowSpec ball(int d, CSpan center, double radius);
    static WindowSpec patch(int d, int k, CSpan lo, CSpan hi);
    Box patch_box() const;  // the patch as a flat box of R^d
};

struct ProcessSample {
    ItemKind kind = ItemKind::lines;
    std::vector<LineParam> lines;
    std::vector<Cylinder> cylinders;
    std::vector<Ellipsoid> ellipses;
    std::vector<Ball> balls;
    WindowSpec window;
    double r_min = 0.0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    std::size_t size() const;
};

Vec sample_unit_sphere(int d, Rng& rng);
Vec sample_hemisphere(int d, Rng& rng);  // last coordinate > 0
// line hitting B(center, R) under the normalised line measure
LineParam sample_line_hitting_ball(int d, CSpan center, double R, Rng& rng);

ProcessSample sample_lines_ball(int d, CSpan center, double radius, double lambda, Rng& rng);
ProcessSample sample_fixed_cylinders(int d, CSpan center, double radius, double r, double lambda,
                                     Rng& rng);

// Radius law with density (rho + r)^{d-1} r^{-d} on (r_lo, 1], sampled exactly as a
// finite mixture of power laws.
class FractalRadiusLaw {
public:
    FractalRadiusLaw(int d, double rho, double r_lo);
    double mass() const { return total_; }
    double density(double r) const;
    double sample(Rng& rng) const;

private:
    int d_;
    double rho_, lo_;
    std::vector<double> cum_;  // cumulative component masses
    double total_ = 0.0;
};

ProcessSample sample_fractal_cylinders(int d, CSpan center, double radius, int n, double lambda,
                                       Rng& rng);
ProcessSample sample_fractal_cylinders_rmin(int d, CSpan center, double radius, double r_min,
                                            double lambda, Rng& rng);

struct RadiusMode {
    bool fractal = false;
    double r = 1.0;  // fixed mode
    int n = 0;       // fractal mode: r in [2^-n, 1]
    static RadiusMode fixed(double r) { return {false, r, 0}; }
    static RadiusMode truncated(int n) { return {true, 1.0, n}; }
};

// Ellipses c(L,r) ∩ H_k meeting the patch [lo, hi].  When `sources` is given it
// receives the generating cylinder of each ellipse (same order).
ProcessSample induced_ellipse_process(int d, int k, CSpan lo, CSpan hi, RadiusMode mode,
                                      double lambda, Rng& rng,
                                      std::vector<Cylinder>* sources = nullptr);
ProcessSample induced_ball_process(const ProcessSample& ellipses);
// balls with intensity lambda * scale * R^{-k-1} dR on (R_min, 2] meeting the patch
ProcessSample regular_ball_process(int k, double lambda, CSpan lo, CSpan hi, double R_min, Rng& rng,
                                   double scale = 1.0);

// One draw from the normalised shape law of c(L,r) ∩ H_k with centre moved to the origin.
struct ShapeDraw {
    Ellipsoid shape;
    double diameter = 0.0;
    LineParam line;  // a generating line with p_(k) = 0
    double t = 0.0;  // |y| / r, the rescaled offset
};
ShapeDraw sample_shape(int d, int k, double r, Rng& rng);

// beta_R = E[D^k; D >= 2R] under the normalised r = 1 shape law, tabulated.
// beta has a square-root singularity at R = 1, so [0.5, 2] is tabulated in
// sqrt|1 - R| and the rest on log grids.
class BetaTable {
public:
    BetaTable(int d, int k);
    double operator()(double R) const;
    double beta0() const { return beta0_; }
    static const BetaTable& get(int d, int k);

private:
    struct Grid {
        double x0 = 0.0, step = 1.0;
        std::vector<double> v;
        double operator()(double x) const;  // Catmull-Rom
    };
    int d_, k_;
    double beta0_;
    Grid low_, left_, right_, high_;
};

struct Coupling {
    ProcessSample thinned;
    ProcessSample dominating;
    std::vector<double> thinned_marks;
    std::vector<double> dominating_marks;
    double mark_cap = 0.0;  // 2^-k ||xi_{k,1}|| beta_0
};

// Couples the induced balls of a truncated (r >= r_min) process with a regular
// scale-invariant ball model that contains it.
Coupling thinning_coupling(const ProcessSample& ellipse_balls, int d, int k, double r_min,
                           double R_min, Rng& rng);

// d = 3: cylinders of the truncated process whose section with H_2 has centre in
// the patch and diameter >= min_diam.
ProcessSample sample_large_sections(double lambda, CSpan lo, CSpan hi, double r_min,
                                    double min_diam, Rng& rng);
double large_sections_mass(double lambda, CSpan lo, CSpan hi, double r_min, double min_diam);

}  // namespace fpc
