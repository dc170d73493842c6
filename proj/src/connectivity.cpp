#include "fpc/connectivity.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "fpc/stats.hpp"

namespace fpc {

Rect K(double s, double t, double cx, double cy) {
    return {cx - 0.5 * s, cx + 0.5 * s, cy - 0.5 * t, cy + 0.5 * t};
}

double RasterGrid::covered_fraction() const {
    if (covered.empty()) return 0.0;
    std::size_t c = 0;
    for (auto v : covered) c += v;
    return static_cast<double>(c) / covered.size();
}

namespace {

// cells whose centres may lie in the shape on row iy: [ix0, ix1], given the
// shape's x-extent at that row height (with one cell of slack)
void row_range(const RasterGrid& g, double xa, double xb, int& ix0, int& ix1) {
    ix0 = std::max(0, static_cast<int>(std::floor((xa - g.window.x0) / g.delta - 0.5)) - 1);
    ix1 = std::min(g.nx - 1, static_cast<int>(std::ceil((xb - g.window.x0) / g.delta - 0.5)) + 1);
}

void raster_ellipse(RasterGrid& g, const Ellipsoid& E) {
    Vec h = ellipse_half_extents(E);
    const double cx = E.center[0], cy = E.center[1];
    int iy0 = std::max(0, static_cast<int>(std::floor((cy - h[1] - g.window.y0) / g.delta - 0.5)) - 1);
    int iy1 = std::min(g.ny - 1, static_cast<int>(std::ceil((cy + h[1] - g.window.y0) / g.delta - 0.5)) + 1);
    if (iy0 > iy1 || cx + h[0] < g.window.x0 || cx - h[0] > g.window.x1) return;
    // quadratic form A = u u^T / M^2 + (I - u u^T) / m^2
    const double ux = E.major_dir[0], uy = E.major_dir[1];
    const double iM = 1.0 / (E.major_len * E.major_len), im = 1.0 / (E.minor_len * E.minor_len);
    const double A11 = ux * ux * iM + uy * uy * im, A12 = ux * uy * (iM - im), A22 = uy * uy * iM + ux * ux * im;
    double y[2];
    for (int iy = iy0; iy <= iy1; ++iy) {
        y[1] = g.window.y0 + (iy + 0.5) * g.delta;
        double dy = y[1] - cy;
        double disc = A12 * A12 * dy * dy - A11 * (A22 * dy * dy - 1.0);
        if (disc < 0.0) continue;
        double sq = std::sqrt(disc);
        int ix0, ix1;
        row_range(g, cx + (-A12 * dy - sq) / A11, cx + (-A12 * dy + sq) / A11, ix0, ix1);
        for (int ix = ix0; ix <= ix1; ++ix) {
            auto& cell = g.covered[static_cast<size_t>(iy) * g.nx + ix];
            if (cell) continue;
            y[0] = g.window.x0 + (ix + 0.5) * g.delta;
            if (ellipse_contains(E, y)) cell = 1;
        }
    }
}

void raster_ball(RasterGrid& g, const Ball& b) {
    const double cx = b.center[0], cy = b.center[1], R = b.R;
    // closed ball, with a relative 1e-12 tolerance for rounding at the boundary
    const double R2 = R * R * (1.0 + 1e-12);
    int iy0 = std::max(0, static_cast<int>(std::floor((cy - R - g.window.y0) / g.delta - 0.5)) - 1);
    int iy1 = std::min(g.ny - 1, static_cast<int>(std::ceil((cy + R - g.window.y0) / g.delta - 0.5)) + 1);
    for (int iy = iy0; iy <= iy1; ++iy) {
        double dy = g.window.y0 + (iy + 0.5) * g.delta - cy;
        if (dy * dy > R2) continue;
        double w = std::sqrt(R2 - dy * dy);
        int ix0, ix1;
        row_range(g, cx - w, cx + w, ix0, ix1);
        for (int ix = ix0; ix <= ix1; ++ix) {
            double dx = g.window.x0 + (ix + 0.5) * g.delta - cx;
            if (dx * dx + dy * dy <= R2) g.covered[static_cast<size_t>(iy) * g.nx + ix] = 1;
        }
    }
}

// BFS over cells with covered == want, from side `from` to the opposite side
bool crossing(const RasterGrid& g, bool want, bool eight, Direction dir) {
    const int nx = g.nx, ny = g.ny;
    std::vector<std::uint8_t> seen(g.covered.size(), 0);
    std::deque<int> q;
    const bool lr = dir == Direction::left_right;
    const int starts = lr ? ny : nx;
    for (int s = 0; s < starts; ++s) {
        int ix = lr ? 0 : s, iy = lr ? s : 0;
        int id = iy * nx + ix;
        if (static_cast<bool>(g.covered[id]) == want) {
            seen[id] = 1;
            q.push_back(id);
        }
    }
    while (!q.empty()) {
        int id = q.front();
        q.pop_front();
        int ix = id % nx, iy = id / nx;
        if (lr ? ix == nx - 1 : iy == ny - 1) return true;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if ((dx == 0 && dy == 0) || (!eight && dx != 0 && dy != 0)) continue;
                int jx = ix + dx, jy = iy + dy;
                if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
                int jd = jy * nx + jx;
                if (seen[jd] || static_cast<bool>(g.covered[jd]) != want) continue;
                seen[jd] = 1;
                q.push_back(jd);
            }
    }
    return false;
}

}  // namespace

RasterGrid rasterize(const ProcessSample& shapes, const Rect& window, double delta) {
    if (!(delta > 0.0) || delta > std::min(window.width(), window.height()) / 8.0)
        throw std::invalid_argument("delta must lie in (0, min(s,t)/8]");
    RasterGrid g;
    g.window = window;
    g.delta = delta;
    g.nx = static_cast<int>(std::ceil(window.width() / delta - 1e-9));
    g.ny = static_cast<int>(std::ceil(window.height() / delta - 1e-9));
    g.covered.assign(static_cast<size_t>(g.nx) * g.ny, 0);
    if (shapes.kind == ItemKind::ellipses) {
        for (const auto& E : shapes.ellipses) {
            if (E.k != 2) throw std::invalid_argument("rasterisation needs k = 2 shapes");
            raster_ellipse(g, E);
        }
    } else if (shapes.kind == ItemKind::balls) {
        for (const auto& b : shapes.balls) {
            if (b.k != 2) throw std::invalid_argument("rasterisation needs k = 2 shapes");
            raster_ball(g, b);
        }
    } else {
        throw std::invalid_argument("rasterisation needs ellipses or balls");
    }
    return g;
}

bool vacant_crossing(const RasterGrid& grid, Direction dir) { return crossing(grid, false, false, dir); }

bool covered_crossing(const RasterGrid& grid, Direction dir) { return crossing(grid, true, true, dir); }

bool arm_event(const ProcessSample& shapes, const double center[2], double epsilon, double delta) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    RasterGrid g = rasterize(shapes, K(3 * epsilon, 3 * epsilon, center[0], center[1]), delta);
    const int nx = g.nx, ny = g.ny;
    auto inner = [&](int ix, int iy) {
        double x = g.window.x0 + (ix + 0.5) * delta - center[0];
        double y = g.window.y0 + (iy + 0.5) * delta - center[1];
        return std::abs(x) < 0.5 * epsilon && std::abs(y) < 0.5 * epsilon;
    };
    std::vector<std::uint8_t> seen(g.covered.size(), 0);
    std::deque<int> q;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            if (!g.at(ix, iy) || inner(ix, iy)) continue;
            bool touches = false;
            for (int dy = -1; dy <= 1 && !touches; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    int jx = ix + dx, jy = iy + dy;
                    if (jx >= 0 && jy >= 0 && jx < nx && jy < ny && inner(jx, jy)) {
                        touches = true;
                        break;
                    }
                }
            if (touches) {
                seen[iy * nx + ix] = 1;
                q.push_back(iy * nx + ix);
            }
        }
    while (!q.empty()) {
        int id = q.front();
        q.pop_front();
        int ix = id % nx, iy = id / nx;
        if (ix == 0 || iy == 0 || ix == nx - 1 || iy == ny - 1) return true;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                int jx = ix + dx, jy = iy + dy;
                if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
                int jd = jy * nx + jx;
                if (seen[jd] || !g.covered[jd] || inner(jx, jy)) continue;
                seen[jd] = 1;
                q.push_back(jd);
            }
    }
    return false;
}

bool ellipse_in_lr1(const Ellipsoid& E, double epsilon) {
    if (E.k != 2) throw std::invalid_argument("LR_1 needs k = 2 ellipses");
    const double q = 0.25 * epsilon;  // K(eps/2) = [-eps/4, eps/4]^2
    if (std::abs(E.center[0]) > q || std::abs(E.center[1]) > q) return false;
    if (2.0 * E.major_len < 10.0 * epsilon) return false;
    return std::abs(ellipse_arg(E)) < 0.1;
}

bool ellipse_in_lr(const Ellipsoid& E, double epsilon) {
    const double q = 0.25 * epsilon;
    if (std::abs(E.center[0]) > q || std::abs(E.center[1]) > q) return false;
    double l0[2] = {-1.5 * epsilon, -0.5 * epsilon}, l1[2] = {-1.5 * epsilon, 0.5 * epsilon};
    double r0[2] = {1.5 * epsilon, -0.5 * epsilon}, r1[2] = {1.5 * epsilon, 0.5 * epsilon};
    return ellipse_hits_segment(E, l0, l1) && ellipse_hits_segment(E, r0, r1);
}

Lr1Census lr1_census(const ProcessSample& ellipses, double epsilon) {
    if (ellipses.kind != ItemKind::ellipses) throw std::invalid_argument("expected an ellipse sample");
    Lr1Census c;
    for (const auto& E : ellipses.ellipses) {
        if (!ellipse_in_lr1(E, epsilon)) continue;
        ++c.count;
        if (!ellipse_in_lr(E, epsilon)) ++c.not_in_lr;
    }
    return c;
}

double lr1_expected(double lambda, double epsilon, double r_min) {
    if (!(r_min > 0.0) || r_min > 5.0 * epsilon || 5.0 * epsilon > 1.0)
        throw std::invalid_argument("need 0 < r_min <= 5 eps <= 1");
    // area (eps/2)^2, angular measure 4/10 (the arg window taken modulo pi),
    // radial integral of min(1, (r / 5 eps)^2) r^{-3} / 2
    double radial = std::log(5.0 * epsilon / r_min) / (25.0 * epsilon * epsilon) +
                    0.5 * (1.0 / (25.0 * epsilon * epsilon) - 1.0);
    return lambda * upsilon(3) * 0.25 * epsilon * epsilon * 0.4 * 0.5 * radial;
}

std::vector<CrossingReport> connectivity_trend(int d, double lambda, const std::vector<int>& n_list,
                                               const Rect& window, std::int64_t replicas, double delta,
                                               std::uint64_t seed, int threads) {
    if (n_list.empty()) throw std::invalid_argument("empty level list");
    if (replicas < 1) throw std::invalid_argument("replicas must be positive");
    const int n_max = *std::max_element(n_list.begin(), n_list.end());
    const size_t L = n_list.size();
    std::vector<std::uint8_t> ell(replicas * L), ball(replicas * L), hemp(replicas * L);
    const double lo[2] = {window.x0, window.y0}, hi[2] = {window.x1, window.y1};
    parallel_for(static_cast<size_t>(replicas), threads, [&](size_t rep) {
        Rng rng(seed, rep);
        std::vector<Cylinder> src;
        auto all = induced_ellipse_process(d, 2, lo, hi, RadiusMode::truncated(n_max), lambda, rng, &src);
        for (size_t l = 0; l < L; ++l) {
            const int n = n_list[l];
            const double rmin = std::ldexp(1.0, -n);
            ProcessSample e = all;
            e.ellipses.clear();
            for (size_t i = 0; i < all.ellipses.size(); ++i)
                if (src[i].r >= rmin) e.ellipses.push_back(all.ellipses[i]);
            const double dl = delta > 0.0 ? delta : std::ldexp(1.0, -(n + 2));
            auto b = induced_ball_process(e);
            bool h_empty = std::none_of(b.balls.begin(), b.balls.end(), [](const Ball& x) { return x.R > 2.0; });
            ell[rep * L + l] = vacant_crossing(rasterize(e, window, dl));
            ball[rep * L + l] = vacant_crossing(rasterize(b, window, dl));
            hemp[rep * L + l] = h_empty;
        }
    });
    std::vector<CrossingReport> out;
    for (size_t l = 0; l < L; ++l) {
        Accumulator a, b, h;
        std::int64_t viol = 0;
        for (std::int64_t rep = 0; rep < replicas; ++rep) {
            a.add(ell[rep * L + l]);
            b.add(ball[rep * L + l]);
            h.add(hemp[rep * L + l]);
            viol += ball[rep * L + l] && !ell[rep * L + l];
        }
        CrossingReport c;
        c.event = "vacant_lr_crossing";
        c.d = d;
        c.lambda = lambda;
        c.n = n_list[l];
        c.delta = delta > 0.0 ? delta : std::ldexp(1.0, -(n_list[l] + 2));
        c.replicas = replicas;
        c.frequency = a.mean;
        c.se = a.std_error();
        c.ball_frequency = b.mean;
        c.ball_se = b.std_error();
        c.h_empty_frequency = h.mean;
        c.h_empty_se = h.std_error();
        c.coupling_violations = viol;
        out.push_back(c);
    }
    return out;
}

}  // namespace fpc
