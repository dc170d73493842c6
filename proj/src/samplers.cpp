#include "fpc/samplers.hpp"

#include <algorithm>
#include <boost/math/special_functions/binomial.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fpc {

const char* kind_name(ItemKind k) {
    switch (k) {
        case ItemKind::lines: return "lines";
        case ItemKind::cylinders: return "cylinders";
        case ItemKind::ellipses: return "ellipses";
        case ItemKind::balls: return "balls";
    }
    return "?";
}

WindowSpec WindowSpec::ball(int d, CSpan center, double radius) {
    WindowSpec w;
    w.d = d;
    w.center = embed(center, d);
    w.radius = radius;
    return w;
}

WindowSpec WindowSpec::patch(int d, int k, CSpan lo, CSpan hi) {
    WindowSpec w;
    w.d = d;
    w.k = k;
    double r2 = 0.0;
    for (int i = 0; i < k; ++i) {
        if (!(hi[i] > lo[i])) throw std::invalid_argument("degenerate patch");
        w.lo[i] = lo[i];
        w.hi[i] = hi[i];
        w.center[i] = 0.5 * (lo[i] + hi[i]);
        r2 += 0.25 * (hi[i] - lo[i]) * (hi[i] - lo[i]);
    }
    w.radius = std::sqrt(r2);
    return w;
}

Box WindowSpec::patch_box() const {
    Box b;
    b.d = d;
    b.lo = lo;
    b.hi = hi;
    return b;
}

std::size_t ProcessSample::size() const {
    switch (kind) {
        case ItemKind::lines: return lines.size();
        case ItemKind::cylinders: return cylinders.size();
        case ItemKind::ellipses: return ellipses.size();
        case ItemKind::balls: return balls.size();
    }
    return 0;
}

Vec sample_unit_sphere(int d, Rng& rng) {
    Vec u{};
    double n2;
    do {
        n2 = 0.0;
        for (int i = 0; i < d; ++i) {
            u[i] = normal(rng);
            n2 += u[i] * u[i];
        }
    } while (!(n2 > 1e-300));
    double n = std::sqrt(n2);
    for (int i = 0; i < d; ++i) u[i] /= n;
    return u;
}

Vec sample_hemisphere(int d, Rng& rng) {
    Vec u = sample_unit_sphere(d, rng);
    if (u[d - 1] < 0.0)
        for (int i = 0; i < d; ++i) u[i] = -u[i];
    return u;
}

namespace {

// uniform point of the (d-1)-ball of radius R in the hyperplane orthogonal to u
Vec sample_perp_ball(int d, const Vec& u, double R, Rng& rng) {
    Vec y{};
    double n2;
    do {
        double yu = 0.0;
        for (int i = 0; i < d; ++i) {
            y[i] = normal(rng);
            yu += y[i] * u[i];
        }
        n2 = 0.0;
        for (int i = 0; i < d; ++i) {
            y[i] -= yu * u[i];
            n2 += y[i] * y[i];
        }
    } while (!(n2 > 1e-300));
    double s = R * std::pow(uniform01(rng), 1.0 / (d - 1)) / std::sqrt(n2);
    for (int i = 0; i < d; ++i) y[i] *= s;
    return y;
}

// uniform point of the m-ball of radius R
Vec sample_ball_point(int m, double R, Rng& rng) {
    Vec y = sample_unit_sphere(m, rng);
    double s = R * std::pow(uniform01(rng), 1.0 / m);
    for (int i = 0; i < m; ++i) y[i] *= s;
    return y;
}

ProcessSample make_sample(ItemKind kind, const WindowSpec& w, double lambda, const Rng& rng) {
    ProcessSample s;
    s.kind = kind;
    s.window = w;
    s.lambda = lambda;
    s.seed = rng.seed();
    s.stream_id = rng.stream();
    return s;
}

}  // namespace

LineParam sample_line_hitting_ball(int d, CSpan center, double R, Rng& rng) {
    for (;;) {
        Vec u = sample_hemisphere(d, rng);
        Vec y = sample_perp_ball(d, u, R, rng);
        Vec x{};
        for (int i = 0; i < d; ++i) x[i] = center[i] + y[i];
        auto L = LineParam::from_point_direction(d, {x.data(), static_cast<size_t>(d)},
                                                 {u.data(), static_cast<size_t>(d)});
        if (L) return *L;
    }
}

ProcessSample sample_lines_ball(int d, CSpan center, double radius, double lambda, Rng& rng) {
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
    auto s = make_sample(ItemKind::lines, WindowSpec::ball(d, center, radius), lambda, rng);
    auto count = poisson(rng, lambda * nu_ball(d, radius));
    s.lines.reserve(count);
    for (std::int64_t i = 0; i < count; ++i) s.lines.push_back(sample_line_hitting_ball(d, center, radius, rng));
    return s;
}

ProcessSample sample_fixed_cylinders(int d, CSpan center, double radius, double r, double lambda,
                                     Rng& rng) {
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("cylinder radius must lie in (0,1]");
    auto s = make_sample(ItemKind::cylinders, WindowSpec::ball(d, center, radius), lambda, rng);
    auto count = poisson(rng, lambda * nu_ball(d, radius + r));
    for (std::int64_t i = 0; i < count; ++i)
        s.cylinders.push_back({sample_line_hitting_ball(d, center, radius + r, rng), r});
    return s;
}

FractalRadiusLaw::FractalRadiusLaw(int d, double rho, double r_lo) : d_(d), rho_(rho), lo_(r_lo) {
    cum_.assign(d, 0.0);
    if (!(r_lo < 1.0)) return;
    double acc = 0.0;
    for (int i = 0; i < d; ++i) {
        double c = boost::math::binomial_coefficient<double>(d - 1, i) * std::pow(rho, d - 1 - i);
        int e = d - 1 - i;  // component density r^{-e-1}
        double m = e == 0 ? -std::log(lo_) : (std::pow(lo_, -e) - 1.0) / e;
        acc += c * m;
        cum_[i] = acc;
    }
    total_ = acc;
}

double FractalRadiusLaw::density(double r) const {
    if (!(r > lo_ && r <= 1.0)) return 0.0;
    return std::pow(rho_ + r, d_ - 1) * std::pow(r, -d_);
}

double FractalRadiusLaw::sample(Rng& rng) const {
    double v = uniform01(rng) * total_;
    int i = static_cast<int>(std::lower_bound(cum_.begin(), cum_.end(), v) - cum_.begin());
    i = std::min(i, d_ - 1);
    int e = d_ - 1 - i;
    double U = uniform01(rng);
    if (e == 0) return std::pow(lo_, 1.0 - U);
    // r^{-e} uniform between 1 and lo^{-e}
    double lo_e = std::pow(lo_, -e);
    return std::pow(1.0 + U * (lo_e - 1.0), -1.0 / e);
}

ProcessSample sample_fractal_cylinders_rmin(int d, CSpan center, double radius, double r_min,
                                            double lambda, Rng& rng) {
    auto s = make_sample(ItemKind::cylinders, WindowSpec::ball(d, center, radius), lambda, rng);
    s.r_min = r_min;
    if (!(r_min < 1.0) || lambda <= 0.0) return s;
    FractalRadiusLaw law(d, radius, r_min);
    auto count = poisson(rng, lambda * law.mass());
    s.cylinders.reserve(count);
    for (std::int64_t i = 0; i < count; ++i) {
        double r = law.sample(rng);
        s.cylinders.push_back({sample_line_hitting_ball(d, center, radius + r, rng), r});
    }
    return s;
}

ProcessSample sample_fractal_cylinders(int d, CSpan center, double radius, int n, double lambda,
                                       Rng& rng) {
    if (n < 0) throw std::invalid_argument("truncation level must be >= 0");
    return sample_fractal_cylinders_rmin(d, center, radius, std::ldexp(1.0, -n), lambda, rng);
}

ProcessSample induced_ellipse_process(int d, int k, CSpan lo, CSpan hi, RadiusMode mode,
                                      double lambda, Rng& rng, std::vector<Cylinder>* sources) {
    if (k < 1 || k > d - 1) throw std::invalid_argument("subspace dimension k out of range");
    WindowSpec w = WindowSpec::patch(d, k, lo, hi);
    CSpan c{w.center.data(), static_cast<size_t>(d)};
    ProcessSample cyl = mode.fractal ? sample_fractal_cylinders(d, c, w.radius, mode.n, lambda, rng)
                                     : sample_fixed_cylinders(d, c, w.radius, mode.r, lambda, rng);
    auto s = make_sample(ItemKind::ellipses, w, lambda, rng);
    s.r_min = cyl.r_min;
    Box pb = w.patch_box();
    for (const auto& C : cyl.cylinders) {
        auto E = cylinder_subspace_ellipse(C, k);
        if (!E) continue;
        Vec h = ellipse_half_extents(*E);
        bool outside = false, center_in = true;
        for (int i = 0; i < k; ++i) {
            if (E->center[i] + h[i] < lo[i] || E->center[i] - h[i] > hi[i]) outside = true;
            if (E->center[i] < lo[i] || E->center[i] > hi[i]) center_in = false;
        }
        if (outside) continue;
        if (!center_in && !(line_box_distance(C.line, pb) < C.r)) continue;
        s.ellipses.push_back(*E);
        if (sources) sources->push_back(C);
    }
    return s;
}

ProcessSample induced_ball_process(const ProcessSample& ellipses) {
    if (ellipses.kind != ItemKind::ellipses) throw std::invalid_argument("expected an ellipse sample");
    ProcessSample s = ellipses;
    s.kind = ItemKind::balls;
    s.ellipses.clear();
    s.balls.reserve(ellipses.ellipses.size());
    for (const auto& E : ellipses.ellipses) s.balls.push_back({E.k, E.center, E.major_len});
    return s;
}

ProcessSample regular_ball_process(int k, double lambda, CSpan lo, CSpan hi, double R_min, Rng& rng,
                                   double scale) {
    if (!(R_min > 0.0)) throw std::invalid_argument("regular ball model needs R_min > 0");
    WindowSpec w = WindowSpec::patch(k + 1, k, lo, hi);
    auto s = make_sample(ItemKind::balls, w, lambda, rng);
    s.r_min = R_min;
    if (R_min >= 2.0 || lambda <= 0.0) return s;
    const double Rmax = 2.0;
    double vol = 1.0;
    for (int i = 0; i < k; ++i) vol *= hi[i] - lo[i] + 2 * Rmax;
    double top = std::pow(R_min, -k), bot = std::pow(Rmax, -k);
    auto count = poisson(rng, lambda * scale * vol * (top - bot) / k);
    for (std::int64_t j = 0; j < count; ++j) {
        Ball b;
        b.k = k;
        for (int i = 0; i < k; ++i) b.center[i] = uniform(rng, lo[i] - Rmax, hi[i] + Rmax);
        b.R = std::pow(top - uniform01(rng) * (top - bot), -1.0 / k);
        double d2 = 0.0;
        for (int i = 0; i < k; ++i) {
            double v = std::max({lo[i] - b.center[i], 0.0, b.center[i] - hi[i]});
            d2 += v * v;
        }
        if (d2 <= b.R * b.R) s.balls.push_back(b);
    }
    return s;
}

ShapeDraw sample_shape(int d, int k, double r, Rng& rng) {
    if (k < 1 || k > d - 1) throw std::invalid_argument("subspace dimension k out of range");
    const int mp = d - k - 1;
    for (;;) {
        // direction with density proportional to b = |(alpha^(k), alpha_d)| on the hemisphere
        Vec al = sample_hemisphere(d, rng);
        double b2 = 0.0;
        for (int i = k; i < d; ++i) b2 += al[i] * al[i];
        double b = std::sqrt(b2);
        if (!(uniform01(rng) < b)) continue;
        double ad = al[d - 1];
        if (!(ad > 1e-300)) continue;

        ShapeDraw out;
        LineParam& L = out.line;
        L.d = d;
        for (int i = 0; i < d; ++i) L.a[i] = al[i] / ad;
        L.a[d - 1] = 1.0;
        if (mp > 0) {
            Vec y = sample_ball_point(mp, r, rng);
            double kap2 = 0.0;
            for (int i = 0; i < mp; ++i) kap2 += al[k + i] * al[k + i];
            Vec v{};
            if (kap2 > 0.0) {
                double kap = std::sqrt(kap2);
                for (int i = 0; i < mp; ++i) v[i] = al[k + i] / kap;
            } else {
                v[0] = 1.0;
            }
            double ypar = 0.0;
            for (int i = 0; i < mp; ++i) ypar += y[i] * v[i];
            double stretch = b / ad;
            for (int i = 0; i < mp; ++i) L.p[k + i] = y[i] - ypar * v[i] + stretch * ypar * v[i];
            out.t = std::sqrt(norm2({y.data(), static_cast<size_t>(mp)})) / r;
        }
        auto E = cylinder_subspace_ellipse({L, r}, k);
        if (!E) continue;  // boundary of the offset ball, probability zero
        for (int i = 0; i < k; ++i) E->center[i] = 0.0;
        out.shape = *E;
        out.diameter = 2.0 * E->major_len;
        return out;
    }
}

BetaTable::BetaTable(int d, int k) : d_(d), k_(k) {
    beta0_ = shape_beta(d, k, 0.0);
    if (!std::isfinite(beta0_)) throw std::invalid_argument("beta_0 is infinite for k > d/2");
    auto fill = [](Grid& g, double x0, double x1, int n, auto&& f) {
        g.x0 = x0;
        g.step = (x1 - x0) / (n - 1);
        g.v.resize(n);
        for (int i = 0; i < n; ++i) g.v[i] = f(x0 + i * g.step);
    };
    fill(low_, std::log(1e-7), std::log(0.5), 400, [&](double x) { return shape_beta(d, k, std::exp(x)); });
    fill(left_, 0.0, std::sqrt(0.5), 200, [&](double s) { return shape_beta(d, k, 1.0 - s * s); });
    fill(right_, 0.0, 1.0, 300, [&](double s) { return shape_beta(d, k, 1.0 + s * s); });
    fill(high_, std::log(2.0), std::log(1e6), 800, [&](double x) { return shape_beta(d, k, std::exp(x)); });
}

double BetaTable::Grid::operator()(double x) const {
    const int n = static_cast<int>(v.size());
    double f = std::clamp((x - x0) / step, 0.0, n - 1.0);
    int i = std::min(static_cast<int>(f), n - 2);
    double t = f - i;
    // quadratic extrapolation for the ghost nodes at both ends
    auto at = [&](int j) {
        if (j < 0) return 3 * v[0] - 3 * v[1] + v[2];
        if (j >= n) return 3 * v[n - 1] - 3 * v[n - 2] + v[n - 3];
        return v[j];
    };
    double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
    double m1 = 0.5 * (p2 - p0), m2 = 0.5 * (p3 - p1);
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * p1 + (t3 - 2 * t2 + t) * m1 + (-2 * t3 + 3 * t2) * p2 + (t3 - t2) * m2;
}

double BetaTable::operator()(double R) const {
    if (!(R > 0.0)) return beta0_;
    if (R < 1e-7) return low_.v.front();
    if (R < 0.5) return low_(std::log(R));
    if (R <= 1.0) return left_(std::sqrt(1.0 - R));
    if (R <= 2.0) return right_(std::sqrt(R - 1.0));
    if (R >= 1e6) return shape_beta(d_, k_, R);
    return high_(std::log(R));
}

const BetaTable& BetaTable::get(int d, int k) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<BetaTable>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{d, k}];
    if (!slot) slot = std::make_unique<BetaTable>(d, k);
    return *slot;
}

Coupling thinning_coupling(const ProcessSample& ellipse_balls, int d, int k, double r_min,
                           double R_min, Rng& rng) {
    if (ellipse_balls.kind != ItemKind::balls) throw std::invalid_argument("expected a ball sample");
    if (d < 4 || 2 * k > d) throw std::invalid_argument("coupling needs d >= 4 and k <= d/2");
    const BetaTable& beta = BetaTable::get(d, k);
    const double c = std::ldexp(xi_tv(d, k, 1.0), -k);
    auto beta_n = [&](double R) { return beta(R) - beta(R / r_min); };

    Coupling out;
    out.mark_cap = c * beta.beta0();
    out.thinned = ellipse_balls;
    out.thinned.balls.clear();
    for (const auto& b : ellipse_balls.balls) {
        if (b.R > 2.0) continue;
        out.thinned.balls.push_back(b);
        out.thinned_marks.push_back(uniform01(rng) * c * beta_n(b.R));
    }
    out.dominating = out.thinned;
    out.dominating_marks = out.thinned_marks;

    const auto& w = ellipse_balls.window;
    auto cand = regular_ball_process(k, ellipse_balls.lambda, {w.lo.data(), static_cast<size_t>(k)},
                                     {w.hi.data(), static_cast<size_t>(k)}, R_min, rng, out.mark_cap);
    for (const auto& b : cand.balls) {
        double q = uniform01(rng) * out.mark_cap;
        if (q > c * beta_n(b.R)) {
            out.dominating.balls.push_back(b);
            out.dominating_marks.push_back(q);
        }
    }
    return out;
}

namespace {

struct LargeSectionLaw {
    double r_star, lo, m1, m2;
    LargeSectionLaw(double r_min, double min_diam) : r_star(0.5 * min_diam), lo(r_min) {
        if (!(r_min > 0.0 && r_min < 1.0) || !(min_diam > 0.0 && min_diam <= 2.0))
            throw std::invalid_argument("need 0 < r_min < 1 and 0 < min_diam <= 2");
        // density r^{-3} min(1, (r/r*)^2) on [r_min, 1]
        m1 = lo < r_star ? std::log(r_star / lo) / (r_star * r_star) : 0.0;
        double a = std::max(lo, r_star);
        m2 = 0.5 * (1.0 / (a * a) - 1.0);
    }
    double mass() const { return m1 + m2; }
};

}  // namespace

double large_sections_mass(double lambda, CSpan lo, CSpan hi, double r_min, double min_diam) {
    LargeSectionLaw law(r_min, min_diam);
    double area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    // integral of Upsilon_3 |a|^{-4} over |a| >= A0 equals pi Upsilon_3 / A0^2
    return lambda * area * upsilon(3) * M_PI * law.mass();
}

ProcessSample sample_large_sections(double lambda, CSpan lo, CSpan hi, double r_min, double min_diam,
                                    Rng& rng) {
    LargeSectionLaw law(r_min, min_diam);
    const int d = 3;
    auto s = make_sample(ItemKind::cylinders, WindowSpec::patch(d, 2, lo, hi), lambda, rng);
    s.r_min = r_min;
    auto count = poisson(rng, large_sections_mass(lambda, lo, hi, r_min, min_diam));
    for (std::int64_t j = 0; j < count; ++j) {
        double r;
        if (uniform01(rng) * law.mass() < law.m1) {
            r = law.lo * std::pow(law.r_star / law.lo, uniform01(rng));
        } else {
            double a = std::max(law.lo, law.r_star);
            double top = 1.0 / (a * a);
            r = 1.0 / std::sqrt(top - uniform01(rng) * (top - 1.0));
        }
        double A0 = std::max(1.0, law.r_star / r);
        double A = A0 / std::sqrt(uniform01(rng));
        double rho = std::sqrt(std::max(0.0, A * A - 1.0));
        double th = uniform(rng, -M_PI, M_PI);
        double ah[2] = {rho * std::cos(th), rho * std::sin(th)};
        double ph[2] = {uniform(rng, lo[0], hi[0]), uniform(rng, lo[1], hi[1])};
        s.cylinders.push_back({LineParam::from_chart(d, ah, ph), r});
    }
    return s;
}

}  // namespace fpc
