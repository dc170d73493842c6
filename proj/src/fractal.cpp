#include "fpc/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "fpc/stats.hpp"

namespace fpc {

VacancyResult vacancy_mc(int d, int k, double lambda, int n, const std::vector<std::vector<double>>& points,
                         std::int64_t replicas, std::uint64_t seed, int threads) {
    if (points.empty()) throw std::invalid_argument("no query points");
    if (replicas < 1) throw std::invalid_argument("replicas must be positive");
    if (k < 1 || k > d) throw std::invalid_argument("k out of range");
    std::vector<Vec> pts;
    for (const auto& p : points) {
        if (static_cast<int>(p.size()) != k) throw std::invalid_argument("point dimension differs from k");
        pts.push_back(embed(p, d));
    }
    // smallest axis box around the points, then its circumscribed ball
    Vec lo = pts[0], hi = pts[0], c{};
    for (const auto& p : pts)
        for (int i = 0; i < d; ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    for (int i = 0; i < d; ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    double rad = 0.0;
    for (const auto& p : pts) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += (p[i] - c[i]) * (p[i] - c[i]);
        rad = std::max(rad, std::sqrt(s));
    }

    const size_t np = pts.size();
    std::vector<std::uint8_t> vac(static_cast<size_t>(replicas) * np);
    parallel_for(static_cast<size_t>(replicas), threads, [&](size_t rep) {
        Rng rng(seed, rep);
        auto s = sample_fractal_cylinders(d, {c.data(), static_cast<size_t>(d)}, rad, n, lambda, rng);
        for (size_t j = 0; j < np; ++j) {
            bool v = true;
            for (const auto& C : s.cylinders)
                if (cylinder_contains(C, {pts[j].data(), static_cast<size_t>(d)})) {
                    v = false;
                    break;
                }
            vac[rep * np + j] = v;
        }
    });

    VacancyResult out;
    std::vector<Accumulator> acc(np);
    Accumulator joint;
    out.joint_vacant.resize(replicas);
    for (std::int64_t rep = 0; rep < replicas; ++rep) {
        bool all = true;
        for (size_t j = 0; j < np; ++j) {
            acc[j].add(vac[rep * np + j]);
            all = all && vac[rep * np + j];
        }
        joint.add(all);
        out.joint_vacant[rep] = all;
    }
    for (auto& a : acc) out.per_point.push_back({a.mean, a.std_error()});
    out.joint = {joint.mean, joint.std_error()};
    return out;
}

namespace {

struct LevelGrid {
    int k, n, G;
    double delta;
    std::vector<std::uint8_t> touched, covered;
    LevelGrid(int k_, int n_) : k(k_), n(n_), G(1 << n_), delta(std::ldexp(1.0, -n_)) {
        size_t cells = 1;
        for (int i = 0; i < k; ++i) cells *= static_cast<size_t>(G);
        touched.assign(cells, 0);
        covered.assign(cells, 0);
    }
};

void mark_cylinder(const Cylinder& C, LevelGrid& g, int d) {
    const LineParam& L = C.line;
    const double r = C.r, h = g.delta;
    const double halfdiag = 0.5 * h * std::sqrt(static_cast<double>(d));
    // parameter range of the line that can come within r of the slab [0,h]^{d-k}
    double ta = -r, tb = h + r;
    for (int j = g.k; j < d - 1; ++j) {
        if (L.a[j] == 0.0) {
            if (L.p[j] <= -r || L.p[j] >= h + r) return;
            continue;
        }
        double u = (-r - L.p[j]) / L.a[j], v = (h + r - L.p[j]) / L.a[j];
        ta = std::max(ta, std::min(u, v));
        tb = std::min(tb, std::max(u, v));
    }
    if (g.k == d) {
        ta = -1e300;
        tb = 1e300;
    }
    if (!(ta < tb)) return;

    Box X;
    X.d = d;
    for (int j = g.k; j < d; ++j) {
        X.lo[j] = 0.0;
        X.hi[j] = h;
    }
    std::array<int, kMaxDim> idx{};
    Vec ctr{};
    for (int j = g.k; j < d; ++j) ctr[j] = 0.5 * h;

    std::function<void(int, double, double, size_t)> visit = [&](int j, double t0, double t1, size_t flat) {
        if (j == g.k) {
            if (g.touched[flat] && g.covered[flat]) return;
            for (int i = 0; i < g.k; ++i) {
                X.lo[i] = idx[i] * h;
                X.hi[i] = X.lo[i] + h;
                ctr[i] = X.lo[i] + 0.5 * h;
            }
            double dist = point_line_distance({ctr.data(), static_cast<size_t>(d)}, L);
            if (dist >= r + halfdiag) return;
            if (dist + halfdiag < r) {
                g.touched[flat] = g.covered[flat] = 1;
                return;
            }
            if (!g.touched[flat]) g.touched[flat] = dist < r || line_box_distance(L, X) < r;
            if (g.touched[flat] && !g.covered[flat]) g.covered[flat] = box_inside_cylinder(C, X);
            return;
        }
        double x0 = L.a[j] * t0 + L.p[j], x1 = L.a[j] * t1 + L.p[j];
        double mn = std::min(x0, x1) - r, mx = std::max(x0, x1) + r;
        int i0 = std::max(0, static_cast<int>(std::floor(mn / h)));
        int i1 = std::min(g.G - 1, static_cast<int>(std::floor(mx / h)));
        for (int i = i0; i <= i1; ++i) {
            double s0 = t0, s1 = t1;
            if (L.a[j] != 0.0) {
                double u = (i * h - r - L.p[j]) / L.a[j], v = ((i + 1) * h + r - L.p[j]) / L.a[j];
                s0 = std::max(t0, std::min(u, v));
                s1 = std::min(t1, std::max(u, v));
                if (!(s0 <= s1)) continue;
            }
            idx[j] = i;
            visit(j + 1, s0, s1, flat * g.G + i);
        }
    };
    visit(0, ta, tb, 0);
}

}  // namespace

LevelCounts survey_realisation(const ProcessSample& cylinders, int k, int n_min, int n_max) {
    const int d = cylinders.window.d;
    if (k < 1 || k > d) throw std::invalid_argument("k out of range");
    std::vector<const Cylinder*> order;
    for (const auto& C : cylinders.cylinders) order.push_back(&C);
    std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->r > b->r; });
    LevelCounts out;
    for (int n = n_min; n <= n_max; ++n) {
        LevelGrid g(k, n);
        for (const auto* C : order) {
            if (C->r < g.delta) break;
            mark_cylinder(*C, g, d);
        }
        std::int64_t m = 0, M = 0;
        for (size_t i = 0; i < g.touched.size(); ++i) {
            m += !g.touched[i];
            M += !g.covered[i];
        }
        out.m.push_back(m);
        out.M.push_back(M);
    }
    return out;
}

McEstimate BoxSurvey::mean_m(int n) const {
    auto a = summarize(m_counts.at(n - n_min));
    return {a.mean, a.std_error()};
}

McEstimate BoxSurvey::mean_M(int n) const {
    auto a = summarize(M_counts.at(n - n_min));
    return {a.mean, a.std_error()};
}

BoxSurvey box_survey(int d, int k, double lambda, int n_max, std::int64_t replicas, std::uint64_t seed,
                     int threads, int n_min) {
    if (replicas < 1) throw std::invalid_argument("replicas must be positive");
    if (n_min < 0 || n_max < n_min) throw std::invalid_argument("bad level range");
    BoxSurvey s;
    s.d = d;
    s.k = k;
    s.lambda = lambda;
    s.n_min = n_min;
    s.n_max = n_max;
    s.replicas = replicas;
    const int levels = n_max - n_min + 1;
    s.m_counts.assign(levels, std::vector<double>(replicas));
    s.M_counts.assign(levels, std::vector<double>(replicas));
    Vec c{};
    for (int i = 0; i < d; ++i) c[i] = 0.5;
    // every box lies in [0,1]^d, inside the ball of radius sqrt(d)/2 around its centre
    const double rad = 0.5 * std::sqrt(static_cast<double>(d));
    parallel_for(static_cast<size_t>(replicas), threads, [&](size_t rep) {
        Rng rng(seed, rep);
        auto cyl = sample_fractal_cylinders(d, {c.data(), static_cast<size_t>(d)}, rad, n_max, lambda, rng);
        auto counts = survey_realisation(cyl, k, n_min, n_max);
        for (int l = 0; l < levels; ++l) {
            s.m_counts[l][rep] = static_cast<double>(counts.m[l]);
            s.M_counts[l][rep] = static_cast<double>(counts.M[l]);
        }
    });
    return s;
}

DimensionFit dimension_fit(const BoxSurvey& survey, int n_lo, int n_hi, std::uint64_t seed) {
    if (n_lo < survey.n_min || n_hi > survey.n_max || n_hi - n_lo + 1 < 3)
        throw std::invalid_argument("fit range needs >= 3 surveyed levels");
    const std::int64_t R = survey.replicas;
    auto slope_of = [&](const std::vector<std::int64_t>* pick) {
        std::vector<double> x, y;
        for (int n = n_lo; n <= n_hi; ++n) {
            const auto& col = survey.M_counts[n - survey.n_min];
            double s = 0.0;
            if (pick)
                for (auto i : *pick) s += col[i];
            else
                for (double v : col) s += v;
            double mean = s / R;
            if (!(mean > 0.0)) throw std::runtime_error("empty level: log of zero mean");
            x.push_back(n);
            y.push_back(std::log2(mean));
        }
        return linear_fit(x, y).slope;
    };
    DimensionFit f;
    f.slope = slope_of(nullptr);
    // replica bootstrap for the standard error
    Rng rng(seed, 0);
    Accumulator acc;
    std::vector<std::int64_t> pick(R);
    for (int b = 0; b < 200; ++b) {
        for (auto& i : pick) i = static_cast<std::int64_t>(uniform01(rng) * R);
        try {
            acc.add(slope_of(&pick));
        } catch (const std::runtime_error&) {
        }
    }
    f.stderr_ = std::sqrt(acc.variance());
    return f;
}

ZetaEstimate zeta_estimates(int d, int k, double lambda, int n, std::int64_t mc_points,
                            std::int64_t pair_points, std::optional<double> r_exponent,
                            std::int64_t replicas, std::uint64_t seed, int threads) {
    if (lambda < 0.0 || lambda >= k) throw std::invalid_argument("need 0 <= lambda < k");
    if (r_exponent && (!(*r_exponent > 0.0) || *r_exponent >= k - lambda))
        throw std::invalid_argument("energy exponent must lie in (0, k - lambda)");
    if (replicas < 1 || mc_points < 1) throw std::invalid_argument("replicas and mc_points must be positive");
    Vec c{};
    for (int i = 0; i < k; ++i) c[i] = 0.5;
    const double rad = 0.5 * std::sqrt(static_cast<double>(k));
    const double scale = std::exp2(lambda * n);
    std::vector<double> tv(replicas), en(replicas);
    parallel_for(static_cast<size_t>(replicas), threads, [&](size_t rep) {
        Rng rng(seed, rep);
        auto cyl = sample_fractal_cylinders(d, {c.data(), static_cast<size_t>(d)}, rad, n, lambda, rng);
        auto vacant = [&](const Vec& x) {
            for (const auto& C : cyl.cylinders)
                if (cylinder_contains(C, {x.data(), static_cast<size_t>(d)})) return false;
            return true;
        };
        auto draw = [&] {
            Vec x{};
            for (int i = 0; i < k; ++i) x[i] = uniform01(rng);
            return x;
        };
        std::int64_t hits = 0;
        for (std::int64_t j = 0; j < mc_points; ++j) hits += vacant(draw());
        tv[rep] = scale * static_cast<double>(hits) / mc_points;
        if (r_exponent && pair_points > 0) {
            double s = 0.0;
            for (std::int64_t j = 0; j < pair_points; ++j) {
                Vec x = draw(), y = draw();
                if (!vacant(x) || !vacant(y)) continue;
                double dd = 0.0;
                for (int i = 0; i < k; ++i) dd += (x[i] - y[i]) * (x[i] - y[i]);
                s += scale * scale / std::pow(std::sqrt(dd), *r_exponent);
            }
            en[rep] = s / pair_points;
        }
    });
    ZetaEstimate z;
    z.n = n;
    z.replicas = replicas;
    z.mc_points = mc_points;
    z.pair_points = pair_points;
    auto a = summarize(tv);
    z.tv_estimate = a.mean;
    z.tv_se = a.std_error();
    if (r_exponent && pair_points > 0) {
        auto e = summarize(en);
        z.energy_r = e.mean;
        z.energy_se = e.std_error();
    }
    return z;
}

}  // namespace fpc
