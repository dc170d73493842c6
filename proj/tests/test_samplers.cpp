#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <vector>

#include "fpc/geom.hpp"
#include "fpc/measures.hpp"
#include "fpc/rng.hpp"
#include "fpc/samplers.hpp"
#include "fpc/stats.hpp"

using namespace fpc;

namespace {

CSpan sp(const Vec& v, int n) { return {v.data(), static_cast<size_t>(n)}; }
CSpan sp(const double* v, int n) { return {v, static_cast<size_t>(n)}; }

bool center_in(const Ellipsoid& E, const double* lo, const double* hi) {
    for (int i = 0; i < E.k; ++i)
        if (E.center[i] < lo[i] || E.center[i] > hi[i]) return false;
    return true;
}

// ellipse meets the rectangle iff its centre is inside or it touches an edge
bool meets_rect(const Ellipsoid& E, const double* lo, const double* hi) {
    if (center_in(E, lo, hi)) return true;
    double c[4][2] = {{lo[0], lo[1]}, {hi[0], lo[1]}, {hi[0], hi[1]}, {lo[0], hi[1]}};
    for (int i = 0; i < 4; ++i)
        if (ellipse_hits_segment(E, sp(c[i], 2), sp(c[(i + 1) % 4], 2))) return true;
    return false;
}

}  // namespace

TEST(Lines, MeanCountAndAllHit) {
    Rng rng(100, 0);
    double c[3] = {0.2, -0.1, 0.4};
    Accumulator n;
    for (int rep = 0; rep < 20000; ++rep) {
        auto s = sample_lines_ball(3, sp(c, 3), 0.5, 10.0, rng);
        n.add(static_cast<double>(s.size()));
        for (const auto& L : s.lines) {
            ASSERT_EQ(L.a[2], 1.0);
            ASSERT_EQ(L.p[2], 0.0);
            ASSERT_LT(point_line_distance(sp(c, 3), L), 0.5);
        }
    }
    EXPECT_NEAR(n.mean, 2.5, 4 * n.std_error());
    Rng r0(1, 0);
    EXPECT_EQ(sample_lines_ball(3, sp(c, 3), 0.5, 0.0, r0).size(), 0u);
}

// Chart density Upsilon |a|^{-(d+1)} da dp restricted to lines hitting B(0,R).
// Given a, the admissible p form an ellipsoid of area proportional to |a|, so
// |a|^{-d} is the marginal of a; c = 1/|a| then has c^2 ~ Beta(1/2, (d-1)/2).
// Given a, the foot distance s = dist(0,L)/R has s^{d-1} uniform.
TEST(Lines, ChartDensityChi2) {
    for (int d : {3, 5}) {
        Rng rng(101, d);
        const int B = 10;
        std::vector<double> obs(B * B, 0.0);
        const int N = 30000;
        double o[kMaxDim] = {};
        for (int i = 0; i < N; ++i) {
            auto L = sample_line_hitting_ball(d, sp(o, d), 1.3, rng);
            double c = 1.0 / std::sqrt(L.a_norm2());
            double u1 = boost::math::ibeta(0.5, 0.5 * (d - 1), c * c);
            double u2 = std::pow(point_line_distance(sp(o, d), L) / 1.3, d - 1);
            int i1 = std::min(B - 1, static_cast<int>(u1 * B));
            int i2 = std::min(B - 1, static_cast<int>(u2 * B));
            obs[i1 * B + i2] += 1;
        }
        std::vector<double> exp(B * B, static_cast<double>(N) / (B * B));
        EXPECT_GT(chi2_sf(pearson_chi2(obs, exp), B * B - 1), 1e-3) << "d=" << d;
    }
}

TEST(FractalRadius, MassAndDensity) {
    // d = 3, rho = 1: integral of (1+r)^2 r^-3 has antiderivative G below
    auto G = [](double r) { return -0.5 / (r * r) - 2.0 / r + std::log(r); };
    FractalRadiusLaw law(3, 1.0, 1.0 / 16);
    EXPECT_NEAR(law.mass(), G(1.0) - G(1.0 / 16), 1e-10);
    EXPECT_NEAR(law.density(0.5), 1.5 * 1.5 / 0.125, 1e-12);
    EXPECT_EQ(law.density(0.01), 0.0);
    EXPECT_EQ(law.density(1.5), 0.0);
    FractalRadiusLaw empty(3, 1.0, 1.0);
    EXPECT_EQ(empty.mass(), 0.0);
}

TEST(FractalCylinders, CountAndRadiusHistogram) {
    auto G = [](double r) { return -0.5 / (r * r) - 2.0 / r + std::log(r); };
    const double lo = 1.0 / 16, total = G(1.0) - G(lo);
    Rng rng(102, 0);
    double c[3] = {0, 0, 0};
    const int B = 20;
    std::vector<double> obs(B, 0.0);
    Accumulator n;
    double nr = 0;
    for (int rep = 0; rep < 2000; ++rep) {
        auto s = sample_fractal_cylinders(3, sp(c, 3), 1.0, 4, 1.0, rng);
        n.add(static_cast<double>(s.size()));
        for (const auto& C : s.cylinders) {
            ASSERT_GT(C.r, lo);
            ASSERT_LE(C.r, 1.0);
            ASSERT_LT(point_line_distance(sp(c, 3), C.line), 1.0 + C.r);
            int b = std::min(B - 1, static_cast<int>(std::log(C.r / lo) / std::log(1 / lo) * B));
            obs[b] += 1;
            nr += 1;
        }
    }
    EXPECT_NEAR(n.mean, total, 4 * n.std_error());
    std::vector<double> exp(B);
    for (int b = 0; b < B; ++b) {
        double r0 = lo * std::pow(1 / lo, static_cast<double>(b) / B);
        double r1 = lo * std::pow(1 / lo, static_cast<double>(b + 1) / B);
        exp[b] = nr * (G(r1) - G(r0)) / total;
    }
    EXPECT_GT(chi2_sf(pearson_chi2(obs, exp), B - 1), 1e-3);
    EXPECT_THROW(sample_fractal_cylinders(3, sp(c, 3), 1.0, -1, 1.0, rng), std::invalid_argument);
    EXPECT_EQ(sample_fractal_cylinders(3, sp(c, 3), 1.0, 0, 1.0, rng).size(), 0u);
}

// Radius band (b, c] near a window of radius rho has the same law as (eb, ec]
// near a window of radius e*rho.
TEST(FractalCylinders, ScaleInvariance) {
    Rng rng(103, 0);
    double o[3] = {0, 0, 0};
    Accumulator big, small;
    for (int rep = 0; rep < 6000; ++rep) {
        auto s1 = sample_fractal_cylinders_rmin(3, sp(o, 3), 0.5, 0.04, 1.0, rng);
        auto s2 = sample_fractal_cylinders_rmin(3, sp(o, 3), 0.25, 0.04, 1.0, rng);
        int c1 = 0, c2 = 0;
        for (const auto& C : s1.cylinders) c1 += C.r > 0.1 && C.r <= 0.2;
        for (const auto& C : s2.cylinders) c2 += C.r > 0.05 && C.r <= 0.1;
        big.add(c1);
        small.add(c2);
    }
    // (rho + r)^2 r^-3 over the band, rho = 0.5
    double expect = 0.25 * (1 / 0.02 - 1 / 0.08) + 1.0 * (1 / 0.1 - 1 / 0.2) + std::log(2.0);
    double se = std::hypot(big.std_error(), small.std_error());
    EXPECT_NEAR(big.mean - small.mean, 0.0, 4 * se);
    EXPECT_NEAR(big.mean, expect, 4 * big.std_error());
}

TEST(InducedEllipses, CentreIntensityAndTailFixedRadius) {
    Rng rng(104, 0);
    double lo[2] = {0, 0}, hi[2] = {1, 1};
    const double lambda = 5.0, tv = xi_tv(4, 2, 1.0);
    const double taus[3] = {0.5, 2.0, 4.0};
    Accumulator all, tail[3];
    std::vector<double> xs;
    for (int rep = 0; rep < 20000; ++rep) {
        auto s = induced_ellipse_process(4, 2, sp(lo, 2), sp(hi, 2), RadiusMode::fixed(1.0), lambda, rng);
        int n = 0, t[3] = {0, 0, 0};
        for (const auto& E : s.ellipses) {
            ASSERT_TRUE(meets_rect(E, lo, hi));
            if (!center_in(E, lo, hi)) continue;
            ++n;
            xs.push_back(E.center[0]);
            for (int j = 0; j < 3; ++j) t[j] += 2 * E.major_len >= taus[j];
        }
        all.add(n);
        for (int j = 0; j < 3; ++j) tail[j].add(t[j]);
    }
    EXPECT_NEAR(all.mean, lambda * tv, 4 * all.std_error());
    for (int j = 0; j < 3; ++j)
        EXPECT_NEAR(tail[j].mean, lambda * tv * shape_tail_prob(4, 2, taus[j]), 4 * tail[j].std_error())
            << "tau=" << taus[j];
    EXPECT_GT(ks_pvalue(xs, [](double x) { return x; }), 1e-3);
}

TEST(InducedEllipses, FractalCentreIntensity) {
    Rng rng(105, 0);
    double lo[2] = {0, 0}, hi[2] = {0.5, 0.5};
    Accumulator all;
    for (int rep = 0; rep < 10000; ++rep) {
        auto s = induced_ellipse_process(4, 2, sp(lo, 2), sp(hi, 2), RadiusMode::truncated(2), 1.0, rng);
        EXPECT_EQ(s.r_min, 0.25);
        int n = 0;
        for (const auto& E : s.ellipses) n += center_in(E, lo, hi);
        all.add(n);
    }
    // lambda tv int r^{d-k-1} r^{-d} dr over [2^-n, 1]
    EXPECT_NEAR(all.mean, 0.25 * xi_tv(4, 2, 1.0) * 15.0 / 2, 4 * all.std_error());
}

TEST(InducedEllipses, SourcesMatch) {
    Rng rng(106, 0);
    double lo[2] = {-0.3, 0}, hi[2] = {0.3, 0.2};
    std::vector<Cylinder> src;
    auto s = induced_ellipse_process(5, 2, sp(lo, 2), sp(hi, 2), RadiusMode::truncated(3), 3.0, rng, &src);
    ASSERT_EQ(src.size(), s.ellipses.size());
    ASSERT_GT(src.size(), 0u);
    for (size_t i = 0; i < src.size(); ++i) {
        auto E = cylinder_subspace_ellipse(src[i], 2);
        ASSERT_TRUE(E);
        EXPECT_EQ(E->center, s.ellipses[i].center);
        EXPECT_EQ(E->major_len, s.ellipses[i].major_len);
    }
}

// Restricting a bigger patch to the small one reproduces the small-patch process.
TEST(InducedEllipses, WindowConsistency) {
    double lo[2] = {0, 0}, hi[2] = {1, 1}, blo[2] = {-1, -1}, bhi[2] = {2, 2};
    Rng r1(107, 0), r2(107, 1);
    std::vector<double> n_small, n_big, d_small, d_big;
    for (int rep = 0; rep < 4000; ++rep) {
        auto s = induced_ellipse_process(4, 2, sp(lo, 2), sp(hi, 2), RadiusMode::truncated(1), 1.0, r1);
        n_small.push_back(s.size());
        for (const auto& E : s.ellipses) d_small.push_back(E.major_len);
        auto b = induced_ellipse_process(4, 2, sp(blo, 2), sp(bhi, 2), RadiusMode::truncated(1), 1.0, r2);
        int n = 0;
        for (const auto& E : b.ellipses)
            if (meets_rect(E, lo, hi)) {
                ++n;
                d_big.push_back(E.major_len);
            }
        n_big.push_back(n);
    }
    auto a = summarize(n_small), b = summarize(n_big);
    EXPECT_NEAR(a.mean - b.mean, 0.0, 4 * std::hypot(a.std_error(), b.std_error()));
    EXPECT_GT(ks2_pvalue(d_small, d_big), 1e-3);
}

TEST(InducedEllipses, Deterministic) {
    double lo[2] = {0, 0}, hi[2] = {1, 1};
    Rng a(108, 5), b(108, 5);
    auto s1 = induced_ellipse_process(4, 2, sp(lo, 2), sp(hi, 2), RadiusMode::truncated(2), 2.0, a);
    auto s2 = induced_ellipse_process(4, 2, sp(lo, 2), sp(hi, 2), RadiusMode::truncated(2), 2.0, b);
    ASSERT_EQ(s1.size(), s2.size());
    for (size_t i = 0; i < s1.size(); ++i) {
        EXPECT_EQ(s1.ellipses[i].center, s2.ellipses[i].center);
        EXPECT_EQ(s1.ellipses[i].major_dir, s2.ellipses[i].major_dir);
    }
    EXPECT_EQ(s1.seed, 108u);
    EXPECT_EQ(s1.stream_id, 5u);
    Rng c(1, 0);
    EXPECT_EQ(induced_ellipse_process(4, 2, sp(lo, 2), sp(hi, 2), RadiusMode::fixed(1), 0.0, c).size(), 0u);
    EXPECT_THROW(induced_ellipse_process(4, 4, sp(lo, 2), sp(hi, 2), RadiusMode::fixed(1), 1.0, c),
                 std::invalid_argument);
}

TEST(InducedBalls, CoverEllipses) {
    Rng rng(109, 0);
    double lo[2] = {0, 0}, hi[2] = {1, 1};
    auto s = induced_ellipse_process(4, 2, sp(lo, 2), sp(hi, 2), RadiusMode::truncated(2), 3.0, rng);
    auto balls = induced_ball_process(s);
    ASSERT_EQ(balls.kind, ItemKind::balls);
    ASSERT_EQ(balls.balls.size(), s.ellipses.size());
    for (size_t i = 0; i < s.ellipses.size(); ++i) {
        const auto& E = s.ellipses[i];
        const auto& B = balls.balls[i];
        Vec h = ellipse_half_extents(E);
        for (int j = 0; j < 200; ++j) {
            double y[2] = {E.center[0] + uniform(rng, -h[0], h[0]), E.center[1] + uniform(rng, -h[1], h[1])};
            if (!ellipse_contains(E, sp(y, 2))) continue;
            EXPECT_LE(std::hypot(y[0] - B.center[0], y[1] - B.center[1]), B.R * (1 + 1e-12));
        }
    }
    EXPECT_THROW(induced_ball_process(balls), std::invalid_argument);
}

TEST(RegularBalls, CountAndRadiusLaw) {
    Rng rng(110, 0);
    double lo[2] = {0, 0}, hi[2] = {1, 2};
    const double Rmin = 0.2, lambda = 2.0;
    Accumulator n;
    std::vector<double> radii;
    for (int rep = 0; rep < 4000; ++rep) {
        auto s = regular_ball_process(2, lambda, sp(lo, 2), sp(hi, 2), Rmin, rng);
        int c = 0;
        for (const auto& b : s.balls) {
            ASSERT_GT(b.R, Rmin);
            ASSERT_LE(b.R, 2.0);
            double dx = std::max({lo[0] - b.center[0], 0.0, b.center[0] - hi[0]});
            double dy = std::max({lo[1] - b.center[1], 0.0, b.center[1] - hi[1]});
            ASSERT_LE(std::hypot(dx, dy), b.R * (1 + 1e-12));
            if (dx == 0 && dy == 0) {
                ++c;
                radii.push_back(b.R);
            }
        }
        n.add(c);
    }
    double top = 1 / (Rmin * Rmin), bot = 0.25;
    EXPECT_NEAR(n.mean, lambda * 2.0 * (top - bot) / 2, 4 * n.std_error());
    auto cdf = [&](double R) { return (top - 1 / (R * R)) / (top - bot); };
    EXPECT_GT(ks_pvalue(radii, cdf), 1e-3);
    EXPECT_EQ(regular_ball_process(2, lambda, sp(lo, 2), sp(hi, 2), 2.0, rng).size(), 0u);
    EXPECT_THROW(regular_ball_process(2, lambda, sp(lo, 2), sp(hi, 2), 0.0, rng), std::invalid_argument);
}

TEST(Shape, MeanDiameterAndTailChi2) {
    Rng rng(111, 0);
    Accumulator D;
    std::vector<double> diam, tpow;
    for (int i = 0; i < 40000; ++i) {
        auto s = sample_shape(4, 2, 1.0, rng);
        ASSERT_LE(s.shape.minor_len, s.shape.major_len);
        ASSERT_EQ(s.shape.center[0], 0.0);
        D.add(s.diameter);
        diam.push_back(s.diameter);
        tpow.push_back(s.t);  // m' = 1: t itself is uniform
    }
    EXPECT_NEAR(D.mean, diam_moment(4, 2, 1, 1.0).value, 4 * D.std_error());
    EXPECT_GT(ks_pvalue(tpow, [](double x) { return x; }), 1e-3);
    std::vector<double> edges = {0, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0, 1e300};
    std::vector<double> obs(edges.size() - 1, 0.0), exp(edges.size() - 1);
    for (double x : diam)
        for (size_t b = 0; b + 1 < edges.size(); ++b)
            if (x >= edges[b] && x < edges[b + 1]) obs[b] += 1;
    for (size_t b = 0; b + 1 < edges.size(); ++b) {
        double p0 = edges[b] == 0 ? 1.0 : shape_tail_prob(4, 2, edges[b]);
        double p1 = edges[b + 1] > 1e299 ? 0.0 : shape_tail_prob(4, 2, edges[b + 1]);
        exp[b] = diam.size() * (p0 - p1);
    }
    EXPECT_GT(chi2_sf(pearson_chi2(obs, exp), obs.size() - 1), 1e-3);
}

TEST(Shape, GeneratingLineReproducesShape) {
    Rng rng(112, 0);
    for (int d : {4, 5, 7})
        for (int i = 0; i < 200; ++i) {
            auto s = sample_shape(d, 2, 0.7, rng);
            for (int j = 0; j < 2; ++j) ASSERT_EQ(s.line.p[j], 0.0);
            auto E = cylinder_subspace_ellipse({s.line, 0.7}, 2);
            ASSERT_TRUE(E);
            EXPECT_NEAR(E->major_len, s.shape.major_len, 1e-12);
            EXPECT_NEAR(E->minor_len, s.shape.minor_len, 1e-12);
            EXPECT_NEAR(s.diameter, 2 * s.shape.major_len, 1e-15);
            EXPECT_LE(s.t, 1.0);
        }
}

// Shape law from sample_shape against the diameters of an actual induced process.
TEST(Shape, MatchesInducedProcess) {
    Rng rng(113, 0), r2(113, 1);
    double lo[2] = {0, 0}, hi[2] = {1, 1};
    std::vector<double> a, b;
    while (a.size() < 5000) {
        auto s = induced_ellipse_process(5, 2, sp(lo, 2), sp(hi, 2), RadiusMode::fixed(1.0), 10.0, rng);
        for (const auto& E : s.ellipses)
            if (center_in(E, lo, hi)) a.push_back(2 * E.major_len);
    }
    for (int i = 0; i < 5000; ++i) b.push_back(sample_shape(5, 2, 1.0, r2).diameter);
    EXPECT_GT(ks2_pvalue(a, b), 1e-3);
}

TEST(BetaTableTest, InterpolatesShapeBeta) {
    const auto& t = BetaTable::get(4, 2);
    EXPECT_EQ(&t, &BetaTable::get(4, 2));
    EXPECT_NEAR(t.beta0(), shape_beta(4, 2, 0.0), 1e-12);
    Rng rng(114, 0);
    for (auto [d, k] : {std::pair{4, 2}, {5, 2}, {6, 3}, {8, 4}}) {
        const auto& tb = BetaTable::get(d, k);
        for (int i = 0; i < 40; ++i) {
            // half the draws near the singular point R = 1
            double R = i % 2 ? std::exp(uniform(rng, std::log(1e-5), std::log(1e5)))
                             : 1.0 + uniform(rng, -0.05, 0.05);
            double ref = shape_beta(d, k, R);
            EXPECT_NEAR(tb(R), ref, 1e-6 * ref) << "d=" << d << " k=" << k << " R=" << R;
        }
    }
    EXPECT_THROW(BetaTable(5, 3), std::invalid_argument);
}

TEST(Coupling, StructureAndMarks) {
    Rng rng(115, 0);
    double lo[2] = {0, 0}, hi[2] = {1, 1};
    const int d = 4, k = 2;
    const double tv = xi_tv(d, k, 1.0);
    const auto& beta = BetaTable::get(d, k);
    const double r_min = 0.25;
    std::vector<double> u;
    for (int rep = 0; rep < 300; ++rep) {
        auto e = induced_ellipse_process(d, k, sp(lo, 2), sp(hi, 2), RadiusMode::truncated(2), 1.0, rng);
        auto balls = induced_ball_process(e);
        auto cp = thinning_coupling(balls, d, k, r_min, 0.2, rng);
        ASSERT_NEAR(cp.mark_cap, tv / 4 * beta.beta0(), 1e-14);
        ASSERT_EQ(cp.thinned.balls.size(), cp.thinned_marks.size());
        ASSERT_EQ(cp.dominating.balls.size(), cp.dominating_marks.size());
        ASSERT_GE(cp.dominating.balls.size(), cp.thinned.balls.size());
        size_t nt = cp.thinned.balls.size();
        for (size_t i = 0; i < nt; ++i) {
            const auto& b = cp.thinned.balls[i];
            ASSERT_LE(b.R, 2.0);
            ASSERT_EQ(b.center, cp.dominating.balls[i].center);
            double lim = tv / 4 * (beta(b.R) - beta(b.R / r_min));
            ASSERT_LE(cp.thinned_marks[i], lim);
            u.push_back(cp.thinned_marks[i] / lim);
        }
        for (size_t i = nt; i < cp.dominating.balls.size(); ++i) {
            const auto& b = cp.dominating.balls[i];
            double lim = tv / 4 * (beta(b.R) - beta(b.R / r_min));
            ASSERT_GT(cp.dominating_marks[i], lim);
            ASSERT_LE(cp.dominating_marks[i], cp.mark_cap);
        }
        size_t big = 0;
        for (const auto& b : balls.balls) big += b.R > 2.0;
        ASSERT_EQ(nt + big, balls.balls.size());
    }
    EXPECT_GT(ks_pvalue(u, [](double x) { return x; }), 1e-3);
    Rng r0(1, 0);
    ProcessSample wrong;
    wrong.kind = ItemKind::ellipses;
    EXPECT_THROW(thinning_coupling(wrong, 4, 2, 0.25, 0.2, r0), std::invalid_argument);
}

// Large sections from the specialised sampler against filtering a full truncated process.
TEST(LargeSections, MatchesBruteForce) {
    double lo[2] = {-0.5, -0.5}, hi[2] = {0.5, 0.5}, o[3] = {0, 0, 0};
    const double r_min = 1.0 / 16, min_diam = 0.5;
    Rng r1(116, 0), r2(116, 1);
    Accumulator na, nb;
    std::vector<double> ra, rb, da, db;
    for (int rep = 0; rep < 3000; ++rep) {
        auto s = sample_large_sections(1.0, sp(lo, 2), sp(hi, 2), r_min, min_diam, r1);
        na.add(s.size());
        for (const auto& C : s.cylinders) {
            auto E = cylinder_subspace_ellipse(C, 2);
            ASSERT_TRUE(E);
            ASSERT_TRUE(center_in(*E, lo, hi));
            ASSERT_GE(2 * E->major_len, min_diam * (1 - 1e-12));
            ra.push_back(C.r);
            da.push_back(E->major_len);
        }
        auto f = sample_fractal_cylinders_rmin(3, sp(o, 3), std::sqrt(0.5), r_min, 1.0, r2);
        int n = 0;
        for (const auto& C : f.cylinders) {
            auto E = cylinder_subspace_ellipse(C, 2);
            if (!E || !center_in(*E, lo, hi) || 2 * E->major_len < min_diam) continue;
            ++n;
            rb.push_back(C.r);
            db.push_back(E->major_len);
        }
        nb.add(n);
    }
    EXPECT_NEAR(na.mean, large_sections_mass(1.0, sp(lo, 2), sp(hi, 2), r_min, min_diam),
                4 * na.std_error());
    EXPECT_NEAR(nb.mean, large_sections_mass(1.0, sp(lo, 2), sp(hi, 2), r_min, min_diam),
                4 * nb.std_error());
    EXPECT_GT(ks2_pvalue(ra, rb), 1e-3);
    EXPECT_GT(ks2_pvalue(da, db), 1e-3);
    Rng r0(1, 0);
    EXPECT_THROW(sample_large_sections(1.0, sp(lo, 2), sp(hi, 2), 1.5, 0.5, r0), std::invalid_argument);
}
