#include "fpc/measures.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fpc/rng.hpp"

namespace fpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double binom(int n, int i) {
    return boost::math::binomial_coefficient<double>(static_cast<unsigned>(n), static_cast<unsigned>(i));
}

template <class F>
double gk(F f, double lo, double hi, int depth) {
    if (!(hi > lo)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, depth, 1e-13);
}

using GK61 = boost::math::quadrature::gauss_kronrod<double, 61>;

// bisection against a fixed absolute tolerance per piece (the Kronrod error estimate has a
// roundoff floor that does not shrink with the width, so halving the tolerance can stall)
template <class F>
double gk_abs(F& f, double lo, double hi, double tol, int depth) {
    if (!(hi > lo)) return 0.0;
    double err = 0.0;
    double v = GK61::integrate(f, lo, hi, 0, 0.0, &err);
    if (err <= tol || depth <= 0) return v;
    double mid = 0.5 * (lo + hi);
    return gk_abs(f, lo, mid, tol, depth - 1) + gk_abs(f, mid, hi, tol, depth - 1);
}

// shape-law radial variable: q = sqrt(1 - s^2), s^{m'} uniform; written with s = sin(phi)
// so q = cos(phi).  Returns E[g(q)] split at the kink q = qk.
template <class G>
double radial_expect(int mp, G g, double qk, int depth) {
    if (mp == 0) return g(1.0);
    auto f = [&](double ph) {
        return mp * std::pow(std::sin(ph), mp - 1) * std::cos(ph) * g(std::cos(ph));
    };
    // one tolerance for the whole range; a relative one on a tiny piece next to the kink
    // would chase roundoff
    double L1 = 0.0;
    GK61::integrate(f, 0.0, M_PI / 2, 0, 0.0, nullptr, &L1);
    double tol = 1e-13 * std::max(L1, 1e-300);
    if (qk > 0.0 && qk < 1.0) {
        double ph = std::acos(qk);
        return gk_abs(f, 0.0, ph, tol, depth) + gk_abs(f, ph, M_PI / 2, tol, depth);
    }
    return gk_abs(f, 0.0, M_PI / 2, tol, depth);
}

void check_dk(int d, int k) {
    if (d < 3 || k < 2 || k > d - 1) throw std::invalid_argument("need d >= 3 and 2 <= k <= d-1");
}

}  // namespace

double SphereTable::operator()(int m) {
    if (m < 0) throw std::invalid_argument("psi needs m >= 0");
    std::lock_guard lock(mu_);
    auto it = cache_.find(m);
    if (it != cache_.end()) return it->second;
    double h = 0.5 * (m + 1);
    double v = std::exp(std::log(2.0) + h * std::log(M_PI) - std::lgamma(h));
    cache_.emplace(m, v);
    return v;
}

double psi(int m) {
    static SphereTable table;
    return table(m);
}

double upsilon(int d) { return 4.0 * M_PI / (psi(d) * psi(d - 1)); }

double nu_ball(int d, double r) { return std::pow(r, d - 1); }

double unit_ball_volume(int d) { return psi(d - 1) / d; }

McEstimate nu_two_balls_mc(int d, double distance, std::int64_t n_samples, std::uint64_t seed) {
    if (distance < 4.0) throw std::invalid_argument("two-ball estimate needs distance >= 4");
    if (n_samples < 1) throw std::invalid_argument("n_samples must be positive");
    Rng rng(seed, 0);
    std::int64_t hits = 0;
    Vec u{}, y{};
    for (std::int64_t s = 0; s < n_samples; ++s) {
        // direction uniform on the sphere
        double nu = 0.0;
        for (int i = 0; i < d; ++i) {
            u[i] = normal(rng);
            nu += u[i] * u[i];
        }
        nu = std::sqrt(nu);
        for (int i = 0; i < d; ++i) u[i] /= nu;
        // offset uniform in the unit (d-1)-ball of u-perp
        double yu = 0.0, gy = 0.0;
        for (int i = 0; i < d; ++i) {
            y[i] = normal(rng);
            yu += y[i] * u[i];
        }
        for (int i = 0; i < d; ++i) {
            y[i] -= yu * u[i];
            gy += y[i] * y[i];
        }
        double rad = std::pow(uniform01(rng), 1.0 / (d - 1)) / std::sqrt(gy);
        for (int i = 0; i < d; ++i) y[i] *= rad;
        double w2 = 0.0, wu = 0.0;
        for (int i = 0; i < d; ++i) {
            double w = (i == 0 ? distance : 0.0) - y[i];
            w2 += w * w;
            wu += w * u[i];
        }
        if (w2 - wu * wu < 1.0) ++hits;
    }
    double p = static_cast<double>(hits) / n_samples;
    return {p, std::sqrt(p * (1.0 - p) / n_samples)};
}

double c2_estimate(int d, std::int64_t n_samples, std::uint64_t seed) {
    double best = 0.0;
    int salt = 0;
    for (double dist : {4.0, 8.0, 16.0, 32.0}) {
        auto e = nu_two_balls_mc(d, dist, n_samples, mix_seed(seed, salt++));
        best = std::max(best, e.estimate * std::pow(dist, d - 1));
    }
    return best;
}

Constants constants(int d, double c2_est) {
    Constants c;
    for (int i = 1; i <= d - 1; ++i) {
        c.C1 += std::pow(d, 0.5 * i) / i * binom(d - 1, i);
        if (i % 2 == 1) c.C3 += binom(d - 1, i) / i;
    }
    c.C3 += 0.5 * std::log(static_cast<double>(d));
    c.C2 = c2_est / ((d - 1) * std::pow(4.0, d - 1)) + std::log(4.0);
    return c;
}

double vacancy_prob(double lambda, int n) { return std::exp2(-lambda * n); }

double xi_tv(int d, int k, double r) {
    check_dk(d, k);
    if (r < 0.0) throw std::invalid_argument("r must be non-negative");
    return std::pow(r, d - k - 1) * psi(d - k - 1) / psi(d - 1);
}

Moment diam_moment(int d, int k, int n, double r) {
    check_dk(d, k);
    if (n < 1 || !(r > 0.0)) throw std::invalid_argument("need n >= 1 and r > 0");
    if (n >= d - k + 1) return {kInf, true};
    double v = std::pow(2.0 * r, n) * 2.0 * M_PI * psi(d + n - k) * psi(d - n) /
               (psi(d) * psi(n + 1) * psi(d - n - k));
    return {v, false};
}

double idk_closed_form(int d, int k) { return 0.5 * psi(d - k - 1) * psi(d - k - 2); }

double idk_quadrature(int d, int k, int budget) {
    if (k < 2 || k > d - 3) throw std::invalid_argument("idk_quadrature needs 2 <= k <= d-3");
    const int m = d - k - 2;
    using boost::math::quadrature::tanh_sinh;
    tanh_sinh<double> inner(budget), outer(budget);
    // kappa = tan(u); c = <varphi, phi> = sin(alpha), folded to c >= 0
    auto J = [&](double calpha) {
        double c2 = calpha * calpha;
        auto f = [&](double u) {
            double tu = std::tan(u);
            if (!std::isfinite(tu)) return 0.0;
            return std::pow(tu, m) / std::pow(1.0 + c2 * tu * tu, 0.5 * (m + 1));
        };
        return inner.integrate(f, 0.0, M_PI / 2, 1e-14);
    };
    auto g = [&](double alpha) {
        double ca = std::cos(alpha);
        if (!(ca > 0.0)) return 0.0;
        return std::pow(ca, m - 1) * J(ca);
    };
    return 2.0 * psi(m) * psi(m - 1) * outer.integrate(g, 0.0, M_PI / 2, 1e-13);
}

TransformedLine to_transformed(const LineParam& L, int k, double r) {
    const int d = L.d;
    check_dk(d, k);
    TransformedLine T;
    auto unit = [](CSpan v, Vec& out) {
        double n = std::sqrt(norm2(v));
        if (n > 0.0)
            for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
        else if (!v.empty())
            out[0] = 1.0;
        return n;
    };
    T.rho = unit(L.a_low(k), T.theta);
    T.kappa = unit(L.a_up(k), T.phi);
    T.gamma = unit(L.p_up(k), T.varphi);
    const int mp = d - k - 1;
    double c = dot({T.varphi.data(), static_cast<size_t>(mp)}, {T.phi.data(), static_cast<size_t>(mp)});
    double k2 = T.kappa * T.kappa;
    T.t = T.gamma / r * std::sqrt((1.0 + (1.0 - c * c) * k2) / (1.0 + k2));
    return T;
}

LineParam from_transformed(const TransformedLine& T, int d, int k, double r) {
    check_dk(d, k);
    const int mp = d - k - 1;
    double c = dot({T.varphi.data(), static_cast<size_t>(mp)}, {T.phi.data(), static_cast<size_t>(mp)});
    double k2 = T.kappa * T.kappa;
    double gamma = T.t * r * std::sqrt((1.0 + k2) / (1.0 + (1.0 - c * c) * k2));
    LineParam L;
    L.d = d;
    for (int i = 0; i < k; ++i) L.a[i] = T.rho * T.theta[i];
    for (int i = 0; i < mp; ++i) {
        L.a[k + i] = T.kappa * T.phi[i];
        L.p[k + i] = gamma * T.varphi[i];
    }
    L.a[d - 1] = 1.0;
    return L;
}

// D = 2 q / b with b^2 ~ Beta(m'/2 + 1, k/2) independent of q
double shape_tail_prob(int d, int k, double tau, int depth) {
    check_dk(d, k);
    if (!(tau > 0.0)) return 1.0;
    const int mp = d - k - 1;
    const double a = 0.5 * mp + 1.0, b = 0.5 * k;
    auto g = [&](double q) {
        double x = std::min(1.0, 4.0 * q * q / (tau * tau));
        return x >= 1.0 ? 1.0 : boost::math::ibeta(a, b, x);
    };
    return radial_expect(mp, g, 0.5 * tau, depth);
}

double shape_beta(int d, int k, double R, int depth) {
    check_dk(d, k);
    const int mp = d - k - 1;
    const double a = 0.5 * mp + 1.0, b = 0.5 * k, a1 = a - 0.5 * k;
    if (!(a1 > 0.0)) return kInf;
    double scale = std::pow(2.0, k) * std::exp(std::lgamma(a1) - std::lgamma(a1 + b) -
                                               std::lgamma(a) + std::lgamma(a + b));
    auto g = [&](double q) {
        double x = R > 0.0 ? std::min(1.0, q * q / (R * R)) : 1.0;
        double I = x >= 1.0 ? 1.0 : boost::math::ibeta(a1, b, x);
        return std::pow(q, k) * I;
    };
    return scale * radial_expect(mp, g, R, depth);
}

double shape_moment_tail(int d, int k, int m, double T) {
    check_dk(d, k);
    if (m < 1 || !(T > 0.0)) throw std::invalid_argument("need m >= 1 and T > 0");
    if (m >= d - k + 1) return kInf;
    // E[D^m; D > T] = T^m P(D > T) + int_T^inf m x^{m-1} P(D > x) dx, with x = T/u
    const double Tm = std::pow(T, m);
    auto f = [&](double u) {
        if (u <= 0.0) return 0.0;
        return m * Tm * std::pow(u, -m - 1) * shape_tail_prob(d, k, T / u);
    };
    auto piece = [&](double lo, double hi) { return GK61::integrate(f, lo, hi, 15, 1e-10); };
    // P(D > x) has a kink at x = 2
    double tail = T < 2.0 ? piece(0.0, 0.5 * T) + piece(0.5 * T, 1.0) : piece(0.0, 1.0);
    return Tm * shape_tail_prob(d, k, T) + tail;
}

double xi_fixed_tail(int d, int k, double tau) { return xi_tv(d, k, 1.0) * shape_tail_prob(d, k, tau); }

double xi_fractal_tail(int d, int k, double tau, int quad_budget) {
    if (d < 4 || k < 2 || 2 * k > d) throw std::invalid_argument("need d >= 4 and 2 <= k <= d/2");
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    double tv = xi_tv(d, k, 1.0);
    return tv * (shape_beta(d, k, 0.5 * tau, quad_budget) / (k * std::pow(tau, k)) -
                 shape_tail_prob(d, k, tau, quad_budget) / k);
}

McEstimate xi_fractal_tail_mc(int d, int k, double tau, std::int64_t n_samples, std::uint64_t seed) {
    if (d < 4 || k < 2 || 2 * k > d) throw std::invalid_argument("need d >= 4 and 2 <= k <= d/2");
    if (!(tau > 0.0) || n_samples < 2) throw std::invalid_argument("need tau > 0 and n_samples >= 2");
    const int mp = d - k - 1;
    const double a = 0.5 * mp + 1.0, b = 0.5 * k;
    Rng rng(seed, 0);
    double sum = 0.0, sum2 = 0.0;
    for (std::int64_t i = 0; i < n_samples; ++i) {
        double r = uniform01(rng);
        double s = std::pow(uniform01(rng), 1.0 / mp);
        double q = std::sqrt(1.0 - s * s);
        // P(r D >= tau | q), D = 2q/b; the weight stays bounded because k <= d/2
        double x = std::min(1.0, 4.0 * q * q * r * r / (tau * tau));
        double w = (x >= 1.0 ? 1.0 : boost::math::ibeta(a, b, x)) * std::pow(r, -k - 1);
        sum += w;
        sum2 += w * w;
    }
    double n = static_cast<double>(n_samples), m = sum / n;
    double var = (sum2 / n - m * m) * n / (n - 1);
    double tv = xi_tv(d, k, 1.0);
    return {tv * m, tv * std::sqrt(std::max(var, 0.0) / n)};
}

McEstimate beta_ratio_mc(int d, int k, double R, std::int64_t n_samples, std::uint64_t seed) {
    check_dk(d, k);
    if (2 * k > d) throw std::invalid_argument("beta_0 is infinite for k > d/2");
    if (n_samples < 2) throw std::invalid_argument("need n_samples >= 2");
    const int mp = d - k - 1;
    // size-biased law: u = b^2 ~ Beta(a - k/2, k/2) absorbs the b^{-k} weight
    const double a1 = 0.5 * mp + 1.0 - 0.5 * k, bb = 0.5 * k;
    auto draw_q = [&](Rng& rng) {
        if (mp == 0) return 1.0;
        double s = std::pow(uniform01(rng), 1.0 / mp);
        return std::sqrt(1.0 - s * s);
    };
    double n = static_cast<double>(n_samples);
    Rng r1(seed, 0), r2(seed, 1);
    double s1 = 0.0, q1 = 0.0, s2 = 0.0, q2 = 0.0;
    for (std::int64_t i = 0; i < n_samples; ++i) {
        double w = std::pow(draw_q(r1), k);
        s1 += w;
        q1 += w * w;
    }
    for (std::int64_t i = 0; i < n_samples; ++i) {
        double q = draw_q(r2);
        double u = beta_variate(r2, a1, bb);
        double w = u * R * R <= q * q ? std::pow(q, k) : 0.0;
        s2 += w;
        q2 += w * w;
    }
    double m1 = s1 / n, m2 = s2 / n;
    double v1 = std::max(0.0, q1 / n - m1 * m1) / (n - 1), v2 = std::max(0.0, q2 / n - m2 * m2) / (n - 1);
    double ratio = m2 / m1;
    return {ratio, std::sqrt(v2 / (m1 * m1) + ratio * ratio * v1 / (m1 * m1))};
}

double survival_lower_bound(int d, int k, double lambda, double c2_est) {
    if (lambda < 0.0 || lambda >= k) throw std::invalid_argument("need 0 <= lambda < k");
    double C2 = constants(d, c2_est).C2;
    return (k - lambda) * std::exp(-C2 * lambda) / (psi(k - 1) + k - lambda);
}

double energy_upper_bound(int d, int k, double lambda, double r_exp, double c2_est) {
    if (!(r_exp > 0.0) || r_exp >= k - lambda) throw std::invalid_argument("need 0 < r < k - lambda");
    double C2 = constants(d, c2_est).C2;
    return std::exp(lambda * C2) * (psi(k - 1) / (k - r_exp - lambda) + 1.0);
}

}  // namespace fpc
