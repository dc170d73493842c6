#include "fpc/stats.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace fpc {

void Accumulator::add(double x) {
    ++n;
    double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
}

void Accumulator::merge(const Accumulator& o) {
    if (o.n == 0) return;
    if (n == 0) {
        *this = o;
        return;
    }
    auto nt = n + o.n;
    double delta = o.mean - mean;
    mean += delta * o.n / nt;
    m2 += o.m2 + delta * delta * static_cast<double>(n) * o.n / nt;
    n = nt;
}

double Accumulator::variance() const { return n > 1 ? m2 / (n - 1) : 0.0; }

double Accumulator::std_error() const { return n > 0 ? std::sqrt(variance() / n) : 0.0; }

Accumulator summarize(std::span<const double> xs) {
    Accumulator a;
    for (double x : xs) a.add(x);
    return a;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FPC_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    threads = std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(err_mu);
                    if (!err) err = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("linear_fit needs >= 2 matching points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = std::max(0.0, syy - f.slope * sxy);
    f.r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
    f.slope_se = n > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
    return f;
}

double chi2_sf(double stat, double dof) { return boost::math::gamma_q(0.5 * dof, 0.5 * stat); }

double pearson_chi2(std::span<const double> observed, std::span<const double> expected) {
    double s = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double e = expected[i];
        s += (observed[i] - e) * (observed[i] - e) / e;
    }
    return s;
}

namespace {

double kolmogorov_q(double lam) {
    if (lam < 1e-3) return 1.0;
    double s = 0.0, sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        double term = sign * std::exp(-2.0 * j * j * lam * lam);
        s += term;
        if (std::abs(term) < 1e-12 * std::abs(s)) break;
        sign = -sign;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

}  // namespace

double ks_pvalue(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double D = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double F = cdf(sample[i]);
        D = std::max({D, (i + 1) / n - F, F - i / n});
    }
    double sn = std::sqrt(n);
    return kolmogorov_q((sn + 0.12 + 0.11 / sn) * D);
}

double ks2_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double D = 0.0;
    while (i < a.size() && j < b.size()) {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        D = std::max(D, std::abs(i / na - j / nb));
    }
    double ne = std::sqrt(na * nb / (na + nb));
    return kolmogorov_q((ne + 0.12 + 0.11 / ne) * D);
}

}  // namespace fpc
