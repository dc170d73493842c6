#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fpc {

struct Accumulator {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const Accumulator& o);
    double variance() const;
    double std_error() const;
};

// mean and SE over a vector of replica values (summed in index order)
Accumulator summarize(std::span<const double> xs);

// thread count: explicit > 0, else FPC_THREADS, else hardware concurrency
int resolve_threads(int requested);

// Runs body(i) for i in [0, n) over `threads` workers.  Each body writes only
// its own slot, so results never depend on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double r2 = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// upper tail of the chi-square distribution
double chi2_sf(double stat, double dof);
// Pearson statistic for observed counts against expected counts
double pearson_chi2(std::span<const double> observed, std::span<const double> expected);
// two-sided one-sample KS p-value against a continuous CDF (asymptotic series)
double ks_pvalue(std::vector<double> sample, const std::function<double(double)>& cdf);
// two-sample KS p-value
double ks2_pvalue(std::vector<double> a, std::vector<double> b);

}  // namespace fpc
