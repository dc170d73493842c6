#pragma once

#include <cstdint>
#include <map>
#include <mutex>

#include "fpc/geom.hpp"

namespace fpc {

// memoised psi_m = surface area of the unit m-sphere
class SphereTable {
public:
    double operator()(int m);

private:
    std::mutex mu_;
    std::map<int, double> cache_;
};

double psi(int m);
double upsilon(int d);
double nu_ball(int d, double r);
double unit_ball_volume(int d);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Fraction of lines hitting B(o,1) (normalised, mass 1) that also hit B(distance e_1, 1).
McEstimate nu_two_balls_mc(int d, double distance, std::int64_t n_samples, std::uint64_t seed);
// sup of estimate * distance^{d-1} over distances {4, 8, 16, 32}
double c2_estimate(int d, std::int64_t n_samples, std::uint64_t seed);

struct Constants {
    double C1 = 0.0;
    double C2 = 0.0;
    double C3 = 0.0;
};
Constants constants(int d, double c2_est);

double vacancy_prob(double lambda, int n);
double xi_tv(int d, int k, double r);

struct Moment {
    double value = 0.0;
    bool infinite = false;
};
Moment diam_moment(int d, int k, int n, double r);

double idk_closed_form(int d, int k);
// budget = tanh-sinh refinement levels
double idk_quadrature(int d, int k, int budget = 12);

// Spherical coordinates of (a_(k), a^(k), p^(k)) plus the rescaled offset t.
struct TransformedLine {
    double rho = 0.0;
    Vec theta{};
    double kappa = 0.0;
    Vec phi{};
    double gamma = 0.0;
    Vec varphi{};
    double t = 0.0;
};
TransformedLine to_transformed(const LineParam& L, int k, double r);
// p_(k) is not encoded; it is set to zero
LineParam from_transformed(const TransformedLine& T, int d, int k, double r);

// Normalised shape law (r = 1).  D = diam.
double shape_tail_prob(int d, int k, double tau, int depth = 20);  // P(D >= tau)
double shape_beta(int d, int k, double R, int depth = 20);  // E[D^k; D >= 2R]; inf if k > d/2
double shape_moment_tail(int d, int k, int m, double T);  // E[D^m; D > T]; inf if m >= d-k+1

double xi_fixed_tail(int d, int k, double tau);  // xi_{k,1}(D >= tau)
double xi_fractal_tail(int d, int k, double tau, int quad_budget = 20);

// Monte Carlo for the fractal tail straight from its radial integral over r in (0,1]
McEstimate xi_fractal_tail_mc(int d, int k, double tau, std::int64_t n_samples, std::uint64_t seed);
// beta_R / beta_0 from two independent passes (denominator, then numerator)
McEstimate beta_ratio_mc(int d, int k, double R, std::int64_t n_samples, std::uint64_t seed);

double survival_lower_bound(int d, int k, double lambda, double c2_est);
double energy_upper_bound(int d, int k, double lambda, double r_exp, double c2_est);

}  // namespace fpc
