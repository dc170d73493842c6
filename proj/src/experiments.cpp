#include "fpc/experiments.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fpc/connectivity.hpp"
#include "fpc/fractal.hpp"
#include "fpc/measures.hpp"
#include "fpc/samplers.hpp"
#include "fpc/stats.hpp"

#ifndef FPC_COMMIT
#define FPC_COMMIT "unknown"
#endif

namespace fpc {

namespace {

using json = nlohmann::json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class PType { integer, number, int_list, num_list, int_pair, string };

struct PSpec {
    const char* key;
    PType type;
    json def;  // null: optional, absent unless given
};

json ilist(std::initializer_list<int> v) { return json(std::vector<int>(v)); }
json nlist(std::initializer_list<double> v) { return json(std::vector<double>(v)); }

const std::map<std::string, std::vector<PSpec>>& schemas() {
    static const std::map<std::string, std::vector<PSpec>> s = {
        {"vacancy",
         {{"d", PType::integer, 3},
          {"lambda", PType::num_list, nlist({0.5, 1.0, 2.0})},
          {"n", PType::int_list, ilist({1, 2, 3, 4, 5, 6})},
          {"replicas", PType::integer, 100000},
          {"mc_points", PType::integer, 200000}}},
        {"measures-selftest",
         {{"d", PType::int_list, ilist({2, 3, 4})},
          {"r", PType::num_list, nlist({0.25, 0.5, 1.0})},
          {"lambda", PType::number, 10.0},
          {"replicas", PType::integer, 10000},
          {"mc_points", PType::integer, 100000}}},
        {"ellipse-stats",
         {{"d", PType::integer, 4},
          {"k", PType::integer, 2},
          {"r", PType::num_list, nlist({1.0})},
          {"lambda", PType::number, M_PI},
          {"replicas", PType::integer, 10000},
          {"mc_points", PType::integer, 1000000}}},
        {"boxcount",
         {{"d", PType::integer, 3},
          {"k", PType::integer, 2},
          {"lambda", PType::num_list, nlist({0.5, 1.5})},
          {"n", PType::integer, 8},
          {"replicas", PType::integer, 200}}},
        {"dimension",
         {{"d", PType::integer, 3},
          {"k", PType::integer, 2},
          {"lambda", PType::num_list, nlist({0.5, 1.5})},
          {"n", PType::int_list, ilist({8})},
          {"fit_range", PType::int_pair, ilist({3, 8})},
          {"replicas", PType::integer, 200},
          {"mc_points", PType::integer, json()},
          {"r", PType::number, json()}}},
        {"lr1",
         {{"epsilon", PType::number, 0.1},
          {"r_min", PType::num_list, nlist({0.015625, 0.00390625, 0.0009765625, 0.000244140625})},
          {"lambda", PType::number, 100.0},
          {"replicas", PType::integer, 100000}}},
        {"coupling",
         {{"d", PType::integer, 4},
          {"k", PType::integer, 2},
          {"lambda", PType::number, 1.0},
          {"n", PType::integer, 4},
          {"replicas", PType::integer, 2000},
          {"r", PType::num_list, nlist({0.5, 1.0, 2.0})},
          {"mc_points", PType::integer, 1000000},
          {"delta", PType::number, json()}}},
        {"connectivity-trend",
         {{"d", PType::integer, 4},
          {"lambda", PType::number, 0.05},
          {"n", PType::int_list, ilist({3, 5, 7})},
          {"replicas", PType::integer, 2000},
          {"delta", PType::number, json()}}},
        {"sample-dump",
         {{"d", PType::integer, 3},
          {"k", PType::integer, 2},
          {"lambda", PType::number, 1.0},
          {"n", PType::integer, json()},
          {"r", PType::number, json()},
          {"kind", PType::string, "cylinders"}}},
    };
    return s;
}

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument(msg); }

bool integral(const json& v) {
    if (v.is_number_integer()) return true;
    if (!v.is_number_float()) return false;
    double x = v.get<double>();
    return std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15;
}

// normalises a parameter value to the schema type, or throws
json coerce(const std::string& exp, const PSpec& s, const json& v) {
    std::string where = "parameter '" + std::string(s.key) + "' of " + exp;
    switch (s.type) {
        case PType::integer:
            if (!integral(v)) bad(where + " must be an integer");
            return static_cast<std::int64_t>(v.get<double>());
        case PType::number:
            if (!v.is_number() || !std::isfinite(v.get<double>())) bad(where + " must be a finite number");
            return v.get<double>();
        case PType::int_list:
        case PType::num_list: {
            json arr = v.is_array() ? v : json::array({v});
            if (arr.empty()) bad(where + " must not be empty");
            json out = json::array();
            for (const auto& e : arr) {
                if (s.type == PType::int_list) {
                    if (!integral(e)) bad(where + " must hold integers");
                    out.push_back(static_cast<std::int64_t>(e.get<double>()));
                } else {
                    if (!e.is_number() || !std::isfinite(e.get<double>())) bad(where + " must hold numbers");
                    out.push_back(e.get<double>());
                }
            }
            return out;
        }
        case PType::int_pair:
            if (!v.is_array() || v.size() != 2 || !integral(v[0]) || !integral(v[1]))
                bad(where + " must be a pair [lo, hi] of integers");
            return json::array({static_cast<std::int64_t>(v[0].get<double>()),
                                static_cast<std::int64_t>(v[1].get<double>())});
        case PType::string:
            if (!v.is_string()) bad(where + " must be a string");
            return v;
    }
    return v;
}

struct P {
    const json& j;
    bool has(const char* k) const { return j.contains(k) && !j.at(k).is_null(); }
    std::int64_t i(const char* k) const { return j.at(k).get<std::int64_t>(); }
    int d(const char* k) const { return static_cast<int>(j.at(k).get<std::int64_t>()); }
    double x(const char* k) const { return j.at(k).get<double>(); }
    std::vector<double> xs(const char* k) const { return j.at(k).get<std::vector<double>>(); }
    std::vector<int> is(const char* k) const { return j.at(k).get<std::vector<int>>(); }
    std::string s(const char* k) const { return j.at(k).get<std::string>(); }
};

void need(bool ok, const std::string& msg) {
    if (!ok) bad(msg);
}

void check_ranges(const std::string& exp, const json& pj) {
    P p{pj};
    if (p.has("replicas")) need(p.i("replicas") >= 1, "replicas must be >= 1");
    if (p.has("mc_points")) need(p.i("mc_points") >= 2, "mc_points must be >= 2");
    if (pj.contains("d") && pj["d"].is_number()) need(p.i("d") >= 2 && p.i("d") <= kMaxDim, "d must lie in [2, 8]");
    if (p.has("k") && p.has("d") && pj["d"].is_number())
        need(p.i("k") >= 1 && p.i("k") <= p.i("d") - 1, "k must lie in [1, d-1]");
    if (p.has("lambda")) {
        if (pj["lambda"].is_array())
            for (double l : p.xs("lambda")) need(l >= 0.0, "lambda must be >= 0");
        else
            need(p.x("lambda") >= 0.0, "lambda must be >= 0");
    }
    if (p.has("n")) {
        if (pj["n"].is_array())
            for (int n : p.is("n")) need(n >= 0 && n <= 30, "n must lie in [0, 30]");
        else
            need(p.i("n") >= 0 && p.i("n") <= 30, "n must lie in [0, 30]");
    }
    if (p.has("delta")) need(p.x("delta") > 0.0, "delta must be positive");

    if (exp == "measures-selftest") {
        for (int d : p.is("d")) need(d >= 2 && d <= kMaxDim, "d must lie in [2, 8]");
        for (double r : p.xs("r")) need(r > 0.0 && r <= 1.0, "r must lie in (0, 1]");
    } else if (exp == "ellipse-stats") {
        need(p.i("d") >= 3 && p.i("k") >= 2, "ellipse-stats needs d >= 3 and k >= 2");
        for (double r : p.xs("r")) need(r > 0.0 && r <= 1.0, "r must lie in (0, 1]");
    } else if (exp == "boxcount") {
        need(p.i("n") >= 1, "boxcount needs n >= 1");
    } else if (exp == "dimension") {
        need(p.has("fit_range") || p.has("mc_points"), "dimension needs fit_range and/or mc_points");
        if (p.has("fit_range")) {
            auto fr = p.is("fit_range");
            auto ns = p.is("n");
            int nmax = *std::max_element(ns.begin(), ns.end());
            need(fr[0] >= 0 && fr[1] - fr[0] >= 2 && fr[1] <= nmax,
                 "fit_range must span >= 3 levels within [0, max n]");
        }
        if (p.has("r")) {
            need(p.has("mc_points"), "energy exponent r needs mc_points");
            for (double l : p.xs("lambda"))
                if (l < p.i("k"))
                    need(p.x("r") > 0.0 && p.x("r") < p.i("k") - l, "energy exponent r must lie in (0, k - lambda)");
        }
    } else if (exp == "lr1") {
        double e = p.x("epsilon");
        need(e > 0.0 && e <= 0.2, "epsilon must lie in (0, 0.2]");
        for (double r : p.xs("r_min")) need(r > 0.0 && r <= 5.0 * e, "r_min must lie in (0, 5 epsilon]");
    } else if (exp == "coupling") {
        need(p.i("d") >= 4 && 2 * p.i("k") <= p.i("d"), "coupling needs d >= 4 and k <= d/2");
        need(p.i("n") >= 1, "coupling needs n >= 1");
        for (double r : p.xs("r")) need(r > 0.0, "r (ball radius) must be positive");
    } else if (exp == "connectivity-trend") {
        need(p.i("d") >= 3, "connectivity-trend needs d >= 3");
        need(p.x("lambda") > 0.0, "connectivity-trend needs lambda > 0");
    } else if (exp == "sample-dump") {
        std::string k = p.s("kind");
        need(k == "lines" || k == "cylinders" || k == "ellipses" || k == "balls",
             "kind must be lines, cylinders, ellipses or balls");
        need(!(p.has("n") && p.has("r")), "give either n (fractal radii) or r (fixed radius), not both");
        if (p.has("r")) need(p.x("r") > 0.0 && p.x("r") <= 1.0, "r must lie in (0, 1]");
        if (k == "ellipses" || k == "balls") need(p.has("n") || p.has("r"), "ellipse dumps need n or r");
    }
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

// deterministic row: the tolerance plays the role of 3 standard errors
void exact(ExperimentReport& rep, const std::string& metric, double est, double target, double tol) {
    rep.add(metric, est, tol / 3.0, target, TargetKind::closed_form);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

Vec zeros() { return Vec{}; }

// ---------------------------------------------------------------- vacancy

void run_vacancy(const ExperimentConfig& cfg, ExperimentReport& rep) {
    P p{cfg.parameters};
    const int d = p.d("d");
    const std::uint64_t seed = *cfg.seed;
    const double c2 = c2_estimate(d, p.i("mc_points"), mix_seed(seed, 1));
    const Constants C = constants(d, c2);
    rep.add_trend("c2 estimate (sup over distance grid)", c2, kNaN, true);
    int salt = 100;
    for (double lam : p.xs("lambda"))
        for (int n : p.is("n")) {
            const double h = std::ldexp(1.0, 2 - n);
            std::vector<double> o(d, 0.0), y(d, 0.0);
            y[0] = h;
            auto v = vacancy_mc(d, d, lam, n, {o, y}, p.i("replicas"), mix_seed(seed, salt++), cfg.threads);
            std::string tag = " lambda=" + g(lam) + " n=" + std::to_string(n);
            rep.add("P(o in V_n)" + tag, v.per_point[0].estimate, v.per_point[0].std_error,
                    vacancy_prob(lam, n), TargetKind::closed_form);
            double bound = std::exp(lam * C.C2) * std::exp2(-2.0 * lam * n) * std::pow(h, -lam);
            rep.add("P(o and y in V_n) |o-y|=2^(2-n) upper bound" + tag, v.joint.estimate, v.joint.std_error,
                    bound, TargetKind::upper_bound);
        }
}

// ---------------------------------------------------------------- measures-selftest

void run_measures(const ExperimentConfig& cfg, ExperimentReport& rep) {
    P p{cfg.parameters};
    const std::uint64_t seed = *cfg.seed;
    double worst = 0.0;
    for (int l = 1; l <= 50; ++l)
        worst = std::max(worst, std::abs(psi(l + 1) - 2.0 * M_PI / l * psi(l - 1)) / psi(l + 1));
    exact(rep, "psi recursion max relative residual l=1..50", worst, 0.0, 1e-12);
    exact(rep, "psi_0", psi(0), 2.0, 1e-12);
    exact(rep, "psi_2", psi(2), 4.0 * M_PI, 1e-11);
    exact(rep, "psi_3", psi(3), 2.0 * M_PI * M_PI, 1e-11);
    exact(rep, "Upsilon_2", upsilon(2), 1.0 / (2.0 * M_PI), 1e-12);
    exact(rep, "Upsilon_3", upsilon(3), 1.0 / (2.0 * M_PI * M_PI), 1e-12);
    exact(rep, "Upsilon_4", upsilon(4), 3.0 / (4.0 * std::pow(M_PI, 3)), 1e-12);
    worst = 0.0;
    for (int d = 1; d <= kMaxDim; ++d) {
        double v = std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
        worst = std::max(worst, std::abs(unit_ball_volume(d) - v) / v);
    }
    exact(rep, "unit ball volume psi_(d-1)/d max relative residual d=1..8", worst, 0.0, 1e-12);
    exact(rep, "nu_ball d=3 r=0.5", nu_ball(3, 0.5), 0.25, 1e-15);
    exact(rep, "vacancy_prob lambda=1 n=3", vacancy_prob(1.0, 3), 0.125, 1e-15);
    exact(rep, "vacancy_prob lambda=2 n=2", vacancy_prob(2.0, 2), 0.0625, 1e-15);
    exact(rep, "xi_tv d=4 k=2 r=1", xi_tv(4, 2, 1.0), 1.0 / M_PI, 1e-12);
    exact(rep, "xi_tv d=3 k=2 r=0.25", xi_tv(3, 2, 0.25), 0.5 / M_PI, 1e-12);
    exact(rep, "xi_tv d=3 k=2 r=1", xi_tv(3, 2, 1.0), 0.5 / M_PI, 1e-12);
    exact(rep, "diam_moment d=4 k=2 n=1", diam_moment(4, 2, 1, 1.0).value, 0.75 * M_PI, 1e-11);
    exact(rep, "diam_moment d=4 k=2 n=2", diam_moment(4, 2, 2, 1.0).value, 8.0, 1e-11);
    rep.add("diam_moment d=4 k=2 n=1 r=1 >= 2r", diam_moment(4, 2, 1, 1.0).value, 0.0, 2.0, TargetKind::lower_bound);
    auto m3 = diam_moment(4, 2, 3, 1.0);
    exact(rep, "diam_moment d=4 k=2 n=3 (infinite)", m3.infinite ? std::numeric_limits<double>::infinity() : m3.value,
          std::numeric_limits<double>::infinity(), 0.0);
    for (int d = 5; d <= kMaxDim; ++d)
        for (int k = 2; k <= d - 3; ++k) {
            double c = idk_closed_form(d, k);
            exact(rep, "idk_quadrature d=" + std::to_string(d) + " k=" + std::to_string(k), idk_quadrature(d, k), c,
                  1e-6 * c);
        }
    exact(rep, "C1 d=2", constants(2, 1.0).C1, std::sqrt(2.0), 1e-12);
    exact(rep, "C3 d=3", constants(3, 1.0).C3, 0.5 * std::log(3.0) + 2.0, 1e-12);
    exact(rep, "C2 d=3 c2=0", constants(3, 0.0).C2, std::log(4.0), 1e-12);

    // line process normalisation: lines of B(o,1) hitting the concentric B(o,r)
    const double lam = p.x("lambda");
    const auto reps = p.i("replicas");
    int salt = 10;
    for (int d : p.is("d"))
        for (double r : p.xs("r")) {
            std::vector<double> cnt(reps);
            const std::uint64_t s = mix_seed(seed, salt++);
            parallel_for(static_cast<size_t>(reps), cfg.threads, [&](size_t i) {
                Rng rng(s, i);
                Vec o = zeros();
                auto L = sample_lines_ball(d, {o.data(), static_cast<size_t>(d)}, 1.0, lam, rng);
                double c = 0;
                for (const auto& l : L.lines) c += line_hits_ball(l, {o.data(), static_cast<size_t>(d)}, r);
                cnt[i] = c;
            });
            auto a = summarize(cnt);
            rep.add("E#lines hitting B(o r) d=" + std::to_string(d) + " r=" + g(r), a.mean, a.std_error(),
                    lam * nu_ball(d, r), TargetKind::closed_form);
        }
    // (a,p) law: |a_head| binned by the CDF implied by density |a|^-(d+1), crossed with the
    // normalised offset (dist/R)^(d-1), which is uniform given a
    for (int d : p.is("d")) {
        Rng rng(mix_seed(seed, salt++), 0);
        std::vector<double> obs(20, 0.0), expct(20, static_cast<double>(p.i("mc_points")) / 20.0);
        Vec o = zeros();
        for (std::int64_t i = 0; i < p.i("mc_points"); ++i) {
            auto L = sample_line_hitting_ball(d, {o.data(), static_cast<size_t>(d)}, 1.0, rng);
            double s2 = norm2(L.a_low(d - 1));
            double F = boost::math::ibeta(0.5 * (d - 1), 0.5, s2 / (1.0 + s2));
            double u = std::pow(point_line_distance({o.data(), static_cast<size_t>(d)}, L), d - 1);
            int b1 = std::min(4, static_cast<int>(F * 5)), b2 = std::min(3, static_cast<int>(u * 4));
            obs[b1 * 4 + b2] += 1;
        }
        double pv = chi2_sf(pearson_chi2(obs, expct), 19);
        rep.add("chi2 p-value of (a p) histogram d=" + std::to_string(d), pv, 0.0, 0.01, TargetKind::lower_bound);
    }
}

// ---------------------------------------------------------------- ellipse-stats

void run_ellipse(const ExperimentConfig& cfg, ExperimentReport& rep) {
    P p{cfg.parameters};
    const int d = p.d("d"), k = p.d("k");
    const std::uint64_t seed = *cfg.seed;
    const double lam = p.x("lambda");
    const auto reps = p.i("replicas");
    const auto N = p.i("mc_points");
    const std::string dk = " d=" + std::to_string(d) + " k=" + std::to_string(k);
    std::vector<double> lo(k, 0.0), hi(k, 1.0);

    int salt = 10;
    for (double r : p.xs("r")) {
        std::vector<double> cnt(reps);
        const std::uint64_t s = mix_seed(seed, salt++);
        parallel_for(static_cast<size_t>(reps), cfg.threads, [&](size_t i) {
            Rng rng(s, i);
            auto E = induced_ellipse_process(d, k, lo, hi, RadiusMode::fixed(r), lam, rng);
            double c = 0;
            for (const auto& e : E.ellipses) {
                bool in = true;
                for (int j = 0; j < k; ++j) in = in && e.center[j] >= 0.0 && e.center[j] <= 1.0;
                c += in;
            }
            cnt[i] = c;
        });
        auto a = summarize(cnt);
        rep.add("ellipse centres per unit area" + dk + " r=" + g(r), a.mean, a.std_error(), lam * xi_tv(d, k, r),
                TargetKind::closed_form);
    }

    // shape law at r = 1
    std::vector<double> D(N);
    {
        const std::uint64_t s = mix_seed(seed, 2);
        const std::int64_t chunk = 10000, nchunks = (N + chunk - 1) / chunk;
        parallel_for(static_cast<size_t>(nchunks), cfg.threads, [&](size_t c) {
            Rng rng(s, c);
            for (std::int64_t i = c * chunk; i < std::min(N, (std::int64_t)(c + 1) * chunk); ++i)
                D[i] = sample_shape(d, k, 1.0, rng).diameter;
        });
    }
    const int n_inf = d - k + 1;  // first infinite moment
    for (int m = 1; m < n_inf; ++m) {
        // diam^m has infinite variance once 2m >= n_inf; then only diam <= T is sampled
        // and the part above T comes from the tail quadrature
        const bool split = 2 * m >= n_inf;
        const double T = 64.0;
        std::vector<double> v(N);
        for (std::int64_t i = 0; i < N; ++i) v[i] = split && D[i] > T ? 0.0 : std::pow(D[i], m);
        auto a = summarize(v);
        double tail = split ? shape_moment_tail(d, k, m, T) : 0.0;
        std::string metric = "E[diam^" + std::to_string(m) + "]" + dk + " r=1";
        if (split) metric += " (MC for diam <= 64 plus quadrature tail " + g(tail) + ")";
        rep.add(metric, a.mean + tail, a.std_error(), diam_moment(d, k, m, 1.0).value, TargetKind::closed_form);
    }

    // heavy tail: batch means of diam^n_inf do not settle as the batch size grows x10
    {
        const int B = 20;
        const std::int64_t base = std::max<std::int64_t>(10, N / 2000);
        const std::uint64_t s = mix_seed(seed, 3);
        std::vector<double> med;
        for (int lev = 0; lev < 3; ++lev) {
            const std::int64_t size = base * static_cast<std::int64_t>(std::pow(10, lev));
            std::vector<double> means(B);
            parallel_for(B, cfg.threads, [&](size_t b) {
                Rng rng(s, lev * B + b);
                double acc = 0.0;
                for (std::int64_t i = 0; i < size; ++i) acc += std::pow(sample_shape(d, k, 1.0, rng).diameter, n_inf);
                means[b] = acc / size;
            });
            std::sort(means.begin(), means.end());
            med.push_back(0.5 * (means[B / 2 - 1] + means[B / 2]));
            rep.add_trend("median batch mean of diam^" + std::to_string(n_inf) + dk + " batch size " +
                              std::to_string(size),
                          med.back(), kNaN, true);
        }
        double tail_c = std::pow(1e3, n_inf) * shape_tail_prob(d, k, 1e3);
        rep.add_trend("predicted growth per x10 (tail constant * ln 10)" + dk, tail_c * std::log(10.0), kNaN, true);
        bool grows = med[1] > med[0] && med[2] > med[1];
        rep.add_trend("diam^" + std::to_string(n_inf) + " batch medians strictly increasing" + dk, med[2] - med[0],
                      kNaN, grows);
    }

    // tail of the fixed-radius law, Monte Carlo against quadrature
    {
        std::vector<double> x, y;
        for (double tau : {4.0, 8.0, 16.0, 32.0, 64.0}) {
            double c = static_cast<double>(std::count_if(D.begin(), D.end(), [&](double v) { return v >= tau; }));
            double pr = c / N, tv = xi_tv(d, k, 1.0);
            if (tau == 4.0 || tau == 16.0)
                rep.add("xi_k1(diam >= " + g(tau) + ")" + dk, tv * pr, tv * std::sqrt(pr * (1 - pr) / N),
                        xi_fixed_tail(d, k, tau), TargetKind::closed_form);
            if (c >= 10) {
                x.push_back(std::log(tau));
                y.push_back(std::log(tv * pr));
            }
        }
        if (x.size() >= 3) {
            auto f = linear_fit(x, y);
            rep.add_tol("MC log-log tail slope tau in [4 64] (tol 0.3)" + dk, f.slope, f.slope_se, -(d - k + 1.0),
                        0.3);
        }
    }
    if (d >= 4 && 2 * k <= d) {
        std::vector<double> x, y;
        for (double tau : {4.0, 8.0, 16.0, 32.0, 64.0}) {
            x.push_back(std::log(tau));
            y.push_back(std::log(xi_fractal_tail(d, k, tau)));
        }
        auto f = linear_fit(x, y);
        rep.add_tol("fractal tail log-log slope tau in [4 64] (tol 0.1)" + dk, f.slope, f.slope_se, -(d - k + 1.0),
                    0.1);
        int sl = 20;
        for (double tau : {4.0, 16.0}) {
            auto lhs = xi_fractal_tail_mc(d, k, tau, N, mix_seed(seed, sl++));
            rep.add("fractal tail radial integral vs by-parts identity tau=" + g(tau) + dk, lhs.estimate,
                    lhs.std_error, xi_fractal_tail(d, k, tau), TargetKind::closed_form);
        }
    }

    // geometry oracle: ellipse membership against cylinder distance
    {
        Rng rng(mix_seed(seed, 4), 0);
        std::int64_t disagree = 0, checked = 0;
        for (int t = 0; t < 10000; ++t) {
            double sc = std::array<double, 3>{0.2, 1.0, 5.0}[t % 3];
            double ah[kMaxDim], ph[kMaxDim];
            for (int i = 0; i < d - 1; ++i) {
                ah[i] = sc * normal(rng);
                ph[i] = uniform(rng, -1.0, 1.0);
            }
            Cylinder C{LineParam::from_chart(d, {ah, static_cast<size_t>(d - 1)}, {ph, static_cast<size_t>(d - 1)}),
                       uniform01(rng)};
            auto E = cylinder_subspace_ellipse(C, k);
            Vec yv{};
            for (int i = 0; i < k; ++i)
                yv[i] = E ? E->center[i] + 1.3 * E->major_len * uniform(rng, -1.0, 1.0) : uniform(rng, -2.0, 2.0);
            Vec x = embed({yv.data(), static_cast<size_t>(k)}, d);
            double dist = point_line_distance({x.data(), static_cast<size_t>(d)}, C.line);
            if (std::abs(dist - C.r) < 1e-10) continue;
            ++checked;
            bool in_cyl = dist < C.r;
            bool in_ell = E && ellipse_contains(*E, {yv.data(), static_cast<size_t>(k)});
            disagree += in_cyl != in_ell;
        }
        exact(rep, "ellipse vs cylinder membership disagreements (" + std::to_string(checked) + " triples)" + dk,
              static_cast<double>(disagree), 0.0, 0.5);

        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            std::optional<Ellipsoid> E;
            while (!E) {
                double ah[kMaxDim], ph[kMaxDim];
                for (int i = 0; i < d - 1; ++i) {
                    ah[i] = normal(rng);
                    ph[i] = uniform(rng, -0.5, 0.5);
                }
                E = cylinder_subspace_ellipse(
                    {LineParam::from_chart(d, {ah, static_cast<size_t>(d - 1)}, {ph, static_cast<size_t>(d - 1)}),
                     uniform(rng, 0.2, 1.0)},
                    k);
            }
            Vec h = ellipse_half_extents(*E);
            double box = 1.0;
            for (int i = 0; i < k; ++i) box *= 2.0 * h[i];
            const int M = 100000;
            int hit = 0;
            Vec yv{};
            for (int j = 0; j < M; ++j) {
                for (int i = 0; i < k; ++i) yv[i] = E->center[i] + h[i] * uniform(rng, -1.0, 1.0);
                hit += ellipse_contains(*E, {yv.data(), static_cast<size_t>(k)});
            }
            double vol = ellipse_stats(*E).volume;
            worst = std::max(worst, std::abs(box * hit / M - vol) / vol);
        }
        rep.add_tol("ellipse volume vs hit-or-miss max relative error (50 shapes; tol 0.01)" + dk, worst, 0.0, 0.0,
                    0.01);
    }
}

// ---------------------------------------------------------------- boxcount / dimension

std::string level_table(const BoxSurvey& s) {
    std::ostringstream os;
    for (int n = s.n_min; n <= s.n_max; ++n) {
        auto m = s.mean_m(n), M = s.mean_M(n);
        os << s.d << ',' << s.k << ',' << fmt_num(s.lambda) << ',' << n << ',' << fmt_num(m.estimate) << ','
           << fmt_num(m.std_error) << ',' << fmt_num(M.estimate) << ',' << fmt_num(M.std_error) << ','
           << s.replicas << "\n";
    }
    return os.str();
}

void run_boxcount(const ExperimentConfig& cfg, ExperimentReport& rep) {
    P p{cfg.parameters};
    const int d = p.d("d"), k = p.d("k"), nmax = p.d("n");
    const Constants C = constants(d, 0.0);
    std::string table = "d,k,lambda,n,mean_mn,se_mn,mean_Mn,se_Mn,replicas\n";
    int salt = 10;
    for (double lam : p.xs("lambda")) {
        auto s = box_survey(d, k, lam, nmax, p.i("replicas"), mix_seed(*cfg.seed, salt++), cfg.threads, 0);
        table += level_table(s);
        std::int64_t viol = 0;
        for (int n = 0; n <= nmax; ++n)
            for (std::int64_t r = 0; r < s.replicas; ++r)
                viol += !(s.m_counts[n][r] <= s.M_counts[n][r] && s.M_counts[n][r] <= std::ldexp(1.0, k * n));
        std::string tag = " lambda=" + g(lam);
        exact(rep, "|m_n| <= |M_n| <= 2^(kn) violations" + tag, static_cast<double>(viol), 0.0, 0.5);
        for (int n = 1; n <= nmax; ++n) {
            double cells = std::ldexp(1.0, k * n);
            auto m = s.mean_m(n), M = s.mean_M(n);
            std::string t = tag + " n=" + std::to_string(n);
            rep.add("E|m_n|/2^(kn) lower bound" + t, m.estimate / cells, m.std_error / cells,
                    std::exp(-lam * C.C1) * std::exp2(-lam * n), TargetKind::lower_bound);
            if (std::ldexp(std::sqrt(static_cast<double>(d)), -n) <= 1.0)
                rep.add("E|M_n|/2^(kn) upper bound" + t, M.estimate / cells, M.std_error / cells,
                        std::exp(lam * C.C3) * std::exp2(-lam * n), TargetKind::upper_bound);
        }
    }
    if (!cfg.table.empty()) write_file(cfg.table, table);
}

void run_dimension(const ExperimentConfig& cfg, ExperimentReport& rep) {
    P p{cfg.parameters};
    const int d = p.d("d"), k = p.d("k");
    const auto ns = p.is("n");
    const int nmax = *std::max_element(ns.begin(), ns.end());
    const std::uint64_t seed = *cfg.seed;
    double c2 = -1.0;
    auto get_c2 = [&] {
        if (c2 < 0.0) {
            c2 = c2_estimate(d, 200000, mix_seed(seed, 1));
            rep.add_trend("c2 estimate (sup over distance grid)", c2, kNaN, true);
        }
        return c2;
    };
    std::string table = "d,k,lambda,n,mean_mn,se_mn,mean_Mn,se_Mn,replicas\n";
    int salt = 10;
    for (double lam : p.xs("lambda")) {
        std::string tag = " lambda=" + g(lam);
        if (p.has("fit_range")) {
            auto fr = p.is("fit_range");
            auto s = box_survey(d, k, lam, nmax, p.i("replicas"), mix_seed(seed, salt++), cfg.threads, 0);
            table += level_table(s);
            std::string metric = "log2 E|M_n| slope n in [" + std::to_string(fr[0]) + " " + std::to_string(fr[1]) +
                                 "] (tol 0.15)" + tag;
            try {
                auto f = dimension_fit(s, fr[0], fr[1], mix_seed(seed, salt++));
                rep.add_tol(metric, f.slope, f.stderr_, k - lam, 0.15);
            } catch (const std::runtime_error&) {
                rep.add_tol(metric, kNaN, kNaN, k - lam, 0.15);
            }
            if (lam < k) {
                double alive = 0.0;
                for (double v : s.M_counts[nmax]) alive += v > 0.0;
                double pr = alive / s.replicas;
                rep.add("P(M_n nonempty) >= survival lower bound n=" + std::to_string(nmax) + tag, pr,
                        std::sqrt(pr * (1 - pr) / s.replicas), survival_lower_bound(d, k, lam, get_c2()),
                        TargetKind::lower_bound);
            }
        }
        if (p.has("mc_points") && lam < k) {
            std::optional<double> rexp;
            if (p.has("r")) rexp = p.x("r");
            for (int n : ns) {
                auto z = zeta_estimates(d, k, lam, n, p.i("mc_points"), p.i("mc_points"), rexp, p.i("replicas"),
                                        mix_seed(seed, salt++), cfg.threads);
                std::string t = tag + " n=" + std::to_string(n);
                rep.add("E||zeta_n||_TV" + t, z.tv_estimate, z.tv_se, 1.0, TargetKind::closed_form);
                if (z.energy_r)
                    rep.add("E I_r(zeta_n) upper bound r=" + g(*rexp) + t, *z.energy_r, z.energy_se,
                            energy_upper_bound(d, k, lam, *rexp, get_c2()), TargetKind::upper_bound);
            }
        }
    }
    if (!cfg.table.empty() && p.has("fit_range")) write_file(cfg.table, table);
}

// ---------------------------------------------------------------- lr1

void run_lr1(const ExperimentConfig& cfg, ExperimentReport& rep) {
    P p{cfg.parameters};
    const double eps = p.x("epsilon"), lam = p.x("lambda");
    const auto reps = p.i("replicas");
    const double lo[2] = {-0.25 * eps, -0.25 * eps}, hi[2] = {0.25 * eps, 0.25 * eps};
    std::vector<double> xs, means, ses;
    int salt = 10;
    for (double rmin : p.xs("r_min")) {
        std::vector<double> cnt(reps), viol(reps);
        const std::uint64_t s = mix_seed(*cfg.seed, salt++);
        parallel_for(static_cast<size_t>(reps), cfg.threads, [&](size_t i) {
            Rng rng(s, i);
            auto cyl = sample_large_sections(lam, lo, hi, rmin, 10.0 * eps, rng);
            ProcessSample e = cyl;
            e.kind = ItemKind::ellipses;
            e.cylinders.clear();
            for (const auto& C : cyl.cylinders)
                if (auto E = cylinder_subspace_ellipse(C, 2)) e.ellipses.push_back(*E);
            auto c = lr1_census(e, eps);
            cnt[i] = static_cast<double>(c.count);
            viol[i] = static_cast<double>(c.not_in_lr);
        });
        auto a = summarize(cnt);
        std::string tag = " epsilon=" + g(eps) + " r_min=" + g(rmin);
        rep.add("LR_1 census mean" + tag, a.mean, a.std_error(), lr1_expected(lam, eps, rmin), TargetKind::closed_form);
        double v = 0.0;
        for (double x : viol) v += x;
        exact(rep, "LR_1 members failing the LR side test" + tag, v, 0.0, 0.5);
        double disp = a.mean > 0.0 ? a.variance() / a.mean : kNaN;
        double n = static_cast<double>(reps);
        rep.add_tol("census dispersion index var/mean (tol 0.1)" + tag, disp,
                    a.mean > 0.0 ? std::sqrt((1.0 / a.mean + 2.0) / n) : kNaN, 1.0, 0.1);
        xs.push_back(std::log(1.0 / rmin));
        means.push_back(a.mean);
        ses.push_back(a.std_error());
    }
    if (xs.size() >= 3) {
        auto f = linear_fit(xs, means);
        double xb = 0.0, sxx = 0.0, var = 0.0;
        for (double x : xs) xb += x / xs.size();
        for (double x : xs) sxx += (x - xb) * (x - xb);
        for (size_t i = 0; i < xs.size(); ++i) var += std::pow((xs[i] - xb) / sxx * ses[i], 2);
        rep.add("census mean slope in ln(1/r_min)", f.slope, std::sqrt(var), lam * upsilon(3) / 500.0,
                TargetKind::closed_form);
        rep.add("census mean vs ln(1/r_min) linear fit R^2", f.r2, 0.0, 0.99, TargetKind::lower_bound);
    }
}

// ---------------------------------------------------------------- coupling

void run_coupling(const ExperimentConfig& cfg, ExperimentReport& rep) {
    P p{cfg.parameters};
    const int d = p.d("d"), k = p.d("k"), n = p.d("n");
    const double lam = p.x("lambda"), rmin = std::ldexp(1.0, -n);
    const double delta = p.has("delta") ? p.x("delta") : std::ldexp(1.0, -(n + 2));
    const auto reps = p.i("replicas");
    const std::uint64_t seed = *cfg.seed;
    const std::string dk = " d=" + std::to_string(d) + " k=" + std::to_string(k);
    std::vector<double> lo(k, 0.0), hi(k, 1.0);
    const double c = std::ldexp(xi_tv(d, k, 1.0), -k), cap = c * BetaTable::get(d, k).beta0();

    std::vector<double> subset_v(reps), cover_v(reps), dom_v(reps), incl_v(reps), dom_count(reps);
    const std::uint64_t s = mix_seed(seed, 10);
    parallel_for(static_cast<size_t>(reps), cfg.threads, [&](size_t i) {
        Rng rng(s, i);
        auto E = induced_ellipse_process(d, k, lo, hi, RadiusMode::truncated(n), lam, rng);
        auto B = induced_ball_process(E);
        auto cp = thinning_coupling(B, d, k, rmin, rmin, rng);
        // thinned objects must reappear verbatim among the dominating ones
        double sv = 0;
        for (const auto& t : cp.thinned.balls) {
            bool found = std::any_of(cp.dominating.balls.begin(), cp.dominating.balls.end(), [&](const Ball& b) {
                return b.R == t.R && std::equal(b.center.begin(), b.center.begin() + k, t.center.begin());
            });
            sv += !found;
        }
        subset_v[i] = sv;
        // ellipse points lie in the circumscribed ball
        double cv = 0;
        for (const auto& e : E.ellipses) {
            Vec h = ellipse_half_extents(e);
            Vec y{};
            for (int t = 0; t < 20; ++t) {
                double r2 = 0.0;
                for (int j = 0; j < k; ++j) {
                    y[j] = e.center[j] + h[j] * uniform(rng, -1.0, 1.0);
                    r2 += (y[j] - e.center[j]) * (y[j] - e.center[j]);
                }
                if (ellipse_contains(e, {y.data(), static_cast<size_t>(k)}) && r2 > e.major_len * e.major_len)
                    cv += 1;
            }
        }
        cover_v[i] = cv;
        double cnt = 0;
        for (const auto& b : cp.dominating.balls) {
            bool in = b.R >= rmin && b.R <= 2.0;
            for (int j = 0; j < k; ++j) in = in && b.center[j] >= 0.0 && b.center[j] <= 1.0;
            cnt += in;
        }
        dom_count[i] = cnt;
        if (k == 2) {
            Rect w{0.0, 1.0, 0.0, 1.0};
            auto ge = rasterize(E, w, delta), gb = rasterize(B, w, delta);
            auto gt = rasterize(cp.thinned, w, delta), gd = rasterize(cp.dominating, w, delta);
            double a = 0, b = 0;
            for (size_t j = 0; j < ge.covered.size(); ++j) {
                a += ge.covered[j] && !gb.covered[j];
                b += gt.covered[j] && !gd.covered[j];
            }
            incl_v[i] = a;
            dom_v[i] = b;
        }
    });
    auto total = [](const std::vector<double>& v) {
        double t = 0.0;
        for (double x : v) t += x;
        return t;
    };
    exact(rep, "thinned balls missing from the dominating set" + dk, total(subset_v), 0.0, 0.5);
    exact(rep, "ellipse points outside their ball (20 probes per ellipse)" + dk, total(cover_v), 0.0, 0.5);
    if (k == 2) {
        exact(rep, "cells covered by ellipses but not by balls" + dk, total(incl_v), 0.0, 0.5);
        exact(rep, "cells covered by thinned but not by dominating balls" + dk, total(dom_v), 0.0, 0.5);
    }
    auto a = summarize(dom_count);
    rep.add("dominating balls centred in the patch with R in [R_min 2]" + dk, a.mean, a.std_error(),
            lam * cap * (std::pow(rmin, -k) - std::pow(2.0, -k)) / k, TargetKind::closed_form);
    const BetaTable& bt = BetaTable::get(d, k);
    int salt = 20;
    for (double R : p.xs("r")) {
        auto mc = beta_ratio_mc(d, k, R, p.i("mc_points"), mix_seed(seed, salt++));
        rep.add("beta_R/beta_0 table vs two-pass MC R=" + g(R) + dk, bt(R) / bt.beta0(), mc.std_error,
                mc.estimate, TargetKind::closed_form);
    }
}

// ---------------------------------------------------------------- connectivity-trend

void run_trend(const ExperimentConfig& cfg, ExperimentReport& rep) {
    P p{cfg.parameters};
    const int d = p.d("d");
    const double lam = p.x("lambda");
    auto ns = p.is("n");
    std::sort(ns.begin(), ns.end());
    auto res = connectivity_trend(d, lam, ns, Rect{0.0, 1.0, 0.0, 1.0}, p.i("replicas"),
                                  p.has("delta") ? p.x("delta") : 0.0, mix_seed(*cfg.seed, 10), cfg.threads);
    std::int64_t viol = 0;
    const std::string tag = " d=" + std::to_string(d) + " lambda=" + g(lam);
    for (const auto& c : res) {
        std::string t = tag + " n=" + std::to_string(c.n);
        rep.add_trend("vacant LR crossing frequency" + t, c.frequency, c.se, true);
        rep.add_trend("ball-model vacant LR crossing frequency" + t, c.ball_frequency, c.ball_se, true);
        rep.add_trend("H_empty frequency" + t, c.h_empty_frequency, c.h_empty_se, true);
        viol += c.coupling_violations;
    }
    exact(rep, "replicas with ball crossing but no ellipse crossing" + tag, static_cast<double>(viol), 0.0, 0.5);
    if (res.size() >= 2) {
        if (d >= 4) {
            const auto &a = res[res.size() - 2], &b = res.back();
            double se = std::sqrt(a.se * a.se + b.se * b.se);
            bool ok = std::abs(a.frequency - b.frequency) <= 2.0 * se;
            rep.add_trend("stable: |f(n=" + std::to_string(a.n) + ") - f(n=" + std::to_string(b.n) + ")| within 2 SE" +
                              tag,
                          b.frequency - a.frequency, se, ok);
        } else {
            bool ok = true;
            for (size_t i = 1; i < res.size(); ++i) ok = ok && res[i].frequency < res[i - 1].frequency;
            rep.add_trend("frequency strictly decreasing in n" + tag, res.back().frequency - res.front().frequency,
                          kNaN, ok);
        }
    }
}

// ---------------------------------------------------------------- sample-dump

void run_dump(const ExperimentConfig& cfg, ExperimentReport& rep) {
    P p{cfg.parameters};
    if (cfg.table.empty()) bad("sample-dump needs an item file (--table)");
    const int d = p.d("d"), k = p.d("k");
    const double lam = p.x("lambda");
    const std::string kind = p.s("kind");
    Rng rng(*cfg.seed, 0);
    Vec o = zeros();
    CSpan oc{o.data(), static_cast<size_t>(d)};
    ProcessSample S;
    double expected = kNaN;
    if (kind == "lines") {
        S = sample_lines_ball(d, oc, 1.0, lam, rng);
        expected = lam;
    } else if (kind == "cylinders") {
        if (p.has("n")) {
            S = sample_fractal_cylinders(d, oc, 1.0, p.d("n"), lam, rng);
            expected = lam * FractalRadiusLaw(d, 1.0, std::ldexp(1.0, -p.d("n"))).mass();
        } else {
            double r = p.has("r") ? p.x("r") : 1.0;
            S = sample_fixed_cylinders(d, oc, 1.0, r, lam, rng);
            expected = lam * std::pow(1.0 + r, d - 1);
        }
    } else {
        std::vector<double> lo(k, 0.0), hi(k, 1.0);
        auto mode = p.has("n") ? RadiusMode::truncated(p.d("n")) : RadiusMode::fixed(p.x("r"));
        S = induced_ellipse_process(d, k, lo, hi, mode, lam, rng);
        if (kind == "balls") S = induced_ball_process(S);
    }

    std::ostringstream os;
    auto num = [](double x) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    auto header_seq = [&](const char* name, int m) {
        for (int i = 1; i <= m; ++i) os << ',' << name << '_' << i;
    };
    if (kind == "lines" || kind == "cylinders") {
        os << 'd';
        header_seq("a", d - 1);
        header_seq("p", d - 1);
        if (kind == "cylinders") os << ",r";
        os << "\n";
        auto line = [&](const LineParam& L) {
            os << L.d;
            for (int i = 0; i < d - 1; ++i) os << ',' << num(L.a[i]);
            for (int i = 0; i < d - 1; ++i) os << ',' << num(L.p[i]);
        };
        for (const auto& L : S.lines) {
            line(L);
            os << "\n";
        }
        for (const auto& C : S.cylinders) {
            line(C.line);
            os << ',' << num(C.r) << "\n";
        }
    } else if (kind == "ellipses") {
        os << 'k';
        header_seq("center", k);
        header_seq("major_dir", k);
        os << ",major_len,minor_len\n";
        for (const auto& E : S.ellipses) {
            os << E.k;
            for (int i = 0; i < k; ++i) os << ',' << num(E.center[i]);
            for (int i = 0; i < k; ++i) os << ',' << num(E.major_dir[i]);
            os << ',' << num(E.major_len) << ',' << num(E.minor_len) << "\n";
        }
    } else {
        os << 'k';
        header_seq("center", k);
        os << ",R\n";
        for (const auto& b : S.balls) {
            os << b.k;
            for (int i = 0; i < k; ++i) os << ',' << num(b.center[i]);
            os << ',' << num(b.R) << "\n";
        }
    }
    write_file(cfg.table, os.str());
    double count = static_cast<double>(S.size());
    if (std::isfinite(expected))
        rep.add(kind + " in window (one realisation)", count, std::sqrt(expected), expected, TargetKind::closed_form);
    else
        rep.add_trend(kind + " meeting the patch (one realisation)", count, kNaN, true);
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {"vacancy",      "boxcount", "dimension",
                                                   "ellipse-stats", "measures-selftest", "lr1",
                                                   "coupling",     "connectivity-trend", "sample-dump"};
    return names;
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) bad("config must be a JSON object");
    ExperimentConfig c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const json& v = it.value();
        if (key == "experiment") {
            if (!v.is_string()) bad("'experiment' must be a string");
            c.experiment = v.get<std::string>();
        } else if (key == "seed") {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                bad("'seed' must be a non-negative integer");
            c.seed = v.get<std::uint64_t>();
        } else if (key == "format") {
            if (!v.is_string()) bad("'format' must be a string");
            c.format = parse_format(v.get<std::string>());
        } else if (key == "out") {
            if (!v.is_string()) bad("'out' must be a string");
            c.out = v.get<std::string>();
        } else if (key == "table") {
            if (!v.is_string()) bad("'table' must be a string");
            c.table = v.get<std::string>();
        } else if (key == "threads") {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0) bad("'threads' must be a non-negative integer");
            c.threads = v.get<int>();
        } else if (key == "parameters") {
            if (!v.is_object()) bad("'parameters' must be an object");
            c.parameters = v;
        } else {
            bad("unknown config key '" + key + "'");
        }
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) bad("cannot read config '" + path + "'");
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        bad("config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

void validate(ExperimentConfig& cfg) {
    auto it = schemas().find(cfg.experiment);
    if (it == schemas().end()) bad("unknown experiment '" + cfg.experiment + "'");
    if (!cfg.seed) bad("a seed is required (--seed or \"seed\" in the config)");
    if (!cfg.parameters.is_object()) bad("parameters must be an object");
    json out = json::object();
    for (auto p = cfg.parameters.begin(); p != cfg.parameters.end(); ++p) {
        auto s = std::find_if(it->second.begin(), it->second.end(), [&](const PSpec& x) { return p.key() == x.key; });
        if (s == it->second.end()) {
            std::string allowed;
            for (const auto& x : it->second) allowed += std::string(allowed.empty() ? "" : ", ") + x.key;
            bad("unknown parameter '" + p.key() + "' for " + cfg.experiment + " (allowed: " + allowed + ")");
        }
    }
    for (const auto& s : it->second) {
        const json* v = cfg.parameters.contains(s.key) ? &cfg.parameters[s.key] : &s.def;
        out[s.key] = v->is_null() ? json() : coerce(cfg.experiment, s, *v);
    }
    check_ranges(cfg.experiment, out);
    cfg.parameters = out;
}

ExperimentReport run(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentReport rep;
    rep.provenance.experiment = cfg.experiment;
    rep.provenance.seed = *cfg.seed;
    rep.provenance.commit = FPC_COMMIT;
    rep.provenance.parameters = cfg.parameters.dump();
    const std::string& e = cfg.experiment;
    if (e == "vacancy") run_vacancy(cfg, rep);
    else if (e == "measures-selftest") run_measures(cfg, rep);
    else if (e == "ellipse-stats") run_ellipse(cfg, rep);
    else if (e == "boxcount") run_boxcount(cfg, rep);
    else if (e == "dimension") run_dimension(cfg, rep);
    else if (e == "lr1") run_lr1(cfg, rep);
    else if (e == "coupling") run_coupling(cfg, rep);
    else if (e == "connectivity-trend") run_trend(cfg, rep);
    else if (e == "sample-dump") run_dump(cfg, rep);
    else bad("unknown experiment '" + e + "'");
    rep.provenance.runtime_seconds = elapsed(t0);
    return rep;
}

}  // namespace fpc
