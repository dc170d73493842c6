#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fpc/measures.hpp"
#include "fpc/samplers.hpp"

namespace fpc {

struct VacancyResult {
    std::vector<McEstimate> per_point;
    McEstimate joint;                        // all points vacant simultaneously
    std::vector<std::uint8_t> joint_vacant;  // per replica
};

// points are given in H_k coordinates (k <= d)
VacancyResult vacancy_mc(int d, int k, double lambda, int n, const std::vector<std::vector<double>>& points,
                         std::int64_t replicas, std::uint64_t seed, int threads = 0);

// per-level, per-replica box counts on [0,1]^k x {0}
struct BoxSurvey {
    int d = 3;
    int k = 2;
    double lambda = 0.0;
    int n_min = 0;
    int n_max = 0;
    std::int64_t replicas = 0;
    std::vector<std::vector<double>> m_counts;  // [level - n_min][replica]
    std::vector<std::vector<double>> M_counts;

    McEstimate mean_m(int n) const;
    McEstimate mean_M(int n) const;
};

// box counts of one realisation for levels n_min..n_max (nested truncations)
struct LevelCounts {
    std::vector<std::int64_t> m, M;
};
LevelCounts survey_realisation(const ProcessSample& cylinders, int k, int n_min, int n_max);

BoxSurvey box_survey(int d, int k, double lambda, int n_max, std::int64_t replicas, std::uint64_t seed,
                     int threads = 0, int n_min = 0);

struct DimensionFit {
    double slope = 0.0;
    double stderr_ = 0.0;
};
DimensionFit dimension_fit(const BoxSurvey& survey, int n_lo, int n_hi, std::uint64_t seed = 1);

struct ZetaEstimate {
    int n = 0;
    double tv_estimate = 0.0;
    double tv_se = 0.0;
    std::optional<double> energy_r;
    double energy_se = 0.0;
    std::int64_t replicas = 0;
    std::int64_t mc_points = 0;
    std::int64_t pair_points = 0;
};

ZetaEstimate zeta_estimates(int d, int k, double lambda, int n, std::int64_t mc_points,
                            std::int64_t pair_points, std::optional<double> r_exponent,
                            std::int64_t replicas, std::uint64_t seed, int threads = 0);

}  // namespace fpc
